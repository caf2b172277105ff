import json
import math

import numpy as np
import pytest
from scipy.special import iv

from sigkern.cli import build_parser, main
from sigkern.paths import PiecewiseLinearPath, write_path_csv


@pytest.fixture
def files(tmp_path):
    a = PiecewiseLinearPath([0, 1], [[0.0], [1.0]])
    b = PiecewiseLinearPath([0, 0.5, 1], [[0.0, 0.0], [0.3, 0.2], [0.1, 0.6]])
    c = PiecewiseLinearPath([0, 0.5, 1], [[0.0, 0.0], [-0.2, 0.4], [0.5, 0.5]])
    write_path_csv(a, tmp_path / "a.csv")
    d = tmp_path / "set"
    d.mkdir()
    write_path_csv(b, d / "p1.csv")
    write_path_csv(c, d / "p2.csv")
    return tmp_path


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kernel(files, capsys):
    out = files / "surf.csv"
    code, text, _ = _run(capsys, ["kernel", "--path-a", str(files / "a.csv"), "--path-b",
                                  str(files / "a.csv"), "--refine", "512", "--out", str(out)])
    assert code == 0
    corner = float(text.split()[1])
    assert corner == pytest.approx(iv(0, 2.0), abs=1e-4)
    assert out.read_text().splitlines()[0] == "s,t,re,im"


def test_phikernel_methods(files, capsys):
    p1, p2 = str(files / "set" / "p1.csv"), str(files / "set" / "p2.csv")
    code, text, _ = _run(capsys, ["phikernel", "--path-a", p1, "--path-b", p2,
                                  "--phi", "uniform", "--dump", str(files / "n.csv")])
    assert code == 0 and math.isfinite(float(text))
    assert len((files / "n.csv").read_text().splitlines()) == 21
    code, text, _ = _run(capsys, ["phikernel", "--path-a", p1, "--path-b", p2,
                                  "--method", "fourier", "--phi", "expcos", "--nodes", "32"])
    lines = text.splitlines()
    assert code == 0 and lines[0].startswith("imag_residue")
    code, text, _ = _run(capsys, ["phikernel", "--path-a", p1, "--path-b", p2,
                                  "--method", "mellin", "--beta", "0.5"])
    assert code == 0 and float(text) > 0


def test_develop_and_wiener(files, capsys):
    a = str(files / "a.csv")
    code, text, _ = _run(capsys, ["develop", "--path", a])
    assert code == 0
    assert float(text.splitlines()[-1].split()[1]) == pytest.approx(math.cosh(1.0))
    code, text, _ = _run(capsys, ["wiener", "--path", a, "--phi", "half-factorial"])
    assert float(text) == pytest.approx(math.cosh(math.sqrt(0.5)), rel=1e-14)
    code, text, _ = _run(capsys, ["wiener", "--path", a, "--phi", "one", "--contour",
                                  "cotangent", "--contour-n", "40"])
    assert code == 0 and float(text) > 1


def test_mmd_and_optimal(files, capsys):
    d = str(files / "set")
    code, text, _ = _run(capsys, ["mmd", "--paths", d])
    rep = json.loads(text)
    assert code == 0 and rep["lambda"] == [0.5, 0.5] and rep["paths"] == ["p1.csv", "p2.csv"]
    out = files / "opt.json"
    code, _, _ = _run(capsys, ["optimal", "--paths", d, "--phi", "one", "--out", str(out)])
    rep2 = json.loads(out.read_text())
    assert code == 0 and rep2["mmd"] <= rep["mmd"] + 1e-12
    assert rep2["kkt_residual"] <= 1e-9
    w = files / "w.csv"
    w.write_text("0.2,0.8\n")
    code, text, _ = _run(capsys, ["mmd", "--paths", d, "--weights", str(w)])
    assert json.loads(text)["lambda"] == [0.2, 0.8]
    w.write_text("0.2,0.2\n")
    code, _, err = _run(capsys, ["mmd", "--paths", d, "--weights", str(w)])
    assert code == 2 and "sum to 1" in err


def test_quad_and_rgamma(capsys):
    code, text, _ = _run(capsys, ["quad", "--family", "legendre01", "--n", "2"])
    rows = [list(map(float, line.split(","))) for line in text.splitlines()[1:]]
    np.testing.assert_allclose(rows, [[0.5 - 0.5 / 3**0.5, 0.5], [0.5 + 0.5 / 3**0.5, 0.5]])
    code, text, _ = _run(capsys, ["quad", "--family", "rayleigh", "--n", "3"])
    assert code == 0 and len(text.splitlines()) == 4
    code, text, _ = _run(capsys, ["rgamma", "--p", "0.5", "--method", "hyperbolic"])
    assert float(text.split()[0]) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-10)
    code, _, err = _run(capsys, ["rgamma", "--p", "0.5", "--method", "circle"])
    assert code == 2 and "integer" in err


def test_verify(files, capsys):
    p1, p2 = str(files / "set" / "p1.csv"), str(files / "set" / "p2.csv")
    code, text, _ = _run(capsys, ["verify", "--path-a", p1, "--path-b", p2, "--refine", "256"])
    vals = dict(line.split() for line in text.splitlines())
    assert float(vals["difference"]) < 1e-5


def test_experiment(files, capsys):
    cfg = files / "cfg.json"
    cfg.write_text(json.dumps({"kind": "bm", "n": 3, "m": 5, "trials": 2}))
    out = files / "rep.csv"
    code, text, _ = _run(capsys, ["experiment", "--config", str(cfg), "--out", str(out)])
    assert code == 0 and "rows written" in text
    assert out.read_text().startswith("row_type,kind")


def test_errors(files, capsys):
    code, _, err = _run(capsys, ["develop", "--path", str(files / "missing.csv")])
    assert code == 2 and "error" in err
    with pytest.raises(SystemExit):
        build_parser().parse_args(["quad", "--family", "nope", "--n", "2"])
