"""Path generators, the cubature asset, and the Monte Carlo experiment runner.

Randomness is drawn from Philox streams keyed by ``(seed, trial, path, stream)``
so every path's Brownian sample, sinusoid phases and spike time are fixed by
their indices alone. Contamination levels therefore share common random
numbers, and results do not depend on execution order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import measures, oracle
from .measures import DiscreteMeasure, GramSystem, KernelConfig
from .paths import PiecewiseLinearPath
from .weights import phi_truncated

STREAM_BM, STREAM_PHASE, STREAM_SPIKE = 0, 1, 2
KINDS = ("bm", "cubature-sweep", "sine", "spike")
CSV_COLUMNS = ("row_type", "kind", "phi", "param_name", "param", "trial", "measure",
               "statistic", "alignment", "mmd")
SWEEP_COLUMNS = ("m", "d_optimal", "d_cubature", "d_empirical", "ratio")


def generator(seed: int, trial: int, path: int, stream: int) -> np.random.Generator:
    """Independent counter-based stream for one (trial, path, stream) triple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(
        [int(seed), int(trial), int(path), int(stream)])))


def time_grid(m: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, m)


def sample_brownian(n: int, m: int, d: int, seed: int, trial: int = 0) -> list:
    """``n`` Brownian paths on ``m`` equally spaced points of [0, 1], started at the origin."""
    if m < 2 or n < 1 or d < 1:
        raise ValueError("need n >= 1, m >= 2, d >= 1")
    t = time_grid(m)
    out = []
    for i in range(n):
        inc = generator(seed, trial, i, STREAM_BM).normal(scale=math.sqrt(1.0 / (m - 1)),
                                                           size=(m - 1, d))
        out.append(PiecewiseLinearPath(t, np.vstack([np.zeros((1, d)), np.cumsum(inc, axis=0)])))
    return out


def sine_contaminate(paths, eps: float, nu: float, seed: int, trial: int = 0) -> list:
    """Add ``eps sin(2 pi nu t - phase)`` per coordinate, phases uniform on [0, 2 pi)."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    out = []
    for i, p in enumerate(paths):
        phase = generator(seed, trial, i, STREAM_PHASE).uniform(0.0, 2 * np.pi, size=p.dim)
        add = eps * np.sin(2 * np.pi * nu * p.times[:, None] - phase[None, :])
        out.append(PiecewiseLinearPath(p.times, p.points + add))
    return out


def spike_contaminate(paths, eps: float, seed: int, trial: int = 0) -> list:
    """Add ``eps sqrt((t - U)^+)`` to every coordinate, one uniform ``U`` per path."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    out = []
    for i, p in enumerate(paths):
        u = generator(seed, trial, i, STREAM_SPIKE).uniform()
        add = eps * np.sqrt(np.clip(p.times - u, 0.0, None))
        out.append(PiecewiseLinearPath(p.times, p.points + add[:, None]))
    return out


# cubature asset

def truncated_gram(paths, depth: int, s: float = 1.0) -> GramSystem:
    """Gram system under ``phi_truncated(depth + 1)`` from exact signatures."""
    phi = phi_truncated(depth + 1)
    d = paths[0].dim
    sigs = [oracle.truncated_signature(p, depth) for p in paths]
    target = oracle.expected_brownian_signature(d, depth, s)
    n = len(paths)
    K = np.array([[sum(np.dot(sigs[i][k], sigs[j][k]) for k in range(depth + 1))
                   for j in range(n)] for i in range(n)])
    h = np.array([sum(np.dot(target[k], sg[k]) for k in range(depth + 1)) for sg in sigs])
    return GramSystem(K, h, oracle.phi_norm_sq(target, phi), phi.name, "oracle")


def feature_mmd_sq(measure: DiscreteMeasure, depth: int, s: float = 1.0) -> float:
    """Truncated squared distance computed on the tensor difference (no cancellation)."""
    d = measure.paths[0].dim
    target = oracle.expected_brownian_signature(d, depth, s)
    acc = [-target[k].copy() for k in range(depth + 1)]
    for p, w in zip(measure.paths, measure.weights):
        sig = oracle.truncated_signature(p, depth)
        for k in range(depth + 1):
            acc[k] += w * sig[k]
    return float(sum(np.dot(a, a) for a in acc))


def parse_cubature(text: str, check: bool = True, tol: float = 1e-18) -> DiscreteMeasure:
    """Parse a cubature JSON document; optionally verify its moments up to the stated degree.

    Raises:
        ValueError: malformed content or a failed moment check.
    """
    try:
        data = json.loads(text)
        atoms = data["atoms"]
        paths = [PiecewiseLinearPath(a["times"], a["points"]) for a in atoms]
        weights = np.array([float(a["weight"]) for a in atoms])
        degree = int(data.get("degree", 5))
        T = float(data.get("T", 1.0))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"malformed cubature file: {exc}") from None
    if not atoms:
        raise ValueError("cubature file has no atoms")
    if abs(weights.sum() - 1.0) > 1e-12 or np.any(weights < 0):
        raise ValueError(f"cubature weights must form a probability vector (sum {weights.sum()!r})")
    measure = DiscreteMeasure(tuple(paths), weights)
    if check:
        res = feature_mmd_sq(measure, degree, T)
        if res > tol:
            raise ValueError(f"cubature moment check failed: squared residual {res:.3e} > {tol:g}")
    return measure


def load_cubature(file=None, check: bool = True) -> DiscreteMeasure:
    """Load a cubature asset (default: the bundled degree-5, 2-d formula)."""
    if file is None:
        text = resources.files("sigkern").joinpath("data/cubature_d2_deg5.json").read_text()
    else:
        text = Path(file).read_text()
    return parse_cubature(text, check)


# experiment runner

@dataclass
class ExperimentConfig:
    """Settings for :func:`run_experiment`.

    ``phi`` lists weight selectors compared in one run (``half-factorial``,
    ``one``, ``beta:m``). ``epsilons`` is the contamination grid for
    ``sine``/``spike``; ``m_grid`` the Beta parameters of a cubature sweep.
    """

    kind: str = "bm"
    n: int = 10
    m: int = 10
    d: int = 2
    trials: int = 100
    seed: int = 0
    epsilons: list = field(default_factory=lambda: [0.0])
    nu: float = 2.0
    m_grid: list = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0])
    phi: list = field(default_factory=lambda: ["half-factorial"])
    refinement: int = 32
    cubature_refinement: int = 128
    scheme: str = "corrected"
    max_refinement: int = 256
    n_nodes: int = 20
    n_hermite: int = 40
    s: float = 1.0
    optimal: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.n < 2 or self.m < 2 or self.trials < 1 or self.d < 1:
            raise ValueError("need n, m >= 2, d >= 1 and trials >= 1")
        eps = list(map(float, self.epsilons))
        if any(e < 0 for e in eps) or eps != sorted(eps):
            raise ValueError("epsilon grid must be nonnegative and ascending")
        if isinstance(self.phi, str):
            self.phi = [self.phi]

    @classmethod
    def from_json(cls, file) -> "ExperimentConfig":
        return cls(**json.loads(Path(file).read_text()))

    def kernel_config(self, phi: str, refinement: int | None = None) -> KernelConfig:
        return KernelConfig(phi=phi, s=self.s, refinement=refinement or self.refinement,
                            n_nodes=self.n_nodes, n_hermite=self.n_hermite,
                            scheme=self.scheme, max_refinement=self.max_refinement)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _summaries(values):
    v = np.asarray(values, float)
    return {"median": np.median(v), "q1": np.percentile(v, 25), "q3": np.percentile(v, 75),
            "min": v.min(), "max": v.max()}


def _paths_for(cfg: ExperimentConfig, trial: int, eps: float):
    base = sample_brownian(cfg.n, cfg.m, cfg.d, cfg.seed, trial)
    if cfg.kind == "sine":
        return sine_contaminate(base, eps, cfg.nu, cfg.seed, trial)
    if cfg.kind == "spike":
        return spike_contaminate(base, eps, cfg.seed, trial)
    return base


def trial_records(cfg: ExperimentConfig, phi: str, eps: float, trial: int) -> list:
    """Alignment and distance of the empirical (and optionally optimal) measure for one trial."""
    paths = _paths_for(cfg, trial, eps)
    gs = measures.gram(paths, cfg.kernel_config(phi))
    emp = np.full(cfg.n, 1.0 / cfg.n)
    out = [("empirical", measures.alignment(emp, gs), measures.mmd(emp, gs))]
    if cfg.optimal:
        lam = measures.optimal_measure(gs).weights
        out.append(("optimal", measures.alignment(lam, gs), measures.mmd(lam, gs)))
    return out


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Per-trial rows followed by summary rows, in a fixed order."""
    if cfg.kind == "cubature-sweep":
        return cubature_sweep(cfg)
    param_name = {"bm": "none", "sine": "epsilon", "spike": "epsilon"}[cfg.kind]
    grid = cfg.epsilons if cfg.kind != "bm" else [0.0]
    rows = []
    summary = []
    for phi in cfg.phi:
        for eps in grid:
            per = {}
            for trial in range(cfg.trials):
                for meas, al, dist in trial_records(cfg, phi, eps, trial):
                    per.setdefault(meas, []).append((al, dist))
                    rows.append(dict(row_type="trial", kind=cfg.kind, phi=phi,
                                     param_name=param_name, param=eps, trial=trial,
                                     measure=meas, statistic="", alignment=al, mmd=dist))
            for meas, vals in per.items():
                sa = _summaries([v[0] for v in vals])
                sm = _summaries([v[1] for v in vals])
                for stat in sa:
                    summary.append(dict(row_type="summary", kind=cfg.kind, phi=phi,
                                        param_name=param_name, param=eps, trial=None,
                                        measure=meas, statistic=stat,
                                        alignment=sa[stat], mmd=sm[stat]))
    return rows + summary


def cubature_sweep(cfg: ExperimentConfig, cubature: DiscreteMeasure | None = None) -> list[dict]:
    """Distances to Wiener measure of the optimal, cubature and empirical measures per Beta ``m``.

    The optimal measure is supported on the cubature atoms; the empirical
    measure is uniform on ``n`` Brownian samples.
    """
    cub = cubature or load_cubature()
    emp_paths = sample_brownian(cfg.n, cfg.m, cub.paths[0].dim, cfg.seed, 0)
    rows = []
    for m in cfg.m_grid:
        kc = cfg.kernel_config(f"beta:{float(m):g}")
        # cubature atoms have few, long segments and need a finer grid
        gs = measures.gram(cub.paths, cfg.kernel_config(kc.phi, cfg.cubature_refinement))
        d_cub = measures.mmd(cub.weights, gs)
        d_opt = measures.mmd(measures.optimal_measure(gs).weights, gs)
        ge = measures.gram(emp_paths, kc)
        d_emp = measures.mmd(np.full(cfg.n, 1.0 / cfg.n), ge)
        rows.append(dict(m=float(m), d_optimal=d_opt, d_cubature=d_cub, d_empirical=d_emp,
                         ratio=d_opt / d_cub if d_cub > 0 else math.nan))
    return rows


def write_report(rows: list[dict], out=None) -> str:
    """Serialise report rows as CSV (returned, and written to ``out`` if given)."""
    cols = SWEEP_COLUMNS if rows and "d_optimal" in rows[0] else CSV_COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) if isinstance(r[c], (float, np.floating)) or r[c] is None
                    else r[c] for c in cols])
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text)
    return text


def median_table(rows: list[dict], measure: str = "empirical") -> dict:
    """``{(phi, param): (median alignment, median mmd)}`` from summary rows."""
    out = {}
    for r in rows:
        if r["row_type"] == "summary" and r["statistic"] == "median" and r["measure"] == measure:
            out[(r["phi"], r["param"])] = (r["alignment"], r["mmd"])
    return out


def config_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)
