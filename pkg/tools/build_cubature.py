"""Construct the degree-5 cubature asset for 2-d Brownian motion on [0, 1].

Atoms: the 8 images under the dihedral group D4 of one 3-piece path, plus
the 4 images of a straight axis-aligned segment. D4 symmetry forces odd
levels and the Levy area to vanish, leaving 5 moment equations at levels 2
and 4, solved by nonlinear least squares. The result is written as JSON.

    python tools/build_cubature.py src/sigkern/data/cubature_d2_deg5.json
"""

import argparse
import json

import numpy as np
from scipy.optimize import least_squares

from sigkern.oracle import expected_brownian_signature, truncated_signature
from sigkern.paths import PiecewiseLinearPath

D4 = [np.array(m, float) for m in (
    [[1, 0], [0, 1]], [[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [-1, 0]],
    [[1, 0], [0, -1]], [[-1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1], [-1, 0]])]
TIMES = np.array([0.0, 1 / 3, 2 / 3, 1.0])
DEPTH = 5


def atoms(params):
    inc = params[:6].reshape(3, 2)
    a = params[6]
    w1 = params[7]
    base = np.vstack([np.zeros(2), np.cumsum(inc, axis=0)])
    out = [(PiecewiseLinearPath(TIMES, base @ g.T), w1) for g in D4]
    w2 = (1.0 - 8 * w1) / 4
    line = np.array([[0.0, 0.0], [a, 0.0]])
    for g in D4[:4]:
        out.append((PiecewiseLinearPath([0.0, 1.0], line @ g.T), w2))
    return out


def residual(params):
    target = expected_brownian_signature(2, DEPTH, 1.0)
    acc = [np.zeros(2**k) for k in range(DEPTH + 1)]
    for p, w in atoms(params):
        sig = truncated_signature(p, DEPTH)
        for k in range(DEPTH + 1):
            acc[k] += w * sig[k]
    return np.concatenate([acc[k] - target[k] for k in range(1, DEPTH + 1)])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    best = None
    for _ in range(200):
        x0 = np.concatenate([rng.normal(scale=0.8, size=6), [rng.uniform(0.5, 2.0)],
                             [rng.uniform(0.02, 0.11)]])
        sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=5000)
        w1 = sol.x[7]
        if not (0.0 < w1 < 0.125):
            continue
        cost = np.abs(residual(sol.x)).max()
        if best is None or cost < best[0]:
            best = (cost, sol.x)
        if cost < 1e-15:
            break
    cost, x = best
    print(f"max moment residual {cost:.3e}")
    data = {
        "description": "Degree-5 cubature formula on 2-d Wiener space, time horizon 1",
        "provenance": ("Constructed by tools/build_cubature.py: D4-symmetric moment matching "
                       "of the expected Stratonovich signature up to level 5 (least squares). "
                       "Not a transcription of a published table."),
        "degree": 5, "dim": 2, "T": 1.0,
        "atoms": [{"weight": float(w), "times": p.times.tolist(), "points": p.points.tolist()}
                  for p, w in atoms(x)],
    }
    with open(args.out, "w") as fh:
        json.dump(data, fh, indent=1)


if __name__ == "__main__":
    main()
