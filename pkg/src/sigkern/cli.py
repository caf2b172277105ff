"""Command line entry point: ``sigkern <command> ...``.

Paths are read from ``t,x1,...,xd`` CSV files. Scalar results are printed;
tables go to ``--out`` when given, else to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import (contour, development, experiments, goursat, measures, oracle, phi_kernel,
               quadrature)
from .paths import read_path_csv, read_path_dir
from .weights import parse_phi


def _emit(text: str, out=None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _contour(args):
    if getattr(args, "contour", None) is None:
        return None
    return contour.ContourSpec(args.contour, args.contour_n, args.contour_radius)


def _kernel_config(args) -> measures.KernelConfig:
    return measures.KernelConfig(phi=args.phi, s=args.s, refinement=args.refine,
                                 n_nodes=args.nodes, contour=_contour(args), scheme=args.scheme)


def cmd_kernel(args):
    a, b = read_path_csv(args.path_a), read_path_csv(args.path_b)
    theta = complex(args.theta_re, args.theta_im)
    surf = goursat.solve(a, b, theta, args.refine, args.scheme)
    V = np.asarray(surf.values, dtype=complex)
    rows = [(s, t, V[i, j].real, V[i, j].imag)
            for i, s in enumerate(surf.s_grid) for j, t in enumerate(surf.t_grid)]
    _emit(_table(("s", "t", "re", "im"), rows), args.out)
    if args.out:
        print(f"corner {float(V[-1, -1].real)!r} {float(V[-1, -1].imag)!r}")


def cmd_phikernel(args):
    a, b = read_path_csv(args.path_a), read_path_csv(args.path_b)
    if args.method == "random":
        dist = {"uniform": "uniform01", "arcsine": "arcsine", "half-factorial": "rayleigh"}
        if args.phi.startswith("beta:"):
            rule = quadrature.rule_for_distribution("beta", args.nodes, float(args.phi[5:]))
        elif args.phi in dist:
            rule = quadrature.rule_for_distribution(dist[args.phi], args.nodes)
        else:
            raise SystemExit(f"no randomisation route for --phi {args.phi}")
        vals = phi_kernel.scaled_corners(a, b, rule.nodes, args.refine, scheme=args.scheme)
        value, nodes, weights = float(np.real(rule.integrate(vals))), rule.nodes, rule.weights
    elif args.method == "fourier":
        x, w, _, _ = phi_kernel._fourier_setup(args.phi, args.nodes, args.u)
        res = phi_kernel.kernel_by_fourier(a, b, args.phi, args.nodes, args.refine, u=args.u,
                                           full=True)
        value, nodes, weights, vals = res.value, x, w, res.node_values
        print(f"imag_residue {res.imag_residue!r}")
    else:
        value = phi_kernel.kernel_by_mellin(a, b, args.beta, args.nodes, args.refine)
        rule = quadrature.make_rule("laguerre", args.nodes, alpha=args.beta)
        vals = phi_kernel.scaled_corners(a, b, rule.nodes, args.refine)
        nodes, weights = rule.nodes, rule.weights
    print(repr(value))
    if args.dump:
        vals = np.asarray(vals, dtype=complex)
        rows = zip(nodes, weights, vals.real, vals.imag)
        _emit(_table(("node", "weight", "re", "im"), rows), args.dump)


def cmd_develop(args):
    path = read_path_csv(args.path)
    z = complex(args.z_re, args.z_im)
    G = development.develop(path, z, args.t)
    np.set_printoptions(precision=12, linewidth=120)
    print(G)
    c = G[-1, -1]
    print(f"corner {float(c.real)!r} {float(c.imag)!r}" if np.iscomplexobj(G) else f"corner {float(c)!r}")


def cmd_wiener(args):
    path = read_path_csv(args.path)
    cfg = measures.KernelConfig(phi=args.phi, s=args.s, contour=_contour(args),
                                n_hermite=args.hermite)
    if args.t is not None and args.t < path.end:
        path = path.restrict(args.t)
    print(repr(measures.wiener_cross(path, cfg)))


def _load_measure(args):
    named = read_path_dir(args.paths)
    paths = [p for _, p in named]
    return [n for n, _ in named], paths


def _report(gs, lam, extra=None):
    rep = {"lambda": [float(x) for x in lam],
           "objective": measures.objective(lam, gs.K, gs.h),
           "mmd": measures.mmd(lam, gs),
           "alignment": measures.alignment(lam, gs),
           "min_eig": gs.min_eig(),
           "kkt_residual": measures.kkt_residual(lam, gs.K, gs.h)}
    rep.update(extra or {})
    return rep


def cmd_mmd(args):
    names, paths = _load_measure(args)
    if args.weights:
        lam = np.loadtxt(args.weights, delimiter=",", ndmin=1)
    else:
        lam = np.full(len(paths), 1.0 / len(paths))
    measures.DiscreteMeasure(paths, lam)
    gs = measures.gram(paths, _kernel_config(args))
    _emit(json.dumps(_report(gs, lam, {"paths": names}), indent=2) + "\n", args.out)


def cmd_optimal(args):
    names, paths = _load_measure(args)
    gs = measures.gram(paths, _kernel_config(args))
    res = measures.optimal_measure(gs)
    rep = _report(gs, res.weights, {"paths": names, "support": list(res.support)})
    _emit(json.dumps(rep, indent=2) + "\n", args.out)


def cmd_quad(args):
    if args.family == "rayleigh":
        rule = quadrature.rayleigh_rule(args.n)
    else:
        rule = quadrature.make_rule(args.family, args.n, args.alpha, args.beta)
    _emit(_table(("node", "weight"), zip(rule.nodes, rule.weights)), args.out)


def cmd_rgamma(args):
    val = contour.reciprocal_gamma(args.p, args.method, args.n)
    ref = contour.reciprocal_gamma_reference(args.p)
    print(f"{val!r} error {abs(val - ref):.3e}")


def cmd_experiment(args):
    cfg = experiments.ExperimentConfig.from_json(args.config)
    t0 = time.perf_counter()
    rows = experiments.run_experiment(cfg)
    experiments.write_report(rows, args.out)
    if args.out:
        print(f"{len(rows)} rows written to {args.out} in {time.perf_counter() - t0:.1f}s")
    else:
        sys.stdout.write(experiments.write_report(rows))


def cmd_verify(args):
    """PDE corner against the truncated signature series for two paths."""
    a, b = read_path_csv(args.path_a), read_path_csv(args.path_b)
    phi = parse_phi("one")
    pde = float(goursat.solve_corner(a, b, 1.0, args.refine, args.scheme))
    ser = float(oracle.truncated_phi_kernel(a, b, phi, args.depth))
    bound = oracle.truncation_error_bound(phi, oracle.path_length(a), oracle.path_length(b),
                                          args.depth)
    print(f"pde {pde!r}\nseries {ser!r}\ndifference {abs(pde - ser):.3e}\n"
          f"truncation_bound {bound:.3e}")


def _add_kernel_flags(p, phi_default="half-factorial"):
    p.add_argument("--phi", default=phi_default,
                   help="one | half-factorial | beta:m | trunc:N | uniform | arcsine")
    p.add_argument("--s", type=float, default=1.0, help="Brownian time horizon")
    p.add_argument("--refine", type=int, default=32, help="Goursat cells per segment")
    p.add_argument("--nodes", type=int, default=20, help="inner quadrature nodes")
    p.add_argument("--scheme", choices=goursat.SCHEMES, default="corrected")
    _add_contour_flags(p)


def _add_contour_flags(p):
    p.add_argument("--contour", choices=("circle",) + contour.TWS_FAMILIES, default=None)
    p.add_argument("--contour-n", type=int, default=32)
    p.add_argument("--contour-radius", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigkern", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="Goursat surface of K_theta for two paths")
    p.add_argument("--path-a", required=True)
    p.add_argument("--path-b", required=True)
    p.add_argument("--theta-re", type=float, default=1.0)
    p.add_argument("--theta-im", type=float, default=0.0)
    p.add_argument("--refine", type=int, default=64)
    p.add_argument("--scheme", choices=goursat.SCHEMES, default="explicit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("phikernel", help="weighted kernel by randomisation, Fourier or Mellin")
    p.add_argument("--path-a", required=True)
    p.add_argument("--path-b", required=True)
    p.add_argument("--method", choices=("random", "fourier", "mellin"), default="random")
    p.add_argument("--phi", default="half-factorial",
                   help="random: uniform|arcsine|half-factorial|beta:m; fourier: expcos|xsq|theta")
    p.add_argument("--beta", type=float, default=0.0, help="Mellin exponent")
    p.add_argument("--u", type=float, default=1.0, help="theta-weight parameter")
    p.add_argument("--nodes", type=int, default=20)
    p.add_argument("--refine", type=int, default=64)
    p.add_argument("--scheme", choices=goursat.SCHEMES, default="explicit")
    p.add_argument("--dump", help="write per-node values to this CSV")
    p.set_defaults(func=cmd_phikernel)

    p = sub.add_parser("develop", help="hyperbolic development of a path")
    p.add_argument("--path", required=True)
    p.add_argument("--z-re", type=float, default=1.0)
    p.add_argument("--z-im", type=float, default=0.0)
    p.add_argument("--t", type=float, default=None)
    p.set_defaults(func=cmd_develop)

    p = sub.add_parser("wiener", help="kernel between expected Brownian signature and a path")
    p.add_argument("--path", required=True)
    p.add_argument("--phi", default="half-factorial")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--hermite", type=int, default=40)
    _add_contour_flags(p)
    p.set_defaults(func=cmd_wiener)

    for name, func, hlp in (("mmd", cmd_mmd, "distance of a weighted path measure to Wiener"),
                            ("optimal", cmd_optimal, "optimal weights on a set of paths")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--paths", required=True, help="directory of path CSV files")
        if name == "mmd":
            p.add_argument("--weights", help="CSV of weights in file-name order (default uniform)")
        _add_kernel_flags(p)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("quad", help="print a Gauss rule")
    p.add_argument("--family", choices=quadrature.FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_quad)

    p = sub.add_parser("rgamma", help="1/Gamma(p) by contour quadrature")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--method", choices=("circle",) + contour.TWS_FAMILIES, default="parabolic")
    p.add_argument("--n", type=int, default=32)
    p.set_defaults(func=cmd_rgamma)

    p = sub.add_parser("experiment", help="run an experiment config and write the CSV report")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="PDE corner against the truncated signature series")
    p.add_argument("--path-a", required=True)
    p.add_argument("--path-b", required=True)
    p.add_argument("--refine", type=int, default=512)
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--scheme", choices=goursat.SCHEMES, default="explicit")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"sigkern: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
