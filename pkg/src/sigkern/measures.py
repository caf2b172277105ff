"""Discrete measures on paths: Gram systems, MMD against Wiener measure, and the optimal weights.

The optimal measure minimises ``1/2 x^T K x - h^T x`` over the probability
simplex. With ``K`` positive definite the minimiser is unique, and it is found
exactly by enumerating candidate supports.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import goursat, oracle, wiener
from .contour import ContourSpec
from .paths import PiecewiseLinearPath
from .phi_kernel import kernel_from_rule
from .quadrature import rule_for_distribution
from .weights import WeightSequence, parse_phi


@dataclass(frozen=True)
class DiscreteMeasure:
    paths: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != len(self.paths) or w.size == 0:
            raise ValueError("need one weight per path")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must be nonnegative and sum to 1 (sum={w.sum()!r})")
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(self, "weights", w)

    @classmethod
    def empirical(cls, paths) -> "DiscreteMeasure":
        n = len(paths)
        return cls(tuple(paths), np.full(n, 1.0 / n))


@dataclass(frozen=True)
class KernelConfig:
    """How the pairwise and Wiener cross-kernels are computed.

    Attributes:
        phi: ``half-factorial``, ``one``, ``beta:m`` or ``trunc:N``.
        s: Brownian time horizon of the Wiener measure.
        refinement: Goursat cells per path segment.
        n_nodes: quadrature nodes for randomised pairwise kernels.
        n_hermite: inner Gauss-Hermite nodes for Beta cross-kernels.
        contour: outer contour; ``None`` picks a default per weight.
        scheme: Goursat cell update, ``explicit`` or ``corrected``.
        max_refinement: :func:`gram` doubles the refinement up to this cap
            while the pairwise matrix is not positive definite.
    """

    phi: str = "half-factorial"
    s: float = 1.0
    refinement: int = 16
    n_nodes: int = 20
    n_hermite: int = 40
    contour: ContourSpec | None = None
    scheme: str = "explicit"
    max_refinement: int | None = None

    @property
    def weight(self) -> WeightSequence:
        return parse_phi(self.phi)


@dataclass
class GramSystem:
    K: np.ndarray
    h: np.ndarray
    wiener_norm_sq: float
    phi: str
    method: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.K.shape[0]

    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.K)[0])


def _moment_rule(phi: WeightSequence, n: int):
    return rule_for_distribution(phi.provenance.split(":", 1)[1], n, phi.params.get("m"))


def _moment_spec(phi: WeightSequence, n: int) -> wiener.TransformSpec:
    r = _moment_rule(phi, n)
    return wiener.TransformSpec(r.nodes, r.weights, r.nodes.astype(complex), 1.0)


def pair_kernel(a: PiecewiseLinearPath, b: PiecewiseLinearPath, cfg: KernelConfig) -> float:
    """``K_phi`` between two paths at their terminal times."""
    phi = cfg.weight
    if phi.provenance == "constant" or (phi.provenance == "beta" and phi.params["m"] == 0):
        return float(goursat.solve_corner(a, b, 1.0, cfg.refinement, cfg.scheme))
    if phi.provenance == "factorial-half":
        rule = rule_for_distribution("rayleigh", cfg.n_nodes)
    elif phi.provenance == "beta":
        rule = rule_for_distribution("beta", cfg.n_nodes, phi.params["m"])
    elif phi.provenance.startswith("moment:"):
        rule = _moment_rule(phi, cfg.n_nodes)
    elif phi.provenance == "truncated":
        return float(oracle.truncated_phi_kernel(a, b, phi, phi.params["N"] - 1))
    else:
        raise ValueError(f"no pairwise kernel route for {cfg.phi!r}")
    return float(np.real(kernel_from_rule(a, b, rule, cfg.refinement, scheme=cfg.scheme)))


def wiener_cross(path: PiecewiseLinearPath, cfg: KernelConfig) -> float:
    """``<E[S(B)_{0,s}], S(path)>_phi`` at the path's terminal time."""
    phi = cfg.weight
    if phi.provenance == "factorial-half":
        return wiener.expected_kernel_half_factorial(path, cfg.s)
    if phi.provenance == "constant":
        return wiener.expected_kernel_original(path, cfg.s, contour=cfg.contour)
    if phi.provenance == "beta":
        return wiener.expected_kernel_beta(path, cfg.s, m=phi.params["m"],
                                           n_hermite=cfg.n_hermite, contour=cfg.contour)
    if phi.provenance.startswith("moment:"):
        return wiener.wiener_cross_general(path, cfg.s, _moment_spec(phi, cfg.n_nodes),
                                           contour=cfg.contour)
    if phi.provenance == "truncated":
        depth = phi.params["N"] - 1
        return float(oracle.wiener_pairing_series(path, phi, cfg.s, max(depth // 2, 0)))
    raise ValueError(f"no Wiener cross-kernel for {cfg.phi!r}")


def wiener_norm(cfg: KernelConfig, d: int) -> float:
    phi = cfg.weight
    if phi.provenance == "factorial-half":
        return wiener.wiener_norm_sq_half_factorial(cfg.s, d)
    if phi.provenance == "constant":
        return wiener.wiener_norm_sq_original(cfg.s, d, cfg.contour)
    if phi.provenance == "beta":
        return wiener.wiener_norm_sq_beta(cfg.s, d, phi.params["m"])
    if phi.provenance.startswith("moment:"):
        return wiener.wiener_norm_sq_general(cfg.s, d, _moment_spec(phi, cfg.n_nodes), cfg.contour)
    if phi.provenance == "truncated":
        return wiener.wiener_norm_sq_series(phi, cfg.s, d, terms=phi.params["N"] // 2 + 1)
    raise ValueError(f"no Wiener norm for {cfg.phi!r}")


def _pair_matrix(paths, cfg: KernelConfig) -> np.ndarray:
    n = len(paths)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            K[i, j] = K[j, i] = pair_kernel(paths[i], paths[j], cfg)
    return K


def gram(paths, cfg: KernelConfig | None = None) -> GramSystem:
    """Pairwise kernel matrix, Wiener cross-kernels and Wiener squared norm.

    If ``cfg.max_refinement`` is set and the matrix has a nonpositive
    eigenvalue (discretisation error on long segments), the Goursat grid is
    doubled until it is positive definite or the cap is reached; the grid used
    is stored in ``extra["refinement"]``.
    """
    cfg = cfg or KernelConfig()
    paths = list(paths)
    if not paths:
        raise ValueError("need at least one path")
    d = paths[0].dim
    if any(p.dim != d for p in paths):
        raise ValueError("all paths must share a dimension")
    K = _pair_matrix(paths, cfg)
    while (cfg.max_refinement is not None and cfg.refinement < cfg.max_refinement
           and np.linalg.eigvalsh(K)[0] <= 0):
        cfg = replace(cfg, refinement=2 * cfg.refinement)
        K = _pair_matrix(paths, cfg)
    h = np.array([wiener_cross(p, cfg) for p in paths])
    return GramSystem(K, h, wiener_norm(cfg, d), cfg.phi, "pde+development",
                      {"refinement": cfg.refinement})


def _weights_of(measure):
    return measure.weights if isinstance(measure, DiscreteMeasure) else np.asarray(measure, float)


def mmd_sq(measure, gs: GramSystem, clip: float = 1e-10) -> float:
    """``lam^T K lam - 2 lam^T h + |E_W S|^2``; values in ``[-clip, 0)`` are set to 0."""
    lam = _weights_of(measure)
    if lam.size != gs.n:
        raise ValueError(f"measure has {lam.size} atoms, Gram system {gs.n}")
    val = float(lam @ gs.K @ lam - 2.0 * lam @ gs.h + gs.wiener_norm_sq)
    if -clip <= val < 0:
        return 0.0
    return val


def mmd(measure, gs: GramSystem) -> float:
    """MMD distance ``d`` (the square root of :func:`mmd_sq`)."""
    v = mmd_sq(measure, gs)
    if v < 0:
        raise ValueError(f"negative squared distance {v:g} beyond roundoff")
    return math.sqrt(v)


def mmd_sq_discrete(lam, nu, K: np.ndarray) -> float:
    """Squared distance between two measures on the same atoms, from the Gram matrix only."""
    diff = np.asarray(lam, float) - np.asarray(nu, float)
    val = float(diff @ K @ diff)
    return 0.0 if -1e-10 <= val < 0 else val


def alignment(measure, gs: GramSystem) -> float:
    """``lam^T h / (sqrt(lam^T K lam) sqrt(|E_W S|^2))``."""
    lam = _weights_of(measure)
    q = float(lam @ gs.K @ lam)
    if q <= 0 or gs.wiener_norm_sq <= 0:
        raise ValueError("alignment undefined for a zero-norm feature")
    return float(lam @ gs.h) / (math.sqrt(q) * math.sqrt(gs.wiener_norm_sq))


# quadratic program on the simplex

@dataclass(frozen=True)
class QPResult:
    weights: np.ndarray
    objective: float
    kkt_residual: float
    support: tuple
    min_eig: float


def objective(x, K, h) -> float:
    return float(0.5 * x @ K @ x - h @ x)


def kkt_residual(x, K, h) -> float:
    """Largest violation of the simplex KKT conditions at ``x`` (scaled by ``max(1, |K|)``)."""
    g = K @ x - h
    supp = x > 1e-12
    if not supp.any():
        return math.inf
    c = float(np.mean(g[supp]))
    res = [np.max(np.abs(g[supp] - c)), abs(x.sum() - 1.0), max(0.0, -x.min())]
    if (~supp).any():
        res.append(max(0.0, c - g[~supp].min()))
    return float(max(res) / max(1.0, np.abs(K).max()))


def _support_candidate(K, h, S, tol):
    """KKT point with support ``S``, or ``None`` if infeasible or not optimal."""
    n, size = K.shape[0], len(S)
    A = np.zeros((size + 1, size + 1))
    A[:size, :size] = K[np.ix_(S, S)]
    A[:size, size] = 1.0
    A[size, :size] = 1.0
    rhs = np.append(h[S], 1.0)
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return None
    xs = sol[:size]
    if xs.min() < -tol:
        return None
    x = np.zeros(n)
    x[S] = np.clip(xs, 0.0, None)
    x /= x.sum()
    g = K @ x - h
    c = -sol[size]
    rest = np.setdiff1d(np.arange(n), S)
    # multiplier slack at roundoff level of the gradient entries, not of |K|
    slack = tol * max(1.0, float(np.max(np.abs(K) @ x + np.abs(h))) * 1e-4)
    if rest.size and (g[rest] - c).min() < -slack:
        return None
    return x


def _active_set_support(K, h, scale, max_iter: int = 200):
    """Support reached by a primal active-set method started at the best vertex."""
    n = K.shape[0]
    x = np.zeros(n)
    x[int(np.argmin(0.5 * np.diag(K) - h))] = 1.0
    S = [int(np.argmax(x))]
    for _ in range(max_iter):
        size = len(S)
        A = np.zeros((size + 1, size + 1))
        A[:size, :size] = K[np.ix_(S, S)]
        A[:size, size] = 1.0
        A[size, :size] = 1.0
        try:
            sol = np.linalg.solve(A, np.append(h[S], 1.0))
        except np.linalg.LinAlgError:
            return None
        target = sol[:size]
        if target.min() < 0:
            # move towards the equality solution until a weight hits zero, then drop it
            cur = x[S]
            d = target - cur
            neg = d < 0
            steps = np.where(neg, cur / np.where(neg, -d, 1.0), np.inf)
            k = int(np.argmin(steps))
            x[S] = cur + steps[k] * d
            x[S[k]] = 0.0
            S = [i for i in S if x[i] > 0]
            continue
        x[:] = 0.0
        x[S] = target
        g = K @ x - h
        c = -sol[size]
        rest = [i for i in range(n) if i not in S]
        if not rest:
            return S
        viol = g[rest] - c
        j = int(np.argmin(viol))
        if viol[j] >= -1e-12 * scale:
            return S
        S = sorted(S + [rest[j]])
    return None


def optimal_measure(gs: GramSystem, max_n: int = 20, tol: float = 1e-10,
                    warm_start: bool = True) -> QPResult:
    """Exact minimiser of ``1/2 x^T K x - h^T x`` over the simplex.

    A support found by a primal active-set iteration is checked first;
    otherwise supports are enumerated in increasing size. On each support the
    equality-constrained system is solved, and a candidate is accepted only
    if it is feasible with nonnegative inactive multipliers, which makes it
    the unique optimum (strict convexity).

    Raises:
        ValueError: if ``K`` is not positive definite or ``n > max_n``.
    """
    K, h = np.asarray(gs.K, float), np.asarray(gs.h, float)
    n = K.shape[0]
    if n > max_n:
        raise ValueError(f"support enumeration limited to n <= {max_n}, got {n}")
    lmin = float(np.linalg.eigvalsh(K)[0])
    if lmin <= 0:
        raise ValueError(f"Gram matrix not positive definite (min eigenvalue {lmin:.3e})")
    scale = max(1.0, float(np.abs(K).max()), float(np.abs(h).max()))
    if warm_start:
        S = _active_set_support(K, h, scale)
        x = None if S is None else _support_candidate(K, h, S, tol)
        if x is not None:
            return QPResult(x, objective(x, K, h), kkt_residual(x, K, h), tuple(S), lmin)
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            x = _support_candidate(K, h, list(S), tol)
            if x is not None:
                return QPResult(x, objective(x, K, h), kkt_residual(x, K, h), S, lmin)
    raise RuntimeError("no KKT point found; Gram system is ill-conditioned")


def interior_case(gs: GramSystem, tol: float = 1e-12):
    """``K^{-1} h`` when it lies in the simplex, else ``None``."""
    x = np.linalg.solve(gs.K, gs.h)
    if x.min() >= -tol and abs(x.sum() - 1.0) <= 1e-9:
        return x
    return None


def vertex_case_check(gs: GramSystem, m: int, tol: float = 1e-12) -> bool:
    """Whether ``(K e_m - h)^T (e_i - e_m) >= 0`` for all ``i``."""
    n = gs.n
    if not 0 <= m < n:
        raise IndexError(f"vertex {m} out of range for n={n}")
    g = gs.K[:, m] - gs.h
    return bool(np.all(g - g[m] >= -tol * max(1.0, np.abs(gs.K).max())))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def projected_gradient(gs: GramSystem, x0, iters: int = 20000, tol: float = 1e-14) -> np.ndarray:
    """Accelerated projected gradient for the simplex QP from a feasible start."""
    K, h = gs.K, gs.h
    L = float(np.linalg.eigvalsh(K)[-1])
    x = project_simplex(np.asarray(x0, float))
    y, tk = x.copy(), 1.0
    for _ in range(iters):
        xn = project_simplex(y - (K @ y - h) / L)
        tn = 0.5 * (1 + math.sqrt(1 + 4 * tk * tk))
        y = xn + ((tk - 1) / tn) * (xn - x)
        if np.abs(xn - x).max() < tol:
            x = xn
            break
        x, tk = xn, tn
    return x


def uniqueness_probe(gs: GramSystem, starts: int = 50, seed: int = 0) -> np.ndarray:
    """Minimisers reached by projected gradient from random Dirichlet starts."""
    rng = np.random.default_rng(seed)
    return np.array([projected_gradient(gs, rng.dirichlet(np.ones(gs.n)))
                     for _ in range(starts)])
