"""Gaussian quadrature rules for the densities used by the randomised kernels.

Rules come from the Jacobi matrix of the three-term recurrence (Golub-Welsch):
nodes are its eigenvalues, weights follow from the orthonormal polynomials at
the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

FAMILIES = ("legendre01", "chebyshev", "jacobi", "beta", "hermite", "laguerre", "rayleigh")


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    family: str
    order: int
    support: tuple = (-np.inf, np.inf)

    def integrate(self, values) -> float:
        """``sum_i w_i f(x_i)`` given ``f`` evaluated at the nodes (fixed order)."""
        return np.sum(self.weights * np.asarray(values))

    def __call__(self, f):
        return self.integrate([f(x) for x in self.nodes])


def golub_welsch(a, b, mass: float):
    """Nodes and weights from recurrence coefficients.

    Nodes are the Jacobi-matrix eigenvalues. Weights use the Christoffel form
    ``1 / sum_k p_k(x)^2`` over orthonormal polynomials, a sum of positive
    terms, which keeps tiny tail weights relatively accurate.

    Args:
        a: diagonal ``a_0..a_{n-1}``.
        b: squared off-diagonal ``b_1..b_{n-1}``.
        mass: integral of the weight function.
    """
    a = np.asarray(a, dtype=float)
    off = np.sqrt(np.asarray(b, dtype=float))
    if a.size == 1:
        return a.copy(), np.array([mass])
    x = eigh_tridiagonal(a, off, eigvals_only=True)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(mass))
    total = p * p
    for k in range(a.size - 1):
        p_next = ((x - a[k]) * p - (off[k - 1] * p_prev if k else 0.0)) / off[k]
        p_prev, p = p, p_next
        total += p * p
    return x, 1.0 / total


def _jacobi_recurrence(n, alpha, beta):
    ab = alpha + beta
    a = np.empty(n)
    for i in range(n):
        den = (2 * i + ab) * (2 * i + ab + 2)
        a[i] = (beta - alpha) / (ab + 2) if i == 0 else (beta**2 - alpha**2) / den
    b = np.empty(max(n - 1, 0))
    for i in range(1, n):
        if i == 1:
            b[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        else:
            t = 2 * i + ab
            b[i - 1] = 4 * i * (i + alpha) * (i + beta) * (i + ab) / (t * t * (t + 1) * (t - 1))
    return a, b


@lru_cache(maxsize=None)
def _rayleigh_rule(n: int):
    # Chebyshev algorithm on exact moments Gamma(k/2 + 1) in extended precision;
    # the resulting recurrence is well conditioned, so the eigensolve runs in double.
    with mpmath.workdps(max(60, 3 * n + 40)):
        mom = [mpmath.gamma(mpmath.mpf(k) / 2 + 1) for k in range(2 * n)]
        a, b = _chebyshev_algorithm(mom, n)
        a = [float(v) for v in a]
        b = [float(v) for v in b[1:]]
    return golub_welsch(a, b, 1.0)


def _chebyshev_algorithm(mom, n):
    """Recurrence coefficients ``a_0..a_{n-1}``, ``b_0..b_{n-1}`` from ordinary moments."""
    sig_prev = [mpmath.mpf(0)] * (2 * n)
    sig = list(mom)
    a = [mom[1] / mom[0]]
    b = [mom[0]]
    for k in range(1, n):
        new = [mpmath.mpf(0)] * (2 * n)
        for l in range(k, 2 * n - k):
            new[l] = sig[l + 1] - a[k - 1] * sig[l] - b[k - 1] * sig_prev[l]
        a.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        b.append(new[k] / sig[k - 1])
        sig_prev, sig = sig, new
    return a, b


def make_rule(family: str, n: int, alpha: float = 0.0, beta: float = 0.0) -> QuadratureRule:
    """Build an ``n``-point Gauss rule.

    Families and their (probability unless stated) densities:

    * ``legendre01``: uniform on [0, 1].
    * ``chebyshev``: arcsine law ``1/(pi sqrt(1-x^2))`` on [-1, 1], closed-form nodes.
    * ``jacobi``: ``(1-x)^alpha (1+x)^beta`` on [-1, 1], normalised to mass 1.
    * ``beta``: Beta(1, alpha) on [0, 1], i.e. density ``alpha (1-x)^(alpha-1)``.
    * ``hermite``: standard normal.
    * ``laguerre``: ``x^alpha e^{-x}`` on (0, inf), mass ``Gamma(alpha+1)``.
    * ``rayleigh``: ``2x e^{-x^2}`` on (0, inf).
    """
    if n < 1:
        raise ValueError("rule order must be at least 1")
    if family == "legendre01":
        r = make_rule("jacobi", n)
        return QuadratureRule((r.nodes + 1) / 2, r.weights, family, n, (0.0, 1.0))
    if family == "chebyshev":
        k = np.arange(1, n + 1)
        x = np.sort(np.cos((2 * k - 1) * np.pi / (2 * n)))
        return QuadratureRule(x, np.full(n, 1.0 / n), family, n, (-1.0, 1.0))
    if family == "jacobi":
        if alpha <= -1 or beta <= -1:
            raise ValueError("Jacobi parameters must exceed -1")
        a, b = _jacobi_recurrence(n, alpha, beta)
        x, w = golub_welsch(a, b, 1.0)
        return QuadratureRule(x, w, f"jacobi({alpha:g},{beta:g})", n, (-1.0, 1.0))
    if family == "beta":
        if alpha <= 0:
            raise ValueError("Beta(1, m) rule needs m > 0")
        r = make_rule("jacobi", n, alpha - 1.0, 0.0)
        return QuadratureRule((r.nodes + 1) / 2, r.weights, f"beta(1,{alpha:g})", n, (0.0, 1.0))
    if family == "hermite":
        x, w = golub_welsch(np.zeros(n), np.arange(1, n, dtype=float), 1.0)
        return QuadratureRule(x, w, "hermite", n)
    if family == "laguerre":
        if alpha <= -1:
            raise ValueError("Laguerre parameter must exceed -1")
        k = np.arange(n, dtype=float)
        kk = np.arange(1, n, dtype=float)
        x, w = golub_welsch(2 * k + alpha + 1, kk * (kk + alpha), math.gamma(alpha + 1))
        return QuadratureRule(x, w, f"laguerre({alpha:g})", n, (0.0, np.inf))
    if family == "rayleigh":
        return rayleigh_rule(n)
    raise ValueError(f"unknown quadrature family {family!r}")


def rayleigh_rule(n: int) -> QuadratureRule:
    """Gauss rule for ``int_0^inf f(x) 2x e^{-x^2} dx``, built directly in ``x``."""
    if n < 1:
        raise ValueError("rule order must be at least 1")
    x, w = _rayleigh_rule(int(n))
    return QuadratureRule(x.copy(), w.copy(), "rayleigh", n, (0.0, np.inf))


def rule_for_distribution(dist: str, n: int, m: float | None = None) -> QuadratureRule:
    """Quadrature rule whose moments are the named distribution's moments."""
    if dist == "uniform01":
        return make_rule("legendre01", n)
    if dist == "arcsine":
        return make_rule("chebyshev", n)
    if dist == "rayleigh":
        return rayleigh_rule(n)
    if dist == "beta":
        if m is None:
            raise ValueError("beta distribution needs m")
        return make_rule("beta", n, alpha=m)
    raise ValueError(f"no quadrature for distribution {dist!r}")


def log_quadrature_error_bound(L: float, n: int) -> float:
    """``ln R_n`` with ``R_n = L^{4n+4} e^{L^2} / (2^{2n+1} ((2n+2)!)^2)``."""
    if L <= 0 or n < 0:
        raise ValueError("need L > 0 and n >= 0")
    return ((4 * n + 4) * math.log(L) + L * L - (2 * n + 1) * math.log(2.0)
            - 2.0 * math.lgamma(2 * n + 3))


def quadrature_error_bound(L: float, n: int) -> float:
    """Error estimate ``R_n`` of the ``n``-point arcsine rule for paths of length ``L``."""
    return math.exp(log_quadrature_error_bound(L, n))


def derivative_bound(Ls: float, Lt: float, x: float, k: int, crude: bool = False) -> float:
    """Bound on the ``k``-th derivative in ``x`` of ``K^{x gamma, sigma}``.

    Returns ``(Ls Lt)^{k/2} |x|^{-k/2} I_k(2 sqrt(|x| Ls Lt))`` summed as the series
    ``(Ls Lt)^k sum_j (|x| Ls Lt)^j / (j! (j+k)!)``, or with ``crude=True``
    the looser ``(Ls Lt)^k / k! exp(|x| Ls Lt)``.
    """
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    c = Ls * Lt
    if c == 0.0:
        return 1.0 if k == 0 else 0.0
    y = abs(x) * c
    if crude:
        return math.exp(k * math.log(c) - math.lgamma(k + 1) + y)
    total = 0.0
    term = 1.0 / math.gamma(k + 1) if k < 170 else 0.0
    log_pref = k * math.log(c)
    if term == 0.0:
        return math.exp(log_pref - math.lgamma(k + 1) + y)
    j = 0
    while True:
        total += term
        j += 1
        term *= y / (j * (j + k))
        if term < 1e-17 * total:
            break
    return math.exp(log_pref) * total
