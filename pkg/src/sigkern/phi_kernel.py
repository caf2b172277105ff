"""General weighted kernels as weighted sums of scaled Goursat solves.

Three routes are provided:

* randomisation: ``phi(k)`` are the moments of a law ``pi`` and the kernel is
  ``E[K^{X gamma, sigma}]`` with ``X ~ pi``, integrated by a Gauss rule;
* Fourier: ``phi(k)`` are cosine coefficients of ``f`` on ``(-pi, pi)`` and the
  kernel is an integral of ``Re K^{e^{ix} gamma, sigma}`` against ``f``;
* Mellin: ``phi(k) = Gamma(k + beta + 1)`` and the kernel is the
  Gauss-Laguerre integral of ``K^{x gamma, sigma}`` against ``x^beta e^{-x}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import goursat
from .paths import AnyPath, length_to
from .quadrature import QuadratureRule, make_rule, rule_for_distribution
from .weights import check_condition_sum, mellin_weight

DISTRIBUTIONS = ("uniform01", "arcsine", "rayleigh", "beta")


@dataclass(frozen=True)
class FourierResult:
    value: float
    imag_residue: float
    node_values: np.ndarray


def _restrict(path, t):
    if t is None or t >= path.end:
        return path
    return path.restrict(t)


def scaled_corners(gamma: AnyPath, sigma: AnyPath, thetas, refinement: int = 64,
                   s=None, t=None, scheme: str = "explicit") -> np.ndarray:
    """``K^{theta gamma, sigma}(s, t)`` for each scaling in ``thetas``."""
    return goursat.corners_over_scalings(_restrict(gamma, s), _restrict(sigma, t), thetas,
                                         refinement, scheme)


def kernel_from_rule(gamma: AnyPath, sigma: AnyPath, rule: QuadratureRule,
                     refinement: int = 64, s=None, t=None, scale_sigma: bool = False,
                     scheme: str = "explicit"):
    """``sum_i w_i K^{x_i gamma, sigma}(s, t)``; scales ``sigma`` instead if asked."""
    if scale_sigma:
        vals = scaled_corners(sigma, gamma, rule.nodes, refinement, t, s, scheme)
    else:
        vals = scaled_corners(gamma, sigma, rule.nodes, refinement, s, t, scheme)
    return rule.integrate(vals)


def kernel_by_randomisation(gamma: AnyPath, sigma: AnyPath, dist: str = "uniform01",
                            n_nodes: int = 20, refinement: int = 64, s=None, t=None,
                            m: float | None = None, scale_sigma: bool = False) -> float:
    """Kernel whose weight is the moment sequence of ``dist``.

    Args:
        dist: ``uniform01`` (``phi(k)=1/(k+1)``), ``arcsine``, ``rayleigh``
            (``phi(k)=Gamma(k/2+1)``) or ``beta`` (Beta(1, m) moments).
        n_nodes: Gauss rule size.
        refinement: Goursat cells per segment.
        s, t: evaluation times; default to the path ends.
    """
    if dist not in DISTRIBUTIONS:
        raise ValueError(f"unsupported distribution {dist!r}; choose from {DISTRIBUTIONS}")
    rule = rule_for_distribution(dist, n_nodes, m)
    return float(np.real(kernel_from_rule(gamma, sigma, rule, refinement, s, t, scale_sigma)))


def _fourier_setup(tag: str, n_quad: int, u: float):
    """Nodes, weights of ``int_{-pi}^{pi}``, samples of ``f``, and the constant to subtract."""
    if tag == "xsq":
        # x^2 has a kink at the periodic boundary, so use Gauss-Legendre on [-pi, pi]
        r = make_rule("jacobi", n_quad)
        x = np.pi * r.nodes
        w = 2 * np.pi * r.weights
        f = x**2
        a0 = np.pi**2 / 3
        return x, w, f, 2 * a0  # target weight has phi(0) = 0
    x = -np.pi + 2 * np.pi * (np.arange(n_quad) + 0.5) / n_quad
    w = np.full(n_quad, 2 * np.pi / n_quad)
    if tag == "expcos":
        f = np.exp(np.cos(x)) * np.cos(np.sin(x))
    elif tag == "theta":
        if u <= 0:
            raise ValueError("theta weight needs u > 0")
        kmax = int(math.ceil(math.sqrt(40.0 / u))) + 1
        k = np.arange(1, kmax + 1)
        f = 1.0 + np.cos(np.outer(x, k)) @ np.exp(-u * k * k)
    else:
        raise ValueError(f"unsupported Fourier tag {tag!r}")
    return x, w, f, 1.0  # a0 = phi(0) = 1


def kernel_by_fourier(gamma: AnyPath, sigma: AnyPath, tag: str = "expcos", n_quad: int = 64,
                      refinement: int = 64, s=None, t=None, u: float = 1.0,
                      full: bool = False):
    """Kernel whose weight is the cosine-coefficient sequence of a function ``f``.

    ``expcos``: ``f = e^{cos x} cos(sin x)``, ``phi(k) = 1/k!``.
    ``xsq``: ``f = x^2``, ``phi(0) = 0`` and ``phi(k) = 4(-1)^k/k^2``.
    ``theta``: ``f = 1 + sum_k e^{-u k^2} cos(kx)``, ``phi(k) = e^{-u k^2}``.

    Returns the value, or a :class:`FourierResult` with the imaginary residue
    when ``full`` is set.
    """
    x, w, f, sub = _fourier_setup(tag, n_quad, u)
    vals = scaled_corners(gamma, sigma, np.exp(1j * x), refinement, s, t)
    integral = np.sum(w * f * vals) / np.pi
    value = float(integral.real - sub)
    if full:
        return FourierResult(value, float(abs(integral.imag)), vals)
    return value


def kernel_by_mellin(gamma: AnyPath, sigma: AnyPath, beta: float = 0.0, n_nodes: int = 20,
                     refinement: int = 64, s=None, t=None, safety: float = 4.0) -> float:
    """Kernel with ``phi(k) = Gamma(k + beta + 1)`` by generalised Gauss-Laguerre.

    Raises:
        ValueError: if the weight fails the summability check at
            ``C = safety * L_gamma * L_sigma``.
    """
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    C = safety * length_to(gamma, gamma.end if s is None else s) * \
        length_to(sigma, sigma.end if t is None else t)
    if C > 0:
        rep = check_condition_sum(mellin_weight(beta), C)
        if not rep.passed:
            raise ValueError(f"Mellin weight not summable at C={C:g}: {rep.reason}")
    rule = make_rule("laguerre", n_nodes, alpha=beta)
    return float(np.real(kernel_from_rule(gamma, sigma, rule, refinement, s, t)))
