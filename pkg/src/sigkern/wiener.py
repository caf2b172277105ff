"""Kernels between the expected Brownian signature and a path signature.

All routines work from the corner entry of hyperbolic developments of rescaled
paths. The half-factorial weight has a closed form; other weights are read off
by contour integrals in an auxiliary variable ``z``, optionally averaged over
a weight measure by an inner quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contour import ContourSpec, contour_nodes
from .development import corner, corners
from .paths import AnyPath, scale
from .quadrature import make_rule


@dataclass(frozen=True)
class TransformSpec:
    """Discretised measure for the general cross-kernel.

    The weight is ``phi(k) = sum_j mu_j g_j^(alpha k)``; ``nodes`` are kept
    for reporting only.
    """

    nodes: np.ndarray
    weights: np.ndarray
    g_values: np.ndarray
    alpha: float = 1.0


def _default_contour(m: float = 0.0) -> ContourSpec:
    if float(m) == int(m):
        return ContourSpec("circle", 32, 1.0)
    return ContourSpec("cotangent", 32)


def _default_beta_contour(m: float) -> ContourSpec:
    # z^{-(m+1+2n)} terms alias on the unit circle for paths of length ~4; radius 2 avoids it
    if float(m) == int(m):
        return ContourSpec("circle", 64, 2.0)
    return ContourSpec("cotangent", 64)


def _check_s(s):
    if s < 0:
        raise ValueError("s must be nonnegative")


def expected_kernel_half_factorial(gamma: AnyPath, s: float, t=None) -> float:
    """Cross-kernel for ``phi(k) = Gamma(k/2 + 1)``: ``cosh`` of the developed distance of ``sqrt(s/2) gamma``."""
    _check_s(s)
    if s == 0:
        return 1.0
    return float(np.real(corner(scale(gamma, math.sqrt(s / 2.0)), 1.0, t)))


def wiener_norm_sq_half_factorial(s: float, d: int) -> float:
    _check_s(s)
    return math.exp(s * s * d / 4.0)


def expected_kernel_original(gamma: AnyPath, s: float, t=None,
                             contour: ContourSpec | None = None, full: bool = False):
    """Cross-kernel for ``phi = 1`` as a contour integral of ``z^{-1} corner(sqrt(s/2z) gamma)``.

    With ``full=True`` the complex value of the integral is returned.
    """
    _check_s(s)
    contour = contour or _default_contour()
    z, w = contour_nodes(contour)
    c = np.sqrt(s / (2.0 * z))
    vals = corners(gamma, c, t) / z
    out = complex(np.sum(w * vals))
    return out if full else out.real


def wiener_norm_sq_original(s: float, d: int, contour: ContourSpec | None = None) -> float:
    _check_s(s)
    contour = contour or _default_contour()
    z, w = contour_nodes(contour)
    return float(np.sum(w * np.exp(s * s * d / (4.0 * z)) / z).real)


def wiener_norm_sq_original_series(s: float, d: int, terms: int = 60) -> float:
    x = s * s * d / 4.0
    return float(sum(math.exp(k * math.log(x) - 2 * math.lgamma(k + 1)) if x > 0 else float(k == 0)
                     for k in range(terms)))


def _power(z, p):
    return np.exp(-p * np.log(z))


def expected_kernel_beta(gamma: AnyPath, s: float, t=None, m: float = 1.0,
                         n_hermite: int = 40, contour: ContourSpec | None = None,
                         full: bool = False):
    """Cross-kernel for the Beta weight ``phi(k) = Gamma(m+1) Gamma(k+1) / Gamma(k+m+1)``.

    Computed as ``Gamma(m+1) (1/2 pi i) int z^{-(m+1)} e^z E[corner(X sqrt(s) / z gamma)] dz``
    with ``X`` standard normal, the expectation by a Gauss-Hermite rule.
    """
    _check_s(s)
    if m < 0:
        raise ValueError("m must be nonnegative")
    contour = contour or _default_beta_contour(m)
    if contour.is_circle and float(m) != int(m):
        raise ValueError("non-integer m needs a Hankel contour")
    z, w = contour_nodes(contour)
    rule = make_rule("hermite", n_hermite)
    scal = np.outer(1.0 / z, rule.nodes * math.sqrt(s))
    inner = (corners(gamma, scal.ravel(), t).reshape(scal.shape) * rule.weights).sum(axis=1)
    out = math.gamma(m + 1) * complex(np.sum(w * _power(z, m + 1) * inner))
    return out if full else out.real


def wiener_norm_sq_beta(s: float, d: int, m: float = 1.0,
                        contour: ContourSpec | None = None) -> float:
    """``Gamma(m+1) (1/2 pi i) int z^{-(m+1)} e^z (1 - s^2 d / z^2)^{-1/2} dz``.

    On circles the radius must exceed ``s sqrt(d)`` so both branch points lie inside.
    """
    _check_s(s)
    if m < 0:
        raise ValueError("m must be nonnegative")
    if contour is None:
        if float(m) == int(m):
            contour = ContourSpec("circle", 64, 2.0 * max(1.0, s * math.sqrt(d)))
        else:
            contour = ContourSpec("cotangent", 64)
    if contour.is_circle:
        if contour.radius <= s * math.sqrt(d):
            raise ValueError("circle radius must exceed s*sqrt(d) to enclose the branch points")
        if float(m) != int(m):
            raise ValueError("non-integer m needs a Hankel contour")
    z, w = contour_nodes(contour)
    root = np.sqrt(1.0 - s * s * d / z**2)
    return float((math.gamma(m + 1) * np.sum(w * _power(z, m + 1) / root)).real)


def wiener_norm_sq_series(phi, s: float, d: int, terms: int = 40) -> float:
    """``sum_k phi(2k) d^k s^{2k} / (4^k (k!)^2)``, the squared norm from its definition."""
    total = 0.0
    for k in range(terms):
        if s == 0 and k:
            break
        lt = (k * math.log(d) + (2 * k * math.log(s) if k else 0.0)
              - k * math.log(4.0) - 2 * math.lgamma(k + 1))
        total += phi(2 * k) * math.exp(lt)
    return total


def wiener_cross_general(gamma: AnyPath, s: float, spec: TransformSpec, t=None,
                         contour: ContourSpec | None = None, full: bool = False):
    """Cross-kernel for ``phi(k) = int g^(alpha k) dmu`` by an inner sum over ``mu`` and a contour in ``z``.

    Integrand: ``z^{-1} e^z corner(g^alpha sqrt(s/2z) gamma)``.
    """
    _check_s(s)
    if spec.weights.shape != spec.g_values.shape:
        raise ValueError("transform spec weights and g-values differ in length")
    contour = contour or _default_contour()
    z, w = contour_nodes(contour)
    ga = np.asarray(spec.g_values, dtype=complex) ** spec.alpha
    scal = np.outer(np.sqrt(s / (2.0 * z)), ga)
    inner = (corners(gamma, scal.ravel(), t).reshape(scal.shape) * spec.weights).sum(axis=1)
    out = complex(np.sum(w * inner / z))
    return out if full else out.real


def wiener_norm_sq_general(s: float, d: int, spec: TransformSpec,
                           contour: ContourSpec | None = None) -> float:
    contour = contour or _default_contour()
    z, w = contour_nodes(contour)
    g2 = np.asarray(spec.g_values, dtype=complex) ** (2 * spec.alpha)
    inner = (np.exp(np.outer(1.0 / z, g2) * (s * s * d / 4.0)) * spec.weights).sum(axis=1)
    return float(np.sum(w * inner / z).real)


def beta_transform_spec(m: float, n: int = 40) -> TransformSpec:
    """Beta(1, m) law as a transform spec (``g(x) = x``, ``alpha = 1``)."""
    if m == 0:
        return point_mass_spec(1.0)
    r = make_rule("beta", n, alpha=m)
    return TransformSpec(r.nodes, r.weights, r.nodes.astype(complex), 1.0)


def point_mass_spec(g: complex = 1.0) -> TransformSpec:
    return TransformSpec(np.array([0.0]), np.array([1.0]), np.array([complex(g)]), 1.0)
