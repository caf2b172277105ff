"""Weight sequences ``k -> phi(k)`` and the summability check they must pass."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import betaln, gammaln


@dataclass(frozen=True)
class SummabilityReport:
    passed: bool
    partial_sum: float
    terms: int
    reason: str = ""


@dataclass(frozen=True)
class WeightSequence:
    """A weight ``phi`` evaluated at nonnegative integers.

    Attributes:
        func: callable ``k -> phi(k)``.
        provenance: where the sequence comes from, e.g. ``"beta"`` or ``"moment:uniform01"``.
        name: label used in reports.
        params: provenance parameters (``m`` for Beta weights, ``N`` for truncation, ...).
    """

    func: Callable[[int], float]
    provenance: str = "custom"
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, k: int):
        if k < 0:
            raise ValueError("weights are defined for k >= 0")
        return self.func(int(k))

    def values(self, n: int) -> np.ndarray:
        """``phi(0), ..., phi(n-1)`` as an array."""
        return np.array([self(k) for k in range(n)])


def phi_constant() -> WeightSequence:
    return WeightSequence(lambda k: 1.0, "constant", "one")


def phi_factorial_half() -> WeightSequence:
    """``phi(k) = Gamma(k/2 + 1)``."""
    return WeightSequence(lambda k: math.exp(math.lgamma(k / 2.0 + 1.0)),
                          "factorial-half", "half-factorial")


def phi_beta(m: float) -> WeightSequence:
    """``phi(k) = Gamma(m+1) Gamma(k+1) / Gamma(k+m+1)``, the moments of Beta(1, m) (m > 0)."""
    if m < 0:
        raise ValueError(f"Beta weight needs m >= 0, got {m}")
    m = float(m)

    def f(k):
        if m == 0.0:
            return 1.0
        return math.exp(math.lgamma(m + 1) + math.lgamma(k + 1) - math.lgamma(k + m + 1))

    return WeightSequence(f, "beta", f"beta:{m:g}", {"m": m})


def phi_truncated(n: int) -> WeightSequence:
    """Indicator weight: 1 for ``k < n`` and 0 afterwards."""
    if n < 0:
        raise ValueError("truncation level must be nonnegative")
    return WeightSequence(lambda k: 1.0 if k < n else 0.0, "truncated", f"trunc:{n}", {"N": n})


def shift(phi: WeightSequence, k: int) -> WeightSequence:
    """The k-shift ``n -> phi(n + k)``."""
    if k < 0:
        raise ValueError("shift must be nonnegative")
    return WeightSequence(lambda n: phi(n + k), f"shift({phi.provenance})",
                          f"{phi.name}+{k}", dict(phi.params, shift=k))


def scaled(phi: WeightSequence, theta) -> WeightSequence:
    """``k -> theta^k phi(k)``; pairing with this equals scaling one path by ``theta``."""
    return WeightSequence(lambda k: theta**k * phi(k), f"scaled({phi.provenance})",
                          f"{theta}*{phi.name}", dict(phi.params, theta=theta))


def check_condition_sum(phi: WeightSequence, C: float, tol: float = 1e-16,
                        max_terms: int = 5000) -> SummabilityReport:
    """Numerically test summability of ``C^k |phi(k)| / (k!)^2``.

    Terms are summed until one drops below ``tol * partial_sum``. The check
    fails if the terms have been nondecreasing over the last 100 indices or
    the budget runs out.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    logc = math.log(C)
    logs = []
    total = 0.0
    for k in range(max_terms):
        try:
            w = abs(phi(k))
        except OverflowError:
            w = math.inf
        if not math.isfinite(w):
            return SummabilityReport(False, total, k + 1, f"weight not finite at k={k}")
        lt = -math.inf if w == 0 else math.log(w) + k * logc - 2 * math.lgamma(k + 1)
        logs.append(lt)
        term = math.exp(lt) if lt < 700 else math.inf
        total += term
        if not math.isfinite(total):
            return SummabilityReport(False, total, k + 1, "partial sum overflowed")
        if k >= 100 and all(logs[j + 1] >= logs[j] for j in range(k - 100, k)):
            return SummabilityReport(False, total, k + 1, "terms nondecreasing over 100 indices")
        if k > 0 and total > 0 and term < tol * total and lt < logs[-2]:
            return SummabilityReport(True, total, k + 1)
        if total == 0 and k > 200:
            return SummabilityReport(True, 0.0, k + 1)
    return SummabilityReport(False, total, max_terms, "term budget exhausted")


# moment sequences

def moments_uniform01(k: int) -> float:
    return 1.0 / (k + 1)


def moments_arcsine(k: int) -> float:
    """Moments of the arcsine law on [-1, 1]: ``(k-1)!!/k!!`` for even ``k``, else 0."""
    if k % 2:
        return 0.0
    n = k // 2
    return math.exp(math.lgamma(2 * n + 1) - 2 * n * math.log(2) - 2 * math.lgamma(n + 1))


def moments_beta(k: int, a: float, b: float) -> float:
    """``B(k + a, b) / B(a, b)``."""
    if a <= 0 or b <= 0:
        raise ValueError("Beta parameters must be positive")
    return float(np.exp(betaln(k + a, b) - betaln(a, b)))


def moments_rayleigh(k: int) -> float:
    """Moments of the density ``2x exp(-x^2)`` on ``(0, inf)``: ``Gamma(k/2 + 1)``."""
    return float(np.exp(gammaln(k / 2.0 + 1.0)))


def moment_weight(dist: str, m: float | None = None) -> WeightSequence:
    """Weight sequence equal to the moments of a named distribution."""
    if dist == "uniform01":
        f = moments_uniform01
    elif dist == "arcsine":
        f = moments_arcsine
    elif dist == "rayleigh":
        f = moments_rayleigh
    elif dist == "beta":
        if m is None or m <= 0:
            raise ValueError("beta(1, m) moments need m > 0")
        return WeightSequence(lambda k: moments_beta(k, 1.0, m), "moment:beta",
                              f"beta:{m:g}", {"m": float(m)})
    else:
        raise ValueError(f"unknown distribution {dist!r}")
    return WeightSequence(f, f"moment:{dist}", dist)


# transform-defined sequences

def fourier_weight(tag: str, u: float = 1.0) -> WeightSequence:
    """Weights realised as cosine coefficients of a function on ``(-pi, pi)``.

    ``xsq``: ``phi(0) = 0``, ``phi(k) = 4(-1)^k / k^2``.
    ``expcos``: ``phi(k) = 1/k!``.
    ``theta``: ``phi(k) = exp(-u k^2)``.
    """
    if tag == "xsq":
        f = lambda k: 0.0 if k == 0 else 4.0 * (-1) ** k / k**2
    elif tag == "expcos":
        f = lambda k: math.exp(-math.lgamma(k + 1))
    elif tag == "theta":
        if u <= 0:
            raise ValueError("theta weight needs u > 0")
        f = lambda k: math.exp(-u * k * k)
    else:
        raise ValueError(f"unknown Fourier tag {tag!r}")
    return WeightSequence(f, f"fourier:{tag}", tag, {"u": u} if tag == "theta" else {})


def mellin_weight(beta: float) -> WeightSequence:
    """``phi(k) = Gamma(k + beta + 1)``."""
    if beta <= -1:
        raise ValueError("Mellin weight needs beta > -1")
    return WeightSequence(lambda k: math.exp(math.lgamma(k + beta + 1)), "mellin",
                          f"mellin:{beta:g}", {"beta": float(beta)})


def parse_phi(spec: str) -> WeightSequence:
    """Parse the CLI weight selector ``one|half-factorial|beta:m|trunc:N|uniform|arcsine``."""
    spec = spec.strip()
    if spec == "one":
        return phi_constant()
    if spec == "half-factorial":
        return phi_factorial_half()
    if spec == "uniform":
        return moment_weight("uniform01")
    if spec == "arcsine":
        return moment_weight("arcsine")
    if spec.startswith("beta:"):
        return phi_beta(float(spec[5:]))
    if spec.startswith("trunc:"):
        return phi_truncated(int(spec[6:]))
    raise ValueError(f"unknown weight selector {spec!r}")
