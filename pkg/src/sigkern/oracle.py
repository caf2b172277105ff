"""Brute-force truncated signatures.

Signatures are dense per-level arrays (level ``k`` has ``d**k`` entries), so
this module is only practical for small ``d`` and depth; it exists as the
independent reference that the PDE, quadrature and development routes are
checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .paths import AnyPath, length_to
from .weights import WeightSequence


@dataclass(frozen=True)
class TruncatedTensor:
    """Levels ``0..depth`` of a tensor series, each flattened to ``d**k`` entries."""

    levels: tuple
    dim: int

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def __getitem__(self, k):
        return self.levels[k]

    @classmethod
    def unit(cls, dim: int, depth: int, dtype=float) -> "TruncatedTensor":
        levels = [np.ones(1, dtype=dtype)] + [
            np.zeros(dim**k, dtype=dtype) for k in range(1, depth + 1)
        ]
        return cls(tuple(levels), dim)


def segment_signature(v, duration: float, depth: int) -> TruncatedTensor:
    """Signature of the linear path with velocity ``v`` over ``duration``.

    Level ``k`` is ``(duration * v)^{(x)k} / k!``.
    """
    if duration <= 0:
        raise ValueError("segment duration must be positive")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    inc = np.asarray(v) * duration
    return _exp_increment(inc, depth)


def _exp_increment(inc, depth):
    inc = np.atleast_1d(inc)
    levels = [np.ones(1, dtype=inc.dtype)]
    for k in range(1, depth + 1):
        levels.append(np.multiply.outer(levels[-1], inc).ravel() / k)
    return TruncatedTensor(tuple(levels), inc.shape[0])


def chen_concat(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """Truncated tensor product: level ``k`` is ``sum_l a_l (x) b_{k-l}``."""
    if a.dim != b.dim or a.depth != b.depth:
        raise ValueError(
            f"shape mismatch: dim {a.dim}/{b.dim}, depth {a.depth}/{b.depth}"
        )
    out = []
    for k in range(a.depth + 1):
        acc = None
        for l in range(k + 1):
            term = np.multiply.outer(a[l], b[k - l]).ravel()
            acc = term if acc is None else acc + term
        out.append(acc)
    return TruncatedTensor(tuple(out), a.dim)


def truncated_signature(path: AnyPath, depth: int, t: float | None = None) -> TruncatedTensor:
    """Exact truncated signature of a piecewise-linear path over ``[start, t]``."""
    if t is not None and t < path.end:
        if t <= path.start:
            dtype = complex if np.iscomplexobj(path.points) else float
            return TruncatedTensor.unit(path.dim, depth, dtype)
        path = path.restrict(t)
    sig = None
    for inc in path.increments:
        seg = _exp_increment(inc, depth)
        sig = seg if sig is None else chen_concat(sig, seg)
    return sig


def level_inner(a: TruncatedTensor, b: TruncatedTensor, k: int):
    """Hilbert-Schmidt pairing at level ``k`` (bilinear, no conjugation)."""
    return np.sum(a[k] * b[k])


def truncated_phi_kernel(gamma: AnyPath, sigma: AnyPath, phi: WeightSequence,
                         depth: int, s=None, t=None):
    """``sum_{k<=depth} phi(k) <S(gamma)^k_{a,s}, S(sigma)^k_{a,t}>``."""
    sa = truncated_signature(gamma, depth, s)
    sb = truncated_signature(sigma, depth, t)
    total = 0.0
    for k in range(depth + 1):
        total = total + phi(k) * level_inner(sa, sb, k)
    return total


def truncation_error_bound(phi: WeightSequence, len_gamma: float, len_sigma: float,
                           depth: int) -> float:
    """Tail ``sum_{k>depth} |phi(k)| (L_gamma L_sigma)^k / (k!)^2``.

    Raises:
        ValueError: if the terms keep growing for 1000 consecutive indices,
            which signals a weight violating the summability condition.
    """
    prod = len_gamma * len_sigma
    if prod == 0.0:
        return 0.0
    log_c = math.log(prod)
    total = 0.0
    growing = 0
    prev = None
    k = depth + 1
    while True:
        try:
            w = abs(phi(k))
        except OverflowError:
            w = math.inf
        if not math.isfinite(w):
            raise ValueError(f"weight is not finite at k={k}: violates summability")
        if w == 0.0:
            term = 0.0
            log_term = -np.inf
        else:
            log_term = math.log(w) + k * log_c - 2.0 * math.lgamma(k + 1)
            term = math.exp(log_term) if log_term > -745 else 0.0
        total += term
        if prev is not None and log_term > prev:
            growing += 1
            if growing >= 1000:
                raise ValueError("tail terms keep growing: weight violates summability")
        else:
            growing = 0
        decreasing = prev is not None and log_term <= prev
        if decreasing and (term < 1e-300 or term <= 1e-18 * total):
            break
        prev = log_term
        k += 1
    return total


def even_contractions(path: AnyPath, max_pairs: int, t=None) -> np.ndarray:
    """``a_{2n} = int <dx_1,dx_2>...<dx_{2n-1},dx_{2n}>`` for ``n=0..max_pairs``.

    Obtained by contracting consecutive index pairs of signature level ``2n``.
    """
    sig = truncated_signature(path, 2 * max_pairs, t)
    d = path.dim
    eye = np.eye(d).ravel()
    out = [sig[0][0]]
    for n in range(1, max_pairs + 1):
        arr = sig[2 * n].reshape((d * d,) * n)
        for _ in range(n):
            arr = np.tensordot(arr, eye, axes=([0], [0]))
        out.append(arr)
    return np.array(out)


def expected_brownian_signature(dim: int, depth: int, s: float = 1.0) -> TruncatedTensor:
    """Stratonovich expected signature ``exp((s/2) sum_i e_i e_i)`` truncated at ``depth``."""
    eye = np.eye(dim).ravel()
    levels = [np.ones(1)]
    pair_power = np.ones(1)
    fact = 1.0
    for k in range(1, depth + 1):
        if k % 2:
            levels.append(np.zeros(dim**k))
        else:
            n = k // 2
            pair_power = np.multiply.outer(pair_power, eye).ravel()
            fact *= n
            levels.append((s / 2.0) ** n / fact * pair_power)
    return TruncatedTensor(tuple(levels), dim)


def phi_norm_sq(a: TruncatedTensor, phi: WeightSequence) -> float:
    return float(sum(phi(k) * np.sum(a[k] * a[k]) for k in range(a.depth + 1)))


def wiener_pairing_series(path: AnyPath, phi: WeightSequence, s: float, max_pairs: int,
                          t=None):
    """``sum_n phi(2n) (s/2)^n / n! a_{2n}``: the expected-signature pairing as a series."""
    a = even_contractions(path, max_pairs, t)
    total = 0.0
    coef = 1.0
    for n in range(max_pairs + 1):
        if n:
            coef *= (s / 2.0) / n
        total = total + phi(2 * n) * coef * a[n]
    return total


def path_length(path: AnyPath, t=None) -> float:
    return length_to(path, path.end if t is None else t)
