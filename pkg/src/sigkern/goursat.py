"""Finite-difference solver for the signature-kernel Goursat problem.

The grid is the union of each path's vertex times, with every linear piece
cut into ``refinement`` equal cells, so cell increments are exact. The update

    K[i+1,j+1] = K[i+1,j] + K[i,j+1] - K[i,j] + (theta <dg_i, ds_j> / 2) (K[i+1,j] + K[i,j+1])

is second order in the cell size. An optional corrected update adds the
``A^2/12`` terms (``A = theta <dg_i, ds_j>``) for long or large-increment cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .paths import AnyPath


@dataclass(frozen=True)
class KernelSurface:
    """Kernel values ``K(s_grid[i], t_grid[j])`` with unit first row and column."""

    s_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    theta: complex

    @property
    def corner(self):
        return self.values[-1, -1]


@numba.njit(cache=True)
def _step(k10, k01, k00, a, corrected):
    if corrected:
        a2 = a * a / 12.0
        return (k10 + k01) * (1.0 + 0.5 * a + a2) - k00 * (1.0 - a2)
    return k10 + k01 - k00 + 0.5 * a * (k10 + k01)


@numba.njit(cache=True)
def _surface(G, c, corrected):
    m, n = G.shape
    K = np.empty((m + 1, n + 1), dtype=G.dtype)
    for i in range(m + 1):
        K[i, 0] = 1.0
    for j in range(n + 1):
        K[0, j] = 1.0
    for i in range(m):
        for j in range(n):
            K[i + 1, j + 1] = _step(K[i + 1, j], K[i, j + 1], K[i, j], c * G[i, j], corrected)
    return K


@numba.njit(cache=True)
def _corner(G, c, corrected):
    m, n = G.shape
    prev = np.ones(n + 1, dtype=G.dtype)
    cur = np.empty(n + 1, dtype=G.dtype)
    for i in range(m):
        cur[0] = 1.0
        for j in range(n):
            cur[j + 1] = _step(cur[j], prev[j + 1], prev[j], c * G[i, j], corrected)
        prev, cur = cur, prev
    return prev[n]


@numba.njit(cache=True)
def _corners(G, thetas, corrected):
    # all scalings advance together so the innermost loop carries independent recurrences
    m, n = G.shape
    nq = thetas.shape[0]
    prev = np.ones((n + 1, nq), dtype=G.dtype)
    cur = np.empty((n + 1, nq), dtype=G.dtype)
    for i in range(m):
        cur[0, :] = 1.0
        for j in range(n):
            g = G[i, j]
            for q in range(nq):
                cur[j + 1, q] = _step(cur[j, q], prev[j + 1, q], prev[j, q],
                                      thetas[q] * g, corrected)
        prev, cur = cur, prev
    return prev[n].copy()


@numba.njit(cache=True)
def _rotation_pair(A, c, s):
    m, n = A.shape
    R = np.empty((m + 1, n + 1))
    I = np.zeros((m + 1, n + 1))
    R[0, :] = 1.0
    R[:, 0] = 1.0
    for i in range(m):
        for j in range(n):
            sr = R[i + 1, j] + R[i, j + 1]
            si = I[i + 1, j] + I[i, j + 1]
            R[i + 1, j + 1] = sr - R[i, j] + A[i, j] * (c * sr - s * si)
            I[i + 1, j + 1] = si - I[i, j] + A[i, j] * (s * sr + c * si)
    return R, I


def _check_refinement(refinement):
    r = int(refinement)
    if r < 1 or r & (r - 1):
        raise ValueError(f"refinement must be a power of two, got {refinement}")
    return r


def refine(path: AnyPath, refinement: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid times and per-cell increments for ``refinement`` cells per segment."""
    r = _check_refinement(refinement)
    times = path.times
    frac = np.arange(r) / r
    grid = (times[:-1, None] + np.diff(times)[:, None] * frac[None, :]).ravel()
    grid = np.append(grid, times[-1])
    incs = np.repeat(path.increments / r, r, axis=0)
    return grid, incs


def increment_gram(gamma: AnyPath, sigma: AnyPath, refinement: int):
    """``G[i, j] = <dgamma_i, dsigma_j>`` over refined cells (bilinear), with the grids."""
    if gamma.dim != sigma.dim:
        raise ValueError(f"dimension mismatch {gamma.dim} vs {sigma.dim}")
    sg, dg = refine(gamma, refinement)
    tg, ds = refine(sigma, refinement)
    return dg @ ds.T, sg, tg


SCHEMES = ("explicit", "corrected")


def _scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    return scheme == "corrected"


def _prepare(G, theta):
    theta = complex(theta)
    if theta.imag == 0.0 and not np.iscomplexobj(G):
        return np.ascontiguousarray(G, dtype=float), theta.real
    return np.ascontiguousarray(G, dtype=complex), theta


def solve(gamma: AnyPath, sigma: AnyPath, theta=1.0, refinement: int = 64,
          scheme: str = "explicit") -> KernelSurface:
    """Full kernel surface of ``K_theta`` for two paths.

    ``scheme="corrected"`` adds the ``A^2/12`` terms of the cell update,
    ``K11 = (K10 + K01)(1 + A/2 + A^2/12) - K00 (1 - A^2/12)`` with
    ``A = theta <dg, ds>``, which cuts the error constant on long segments.
    """
    G, sg, tg = increment_gram(gamma, sigma, refinement)
    Gp, c = _prepare(G, theta)
    return KernelSurface(sg, tg, _surface(Gp, c, _scheme(scheme)), complex(theta))


def solve_corner(gamma: AnyPath, sigma: AnyPath, theta=1.0, refinement: int = 64,
                 scheme: str = "explicit"):
    """Terminal value ``K_theta(end, end)`` without storing the surface."""
    G, _, _ = increment_gram(gamma, sigma, refinement)
    Gp, c = _prepare(G, theta)
    return _corner(Gp, c, _scheme(scheme))


def corners_from_gram(G: np.ndarray, thetas, scheme: str = "explicit") -> np.ndarray:
    """Terminal values of ``K_theta`` for each scaling, given the cell increment Gram."""
    thetas = np.asarray(thetas)
    if np.iscomplexobj(G) or np.iscomplexobj(thetas):
        return _corners(np.ascontiguousarray(G, dtype=complex), thetas.astype(complex),
                        _scheme(scheme))
    return _corners(np.ascontiguousarray(G, dtype=float), thetas.astype(float), _scheme(scheme))


def corners_over_scalings(gamma: AnyPath, sigma: AnyPath, thetas, refinement: int = 64,
                          scheme: str = "explicit"):
    """Terminal values of ``K_theta`` for many scalings sharing one increment Gram."""
    G, _, _ = increment_gram(gamma, sigma, refinement)
    return corners_from_gram(G, thetas, scheme)


def value_at(surface: KernelSurface, s: float, t: float):
    """Bilinear interpolation of the surface at ``(s, t)``."""
    sg, tg = surface.s_grid, surface.t_grid
    tol = 1e-12
    if not (sg[0] - tol <= s <= sg[-1] + tol and tg[0] - tol <= t <= tg[-1] + tol):
        raise ValueError(f"({s}, {t}) outside the surface domain")
    i = int(np.clip(np.searchsorted(sg, s, side="right") - 1, 0, len(sg) - 2))
    j = int(np.clip(np.searchsorted(tg, t, side="right") - 1, 0, len(tg) - 2))
    a = min(max((s - sg[i]) / (sg[i + 1] - sg[i]), 0.0), 1.0)
    b = min(max((t - tg[j]) / (tg[j + 1] - tg[j]), 0.0), 1.0)
    V = surface.values
    return ((1 - a) * (1 - b) * V[i, j] + a * (1 - b) * V[i + 1, j]
            + (1 - a) * b * V[i, j + 1] + a * b * V[i + 1, j + 1])


def solve_rotation_pair(gamma: AnyPath, sigma: AnyPath, x: float,
                        refinement: int = 64) -> tuple[KernelSurface, KernelSurface]:
    """Real and imaginary surfaces of ``K_theta`` at ``theta = exp(ix)`` via the real 2-d system."""
    G, sg, tg = increment_gram(gamma, sigma, refinement)
    if np.iscomplexobj(G):
        raise ValueError("rotation-pair solver expects real paths")
    R, I = _rotation_pair(np.ascontiguousarray(0.5 * G), np.cos(x), np.sin(x))
    theta = complex(np.cos(x), np.sin(x))
    return KernelSurface(sg, tg, R, theta), KernelSurface(sg, tg, I, theta)
