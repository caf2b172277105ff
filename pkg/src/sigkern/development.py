"""Cartan development of piecewise-linear paths into the isometry group of hyperbolic space.

For a path in ``R^d`` the development is the ``(d+1) x (d+1)`` solution of
``dG = F(z dgamma) G`` with ``F(v) = [[0, v], [v^T, 0]]``. On a linear piece
with velocity ``v`` over a duration ``D`` it is explicit:

    A(v, D, z) = I + sinh(z |v| D) M + (cosh(z |v| D) - 1) M^2,   M = F(v / |v|).

The bottom-right ("corner") entry of the development equals ``cosh`` of the
hyperbolic distance travelled, and is an even function of ``z``.
"""

from __future__ import annotations

import numpy as np

from .paths import AnyPath


def _generator(u: np.ndarray) -> np.ndarray:
    d = u.shape[0]
    M = np.zeros((d + 1, d + 1), dtype=u.dtype)
    M[:d, d] = u
    M[d, :d] = u
    return M


def minkowski_form(dim: int) -> np.ndarray:
    """``J = diag(1, ..., 1, -1)``."""
    J = np.eye(dim + 1)
    J[dim, dim] = -1.0
    return J


def segment_matrix(v, duration: float, z=1.0) -> np.ndarray:
    """Development of a single linear piece with velocity ``v`` scaled by ``z``.

    A zero velocity gives the identity.
    """
    if duration <= 0:
        raise ValueError("segment duration must be positive")
    v = np.asarray(v)
    d = v.shape[0]
    speed = np.linalg.norm(v)
    z = complex(z)
    dtype = complex if (z.imag != 0.0 or np.iscomplexobj(v)) else float
    if speed == 0.0:
        return np.eye(d + 1, dtype=dtype)
    M = _generator((v / speed).astype(dtype))
    arg = z * speed * duration
    if dtype is float:
        arg = arg.real
    return np.eye(d + 1, dtype=dtype) + np.sinh(arg) * M + (np.cosh(arg) - 1.0) * (M @ M)


def _restrict(path, t):
    if t is None or t >= path.end:
        return path
    return path.restrict(t)


def develop(path: AnyPath, z=1.0, t=None, mode: str = "exact", steps: int = 4096) -> np.ndarray:
    """Development of ``z * path`` over ``[start, t]``.

    Args:
        mode: ``"exact"`` multiplies the segment matrices; ``"ode"`` integrates
            the linear ODE with classical RK4, using ``steps`` total steps spread
            over the segments so each step sees a constant velocity.
    """
    path = _restrict(path, t)
    if mode == "exact":
        G = None
        for v, dt in zip(path.increments / path.durations[:, None], path.durations):
            A = segment_matrix(v, dt, z)
            G = A if G is None else A @ G
        return G
    if mode == "ode":
        return _develop_rk4(path, complex(z), steps)
    raise ValueError(f"unknown development mode {mode!r}")


def _develop_rk4(path, z, steps):
    d = path.dim
    nseg = len(path.durations)
    per = max(1, int(np.ceil(steps / nseg)))
    complex_out = z.imag != 0.0 or np.iscomplexobj(path.points)
    G = np.eye(d + 1, dtype=complex if complex_out else float)
    for v, dt in zip(path.increments / path.durations[:, None], path.durations):
        F = _generator(np.asarray(z * v if complex_out else (z.real * v).real))
        h = dt / per
        for _ in range(per):
            k1 = F @ G
            k2 = F @ (G + 0.5 * h * k1)
            k3 = F @ (G + 0.5 * h * k2)
            k4 = F @ (G + h * k3)
            G = G + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return G


def corner(path: AnyPath, z=1.0, t=None):
    """Corner entry ``G[d, d]`` of the development of ``z * path`` up to ``t``."""
    G = develop(path, z, t)
    return G[-1, -1]


def corners(path: AnyPath, zs, t=None) -> np.ndarray:
    """Corner entries for many scalings at once (vectorised over ``zs``)."""
    path = _restrict(path, t)
    zs = np.asarray(zs, dtype=complex).ravel()
    d = path.dim
    G = np.broadcast_to(np.eye(d + 1, dtype=complex), (zs.size, d + 1, d + 1)).copy()
    for v, dt in zip(path.increments / path.durations[:, None], path.durations):
        speed = np.linalg.norm(v)
        if speed == 0.0:
            continue
        M = _generator((v / speed).astype(complex))
        arg = zs * (speed * dt)
        A = (np.eye(d + 1)[None] + np.sinh(arg)[:, None, None] * M[None]
             + (np.cosh(arg) - 1.0)[:, None, None] * (M @ M)[None])
        G = A @ G
    return G[:, -1, -1]


def cosh_rho(path: AnyPath, t=None) -> float:
    """``cosh`` of the hyperbolic distance from the origin to the developed point at ``t``."""
    return float(np.real(corner(path, 1.0, t)))


def origin(dim: int) -> np.ndarray:
    o = np.zeros(dim + 1)
    o[dim] = 1.0
    return o


def minkowski(x, y):
    """``x * y = sum_{i<=d} x_i y_i - x_{d+1} y_{d+1}``."""
    x, y = np.asarray(x), np.asarray(y)
    return np.dot(x[:-1], y[:-1]) - x[-1] * y[-1]


def hyperbolic_distance(x, y, tol: float = 1e-8) -> float:
    """Geodesic distance ``arcosh(-x * y)`` between two hyperboloid points."""
    for p in (x, y):
        if abs(minkowski(p, p) + 1.0) > tol * max(1.0, abs(np.asarray(p)[-1]) ** 2) or p[-1] <= 0:
            raise ValueError("point is not on the upper sheet of the hyperboloid")
    return float(np.arccosh(max(1.0, -minkowski(x, y))))
