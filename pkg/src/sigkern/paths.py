"""Piecewise-linear paths, the input object for every kernel in the package.

A path is stored as strictly increasing timestamps and the vertices it passes
through at those times. Complex rescalings are kept as a pair of real paths
sharing one time mesh.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np


class PathError(ValueError):
    """Raised for malformed path data."""


@dataclass(frozen=True, eq=False)
class PiecewiseLinearPath:
    """Linear interpolation of ``points`` at ``times``.

    Attributes:
        times: shape ``(m,)``, strictly increasing.
        points: shape ``(m, d)`` real vertices.
    """

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            raise PathError("points must be a sequence of vertices, got a flat array")
        if times.ndim != 1 or times.shape[0] != points.shape[0]:
            raise PathError(
                f"times and points lengths differ ({times.shape[0]} vs {points.shape[0]})"
            )
        if times.shape[0] < 2:
            raise PathError("a path needs at least two vertices")
        if points.shape[1] < 1:
            raise PathError("path dimension must be at least 1")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(points)):
            raise PathError("non-finite path data")
        if np.any(np.diff(times) <= 0):
            raise PathError("times must be strictly increasing")
        times.setflags(write=False)
        points.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.times)

    def velocities(self) -> np.ndarray:
        return self.increments / self.durations[:, None]

    def __call__(self, t: float) -> np.ndarray:
        _check_in_domain(self, t)
        return np.array([np.interp(t, self.times, self.points[:, i]) for i in range(self.dim)])

    def length(self) -> float:
        return length_to(self, self.end)

    def restrict(self, t: float) -> "PiecewiseLinearPath":
        """The path on ``[start, t]``; the last segment is cut at ``t``."""
        _check_in_domain(self, t)
        if t <= self.start:
            raise PathError("restriction to a degenerate interval")
        k = int(np.searchsorted(self.times, t, side="left"))
        times = np.append(self.times[:k], t)
        points = np.vstack([self.points[:k], self(t)])
        return PiecewiseLinearPath(times, points)


@dataclass(frozen=True, eq=False)
class ComplexPath:
    """A complex-valued path ``re + i*im`` on a shared time mesh."""

    re: PiecewiseLinearPath
    im: PiecewiseLinearPath

    def __post_init__(self):
        if not np.array_equal(self.re.times, self.im.times) or self.re.dim != self.im.dim:
            raise PathError("real and imaginary parts must share times and dimension")

    @property
    def times(self) -> np.ndarray:
        return self.re.times

    @property
    def points(self) -> np.ndarray:
        return self.re.points + 1j * self.im.points

    @property
    def dim(self) -> int:
        return self.re.dim

    @property
    def start(self) -> float:
        return self.re.start

    @property
    def end(self) -> float:
        return self.re.end

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.times)

    def restrict(self, t: float) -> "ComplexPath":
        return ComplexPath(self.re.restrict(t), self.im.restrict(t))


AnyPath = Union[PiecewiseLinearPath, ComplexPath]


def _check_in_domain(path, t):
    if not (path.times[0] - 1e-12 <= t <= path.times[-1] + 1e-12):
        raise PathError(f"time {t} outside [{path.times[0]}, {path.times[-1]}]")


def path_from_samples(times, points) -> PiecewiseLinearPath:
    """Build the piecewise-linear interpolant of sampled vertices.

    ``points`` may be given as a flat sequence for one-dimensional data.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    return PiecewiseLinearPath(np.asarray(times, dtype=float), points)


def length_to(path: AnyPath, s: float) -> float:
    """Euclidean length of the path over ``[start, s]``."""
    _check_in_domain(path, s)
    seg = np.linalg.norm(path.increments, axis=1)
    times = path.times
    total = 0.0
    for j, ell in enumerate(seg):
        t0, t1 = times[j], times[j + 1]
        if s >= t1:
            total += ell
        else:
            if s > t0:
                total += ell * (s - t0) / (t1 - t0)
            break
    return float(total)


def scale(path: AnyPath, theta) -> AnyPath:
    """Multiply every vertex by the scalar ``theta`` (real or complex)."""
    theta = complex(theta)
    pts = path.points * theta
    if isinstance(path, PiecewiseLinearPath) and theta.imag == 0.0:
        return PiecewiseLinearPath(path.times, pts.real)
    pts = np.asarray(pts, dtype=complex)
    return ComplexPath(
        PiecewiseLinearPath(path.times, pts.real), PiecewiseLinearPath(path.times, pts.imag)
    )


def read_path_csv(filename) -> PiecewiseLinearPath:
    """Read the ``t,x1,...,xd`` CSV format."""
    with open(filename, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise PathError(f"{filename}: expected a header and at least one row")
    header = [c.strip() for c in rows[0]]
    if header[0] != "t" or len(header) < 2:
        raise PathError(f"{filename}: header must be t,x1,...,xd")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]])
    except ValueError as exc:
        raise PathError(f"{filename}: {exc}") from None
    if data.shape[1] != len(header):
        raise PathError(f"{filename}: ragged rows")
    return PiecewiseLinearPath(data[:, 0], data[:, 1:])


def write_path_csv(path: PiecewiseLinearPath, filename) -> None:
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i + 1}" for i in range(path.dim)])
        for t, p in zip(path.times, path.points):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in p])


def read_path_dir(directory) -> list[tuple[str, PiecewiseLinearPath]]:
    """All ``*.csv`` paths in a directory, in file-name order."""
    files = sorted(Path(directory).glob("*.csv"))
    if not files:
        raise PathError(f"no .csv paths in {directory}")
    return [(f.name, read_path_csv(f)) for f in files]
