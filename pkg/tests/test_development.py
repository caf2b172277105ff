import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import paths, random_path, unit_line
from sigkern.development import (corner, corners, cosh_rho, develop, hyperbolic_distance,
                                 minkowski, minkowski_form, origin, segment_matrix)
from sigkern.oracle import even_contractions
from sigkern.paths import PiecewiseLinearPath, scale
from sigkern.wiener import expected_kernel_half_factorial, wiener_norm_sq_half_factorial


def _series(path, z, max_pairs=8):
    a = even_contractions(path, max_pairs)
    return sum(a[n] * z ** (2 * n) for n in range(max_pairs + 1))


def test_corner_equals_even_contraction_series(rng):
    for _ in range(10):
        g = random_path(rng, 4, length=rng.uniform(0.2, 1.0))
        assert corner(g) == pytest.approx(_series(g, 1.0), abs=1e-10)
        assert corner(g, 0.7j) == pytest.approx(_series(g, 0.7j), abs=1e-10)


@pytest.mark.parametrize("s, speed, t", [(1.0, 1.0, 1.0), (2.0, 0.3, 0.5), (0.5, 2.0, 0.8)])
def test_linear_path_cosh(s, speed, t):
    g = PiecewiseLinearPath([0, 1], [[0, 0, 0], [speed * 0.6, 0.0, speed * 0.8]])
    val = expected_kernel_half_factorial(g, s, t)
    ref = math.cosh(math.sqrt(s / 2) * speed * t)
    assert abs(val - ref) <= 10 * np.finfo(float).eps * ref


def test_wiener_norm_closed_form():
    assert wiener_norm_sq_half_factorial(1.0, 2) == pytest.approx(1.6487213, abs=1e-7)
    assert wiener_norm_sq_half_factorial(1.0, 2) == math.exp(0.5)
    assert wiener_norm_sq_half_factorial(0.0, 5) == 1.0


@given(paths(d=3, max_len=2.0), st.floats(-2.0, 2.0))
def test_isometry(g, z):
    G = develop(g, z)
    J = minkowski_form(g.dim)
    np.testing.assert_allclose(G.T @ J @ G, J, atol=1e-10 * max(1.0, np.abs(G).max() ** 2))


@given(paths(max_len=2.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_corner_even_in_z(g, x, y):
    z = complex(x, y)
    assert corner(g, z) == pytest.approx(corner(g, -z), rel=1e-12, abs=1e-12)


@given(paths(max_len=2.0))
def test_cosh_rho_is_distance(g):
    p = develop(g) @ origin(g.dim)
    rho = hyperbolic_distance(origin(g.dim), p)
    assert math.cosh(rho) == pytest.approx(cosh_rho(g), rel=1e-9)
    assert cosh_rho(g) >= 1.0 - 1e-12
    assert minkowski(p, p) == pytest.approx(-1.0, abs=1e-9 * p[-1] ** 2)


def test_straight_line_distance_is_length():
    g = unit_line(2, 1.7)
    assert cosh_rho(g) == pytest.approx(math.cosh(1.7), rel=1e-14)
    back = PiecewiseLinearPath([0, 1, 2], [[0, 0], [1, 0], [0, 0]])
    assert cosh_rho(back) == pytest.approx(1.0, abs=1e-14)


def test_ode_mode_agrees(rng):
    g = random_path(rng, 3, d=2, length=1.5)
    for z in (1.0, 0.5 + 0.8j):
        np.testing.assert_allclose(develop(g, z, mode="ode", steps=2000), develop(g, z),
                                   atol=1e-10)
    with pytest.raises(ValueError):
        develop(g, mode="euler")


def test_corners_vectorised(rng):
    g = random_path(rng, 3)
    zs = np.array([0.0, 1.0, 0.3j, 2 - 1j])
    np.testing.assert_allclose(corners(g, zs), [corner(g, z) for z in zs], rtol=1e-13)
    np.testing.assert_allclose(corners(g, zs, 0.4), [corner(g, z, 0.4) for z in zs], rtol=1e-13)


def test_scaling_commutes(rng):
    g = random_path(rng, 3)
    assert corner(scale(g, 0.7)) == pytest.approx(corner(g, 0.7), rel=1e-14)


def test_segment_matrix_edge_cases():
    np.testing.assert_array_equal(segment_matrix([0.0, 0.0], 1.0), np.eye(3))
    with pytest.raises(ValueError):
        segment_matrix([1.0, 0.0], 0.0)


def test_distance_rejects_off_sheet():
    with pytest.raises(ValueError):
        hyperbolic_distance(np.array([0.0, 0.0, -1.0]), origin(2))
    with pytest.raises(ValueError):
        hyperbolic_distance(np.array([1.0, 0.0, 1.0]), origin(2))
