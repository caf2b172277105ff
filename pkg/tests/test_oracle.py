import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import i0

from conftest import paths, random_path, unit_line
from sigkern.oracle import (TruncatedTensor, chen_concat, expected_brownian_signature,
                            level_inner, segment_signature, truncated_phi_kernel,
                            truncated_signature, truncation_error_bound)
from sigkern.paths import PiecewiseLinearPath, scale
from sigkern.weights import WeightSequence, phi_beta, phi_constant, phi_factorial_half


def test_segment_signature_scalar():
    sig = segment_signature([1.0], 1.0, 3)
    np.testing.assert_allclose([sig[k][0] for k in range(4)], [1, 1, 0.5, 1 / 6])


def test_segment_signature_zero_vector():
    sig = segment_signature([0.0, 0.0], 2.0, 3)
    assert sig[0][0] == 1
    assert all(np.all(sig[k] == 0) for k in (1, 2, 3))


def test_segment_signature_diagonal_level2():
    np.testing.assert_allclose(segment_signature([1.0, 1.0], 1.0, 2)[2], 0.5)


def test_segment_duration_checked():
    with pytest.raises(ValueError):
        segment_signature([1.0], 0.0, 2)


def test_unit_is_neutral(rng):
    a = truncated_signature(random_path(rng, 3, 2), 4)
    u = TruncatedTensor.unit(2, 4)
    for k in range(5):
        np.testing.assert_allclose(chen_concat(a, u)[k], a[k])
        np.testing.assert_allclose(chen_concat(u, a)[k], a[k])


def test_opposite_segments_cancel_level1():
    v = np.array([0.3, -1.2])
    prod = chen_concat(segment_signature(v, 1.0, 3), segment_signature(-v, 1.0, 3))
    np.testing.assert_allclose(prod[1], 0.0, atol=1e-15)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        chen_concat(segment_signature([1.0], 1.0, 2), segment_signature([1.0, 0], 1.0, 2))


def _iterated_integral_2(path, i, j):
    """int_{s<t} dx^i_s dx^j_t by adaptive quadrature."""
    v = path.velocities()

    def vel(t, k):
        seg = min(np.searchsorted(path.times, t, side="right") - 1, len(v) - 1)
        return v[seg, k]

    def inner(t):
        return quad(lambda s: vel(s, i), path.start, t, points=path.times[1:-1], limit=200)[0]

    return quad(lambda t: inner(t) * vel(t, j), path.start, path.end,
                points=path.times[1:-1], limit=200)[0]


def test_concat_matches_direct_iterated_integrals():
    p = PiecewiseLinearPath([0, 0.4, 1.0], [[0, 0], [1.0, 0.5], [0.2, 1.3]])
    sig = truncated_signature(p, 2)
    for i in range(2):
        for j in range(2):
            assert sig[2][2 * i + j] == pytest.approx(_iterated_integral_2(p, i, j), abs=1e-9)


def test_n0_kernel_is_phi0(rng):
    a, b = random_path(rng), random_path(rng)
    assert truncated_phi_kernel(a, b, phi_factorial_half(), 0) == 1.0
    assert truncated_phi_kernel(a, b, phi_beta(1), 0) == 1.0


def test_unit_line_bessel():
    p = unit_line()
    assert truncated_phi_kernel(p, p, phi_constant(), 15) == pytest.approx(i0(2.0), abs=1e-12)


def test_beta1_series():
    p = unit_line()
    ref = sum(1 / ((k + 1) * math.factorial(k) ** 2) for k in range(16))
    assert truncated_phi_kernel(p, p, phi_beta(1), 15) == pytest.approx(ref, abs=1e-14)


def test_truncation_bound_examples():
    assert truncation_error_bound(phi_constant(), 0.0, 0.0, 3) == 0.0
    ref = sum(1 / math.factorial(k) ** 2 for k in range(4, 40))
    assert truncation_error_bound(phi_constant(), 1.0, 1.0, 3) == pytest.approx(ref, rel=1e-14)
    b = [truncation_error_bound(phi_factorial_half(), 1.0, 1.0, n) for n in range(12)]
    assert all(x > y for x, y in zip(b, b[1:]))


def test_tail_literal_value():
    # frozen literal for sum_{k>=4} 1/(k!)^2; the direct sum is 1.80752e-3
    assert truncation_error_bound(phi_constant(), 1.0, 1.0, 3) == pytest.approx(1.7497e-3, rel=1e-3)


def test_truncation_bound_rejects_divergent_weight():
    bad = WeightSequence(lambda k: math.exp(2 * math.lgamma(k + 1) + k * math.log(2)))
    with pytest.raises(ValueError):
        truncation_error_bound(bad, 1.0, 1.0, 3)


def test_expected_signature_level2():
    e = expected_brownian_signature(2, 4, s=1.0)
    np.testing.assert_allclose(e[2], [0.5, 0, 0, 0.5])
    assert np.all(e[1] == 0) and np.all(e[3] == 0)


def test_beta_bound_below_bessel_tail():
    # Beta weights are <= 1, so the tail never exceeds the phi = 1 Bessel tail
    for m in (0.5, 1.0, 3.0):
        for L in (0.5, 1.0, 1.5):
            assert (truncation_error_bound(phi_beta(m), L, L, 6)
                    <= truncation_error_bound(phi_constant(), L, L, 6) * (1 + 1e-14))


@given(paths(max_len=1.5), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_scaling_identity(p, re, im):
    theta = complex(re, im)
    a = truncated_signature(p, 5)
    b = truncated_signature(scale(p, theta), 5)
    for k in range(6):
        np.testing.assert_allclose(b[k], theta**k * a[k], atol=1e-12)


@given(paths(), paths(), paths())
def test_chen_associativity(p, q, r):
    a, b, c = (truncated_signature(x, 4) for x in (p, q, r))
    lhs, rhs = chen_concat(a, chen_concat(b, c)), chen_concat(chen_concat(a, b), c)
    for k in range(5):
        np.testing.assert_allclose(lhs[k], rhs[k], atol=1e-13)


@given(paths(max_len=2.0))
def test_level_norm_bound(p):
    sig = truncated_signature(p, 8)
    L = p.length()
    for k in range(9):
        assert np.linalg.norm(sig[k]) <= L**k / math.factorial(k) * (1 + 1e-12) + 1e-15


@given(paths(d=1, max_len=1.5), paths(d=1, max_len=1.5), st.integers(0, 8))
def test_truncation_bound_dominates(p, q, N):
    for phi in (phi_constant(), phi_factorial_half(), phi_beta(2.0)):
        err = abs(truncated_phi_kernel(p, q, phi, N + 20) - truncated_phi_kernel(p, q, phi, N))
        assert err <= truncation_error_bound(phi, p.length(), q.length(), N) * (1 + 1e-9) + 1e-15


@given(paths(max_len=1.5), paths(max_len=1.5))
def test_truncation_bound_dominates_2d(p, q):
    # d = 2 limits the comparison depth to N + 10
    phi = phi_factorial_half()
    err = abs(truncated_phi_kernel(p, q, phi, 14) - truncated_phi_kernel(p, q, phi, 4))
    assert err <= truncation_error_bound(phi, p.length(), q.length(), 4) * (1 + 1e-9) + 1e-15


def test_level_inner_is_bilinear(rng):
    p = random_path(rng)
    a, b = truncated_signature(scale(p, 1j), 3), truncated_signature(p, 3)
    # no conjugation: <i^k x, i^k x> = i^(2k) |x|^2
    for k in range(4):
        assert level_inner(a, a, k) == pytest.approx((-1) ** k * np.sum(b[k] ** 2), abs=1e-14)
