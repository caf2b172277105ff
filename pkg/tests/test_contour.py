import math

import numpy as np
import pytest
from scipy.special import iv

from sigkern.contour import (TWS_FAMILIES, ContourSpec, circle_trapezoid, contour_integral,
                             reciprocal_gamma, reciprocal_gamma_reference, tws_map, tws_quadrature)

PS = (0.5, 1.0, 2.5, 5.0)


def _bessel_series(x, terms=40):
    return sum(x**k / math.factorial(k) ** 2 for k in range(terms))


def test_circle_reproduces_bessel_series():
    x = 1.0**2 * 2 / 4
    val = circle_trapezoid(lambda z: np.exp(x / z) / z, 32)
    assert val.real == pytest.approx(_bessel_series(x), abs=1e-14)
    assert val.real == pytest.approx(iv(0, 2 * math.sqrt(x)), abs=1e-14)
    assert abs(val.imag) < 1e-14


def test_circle_spot_literal():
    # stated reference value for (s, d) = (1, 2); the series itself gives 1.5660829297563...
    val = circle_trapezoid(lambda z: np.exp(0.5 / z) / z, 32).real
    assert abs(val - 1.5660939) <= 1e-10


@pytest.mark.parametrize("family", TWS_FAMILIES)
@pytest.mark.parametrize("p", PS)
def test_tws_reciprocal_gamma(family, p):
    assert reciprocal_gamma(p, family, 32) == pytest.approx(reciprocal_gamma_reference(p), abs=1e-8)


@pytest.mark.parametrize("family", TWS_FAMILIES)
@pytest.mark.parametrize("p", PS)
def test_tws_geometric_decay(family, p):
    ref = reciprocal_gamma_reference(p)
    ns = np.arange(6, 50, 2)
    err = np.array([abs(reciprocal_gamma(p, family, int(n)) - ref) for n in ns])
    assert err.min() <= 1e-12
    above = err > 1e-12
    k = int(np.argmin(above)) if not above.all() else len(err)
    head = err[:k]
    # error may oscillate between neighbours; over 8 added nodes it drops tenfold
    assert np.all(head[4:] < head[:-4] / 10)
    slope = np.polyfit(ns[:k], np.log(head), 1)[0]
    assert slope < -0.5  # at least a factor e^{-1/2} per added node


@pytest.mark.parametrize("n", [2, 4, 7])
def test_circle_integer_order(n):
    assert reciprocal_gamma(n, "circle", 32) == pytest.approx(1 / math.factorial(n - 1), abs=1e-14)
    assert reciprocal_gamma(0, "circle", 32) == pytest.approx(0.0, abs=1e-14)


def test_circle_rejects_fractional_order():
    with pytest.raises(ValueError):
        reciprocal_gamma(0.5, "circle")


def test_reference_values():
    assert reciprocal_gamma_reference(0.5) == pytest.approx(1 / math.sqrt(math.pi))
    assert reciprocal_gamma_reference(-1.0) == 0.0
    assert reciprocal_gamma_reference(-0.5) == pytest.approx(1 / math.gamma(-0.5))


@pytest.mark.parametrize("family", TWS_FAMILIES)
def test_tws_map_derivative(family):
    th = np.linspace(-3.0, 3.0, 13)
    h = 1e-6
    z, dz = tws_map(family, th, 20)
    num = (tws_map(family, th + h, 20)[0] - tws_map(family, th - h, 20)[0]) / (2 * h)
    np.testing.assert_allclose(dz, num, rtol=1e-6, atol=1e-6)


def test_tws_handles_cosine_exponential():
    # (1/2 pi i) int e^z z^{-1} e^{-1/z} dz = J0(2)
    from scipy.special import j0
    val = tws_quadrature(lambda z: np.exp(-1.0 / z) / z, 40, "hyperbolic")
    assert val.real == pytest.approx(j0(2.0), abs=1e-10)


def test_contour_spec():
    assert ContourSpec().is_circle
    spec = ContourSpec("cotangent", 32)
    assert contour_integral(lambda z: 1 / z, spec).real == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        ContourSpec("square")
    with pytest.raises(ValueError):
        ContourSpec("circle", 2)
    with pytest.raises(ValueError):
        ContourSpec("circle", 32, 0.0)
    with pytest.raises(ValueError):
        tws_map("ellipse", np.zeros(1), 4)


def test_scalar_only_integrand():
    val = circle_trapezoid(lambda z: complex(z) ** -2, 16)
    assert val.real == pytest.approx(1.0, abs=1e-13)
