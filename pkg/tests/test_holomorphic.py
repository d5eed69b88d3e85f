from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exotic_vortex.errors import InvalidInputError, PoleError, UnsupportedInputError
from exotic_vortex.holomorphic import BlaschkeProduct, HoloMap, blaschke, polynomial_roots


def _sorted(divisor):
    return sorted(((round(z.real, 9), round(z.imag, 9)), m) for z, m in divisor)


def test_eval_examples():
    assert HoloMap.monomial(2)(3) == pytest.approx(9)
    assert HoloMap([1], power=2)(0.5) == pytest.approx(0.25)
    b = BlaschkeProduct((0, 0.5))
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    assert np.allclose(np.abs(b(np.exp(1j * t))), 1.0, atol=1e-12)


def test_derivative_examples():
    assert HoloMap.monomial(2).derivative_eval(3) == pytest.approx(6)
    assert HoloMap([1], power=2).derivative_eval(0.5) == pytest.approx(1.0)
    assert HoloMap([0, 1, 0, 1]).derivative_eval(1j) == pytest.approx(-2)


def test_non_integer_power_branch():
    f = HoloMap([1], power=0.5)
    assert f(-1) == pytest.approx(1j)
    assert f.derivative_eval(4) == pytest.approx(0.25)
    with pytest.raises(InvalidInputError):
        f(0)


def test_pole_error():
    f = HoloMap([1], [-0.5, 1])
    with pytest.raises(PoleError):
        f(0.5)
    with pytest.raises(PoleError):
        f.derivative_eval(0.5)


def test_invalid_maps():
    with pytest.raises(InvalidInputError):
        HoloMap([1], [0, 0])
    with pytest.raises(InvalidInputError):
        HoloMap([1], power=-1)


def test_check_domain():
    HoloMap([1], [-2, 1]).check_domain(0.95)
    with pytest.raises(InvalidInputError):
        HoloMap([1], [-0.5, 1]).check_domain(0.95)


def test_ramification_examples():
    assert _sorted(HoloMap.monomial(2).ramification_divisor()) == [((0.0, 0.0), 1)]
    assert HoloMap([0, 1]).ramification_divisor() == []
    a = 0.4
    f = HoloMap([0, -a * a, 0, 1 / 3])
    assert _sorted(f.ramification_divisor()) == [((-0.4, 0.0), 1), ((0.4, 0.0), 1)]


def test_ramification_search_radius_and_multiplicity():
    f = HoloMap([0, 0, 0, 0, 1])  # f' = 4 z^3
    assert _sorted(f.ramification_divisor()) == [((0.0, 0.0), 3)]
    g = HoloMap([0, -4.0, 0, 1 / 3])  # f' = z^2 - 4
    assert g.ramification_divisor(search_radius=1.0) == []


def test_ramification_rejects_fractional_power():
    with pytest.raises(UnsupportedInputError):
        HoloMap([1], power=1.5).ramification_divisor()


def test_ramification_of_rational_map():
    # f = z^2 / (1 - z/3): f' numerator z (2 - z/3), zeros at 0 and 6
    f = HoloMap([0, 0, 1], [1, -1 / 3])
    assert _sorted(f.ramification_divisor()) == [((0.0, 0.0), 1), ((6.0, 0.0), 1)]


def test_polynomial_roots_double_root():
    # (z - 0.3)^2 (z + 0.1)
    c = np.polynomial.polynomial.polyfromroots([0.3, 0.3, -0.1])
    assert _sorted(polynomial_roots(c)) == [((-0.1, 0.0), 1), ((0.3, 0.0), 2)]


coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=30, deadline=None)
@given(num=st.lists(coef, min_size=1, max_size=6), den_root=st.complex_numbers(min_magnitude=1.5, max_magnitude=3.0))
def test_derivative_matches_central_difference(num, den_root):
    f = HoloMap(tuple(num), (-den_root, 1.0))
    rng = np.random.default_rng(0)
    z = 0.9 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    errs = []
    for step in (1e-3, 5e-4):
        fd = (f(z + step) - f(z - step)) / (2 * step)
        errs.append(np.max(np.abs(fd - f.derivative_eval(z))))
    scale = 1.0 + np.max(np.abs(f.derivative_eval(z)))
    # second-order: the error shrinks about fourfold, or is already at roundoff
    assert errs[1] <= 0.3 * errs[0] + 1e-9 * scale
    assert errs[0] < 1e-3 * scale * 100


zero_in_disk = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(a=st.lists(zero_in_disk, min_size=1, max_size=3), b=st.lists(zero_in_disk, min_size=1, max_size=3))
def test_blaschke_closure_and_modulus(a, b):
    pa, pb = BlaschkeProduct(tuple(a)), BlaschkeProduct(tuple(b))
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    circle = np.exp(1j * t)
    assert np.allclose(np.abs((pa * pb)(circle)), 1.0, atol=1e-12)
    z = 0.7 * np.exp(1j * t)
    assert np.allclose((pa * pb)(z), pa(z) * pb(z), atol=1e-12, rtol=0)
    assert np.allclose(blaschke(a)(z), pa(z), atol=1e-10, rtol=0)


def test_blaschke_rejects_zero_outside_disk():
    with pytest.raises(InvalidInputError):
        BlaschkeProduct((1.0,))
