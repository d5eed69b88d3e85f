from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exotic_vortex.charges import (
    CARTAN_SU3,
    ChargeData,
    check_compatibility,
    toda_charge_family,
    vacuum_moduli,
    winding_from_flux,
)
from exotic_vortex.errors import InvalidInputError, NoVacuumError

S2, S3 = np.sqrt(2.0), np.sqrt(3.0)
PAIR = ChargeData([[1, -1], [0, 1]], [1, 1])


def test_cartan_matrix():
    assert np.array_equal(CARTAN_SU3, CARTAN_SU3.T)
    assert np.linalg.det(CARTAN_SU3) == pytest.approx(3.0)


def test_family_at_d0_upper_signs():
    cd = toda_charge_family(0.0, 1, 1)
    assert np.allclose(cd.Q, np.array([[-1, S3], [2, 0]]) / S2, atol=1e-15)
    assert np.allclose(cd.r, np.array([1, S3]) / S2, atol=1e-15)
    assert np.allclose(cd.Q @ cd.Q.T, [[2, -1], [-1, 2]], atol=1e-12)


@pytest.mark.parametrize("s1", [1, -1])
@pytest.mark.parametrize("s2", [1, -1])
def test_family_determinant_at_d1(s1, s2):
    cd = toda_charge_family(1.0, s1, s2)
    assert abs(abs(np.linalg.det(cd.Q)) - S3) < 1e-12


def test_family_rejects_large_d():
    with pytest.raises(InvalidInputError):
        toda_charge_family(1.5)


def test_compatibility_examples():
    assert not check_compatibility(PAIR)
    assert check_compatibility(ChargeData(np.eye(2), [1, 1]))
    assert check_compatibility(toda_charge_family(0.0, 1, 1))


def test_winding_examples():
    assert np.array_equal(winding_from_flux(PAIR, [-3, -2]), [1, 2])
    assert np.array_equal(winding_from_flux(PAIR, [0, 0]), [0, 0])
    assert np.array_equal(winding_from_flux(ChargeData(np.eye(2), [1, 1]), [-5, -7]), [5, 7])


ints = st.integers(-1000, 1000)


@given(q=st.lists(ints, min_size=4, max_size=4), k1=st.lists(ints, min_size=2, max_size=2), k2=st.lists(ints, min_size=2, max_size=2))
def test_winding_is_linear(q, k1, k2):
    Q = np.array(q, dtype=float).reshape(2, 2) / 8.0
    if np.any(np.all(Q == 0, axis=1)):
        return
    cd = ChargeData(Q, [1, 1])
    k1a, k2a = np.array(k1) / 4.0, np.array(k2) / 4.0
    # dyadic inputs keep every product exact, so equality is exact
    assert np.array_equal(winding_from_flux(cd, k1a + k2a), winding_from_flux(cd, k1a) + winding_from_flux(cd, k2a))


def test_vacuum_examples():
    assert np.allclose(vacuum_moduli(PAIR, 1, 1), [1, 2], atol=1e-14)
    assert np.allclose(vacuum_moduli(ChargeData(np.eye(2), [1, 1]), 1, 1), [1, 1], atol=1e-14)
    with pytest.raises(NoVacuumError):
        vacuum_moduli(PAIR, 1, -1)


def test_vacuum_singular_charge_matrix():
    cd = ChargeData([[1, 1], [2, 2]], [1, 1])
    v = vacuum_moduli(cd, 1, 1)
    assert np.allclose(cd.Q.T @ v, [1, 1], atol=1e-12)
    with pytest.raises(NoVacuumError):
        vacuum_moduli(ChargeData([[1, 1], [2, 2]], [1, 2]), 1, 1)


def test_vacuum_lambda_zero():
    with pytest.raises(NoVacuumError):
        vacuum_moduli(PAIR, 1, 0)
    assert np.array_equal(vacuum_moduli(PAIR, 0, 0), [1, 1])


def test_charge_data_validation():
    with pytest.raises(InvalidInputError):
        ChargeData([[0, 0], [0, 1]], [1, 1])
    with pytest.raises(InvalidInputError):
        ChargeData([[1, 0], [0, 1]], [1, 1, 1])
    with pytest.raises(InvalidInputError):
        ChargeData([[np.nan, 0], [0, 1]], [1, 1])


def test_coupling_and_constant_term():
    assert np.array_equal(PAIR.coupling, [[2, -1], [-1, 1]])
    assert np.array_equal(PAIR.constant_term, [0, 1])
