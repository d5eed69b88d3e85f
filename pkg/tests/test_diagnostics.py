from __future__ import annotations

import dataclasses

import numpy as np
import pytest
from conftest import DISK, PAIR_CHARGES, taubes_spec
from hypothesis import given
from hypothesis import strategies as st

from exotic_vortex import diagnostics as dg
from exotic_vortex.charges import ChargeData, winding_from_flux
from exotic_vortex.errors import InvalidInputError
from exotic_vortex.solver import ProblemSpec, newton_solve
from exotic_vortex.surface import Surface, build_grid

ONE = ChargeData([[1.0]], [1.0])
finite = st.floats(-10, 10, allow_nan=False)


@pytest.fixture(scope="module")
def taubes_vacuum_128():
    spec = taubes_spec(128, boundary="vacuum")
    return spec, newton_solve(spec)


def test_bogomolny_examples():
    assert dg.bogomolny_energy(1, [1.0], [1.0]) == pytest.approx(2 * np.pi)
    assert dg.bogomolny_energy(0, [3.0, -1.0], [2.0, 5.0]) == 0.0


@given(r1=finite, r2=finite, k1=finite, k2=finite, q11=st.floats(0.1, 5), q12=finite)
def test_split_identity(r1, r2, k1, k2, q11, q12):
    cd = ChargeData([[q11, q12], [0.0, 1.0]], [r1, r2])
    k_eff = k1 + (q12 / q11) * k2
    lhs = dg.bogomolny_energy(1, [r1, r2], [k1, k2])
    rhs = dg.frozen_energy_split(1, cd, k_eff, k2)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(r=st.lists(finite, min_size=2, max_size=2), k=st.lists(finite, min_size=2, max_size=2), c=st.floats(-4, 4))
def test_bogomolny_is_linear(r, k, c):
    base = dg.bogomolny_energy(1, r, k)
    assert dg.bogomolny_energy(1, r, np.multiply(c, k)) == pytest.approx(c * base, rel=1e-12, abs=1e-9)
    assert dg.bogomolny_energy(1, np.multiply(c, r), k) == pytest.approx(c * base, rel=1e-12, abs=1e-9)


def test_compare_fields_examples():
    x = np.random.default_rng(3).normal(size=(20, 20))
    assert dg.compare_fields(x, x) == (0.0, 0.0)
    y = x.copy()
    y[4, 7] += 0.5
    assert dg.compare_fields(x, y).l_inf == pytest.approx(0.5)


def test_compare_fields_equal_infinities():
    a = np.array([[-np.inf, 1.0], [2.0, np.nan]])
    n = dg.compare_fields(a, a.copy())
    assert n == (0.0, 0.0)


def test_compare_fields_errors():
    with pytest.raises(InvalidInputError):
        dg.compare_fields(np.zeros((3, 3)), np.zeros((4, 4)))
    with pytest.raises(InvalidInputError):
        dg.compare_fields(np.zeros((3, 3)), np.zeros((3, 3)), region="annulus")
    with pytest.raises(InvalidInputError):
        dg.compare_fields(np.zeros((3, 3)), np.zeros((3, 3)), region="everywhere")


def test_annulus_mask():
    g = build_grid(Surface(1), 32)
    m = dg.annulus_mask(g, [0j])
    r = np.abs(g.z[m])
    assert r.min() >= 5 * g.spacing - 1e-12
    assert r.max() <= 0.8 * 0.95 + 1e-12


@pytest.mark.parametrize("radius", [1.0, 1.5, 1.9])
def test_cell_weights_cover_inner_disks(radius):
    # radii at least a spacing inside the cutoff, where every straddling cell is active
    g = build_grid(Surface(0, 2.0), 64)
    assert dg.cell_weights(g, radius).sum() == pytest.approx(np.pi * radius**2, rel=1e-4)


def test_flux_of_single_vortex(taubes_vacuum_128):
    spec, fs = taubes_vacuum_128
    rep = dg.flux_report(spec, fs)
    assert abs(abs(rep.k[0]) - 1) < 0.02
    assert np.array_equal(rep.N_inferred, winding_from_flux(spec.charges, rep.k))
    assert rep.V_bps == pytest.approx(dg.bogomolny_energy(1, [1.0], rep.k))
    assert np.array_equal(dg.magnetic_flux(spec, fs), rep.k)


def test_flux_of_vacuum_is_zero():
    spec = ProblemSpec(DISK, 1, PAIR_CHARGES, ((), ()), grid_n=64)
    rep = dg.flux_report(spec, newton_solve(spec))
    assert np.max(np.abs(rep.k)) < 1e-10


def test_flux_additivity(taubes_vacuum_128):
    spec, fs = taubes_vacuum_128
    single = abs(dg.flux_report(spec, fs).contracted[0])
    double_spec = ProblemSpec(DISK, 1, ONE, ((0j, 0j),), grid_n=128)
    double = abs(dg.flux_report(double_spec, newton_solve(double_spec)).contracted[0])
    assert double / single == pytest.approx(2.0, rel=0.03)


def test_flux_with_singular_charges_reports_contractions():
    cd = ChargeData([[1.0, 1.0]], [0.5, 0.5])
    spec = ProblemSpec(DISK, 1, cd, ((0j,),), grid_n=64)
    fs = newton_solve(spec)
    rep = dg.flux_report(spec, fs)
    assert rep.k is None and rep.V_bps is None
    assert np.array_equal(dg.magnetic_flux(spec, fs), rep.contracted)
    assert abs(abs(rep.contracted[0]) - 1) < 0.05


def test_flux_needs_converged_fields(taubes_vacuum_128):
    spec, fs = taubes_vacuum_128
    with pytest.raises(InvalidInputError):
        dg.flux_report(spec, dataclasses.replace(fs, converged=False))


def test_locate_zeros_vacuum_and_single(taubes_vacuum_128):
    spec = ProblemSpec(DISK, 1, PAIR_CHARGES, ((), ()), grid_n=32)
    fs = newton_solve(spec)
    assert dg.locate_zeros(fs, 1) == [] and dg.locate_zeros(fs, 2) == []
    _, one = taubes_vacuum_128
    zeros = dg.locate_zeros(one, 1)
    assert len(zeros) == 1 and abs(zeros[0]) <= one.grid.spacing
    with pytest.raises(InvalidInputError):
        dg.locate_zeros(one, 2)


def test_locate_zeros_off_node():
    Z = 0.2137 - 0.3311j
    spec = ProblemSpec(DISK, 1, ONE, ((Z,),), grid_n=64)
    fs = newton_solve(spec)
    zeros = dg.locate_zeros(fs, 1)
    assert len(zeros) == 1 and abs(zeros[0] - Z) <= fs.grid.spacing


def test_pointwise_laplacian_is_exact_on_quartics():
    z = np.array([0.3 + 0.2j, -1.0 + 0.5j])

    def f(w):
        return w.real**4 - 3 * w.real * w.imag**2 + w.imag**3

    exact = 12 * z.real**2 - 6 * z.real + 6 * z.imag
    assert np.allclose(dg.pointwise_laplacian(f, z, 1e-2), exact, atol=1e-8)
