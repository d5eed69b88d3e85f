from __future__ import annotations

import numpy as np
import pytest

from exotic_vortex.charges import ChargeData
from exotic_vortex.holomorphic import HoloMap
from exotic_vortex.integrable import SingleFieldSolution
from exotic_vortex.solver import ProblemSpec, SolverConfig, newton_solve
from exotic_vortex.surface import Surface

# Lines printed by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):  # noqa: ARG001
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


DISK = Surface(1)
PAIR_CHARGES = ChargeData([[1.0, -1.0], [0.0, 1.0]], [1.0, 1.0])
PAIR_TOL = 1e-9


TAUBES_EXACT = SingleFieldSolution(DISK, 1, HoloMap.monomial(2))


def taubes_spec(n: int, boundary: str = "exact") -> ProblemSpec:
    """One Taubes vortex at the origin; ``boundary="exact"`` takes Dirichlet data from the closed form."""
    bnd = (TAUBES_EXACT.h,) if boundary == "exact" else "vacuum"
    return ProblemSpec(DISK, 1, ChargeData([[1.0]], [1.0]), ((0j,),), grid_n=n, boundary=bnd)


def pair_spec(n: int = 128) -> ProblemSpec:
    return ProblemSpec(DISK, 1, PAIR_CHARGES, ((-0.5 + 0j,), (0j,)), grid_n=n)


def taubes_exact_h(grid) -> np.ndarray:
    """Closed-form h of the f = z^2 Taubes vortex on the active nodes (NaN elsewhere)."""
    out = np.full(grid.shape, np.nan)
    with np.errstate(divide="ignore"):
        out[grid.active] = TAUBES_EXACT.h(grid.z[grid.active])
    return out


@pytest.fixture(scope="session")
def taubes_256():
    return newton_solve(taubes_spec(256), SolverConfig(tol=1e-10))


@pytest.fixture(scope="session")
def taubes_128():
    return newton_solve(taubes_spec(128), SolverConfig(tol=1e-10))


@pytest.fixture(scope="session")
def pair_fields():
    return newton_solve(pair_spec(128), SolverConfig(tol=PAIR_TOL))
