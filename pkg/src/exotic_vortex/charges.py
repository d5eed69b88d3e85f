"""Charge matrices and Fayet-Iliopoulos parameters of the U(1)^2 theory."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidInputError, NoVacuumError

FloatArray = NDArray[np.float64]

CARTAN_SU3: FloatArray = np.array([[2.0, -1.0], [-1.0, 2.0]])
CARTAN_SU3.setflags(write=False)

COMPAT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ChargeData:
    """Charge matrix ``Q`` (rows: flavors A, columns: gauge groups a) and FI vector ``r``."""

    Q: FloatArray
    r: FloatArray

    def __post_init__(self) -> None:
        Q = np.array(self.Q, dtype=np.float64, ndmin=2)
        r = np.array(self.r, dtype=np.float64, ndmin=1)
        if Q.ndim != 2 or r.ndim != 1 or Q.shape[1] != r.shape[0]:
            raise InvalidInputError(f"shape mismatch: Q {Q.shape}, r {r.shape}")
        if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(r))):
            raise InvalidInputError("charges must be finite")
        if np.any(np.all(Q == 0.0, axis=1)):
            raise InvalidInputError("every flavor needs a non-zero charge")
        Q.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "r", r)

    @property
    def n_flavors(self) -> int:
        return self.Q.shape[0]

    @property
    def coupling(self) -> FloatArray:
        """sum_a Q_Aa Q_Ba, the matrix multiplying exp(2 h_B) in flavor A's equation."""
        return self.Q @ self.Q.T

    @property
    def constant_term(self) -> FloatArray:
        """sum_a Q_Aa r_a."""
        return self.Q @ self.r

    @property
    def compatible(self) -> bool:
        return check_compatibility(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChargeData):
            return NotImplemented
        return np.array_equal(self.Q, other.Q) and np.array_equal(self.r, other.r)

    def __repr__(self) -> str:
        return f"ChargeData(Q={self.Q.tolist()}, r={self.r.tolist()})"


def toda_charge_family(d: float, sign1: int = 1, sign2: int = 1) -> ChargeData:
    """Charge matrix with ``Q Q^T`` equal to the SU(3) Cartan matrix, plus compatible FI terms.

    ``sign1`` and ``sign2`` are the two independent signs (upper = +1).
    ``det Q = -sign1 * sign2 * sqrt(3)`` for every ``d`` in ``[-sqrt 2, sqrt 2]``.
    """
    if sign1 not in (1, -1) or sign2 not in (1, -1):
        raise InvalidInputError("signs must be +1 or -1")
    d = float(d)
    if not np.isfinite(d) or abs(d) > np.sqrt(2.0) * (1 + 1e-15):
        raise InvalidInputError(f"|d| must not exceed sqrt(2), got {d}")
    a = np.sqrt(max(2.0 - d * d, 0.0))
    s, sp = sign1, sign2
    s3 = np.sqrt(3.0)
    Q = np.array(
        [
            [-sp * a / 2.0 - sp * s * s3 * d / 2.0, -d / 2.0 + s * s3 * a / 2.0],
            [sp * a, d],
        ]
    )
    r = 0.5 * np.array([-sp * s * s3 * d + sp * a, s * s3 * a + d])
    return ChargeData(Q, r)


def check_compatibility(cd: ChargeData, tol: float = COMPAT_TOL) -> bool:
    """True iff ``sum_a Q_Aa r_a = 1`` for every flavor A."""
    return bool(np.max(np.abs(cd.constant_term - 1.0)) < tol)


def winding_from_flux(cd: ChargeData, k: ArrayLike) -> FloatArray:
    """Vortex numbers ``N_A = -sum_a Q_Aa k^a``."""
    return -(cd.Q @ np.asarray(k, dtype=np.float64))


def vacuum_moduli(cd: ChargeData, lambda0: int, lam: int) -> FloatArray:
    """Vacuum values ``|phi_A|^2`` solving ``lambda sum_A |phi_A|^2 Q_Aa = lambda0 r_a``.

    A singular ``Q`` is accepted when ``lambda0 r`` lies in the row span of Q.
    With ``lambda = 0`` the condition only holds for ``lambda0 r = 0``; the
    vacuum is then undetermined and the conventional ``|phi|^2 = 1`` is returned.
    """
    target = lambda0 * cd.r
    if lam == 0:
        if np.any(target != 0.0):
            raise NoVacuumError("lambda = 0: vacuum requires lambda0 r = 0")
        return np.ones(cd.n_flavors)
    A = lam * cd.Q.T
    v, *_ = np.linalg.lstsq(A, target, rcond=None)
    resid = np.max(np.abs(A @ v - target)) if target.size else 0.0
    if resid >= 1e-10:
        raise NoVacuumError(f"vacuum equations are inconsistent (residual {resid:.3g})")
    if np.any(v < -1e-14):
        raise NoVacuumError(f"vacuum has negative |phi|^2 = {v.tolist()} (D-term breaking)")
    return np.maximum(v, 0.0)
