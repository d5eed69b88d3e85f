"""Polynomials in ``z`` and ``zbar`` treated as independent variables.

Used for exact mixed derivatives of Gram-type determinants built from
holomorphic polynomials. ``coef[i, j]`` multiplies ``z**i * zbar**j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
from numpy.typing import ArrayLike, NDArray
from scipy.signal import convolve2d


@dataclass(frozen=True, eq=False)
class ZZbarPoly:
    coef: NDArray[np.complex128]

    def __post_init__(self) -> None:
        c = np.array(self.coef, dtype=np.complex128, ndmin=2)
        object.__setattr__(self, "coef", c)

    @classmethod
    def holomorphic(cls, coefficients: ArrayLike) -> ZZbarPoly:
        c = np.asarray(coefficients, dtype=np.complex128)
        return cls(c.reshape(-1, 1))

    @classmethod
    def antiholomorphic(cls, coefficients: ArrayLike) -> ZZbarPoly:
        """The complex conjugate of the holomorphic polynomial with these coefficients."""
        c = np.conj(np.asarray(coefficients, dtype=np.complex128))
        return cls(c.reshape(1, -1))

    @classmethod
    def constant(cls, value: complex) -> ZZbarPoly:
        return cls(np.array([[value]], dtype=np.complex128))

    def _padded(self, shape: tuple[int, int]) -> NDArray[np.complex128]:
        out = np.zeros(shape, dtype=np.complex128)
        out[: self.coef.shape[0], : self.coef.shape[1]] = self.coef
        return out

    def __add__(self, other: ZZbarPoly) -> ZZbarPoly:
        shape = (max(self.coef.shape[0], other.coef.shape[0]), max(self.coef.shape[1], other.coef.shape[1]))
        return ZZbarPoly(self._padded(shape) + other._padded(shape))

    def __neg__(self) -> ZZbarPoly:
        return ZZbarPoly(-self.coef)

    def __sub__(self, other: ZZbarPoly) -> ZZbarPoly:
        return self + (-other)

    def __mul__(self, other: ZZbarPoly | complex) -> ZZbarPoly:
        if isinstance(other, ZZbarPoly):
            return ZZbarPoly(convolve2d(self.coef, other.coef))
        return ZZbarPoly(self.coef * other)

    __rmul__ = __mul__

    def dz(self) -> ZZbarPoly:
        c = self.coef
        if c.shape[0] == 1:
            return ZZbarPoly(np.zeros((1, c.shape[1]), dtype=np.complex128))
        i = np.arange(1, c.shape[0], dtype=np.float64)[:, None]
        return ZZbarPoly(c[1:, :] * i)

    def dzbar(self) -> ZZbarPoly:
        c = self.coef
        if c.shape[1] == 1:
            return ZZbarPoly(np.zeros((c.shape[0], 1), dtype=np.complex128))
        j = np.arange(1, c.shape[1], dtype=np.float64)[None, :]
        return ZZbarPoly(c[:, 1:] * j)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coef) <= tol))

    def is_constant(self, tol: float = 0.0) -> bool:
        c = self.coef.copy()
        c[0, 0] = 0.0
        return bool(np.all(np.abs(c) <= tol))

    def __call__(self, z: complex | ArrayLike) -> complex | NDArray[np.complex128]:
        zz = np.asarray(z, dtype=np.complex128)
        out = npoly.polyval2d(zz, np.conj(zz), self.coef)
        return complex(out) if np.ndim(out) == 0 else out


def log_laplacian_numerator(D: ZZbarPoly) -> ZZbarPoly:
    """``D d_z d_zbar D - d_z D d_zbar D``; dividing by ``D**2`` gives ``d_z d_zbar log D``."""
    Dz = D.dz()
    Dzb = D.dzbar()
    return D * Dz.dzbar() - Dz * Dzb
