"""Holomorphic maps ``f(z) = z^beta P(z) / Q(z)`` handled by their coefficients.

Coefficient lists are in ascending order, ``c[0] + c[1] z + c[2] z^2 + ...``,
matching :mod:`numpy.polynomial.polynomial`. Derivatives are always formed
from the coefficients, never by finite differences.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidInputError, PoleError, UnsupportedInputError

ComplexArray = NDArray[np.complex128]

ROOT_CLUSTER_RADIUS = 1e-6
_POLE_RTOL = 1e-14


def _coeffs(c: ArrayLike, name: str) -> tuple[complex, ...]:
    arr = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d coefficient list")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite coefficients")
    # drop exactly-zero leading terms, keep at least the constant
    nz = np.flatnonzero(arr)
    arr = arr[: nz[-1] + 1] if nz.size else arr[:1]
    return tuple(complex(v) for v in arr)


def _is_integer(beta: float) -> bool:
    return float(beta).is_integer()


@dataclass(frozen=True)
class HoloMap:
    """Rational map with an optional real power prefactor ``z^beta``.

    ``beta`` may be non-integer (impurity solutions with fractional strength);
    then ``z^beta`` uses the principal branch, ``arg z in (-pi, pi]``.
    """

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...] = (1.0 + 0j,)
    power: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "numerator", _coeffs(self.numerator, "numerator"))
        den = _coeffs(self.denominator, "denominator")
        if not any(den):
            raise InvalidInputError("denominator is identically zero")
        object.__setattr__(self, "denominator", den)
        beta = float(self.power)
        if not np.isfinite(beta) or beta < 0:
            raise InvalidInputError("power prefactor beta must be a real number >= 0")
        object.__setattr__(self, "power", beta)

    # -- constructors -------------------------------------------------------
    @classmethod
    def polynomial(cls, coefficients: ArrayLike) -> HoloMap:
        return cls(numerator=tuple(np.atleast_1d(coefficients)))

    @classmethod
    def monomial(cls, degree: int, scale: complex = 1.0) -> HoloMap:
        c = np.zeros(degree + 1, dtype=np.complex128)
        c[degree] = scale
        return cls(numerator=tuple(c))

    def times_power(self, beta: float) -> HoloMap:
        """Multiply by ``z^beta``; integer powers are folded into the numerator."""
        total = self.power + float(beta)
        if _is_integer(beta):
            k = int(beta)
            num = np.concatenate([np.zeros(k, dtype=np.complex128), self._num])
            return HoloMap(tuple(num), self.denominator, self.power)
        return HoloMap(self.numerator, self.denominator, total)

    # -- internals ------------------------------------------------------------
    @property
    def _num(self) -> ComplexArray:
        return np.asarray(self.numerator, dtype=np.complex128)

    @property
    def _den(self) -> ComplexArray:
        return np.asarray(self.denominator, dtype=np.complex128)

    @property
    def is_polynomial(self) -> bool:
        return len(self.denominator) == 1 and _is_integer(self.power)

    def _check_point(self, z: ComplexArray) -> ComplexArray:
        den = npoly.polyval(z, self._den)
        scale = npoly.polyval(np.abs(z), np.abs(self._den))
        if np.any(np.abs(den) <= _POLE_RTOL * scale):
            raise PoleError("evaluation at a zero of the denominator")
        if not _is_integer(self.power) and np.any(z == 0):
            raise InvalidInputError("z = 0 is a branch point of z^beta for non-integer beta")
        return den

    def _zpow(self, z: ComplexArray, beta: float) -> ComplexArray:
        if beta == 0.0:
            return np.ones_like(z)
        if _is_integer(beta):
            return z ** int(beta)
        return np.power(z, beta)

    # -- evaluation -----------------------------------------------------------
    def eval(self, z: complex | ArrayLike) -> complex | ComplexArray:
        """Value ``z^beta P(z)/Q(z)``."""
        zz = np.asarray(z, dtype=np.complex128)
        den = self._check_point(zz)
        out = self._zpow(zz, self.power) * npoly.polyval(zz, self._num) / den
        return complex(out) if out.ndim == 0 else out

    __call__ = eval

    def derivative_eval(self, z: complex | ArrayLike) -> complex | ComplexArray:
        """Exact ``df/dz`` by the quotient rule on the coefficients and the power rule."""
        zz = np.asarray(z, dtype=np.complex128)
        den = self._check_point(zz)
        P, Q = self._num, self._den
        num = npoly.polyval(zz, P)
        r = num / den
        dr = (npoly.polyval(zz, npoly.polyder(P)) * den - num * npoly.polyval(zz, npoly.polyder(Q))) / den**2
        beta = self.power
        if beta == 0.0:
            out = dr
        else:
            out = beta * self._zpow(zz, beta - 1.0) * r + self._zpow(zz, beta) * dr
        return complex(out) if out.ndim == 0 else out

    def derivative_numerator(self) -> ComplexArray:
        """Polynomial whose zeros are the zeros of ``f'`` (integer ``beta`` only)."""
        if not _is_integer(self.power):
            raise UnsupportedInputError("ramification data needs an integer power prefactor")
        P, Q = self._num, self._den
        k = int(self.power)
        if k:
            P = np.concatenate([np.zeros(k, dtype=np.complex128), P])
        return npoly.polysub(npoly.polymul(npoly.polyder(P), Q), npoly.polymul(P, npoly.polyder(Q)))

    def ramification_divisor(self, search_radius: float = np.inf) -> list[tuple[complex, int]]:
        """Zeros of ``f'`` with ``|z| < search_radius``, as (position, multiplicity)."""
        roots = polynomial_roots(self.derivative_numerator())
        out = []
        for z0, m in roots:
            if abs(z0) >= search_radius:
                continue
            # a common zero with Q is a cancellation, not a ramification point
            if abs(npoly.polyval(z0, self._den)) <= 1e-10 * max(1.0, np.abs(self._den).max()):
                continue
            out.append((z0, m))
        return out

    def check_domain(self, radius: float) -> None:
        """Raise if the denominator vanishes inside ``|z| < radius``."""
        if len(self.denominator) == 1:
            return
        for z0, _ in polynomial_roots(self._den):
            if abs(z0) < radius:
                raise InvalidInputError(f"denominator has a zero at {z0:.6g} inside |z| < {radius}")


def polynomial_roots(coefficients: ArrayLike) -> list[tuple[complex, int]]:
    """Roots with multiplicity of an ascending-coefficient polynomial.

    Companion-matrix eigenvalues, one Newton polish step, then clustering:
    an m-fold root splits into eigenvalues about eps**(1/m) apart, so the
    merge radius is ``ROOT_CLUSTER_RADIUS`` scaled by ``max(1, |root|)``.
    """
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.size and np.max(np.abs(c)) > 0:
        c = np.where(np.abs(c) <= 1e-14 * np.max(np.abs(c)), 0.0, c)
    c = npoly.polytrim(c, 0.0)
    if c.size <= 1:
        return []
    raw = npoly.polyroots(c)
    dc = npoly.polyder(c)
    polished = []
    for z0 in np.atleast_1d(raw):
        d = npoly.polyval(z0, dc)
        if abs(d) > 1e-8 * max(1.0, np.abs(dc).max()):
            step = npoly.polyval(z0, c) / d
            if abs(step) < ROOT_CLUSTER_RADIUS:
                z0 = z0 - step
        polished.append(complex(z0))
    # deterministic order: by real part, then imaginary part
    polished.sort(key=lambda w: (round(w.real, 9), round(w.imag, 9)))
    clusters: list[list[complex]] = []
    for w in polished:
        for cl in clusters:
            ctr = np.mean(cl)
            if abs(w - ctr) <= ROOT_CLUSTER_RADIUS * max(1.0, abs(ctr)):
                cl.append(w)
                break
        else:
            clusters.append([w])
    out = []
    for cl in clusters:
        ctr = complex(np.mean(cl))
        ctr = complex(0.0 if abs(ctr.real) < 1e-13 else ctr.real, 0.0 if abs(ctr.imag) < 1e-13 else ctr.imag)
        out.append((ctr, len(cl)))
    return out


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product ``prod (z - a_i) / (1 - conj(a_i) z)`` with ``|a_i| < 1``."""

    zeros: tuple[complex, ...]

    def __post_init__(self) -> None:
        zs = tuple(complex(a) for a in self.zeros)
        if any(abs(a) >= 1.0 for a in zs):
            raise InvalidInputError("Blaschke zeros must lie in the open unit disk")
        object.__setattr__(self, "zeros", zs)

    def as_holomap(self) -> HoloMap:
        num = np.ones(1, dtype=np.complex128)
        den = np.ones(1, dtype=np.complex128)
        for a in self.zeros:
            num = npoly.polymul(num, [-a, 1.0])
            den = npoly.polymul(den, [1.0, -np.conj(a)])
        return HoloMap(tuple(num), tuple(den))

    def eval(self, z: complex | ArrayLike) -> complex | ComplexArray:
        zz = np.asarray(z, dtype=np.complex128)
        out = np.ones_like(zz)
        for a in self.zeros:
            out = out * (zz - a) / (1.0 - np.conj(a) * zz)
        return complex(out) if out.ndim == 0 else out

    __call__ = eval

    def __mul__(self, other: BlaschkeProduct) -> BlaschkeProduct:
        return BlaschkeProduct(self.zeros + other.zeros)


def blaschke(zeros: Sequence[complex]) -> HoloMap:
    return BlaschkeProduct(tuple(zeros)).as_holomap()
