"""Closed-form vortex solutions.

Single-field vortices come from a holomorphic map ``f`` into the target
surface of curvature ``-lambda``:

    g = -log((1 - lambda |f|^2) / 2) + 1/2 log |f'|^2,
    |phi|^2 = (1 - lambda0 |z|^2)^2 |f'|^2 / (1 - lambda |f|^2)^2.

Impurities of strength ``alpha`` at the origin use ``f = z^(alpha+1) ftilde``.
The coupled SU(3) Toda system is solved by Gram determinants of
``u = (1, f1, f2)`` against ``v = (1, -lambda f1, -lambda f2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.polynomial.polynomial as npoly
from numpy.typing import ArrayLike, NDArray

from .errors import DegenerateDataError, InvalidInputError, SurfaceSingularityError
from .holomorphic import HoloMap, polynomial_roots
from .surface import Surface
from .zzbar import ZZbarPoly, log_laplacian_numerator

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

_SINGULAR_TOL = 1e-14


def _check_sign(lam: int, allowed: tuple[int, ...] = (-1, 0, 1)) -> int:
    if lam not in allowed:
        raise InvalidInputError(f"lambda must be one of {allowed}, got {lam!r}")
    return int(lam)


def _check_points(surface: Surface, z: ComplexArray) -> None:
    if not np.all(surface.contains(z)):
        raise InvalidInputError("point outside the model domain of the surface")


def _scalar(a: NDArray) -> float | complex | NDArray:
    if np.ndim(a) == 0:
        v = a.item()
        return v
    return a


class SinglePoint(NamedTuple):
    g: float
    h: float
    phi_norm_sq: float


class ImpurityPoint(NamedTuple):
    phi: complex
    phi_norm_sq: float


# ---------------------------------------------------------------------------
# single field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingleFieldSolution:
    """Vortex solution of the (lambda0, lambda) equation generated by ``f``.

    All methods accept scalars or arrays. ``g`` and ``h`` are ``-inf`` at
    ramification points, where ``|phi|^2 = 0``.
    """

    surface: Surface
    lam: int
    f: HoloMap

    def __post_init__(self) -> None:
        _check_sign(self.lam)
        if self.surface.lambda0 == 1:
            self.f.check_domain(1.0)

    def _target_factor(self, z: ComplexArray) -> ComplexArray:
        """1 - lambda |f|^2, raising where it vanishes."""
        fz = np.asarray(self.f(z))
        t = 1.0 - self.lam * (fz.real**2 + fz.imag**2)
        if np.any(np.abs(t) <= _SINGULAR_TOL * np.maximum(1.0, np.abs(fz) ** 2)):
            raise SurfaceSingularityError("1 - lambda |f|^2 vanishes: f leaves the target surface")
        return t

    def _prepare(self, z: complex | ArrayLike) -> ComplexArray:
        zz = np.asarray(z, dtype=np.complex128)
        _check_points(self.surface, zz)
        return zz

    def g(self, z: complex | ArrayLike) -> float | FloatArray:
        zz = self._prepare(z)
        t = self._target_factor(zz)
        df = np.asarray(self.f.derivative_eval(zz))
        with np.errstate(divide="ignore"):
            out = -np.log(np.abs(t) / 2.0) + np.log(np.abs(df))
        return _scalar(out)

    def h(self, z: complex | ArrayLike) -> float | FloatArray:
        zz = self._prepare(z)
        base = 1.0 - self.surface.lambda0 * (zz.real**2 + zz.imag**2)
        return _scalar(np.asarray(self.g(zz)) + np.log(base / 2.0))

    def phi(self, z: complex | ArrayLike) -> complex | ComplexArray:
        """Higgs field in unitary gauge, ``(1 - lambda0 |z|^2) f' / (1 - lambda |f|^2)``."""
        zz = self._prepare(z)
        t = self._target_factor(zz)
        base = 1.0 - self.surface.lambda0 * (zz.real**2 + zz.imag**2)
        return _scalar(base * np.asarray(self.f.derivative_eval(zz)) / t)

    def phi_norm_sq(self, z: complex | ArrayLike) -> float | FloatArray:
        p = np.asarray(self.phi(z))
        return _scalar(p.real**2 + p.imag**2)

    def a_zbar(self, z: complex | ArrayLike) -> complex | ComplexArray:
        """``A_zbar = -i d_zbar log((1 - lambda0 |z|^2) / (1 - lambda |f|^2))``."""
        zz = self._prepare(z)
        t = self._target_factor(zz)
        l0 = self.surface.lambda0
        fz = np.asarray(self.f(zz))
        df = np.asarray(self.f.derivative_eval(zz))
        base = 1.0 - l0 * (zz.real**2 + zz.imag**2)
        dlog = -l0 * zz / base + self.lam * fz * np.conj(df) / t
        return _scalar(-1j * dlog)


def eval_single(sol: SingleFieldSolution, z: complex) -> SinglePoint:
    """g, h and |phi|^2 of a single-field solution at one point."""
    zz = complex(z)
    g = float(sol.g(zz))
    h = float(sol.h(zz))
    return SinglePoint(g=g, h=h, phi_norm_sq=float(sol.phi_norm_sq(zz)))


def bradlow_eval(surface: Surface, f: HoloMap, z: complex | ArrayLike) -> float | FloatArray:
    """``e^{2g} = 4 |f'|^2``, the lambda = 0 solution."""
    zz = np.asarray(z, dtype=np.complex128)
    _check_points(surface, zz)
    df = np.asarray(f.derivative_eval(zz))
    return _scalar(4.0 * (df.real**2 + df.imag**2))


# ---------------------------------------------------------------------------
# impurities
# ---------------------------------------------------------------------------


def eval_impurity_solution(
    surface: Surface, lam: int, alpha: float, ftilde: HoloMap, z: complex
) -> ImpurityPoint:
    """Higgs field of a vortex configuration with an impurity of strength ``alpha`` at 0.

    ``phi = (1 - lambda0 |z|^2) ((alpha+1) z^alpha ft + z^(alpha+1) ft')
    / (1 - lambda |z|^(2 alpha + 2) |ft|^2)``, principal branch for ``z^alpha``.
    """
    _check_sign(lam)
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha <= 0:
        raise InvalidInputError("impurity strength alpha must be > 0")
    zz = complex(z)
    _check_points(surface, np.asarray(zz))
    if abs(ftilde(0.0)) == 0.0:
        raise InvalidInputError("ftilde(0) must be non-zero")
    integer = alpha.is_integer()
    if zz == 0:
        if not integer:
            raise InvalidInputError("z = 0 is a branch point for non-integer alpha")
        return ImpurityPoint(phi=0j, phi_norm_sq=0.0)
    za = zz ** int(alpha) if integer else complex(np.power(zz, alpha))
    ft = complex(ftilde(zz))
    dft = complex(ftilde.derivative_eval(zz))
    r2 = abs(zz) ** 2
    target = 1.0 - lam * r2 ** (alpha + 1.0) * abs(ft) ** 2
    if abs(target) <= _SINGULAR_TOL:
        raise SurfaceSingularityError("1 - lambda |f|^2 vanishes: f leaves the target surface")
    phi = (1.0 - surface.lambda0 * r2) * ((alpha + 1.0) * za * ft + za * zz * dft) / target
    return ImpurityPoint(phi=phi, phi_norm_sq=abs(phi) ** 2)


def singular_gauge_phase(alpha: float, z: complex) -> complex:
    """``|z|^alpha / z^alpha`` on the principal branch."""
    zz = complex(z)
    if zz == 0:
        raise InvalidInputError("the singular gauge phase is undefined at z = 0")
    return complex(np.exp(-1j * float(alpha) * np.angle(zz)))


# ---------------------------------------------------------------------------
# SU(3) Toda
# ---------------------------------------------------------------------------

TODA_CARTAN = np.array([[2.0, -1.0], [-1.0, 2.0]])


def _bracket(a: list[NDArray], b: list[NDArray], weights: tuple[float, ...]) -> ZZbarPoly:
    """sum_k w_k conj(a_k) b_k as a (z, zbar) polynomial."""
    out = ZZbarPoly.constant(0.0)
    for ak, bk, w in zip(a, b, weights):
        out = out + ZZbarPoly.antiholomorphic(ak) * ZZbarPoly.holomorphic(bk) * w
    return out


class TodaPoint(NamedTuple):
    e2g1: float
    e2g2: float


@dataclass(frozen=True)
class TodaSolution:
    """Generalized Kostant-Leznov-Saveliev solution of the SU(3) Toda system.

    ``4 d_z d_zbar g_A = lambda sum_B K_AB e^{2 g_B}`` with ``K`` the SU(3)
    Cartan matrix. ``e^{2 g_A} = -(2/lambda) d_z d_zbar log det_A`` where
    ``det_1 = <u, v>``, ``det_2`` the 2x2 Gram determinant of ``(u, u')``
    against ``(v, v')``. For ``lambda = -1`` this is the classical solution
    and both fields are positive everywhere; for ``lambda = +1`` the formula
    is a solution wherever it is evaluated, but is only a real vortex
    configuration on :meth:`positivity_mask`.
    """

    f1: HoloMap
    f2: HoloMap
    lam: int
    _dets: tuple[ZZbarPoly, ZZbarPoly] = field(init=False, repr=False, compare=False)
    _nums: tuple[ZZbarPoly, ZZbarPoly] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_sign(self.lam, (-1, 1))
        for f in (self.f1, self.f2):
            if not (f.is_polynomial and f.power == 0.0):
                raise InvalidInputError("Toda data must be polynomials")
        lam = self.lam
        p1 = np.asarray(self.f1.numerator)
        p2 = np.asarray(self.f2.numerator)
        u = [np.array([1.0 + 0j]), p1, p2]
        du = [np.array([0j]), npoly.polyder(p1), npoly.polyder(p2)]
        w = (1.0, -lam, -lam)
        D1 = _bracket(u, u, w)
        D2 = _bracket(u, u, w) * _bracket(du, du, w) - _bracket(u, du, w) * _bracket(du, u, w)
        dets = (D1, D2)
        nums = tuple(log_laplacian_numerator(D) for D in dets)
        for k, (D, N) in enumerate(zip(dets, nums), start=1):
            scale = max(1.0, float(np.max(np.abs(D.coef))) ** 2)
            if N.is_zero(1e-12 * scale):
                raise DegenerateDataError(f"det_{k} is constant: flavor {k} field vanishes identically")
        object.__setattr__(self, "_dets", dets)
        object.__setattr__(self, "_nums", nums)

    def determinants(self, z: complex | ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Real values of ``det(M_A^dagger W_A)`` for A = 1, 2."""
        D1, D2 = self._dets
        return np.real(D1(z)), np.real(D2(z))

    def fields(self, z: complex | ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Vectorized ``(e^{2g1}, e^{2g2})``; NaN where a determinant vanishes."""
        out = []
        for D, N in zip(self._dets, self._nums):
            d = np.real(D(z))
            n = np.real(N(z))
            with np.errstate(divide="ignore", invalid="ignore"):
                val = np.where(d != 0.0, -(2.0 / self.lam) * n / d**2, np.nan)
            out.append(val)
        return out[0], out[1]

    def positivity_mask(self, z: complex | ArrayLike, det_floor: float = 0.0) -> NDArray[np.bool_]:
        """Where both fields are positive and ``|det_A| > det_floor``."""
        e1, e2 = self.fields(z)
        d1, d2 = self.determinants(z)
        with np.errstate(invalid="ignore"):
            return (e1 > 0) & (e2 > 0) & (np.abs(d1) > det_floor) & (np.abs(d2) > det_floor)

    def divisors(self, search_radius: float = np.inf) -> tuple[list[tuple[complex, int]], list[tuple[complex, int]]]:
        """Vortex points and multiplicities of each flavor.

        Flavor 1 vanishes at common zeros of ``f1'`` and ``f2'`` (order the
        smaller multiplicity). Flavor 2 vanishes at zeros of the Wronskian
        ``W = f1' f2'' - f1'' f2'`` with order ``ord W - 2 ord_1``.
        """
        p1 = np.asarray(self.f1.numerator)
        p2 = np.asarray(self.f2.numerator)
        d1, d2 = npoly.polyder(p1), npoly.polyder(p2)
        W = npoly.polysub(npoly.polymul(d1, npoly.polyder(d2)), npoly.polymul(npoly.polyder(d1), d2))

        def order_at(c: NDArray, z0: complex) -> int:
            k = 0
            c = npoly.polytrim(np.asarray(c, dtype=np.complex128), 0.0)
            if not np.any(c):
                return 10**9
            scale = max(1.0, float(np.max(np.abs(c))))
            while c.size and abs(npoly.polyval(z0, c)) <= 1e-8 * scale * max(1.0, abs(z0)) ** c.size:
                k += 1
                c = npoly.polyder(c)
            return k

        flavor1 = []
        cand = polynomial_roots(d1) if np.any(d1) else polynomial_roots(d2)
        for z0, _ in cand:
            m = min(order_at(d1, z0), order_at(d2, z0))
            if m > 0 and abs(z0) < search_radius:
                flavor1.append((z0, m))
        m1 = dict(flavor1)
        flavor2 = []
        for z0, mw in polynomial_roots(W):
            if abs(z0) >= search_radius:
                continue
            base = next((m for p, m in m1.items() if abs(p - z0) <= 1e-6 * max(1.0, abs(z0))), 0)
            n = mw - 2 * base
            if n > 0:
                flavor2.append((z0, n))
        return flavor1, flavor2


def toda_eval(sol: TodaSolution, z: complex) -> TodaPoint:
    """``(e^{2g1}, e^{2g2})`` at one point, by exact differentiation of the determinants."""
    zz = complex(z)
    d1, d2 = sol.determinants(zz)
    for k, d in ((1, d1), (2, d2)):
        if abs(float(d)) <= _SINGULAR_TOL:
            raise InvalidInputError(f"det_{k} vanishes at z = {zz}")
    e1, e2 = sol.fields(zz)
    return TodaPoint(float(e1), float(e2))


def kls_classical(f1: HoloMap, f2: HoloMap, z: complex | ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Classical (lambda = -1) solution from Gram determinants of ``u, u', u''``.

    ``e^{2g1} = 2 D2 / D1^2`` and ``e^{2g2} = 2 D1 D3 / D2^2`` with
    ``D1 = |u|^2``, ``D2 = |u ^ u'|^2``, ``D3 = |u ^ u' ^ u''|^2``. This route
    uses no symbolic differentiation of determinants.
    """
    zz = np.asarray(z, dtype=np.complex128)
    p1 = np.asarray(f1.numerator)
    p2 = np.asarray(f2.numerator)
    v0 = [npoly.polyval(zz, p) for p in (p1, p2)]
    v1 = [npoly.polyval(zz, npoly.polyder(p)) for p in (p1, p2)]
    v2 = [npoly.polyval(zz, npoly.polyder(p, 2)) for p in (p1, p2)]
    D1 = 1.0 + np.abs(v0[0]) ** 2 + np.abs(v0[1]) ** 2
    wedge = [v1[0], v1[1], v0[0] * v1[1] - v0[1] * v1[0]]
    D2 = sum(np.abs(w) ** 2 for w in wedge)
    D3 = np.abs(v1[0] * v2[1] - v2[0] * v1[1]) ** 2
    return 2.0 * D2 / D1**2, 2.0 * D1 * D3 / D2**2
