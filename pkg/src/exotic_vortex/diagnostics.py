"""Fluxes, Bogomol'nyi energies, zero location, field norms and residual oracles."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.ndimage import map_coordinates

from .charges import ChargeData, winding_from_flux
from .errors import InvalidInputError
from .integrable import TODA_CARTAN
from .solver import FieldSet, ProblemSpec
from .surface import Grid, laplacian

FloatArray = NDArray[np.float64]

_SUBCELL = 16
_CIRCLE_POINTS = 1024
_TAIL_OFFSET = 4.0


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------


def bogomolny_energy(lambda0: int, r: ArrayLike, k: ArrayLike) -> float:
    """``2 pi lambda0 sum_a r_a k^a``."""
    return float(2.0 * np.pi * lambda0 * np.dot(np.atleast_1d(r), np.atleast_1d(k)))


def frozen_energy_split(lambda0: int, charges: ChargeData, k_effective: float, k2: float) -> float:
    """Bogomol'nyi energy of the frozen decomposition.

    ``2 pi lambda0 r1 k_eff + 2 pi lambda0 (r2 - (Q12/Q11) r1) k2`` where
    ``k_eff`` is the flux of the combined gauge field ``A^1 + (Q12/Q11) A^2``.
    """
    Q, r = charges.Q, charges.r
    ratio = Q[0, 1] / Q[0, 0]
    return float(2.0 * np.pi * lambda0 * (r[0] * k_effective + (r[1] - ratio * r[0]) * k2))


# ---------------------------------------------------------------------------
# flux
# ---------------------------------------------------------------------------


def cell_weights(grid: Grid, radius: float | None = None) -> FloatArray:
    """Area of each node's cell lying inside ``|z| <= radius`` (default the cutoff)."""
    h = grid.spacing
    R = grid.surface.radius_cutoff if radius is None else float(radius)
    r = np.abs(grid.z)
    w = np.where(r <= R - h, h * h, 0.0)
    rim = grid.active & (r > R - h) & (r < R + h)
    off = (np.arange(_SUBCELL) + 0.5) / _SUBCELL - 0.5
    dx, dy = np.meshgrid(off * h, off * h, indexing="ij")
    for i, j in zip(*np.nonzero(rim)):
        pts = grid.z[i, j] + dx + 1j * dy
        w[i, j] = h * h * np.mean(np.abs(pts) <= R)
    return np.where(grid.active, w, 0.0)


def _on_circle(grid: Grid, values: FloatArray, radius: float) -> tuple[FloatArray, FloatArray]:
    """Bilinear samples of a grid field on a circle, with the angles used."""
    t = np.linspace(0.0, 2.0 * np.pi, _CIRCLE_POINTS, endpoint=False)
    pts = radius * np.exp(1j * t)
    x0, h = grid.x[0], grid.spacing
    coords = np.array([(pts.real - x0) / h, (pts.imag - x0) / h])
    return map_coordinates(values, coords, order=1), t


def flux_radius(grid: Grid) -> float:
    """Radius of the circle through which the tail is measured."""
    return grid.surface.radius_cutoff - _TAIL_OFFSET * grid.spacing


class TailEstimate(NamedTuple):
    value: float
    boundary_slope: float


def flux_tail(grid: Grid, h: FloatArray, radius: float | None = None) -> TailEstimate:
    """Contracted flux outside the circle ``|z| = radius``.

    ``Omega0`` times the flux density is ``-lap h`` away from sources, so the
    flux beyond the circle is ``(1/2 pi) oint d_r h`` there minus the same
    integral at the ideal boundary, where the field has settled to its
    vacuum and ``d_r h`` vanishes. ``boundary_slope`` is the mean ``d_r h``
    on the circle, the rate of approach to the vacuum.
    """
    rho = flux_radius(grid) if radius is None else float(radius)
    sp_ = grid.spacing
    f = np.where(grid.active, h, 0.0)
    gx = np.zeros_like(f)
    gy = np.zeros_like(f)
    gx[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2.0 * sp_)
    gy[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2.0 * sp_)
    ax, t = _on_circle(grid, gx, rho)
    ay, _ = _on_circle(grid, gy, rho)
    dr = ax * np.cos(t) + ay * np.sin(t)
    slope = float(np.mean(dr))
    return TailEstimate(value=rho * slope, boundary_slope=slope)


@dataclass(frozen=True)
class FluxReport:
    """Magnetic fluxes of a solve.

    ``contracted[A] = sum_a Q_Aa k^a`` is ``contracted_grid + tail``. With the field strength taken from
    the Bogomol'nyi equation this is ``+N_A`` for a flavor with ``N_A``
    vortices; ``N_inferred = -Q k`` therefore carries the opposite sign, and
    absolute values are reported alongside.
    """

    k: FloatArray | None
    contracted: FloatArray
    contracted_grid: FloatArray
    tail: FloatArray
    boundary_slope: FloatArray
    N_inferred: FloatArray
    V_bps: float | None

    @property
    def contracted_abs(self) -> FloatArray:
        return np.abs(self.contracted)

    @property
    def N_inferred_abs(self) -> FloatArray:
        return np.abs(self.N_inferred)


def _invertible(Q: FloatArray) -> bool:
    return Q.shape[0] == Q.shape[1] and abs(np.linalg.det(Q)) > 1e-12 * max(1.0, np.abs(Q).max()) ** Q.shape[0]


def flux_report(spec: ProblemSpec, fields: FieldSet) -> FluxReport:
    """Truncation-corrected fluxes, inferred windings and the BPS energy.

    ``F^a / Omega0 = lambda0 r_a - lambda sum_A |phi_A|^2 Q_Aa - sigma`` is
    integrated with cell-area weights over the disk ``|z| <= flux_radius``;
    the flux outside it is estimated by :func:`flux_tail` and added.
    """
    if not fields.converged:
        raise InvalidInputError("fluxes need converged fields")
    grid = fields.grid
    Q = spec.charges.Q
    l0, lam = spec.constant_sign, spec.lam
    E = np.where(grid.active[None], fields.phi_norm_sq, 0.0)
    sigma = spec.impurity.smooth_part(grid)
    K = spec.charges.coupling
    om = np.where(grid.active, grid.conformal_factor(), 0.0)
    rho = flux_radius(grid)
    w = cell_weights(grid, rho)
    qsum = Q.sum(axis=1)
    F = spec.n_flavors
    grid_part = np.zeros(F)
    tails = np.zeros(F)
    slopes = np.zeros(F)
    for A in range(F):
        dens = l0 * spec.charges.constant_term[A] - lam * sum(K[A, B] * E[B] for B in range(F)) - qsum[A] * sigma
        grid_part[A] = float(np.sum(np.where(w > 0, dens * om * w, 0.0))) / (2.0 * np.pi)
        t = flux_tail(grid, fields.h[A], rho)
        tails[A], slopes[A] = t.value, t.boundary_slope
    if spec.impurity.kind == "delta":
        # each gauge group's D-term carries -alpha_j delta
        grid_part -= qsum * sum(a for _, a in spec.impurity.deltas)
    contracted = grid_part + tails
    if _invertible(Q):
        k = np.linalg.solve(Q, contracted)
        N = winding_from_flux(spec.charges, k)
        V = bogomolny_energy(l0, spec.charges.r, k)
    else:
        k, N, V = None, -contracted, None
    return FluxReport(
        k=k,
        contracted=contracted,
        contracted_grid=grid_part,
        tail=tails,
        boundary_slope=slopes,
        N_inferred=N,
        V_bps=V,
    )


def magnetic_flux(spec: ProblemSpec, fields: FieldSet) -> FloatArray:
    """Fluxes ``k^a``, or the contractions ``sum_a Q_Aa k^a`` when ``Q`` is singular."""
    rep = flux_report(spec, fields)
    return rep.k if rep.k is not None else rep.contracted


# ---------------------------------------------------------------------------
# zeros and comparisons
# ---------------------------------------------------------------------------


def locate_zeros(fields: FieldSet, flavor: int, depth: float = 1e-2) -> list[complex]:
    """Centers of the zeros of ``phi_A`` (``flavor`` counts from 1).

    A zero is an interior node where ``h_A`` is a strict minimum of its
    3x3 neighbourhood and ``|phi_A|^2`` is below ``depth`` times its median.
    The position is refined by the vertex of a quadratic fit to ``|phi|^2``
    when that vertex stays within one spacing of the node.
    """
    A = flavor - 1
    if not 0 <= A < fields.h.shape[0]:
        raise InvalidInputError(f"no flavor {flavor}")
    grid = fields.grid
    h = np.where(grid.active, fields.h[A], np.inf)
    E = fields.phi_norm_sq[A]
    med = float(np.median(E[grid.active]))
    pad = np.pad(h, 1, constant_values=np.inf)
    strict = np.ones(grid.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                nb = pad[1 + di : 1 + di + grid.shape[0], 1 + dj : 1 + dj + grid.shape[1]]
                strict &= h < nb
    cand = strict & grid.interior & (E < depth * med)
    out = []
    sp_ = grid.spacing
    for i, j in sorted(zip(*np.nonzero(cand))):
        z0 = complex(grid.z[i, j])
        patch = E[i - 1 : i + 2, j - 1 : j + 2]
        if patch.shape == (3, 3) and np.all(np.isfinite(patch)):
            # paraboloid a x^2 + b y^2 + c xy + d x + e y + f on the 3x3 patch
            off = np.array([-1.0, 0.0, 1.0])
            X, Y = np.meshgrid(off, off, indexing="ij")
            M = np.column_stack([X.ravel() ** 2, Y.ravel() ** 2, (X * Y).ravel(), X.ravel(), Y.ravel(), np.ones(9)])
            a, b, c, d, e, _ = np.linalg.lstsq(M, patch.ravel(), rcond=None)[0]
            H = np.array([[2 * a, c], [c, 2 * b]])
            if np.all(np.linalg.eigvalsh(H) > 0):
                dx, dy = np.linalg.solve(H, [-d, -e])
                if abs(dx) <= 1.0 and abs(dy) <= 1.0:
                    z0 = z0 + sp_ * complex(dx, dy)
        out.append(z0)
    return out


class Norms(NamedTuple):
    l_inf: float
    l2: float


def annulus_mask(
    grid: Grid,
    points: Sequence[complex] = (),
    min_spacings: float = 5.0,
    outer_fraction: float = 0.8,
) -> NDArray[np.bool_]:
    """Interior nodes at least ``min_spacings`` from every point and within ``outer_fraction * R``."""
    m = grid.interior & (np.abs(grid.z) <= outer_fraction * grid.surface.radius_cutoff)
    for p in points:
        m &= np.abs(grid.z - p) >= min_spacings * grid.spacing
    return m


def compare_fields(
    a: FloatArray,
    b: FloatArray,
    region: str = "all-interior",
    grid: Grid | None = None,
    cores: Sequence[complex] = (),
    core_spacings: float = 5.0,
    outer_fraction: float = 0.8,
) -> Norms:
    """Max and root-mean-square differences over a node set.

    ``region="all-interior"`` uses the interior nodes of ``grid`` (or every
    node when no grid is given); ``"annulus"`` additionally drops nodes near
    ``cores`` and beyond ``outer_fraction * R``. Equal infinities count as
    zero difference.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"grid mismatch: {a.shape} vs {b.shape}")
    if region == "all-interior":
        if grid is None:
            mask = np.ones(a.shape, dtype=bool)
        else:
            mask = np.broadcast_to(grid.interior, a.shape)
    elif region == "annulus":
        if grid is None:
            raise InvalidInputError("the annulus region needs the grid")
        mask = np.broadcast_to(annulus_mask(grid, cores, core_spacings, outer_fraction), a.shape)
    else:
        raise InvalidInputError(f"unknown region {region!r}")
    if grid is not None and a.shape[-2:] != grid.shape:
        raise InvalidInputError("fields do not match the grid")
    with np.errstate(invalid="ignore"):
        d = np.where((a == b), 0.0, np.abs(a - b))
    d = d[mask]
    d = d[~np.isnan(d)]
    if d.size == 0:
        return Norms(0.0, 0.0)
    return Norms(float(np.max(d)), float(np.sqrt(np.mean(d * d))))


# ---------------------------------------------------------------------------
# residual oracles for closed forms
# ---------------------------------------------------------------------------


def _regular_part(grid: Grid, g: FloatArray, points: Sequence[tuple[complex, float]]) -> FloatArray:
    reg = np.array(g, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        for Z, m in points:
            reg = reg - m * np.log(np.abs(grid.z - Z))
    return reg


def liouville_residual(
    grid: Grid,
    lam: int,
    g: FloatArray,
    ramification: Sequence[tuple[complex, float]] = (),
) -> FloatArray:
    """``4 d_z d_zbar g - lambda e^{2g}`` for sampled closed-form ``g``.

    The harmonic logarithms at ramification points are subtracted before
    applying the fourth-order Laplacian, so the check is smooth everywhere
    off those points. NaN where the stencil leaves the active nodes.
    """
    reg = _regular_part(grid, np.where(grid.active, g, np.nan), ramification)
    with np.errstate(invalid="ignore", over="ignore"):
        return laplacian(reg, grid.spacing, order=4) - lam * np.exp(2.0 * g)


def toda_residual(
    grid: Grid,
    lam: int,
    e2g: tuple[FloatArray, FloatArray],
    divisors: tuple[Sequence[tuple[complex, float]], Sequence[tuple[complex, float]]] = ((), ()),
) -> FloatArray:
    """``4 d_z d_zbar g_A - lambda sum_B K_AB e^{2 g_B}`` for both flavors; shape ``(2, ...)``.

    ``g_A = log|e^{2 g_A}| / 2`` so sign-indefinite fields (outside the
    positivity domain) are still checked against the same system.
    """
    out = []
    with np.errstate(invalid="ignore", divide="ignore"):
        gs = [0.5 * np.log(np.abs(np.where(grid.active, e, np.nan))) for e in e2g]
        for A in range(2):
            reg = _regular_part(grid, gs[A], divisors[A])
            rhs = lam * sum(TODA_CARTAN[A, B] * e2g[B] for B in range(2))
            out.append(laplacian(reg, grid.spacing, order=4) - rhs)
    return np.array(out)


def pointwise_laplacian(func: Callable[[NDArray[np.complex128]], ArrayLike], z: ArrayLike, step: float) -> FloatArray:
    """Fourth-order cross-stencil Laplacian of ``func`` at arbitrary points.

    ``func`` maps complex points to values of the same trailing shape (a
    leading axis for several fields is allowed). Unlike :func:`laplacian`
    the step is independent of any grid.
    """
    z = np.asarray(z, dtype=np.complex128)
    total = -5.0 * np.asarray(func(z), dtype=np.float64)
    for d in (1.0, 1.0j):
        total = total + (
            16.0 * (np.asarray(func(z + step * d)) + np.asarray(func(z - step * d)))
            - (np.asarray(func(z + 2 * step * d)) + np.asarray(func(z - 2 * step * d)))
        ) / 12.0
    return total / step**2


def toda_residual_at(
    fields: Callable[[NDArray[np.complex128]], tuple[FloatArray, FloatArray]],
    lam: int,
    z: ArrayLike,
    step: float = 1e-4,
) -> FloatArray:
    """Toda residual of closed-form ``fields`` at points ``z`` with a fine stencil.

    Points must stay at least ``2 * step`` away from divisor points and from
    zeros of the fields. Returns shape ``(2, ...)``.
    """
    z = np.asarray(z, dtype=np.complex128)

    def half_log(w: NDArray[np.complex128]) -> FloatArray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.5 * np.log(np.abs(np.array(fields(w))))

    e = np.array(fields(z))
    rhs = lam * np.einsum("ab,b...->a...", TODA_CARTAN, e)
    return pointwise_laplacian(half_log, z, step) - rhs


def max_on(mask: NDArray[np.bool_], values: FloatArray) -> float:
    """Max of ``|values|`` over ``mask`` (broadcast over leading axes), ignoring NaN."""
    v = np.abs(np.asarray(values))[..., mask]
    v = v[np.isfinite(v)]
    return float(v.max()) if v.size else 0.0

