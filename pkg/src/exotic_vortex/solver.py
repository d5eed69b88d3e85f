"""Damped-Newton finite-difference solver for coupled vortex equations.

For flavors ``A`` with charges ``Q`` and FI terms ``r`` the fields
``h_A = log|phi_A|`` satisfy

    lap h_A = -Omega0 (c_A - lambda sum_B K_AB e^{2 h_B} - sigma_A) + 2 pi sum delta,

with ``lap = 4 d_z d_zbar``, ``K = Q Q^T``, ``c = lambda0 Q r`` and
``sigma_A = (sum_a Q_Aa) sigma``. Delta sources are removed analytically:
``h = s + v`` with ``s`` a sum of logarithms, so the unknown ``v`` solves a
smooth problem discretized by the 5-point stencil.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple, Union

import numpy as np
import pyamg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.typing import NDArray

from .charges import ChargeData, vacuum_moduli
from .errors import DivergenceError, InvalidInputError, NoVacuumError, UnsupportedInputError
from .surface import Grid, Surface, build_grid

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
BoundaryValue = Union[str, float, Callable[[NDArray[np.complex128]], FloatArray], FloatArray]

_KRYLOV_RTOL = 1e-12
_KRYLOV_MAXITER = 400
_REBUILD_ITERS = 60
_MIN_STEP = 2.0**-30


# ---------------------------------------------------------------------------
# problem description
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ImpuritySpec:
    """Impurity ``sigma``: none, a constant, a list of delta sources, or a grid field."""

    kind: str = "none"
    value: float = 0.0
    deltas: tuple[tuple[complex, float], ...] = ()
    field: FloatArray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("none", "constant", "delta", "sampled"):
            raise InvalidInputError(f"unknown impurity kind {self.kind!r}")
        if self.kind == "constant" and not np.isfinite(self.value):
            raise InvalidInputError("constant impurity must be finite")
        if self.kind == "delta":
            deltas = tuple((complex(p), float(a)) for p, a in self.deltas)
            if not deltas or any(not (a > 0 and np.isfinite(a)) for _, a in deltas):
                raise InvalidInputError("delta impurity strengths must be > 0")
            object.__setattr__(self, "deltas", deltas)
        if self.kind == "sampled":
            if self.field is None:
                raise InvalidInputError("sampled impurity needs a grid field")
            arr = np.array(self.field, dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, "field", arr)

    @classmethod
    def none(cls) -> ImpuritySpec:
        return cls()

    @classmethod
    def constant(cls, value: float) -> ImpuritySpec:
        return cls(kind="constant", value=float(value))

    @classmethod
    def delta(cls, sources: Sequence[tuple[complex, float]]) -> ImpuritySpec:
        return cls(kind="delta", deltas=tuple(sources))

    @classmethod
    def sampled(cls, values: FloatArray) -> ImpuritySpec:
        return cls(kind="sampled", field=values)

    def smooth_part(self, grid: Grid) -> FloatArray | float:
        """The part of sigma entering the equation as a bounded source."""
        if self.kind == "constant":
            return self.value
        if self.kind == "sampled":
            assert self.field is not None
            if self.field.shape != grid.shape:
                raise InvalidInputError(
                    f"sampled impurity has shape {self.field.shape}, grid is {grid.shape}"
                )
            return np.where(grid.active, self.field, 0.0)
        return 0.0


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A coupled vortex problem on a truncated surface.

    ``vortices[A]`` lists the centers of flavor A (repeat for multiplicity).
    ``boundary`` is ``"vacuum"`` or one entry per flavor, each ``"vacuum"``,
    a number, a callable ``z -> h`` or a grid array; numbers, callables and
    arrays give the full field ``h_A`` at boundary nodes. ``lambda0`` overrides
    the sign of the constant term without changing the surface metric.
    """

    surface: Surface
    lam: int
    charges: ChargeData
    vortices: tuple[tuple[complex, ...], ...]
    impurity: ImpuritySpec = field(default_factory=ImpuritySpec)
    grid_n: int = 128
    boundary: str | tuple[BoundaryValue, ...] = "vacuum"
    lambda0: int | None = None

    def __post_init__(self) -> None:
        if self.lam not in (-1, 0, 1):
            raise InvalidInputError(f"lambda must be -1, 0 or 1, got {self.lam!r}")
        if self.lambda0 is not None and self.lambda0 not in (-1, 0, 1):
            raise InvalidInputError("lambda0 override must be -1, 0 or 1")
        F = self.charges.n_flavors
        vort = tuple(tuple(complex(z) for z in zs) for zs in self.vortices)
        if len(vort) != F:
            raise InvalidInputError(f"need a vortex list per flavor ({F}), got {len(vort)}")
        R = self.surface.radius_cutoff
        for zs in vort:
            for z in zs:
                if not abs(z) < R:
                    raise InvalidInputError(f"vortex center {z} is not inside |z| < {R}")
        if self.impurity.kind == "delta":
            for p, _ in self.impurity.deltas:
                if not abs(p) < R:
                    raise InvalidInputError(f"impurity at {p} is not inside |z| < {R}")
        object.__setattr__(self, "vortices", vort)
        if isinstance(self.boundary, str):
            if self.boundary != "vacuum":
                raise InvalidInputError(f"unknown boundary {self.boundary!r}")
        else:
            bnd = tuple(self.boundary)
            if len(bnd) != F:
                raise InvalidInputError("need one boundary entry per flavor")
            for b in bnd:
                if isinstance(b, str) and b != "vacuum":
                    raise InvalidInputError(f"unknown boundary {b!r}")
            object.__setattr__(self, "boundary", bnd)
        if any(isinstance(b, str) for b in self._boundary_entries()):
            self.vacuum()

    @property
    def n_flavors(self) -> int:
        return self.charges.n_flavors

    @property
    def constant_sign(self) -> int:
        return self.surface.lambda0 if self.lambda0 is None else self.lambda0

    def _boundary_entries(self) -> tuple[BoundaryValue, ...]:
        if isinstance(self.boundary, str):
            return (self.boundary,) * self.n_flavors
        return self.boundary  # type: ignore[return-value]

    def vacuum(self) -> FloatArray:
        """Vacuum ``|phi_A|^2`` including a constant impurity shift."""
        shift = self.impurity.value if self.impurity.kind == "constant" else 0.0
        r_eff = self.constant_sign * self.charges.r - shift
        return vacuum_moduli(ChargeData(self.charges.Q, r_eff), 1, self.lam)

    def grid(self) -> Grid:
        return build_grid(self.surface, self.grid_n)

    def with_grid_n(self, n: int) -> ProblemSpec:
        return replace(self, grid_n=int(n))


class SolverConfig(NamedTuple):
    tol: float = 1e-10
    max_iter: int = 50
    damping: float = 1.0


@dataclass(eq=False)
class FieldSet:
    """Grid fields of a solve; arrays have shape ``(n_flavors, 2n+1, 2n+1)``.

    Excluded nodes are NaN; ``h`` is ``-inf`` at vortex centers on nodes.
    """

    spec: ProblemSpec
    grid: Grid
    h: FloatArray
    s: FloatArray
    v: FloatArray
    divisors: tuple[tuple[tuple[complex, float], ...], ...]
    iterations: int = 0
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    boundary_mismatch: float = 0.0

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float("nan")

    @property
    def phi_norm_sq(self) -> FloatArray:
        with np.errstate(under="ignore"):
            return np.exp(2.0 * self.h)

    @property
    def g(self) -> FloatArray:
        r2 = np.abs(self.grid.z) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            shift = np.log((1.0 - self.grid.surface.lambda0 * r2) / 2.0)
        return self.h - shift[None]


# ---------------------------------------------------------------------------
# singular part
# ---------------------------------------------------------------------------


def _source_weights(spec: ProblemSpec) -> list[list[tuple[complex, float]]]:
    """Per-flavor list of (center, weight) for all delta sources."""
    out: list[list[tuple[complex, float]]] = []
    qsum = spec.charges.Q.sum(axis=1)
    for A, zs in enumerate(spec.vortices):
        counts: dict[complex, float] = {}
        for z in zs:
            counts[z] = counts.get(z, 0.0) + 1.0
        if spec.impurity.kind == "delta":
            for p, alpha in spec.impurity.deltas:
                counts[p] = counts.get(p, 0.0) + alpha * qsum[A]
        out.append([(z, w) for z, w in counts.items() if w != 0.0])
    return out


def singular_parts(spec: ProblemSpec, grid: Grid) -> tuple[FloatArray, FloatArray]:
    """``s_A`` and ``e^{2 s_A}``, the latter exact (zero) at on-node centers."""
    z = grid.z
    F = spec.n_flavors
    disk = grid.surface.lambda0 == 1
    s = np.zeros((F, *grid.shape))
    e2s = np.ones((F, *grid.shape))
    for A, sources in enumerate(_source_weights(spec)):
        for Z, w in sources:
            d2 = np.abs(z - Z) ** 2
            if disk:
                d2 = d2 / np.abs(1.0 - np.conj(Z) * z) ** 2
            with np.errstate(divide="ignore"):
                s[A] += 0.5 * w * np.log(d2)
            e2s[A] *= d2**w
            if np.any(d2 == 0.0):
                logger.info("center %s of flavor %d lies on a grid node", Z, A + 1)
    s[:, ~grid.active] = np.nan
    e2s[:, ~grid.active] = np.nan
    return s, e2s


def build_singular_part(spec: ProblemSpec) -> FloatArray:
    """Sum of logarithms carrying every delta source of each flavor.

    On the disk the Blaschke factors ``log|(z - Z)/(1 - conj(Z) z)|`` are
    used, which vanish on ``|z| = 1``; otherwise plain ``log|z - Z|``.
    """
    s, _ = singular_parts(spec, spec.grid())
    return s


# ---------------------------------------------------------------------------
# discrete operators
# ---------------------------------------------------------------------------


class _Discretization:
    """Index bookkeeping and the interior 5-point Laplacian."""

    def __init__(self, spec: ProblemSpec, grid: Grid) -> None:
        self.spec = spec
        self.grid = grid
        self.F = spec.n_flavors
        self.interior = grid.interior
        self.index = -np.ones(grid.shape, dtype=np.int64)
        self.m = int(self.interior.sum())
        self.index[self.interior] = np.arange(self.m)
        self.omega = np.where(grid.active, grid.conformal_factor(), 0.0)
        self.L = self._laplacian_matrix()
        K = spec.charges.coupling
        self.K = K
        self.c = spec.constant_sign * spec.charges.constant_term
        qsum = spec.charges.Q.sum(axis=1)
        smooth = spec.impurity.smooth_part(grid)
        self.sigma = [qsum[A] * np.broadcast_to(smooth, grid.shape) for A in range(self.F)]
        self.s, self.e2s = singular_parts(spec, grid)

    def _laplacian_matrix(self) -> sp.csr_matrix:
        idx = self.index
        h2 = self.grid.spacing**2
        rows, cols, vals = [np.arange(self.m)], [np.arange(self.m)], [np.full(self.m, -4.0 / h2)]
        ii, jj = np.nonzero(self.interior)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = idx[ii + di, jj + dj]
            keep = nb >= 0
            rows.append(idx[ii, jj][keep])
            cols.append(nb[keep])
            vals.append(np.full(int(keep.sum()), 1.0 / h2))
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(self.m, self.m)
        )

    def lap(self, v: FloatArray) -> FloatArray:
        """5-point Laplacian of a full-grid field at interior nodes (0 elsewhere)."""
        f = np.where(self.grid.active, v, 0.0)
        out = np.zeros_like(f)
        h2 = self.grid.spacing**2
        out[1:-1, 1:-1] = (f[2:, 1:-1] + f[:-2, 1:-1] + f[1:-1, 2:] + f[1:-1, :-2] - 4.0 * f[1:-1, 1:-1]) / h2
        return np.where(self.interior, out, 0.0)

    def exp2h(self, v: FloatArray) -> FloatArray:
        with np.errstate(over="raise", under="ignore"):
            e2v = np.exp(2.0 * np.where(self.grid.active, v, 0.0))
        return np.where(self.grid.active[None], self.e2s * e2v, 0.0)

    def residual(self, v: FloatArray) -> FloatArray:
        """Residual of every flavor at interior nodes; 0 elsewhere."""
        E = self.exp2h(v)
        lam = self.spec.lam
        out = np.zeros_like(v)
        for A in range(self.F):
            coupling = sum(self.K[A, B] * E[B] for B in range(self.F))
            src = self.c[A] - lam * coupling - self.sigma[A]
            out[A] = np.where(self.interior, self.lap(v[A]) + self.omega * src, 0.0)
        return out

    def jacobian(self, v: FloatArray) -> sp.spmatrix:
        """``L (x) I - 2 lambda Omega0 K_AB e^{2 h_B}``, interleaved node-major."""
        E = self.exp2h(v)[:, self.interior]
        om = self.omega[self.interior]
        F = self.F
        blocks = -2.0 * self.spec.lam * om[:, None, None] * self.K[None, :, :] * E.T[:, None, :]
        D = sp.bsr_matrix((blocks, np.arange(self.m), np.arange(self.m + 1)), shape=(F * self.m, F * self.m))
        return (sp.kron(self.L, sp.identity(F), format="csr") + D.tocsr()).tocsr()

    def pack(self, v: FloatArray) -> FloatArray:
        return v[:, self.interior].T.ravel()

    def unpack_into(self, v: FloatArray, x: FloatArray) -> FloatArray:
        out = v.copy()
        out[:, self.interior] = x.reshape(self.m, self.F).T
        return out


@contextmanager
def _seeded_global_rng(seed: int = 0) -> Iterator[None]:
    """Seed numpy's global RNG for the duration, then restore the caller's state.

    pyamg draws random start vectors from the global generator when it
    estimates spectral radii; seeding keeps solves bit-reproducible.
    """
    state = np.random.get_state()
    np.random.seed(seed)
    try:
        yield
    finally:
        np.random.set_state(state)


class _LinearSolver:
    """AMG-preconditioned Krylov solves with a sparse-direct fallback.

    The multigrid hierarchy is reused across Newton steps and rebuilt when
    the Krylov iteration count grows.
    """

    def __init__(self, F: int, lam: int) -> None:
        self.F = F
        self.symmetric = F == 1 and lam >= 0
        self.ml: Any = None
        self.direct_only = False

    def _build(self, J: sp.csr_matrix) -> None:
        with _seeded_global_rng():
            self._build_hierarchy(J)

    def _build_hierarchy(self, J: sp.csr_matrix) -> None:
        if self.symmetric:
            self.ml = pyamg.smoothed_aggregation_solver(-J)
        else:
            m = J.shape[0] // self.F
            B = np.kron(np.ones((m, 1)), np.eye(self.F))
            self.ml = pyamg.smoothed_aggregation_solver(
                J.tobsr(blocksize=(self.F, self.F)), symmetry="nonsymmetric", B=B
            )

    def _krylov(self, J: sp.csr_matrix, b: FloatArray) -> tuple[FloatArray, int, bool]:
        count = [0]

        def cb(_: Any) -> None:
            count[0] += 1

        with _seeded_global_rng():
            M = self.ml.aspreconditioner()
            if self.symmetric:
                x, info = spla.cg(-J, -b, M=M, rtol=_KRYLOV_RTOL, atol=0.0, maxiter=_KRYLOV_MAXITER, callback=cb)
            else:
                x, info = spla.bicgstab(J, b, M=M, rtol=_KRYLOV_RTOL, atol=0.0, maxiter=_KRYLOV_MAXITER, callback=cb)
        bn = np.linalg.norm(b)
        ok = info == 0 and np.all(np.isfinite(x)) and np.linalg.norm(J @ x - b) <= 1e2 * _KRYLOV_RTOL * bn
        return x, count[0], bool(ok)

    def solve(self, J: sp.csr_matrix, b: FloatArray) -> FloatArray:
        if not np.any(b):
            return np.zeros_like(b)
        if not self.direct_only:
            try:
                fresh = self.ml is None
                if fresh:
                    self._build(J)
                x, its, ok = self._krylov(J, b)
                if not ok and not fresh:
                    self._build(J)
                    x, its, ok = self._krylov(J, b)
                if ok:
                    if its > _REBUILD_ITERS:
                        self.ml = None
                    return x
            except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
                logger.info("multigrid solve failed (%s); using sparse LU", exc)
            self.direct_only = True
        lu = spla.splu(J.tocsc(), permc_spec="MMD_AT_PLUS_A")
        return lu.solve(b)


# ---------------------------------------------------------------------------
# boundary data and initial guess
# ---------------------------------------------------------------------------


def _boundary_h(spec: ProblemSpec, grid: Grid) -> FloatArray:
    """Full-field Dirichlet data ``h_A`` at active non-interior nodes."""
    out = np.zeros((spec.n_flavors, *grid.shape))
    mask = grid.active & ~grid.interior
    entries = spec._boundary_entries()
    vac = spec.vacuum() if any(isinstance(b, str) for b in entries) else None
    for A, b in enumerate(entries):
        if isinstance(b, str):
            assert vac is not None
            with np.errstate(divide="ignore"):
                out[A][mask] = 0.5 * np.log(vac[A])
        elif callable(b):
            out[A][mask] = np.asarray(b(grid.z[mask]), dtype=np.float64)
        elif np.ndim(b) == 0:
            out[A][mask] = float(b)  # type: ignore[arg-type]
        else:
            arr = np.asarray(b, dtype=np.float64)
            if arr.shape != grid.shape:
                raise InvalidInputError(f"boundary array has shape {arr.shape}, grid is {grid.shape}")
            out[A][mask] = arr[mask]
    if not np.all(np.isfinite(out[:, mask])):
        raise InvalidInputError("boundary data is not finite (a vacuum |phi|^2 vanishes?)")
    return out


def _initial_guess(spec: ProblemSpec, disc: _Discretization, hb: FloatArray) -> FloatArray:
    grid = disc.grid
    mask = grid.active & ~grid.interior
    v = np.zeros((spec.n_flavors, *grid.shape))
    entries = spec._boundary_entries()
    if all(isinstance(b, str) for b in entries):
        base = 0.5 * np.log(spec.vacuum())
    else:
        base = np.array([np.mean(hb[A][mask]) for A in range(spec.n_flavors)])
    disk = grid.surface.lambda0 == 1
    for A, sources in enumerate(_source_weights(spec)):
        v[A] = base[A]
        if not disk:
            # bounded core profile: h ~ base + w log(|z-Z| / sqrt(1 + |z-Z|^2))
            for Z, w in sources:
                v[A] -= 0.5 * w * np.log1p(np.abs(grid.z - Z) ** 2)
    v[:, mask] = hb[:, mask] - disc.s[:, mask]
    v[:, ~grid.active] = np.nan
    return v


# ---------------------------------------------------------------------------
# public solver API
# ---------------------------------------------------------------------------


def _max_interior(R: FloatArray, interior: NDArray[np.bool_]) -> float:
    return float(np.max(np.abs(R[:, interior]))) if interior.any() else 0.0


def _fieldset(spec: ProblemSpec, disc: _Discretization, v: FloatArray, **meta: Any) -> FieldSet:
    with np.errstate(invalid="ignore"):
        h = disc.s + v
    h[:, ~disc.grid.active] = np.nan
    v = v.copy()
    v[:, ~disc.grid.active] = np.nan
    divisors = tuple(tuple(src) for src in _source_weights(spec))
    return FieldSet(spec=spec, grid=disc.grid, h=h, s=disc.s.copy(), v=v, divisors=divisors, **meta)


def residual(spec: ProblemSpec, fields: FieldSet) -> FloatArray:
    """Discrete residual of the regular-part equation; NaN off interior nodes.

    Raises :class:`DivergenceError` if ``e^{2h}`` overflows.
    """
    grid = spec.grid()
    if not grid.same_as(fields.grid):
        raise InvalidInputError("fields were computed on a different grid")
    disc = _Discretization(spec, grid)
    try:
        R = disc.residual(fields.v)
    except FloatingPointError as exc:
        raise DivergenceError("e^{2h} overflowed") from exc
    R[:, ~grid.interior] = np.nan
    return R


def newton_solve(spec: ProblemSpec, config: SolverConfig | None = None) -> FieldSet:
    """Solve ``spec`` by damped Newton iteration on the regular part ``v``.

    Each step solves the linearized system to relative residual 1e-12 and
    halves the step until the interior max-norm residual decreases.
    """
    cfg = config or SolverConfig()
    if not (0.0 < cfg.damping <= 1.0):
        raise InvalidInputError("damping must lie in (0, 1]")
    if cfg.max_iter < 1 or not cfg.tol > 0:
        raise InvalidInputError("need max_iter >= 1 and tol > 0")
    grid = spec.grid()
    disc = _Discretization(spec, grid)
    hb = _boundary_h(spec, grid)
    mask_b = grid.active & ~grid.interior
    if np.any(~np.isfinite(disc.s[:, mask_b])):
        raise InvalidInputError("a source sits on a boundary node")
    v = _initial_guess(spec, disc, hb)
    linear = _LinearSolver(spec.n_flavors, spec.lam)
    history: list[float] = []
    try:
        R = disc.residual(v)
    except FloatingPointError as exc:
        raise DivergenceError("e^{2h} overflowed at the initial guess", history) from exc
    rnorm = _max_interior(R, grid.interior)
    history.append(rnorm)
    it = 0
    while rnorm >= cfg.tol:
        if it >= cfg.max_iter:
            raise DivergenceError(f"no convergence after {it} Newton steps (residual {rnorm:.3e})", history)
        dx = linear.solve(disc.jacobian(v), -disc.pack(R))
        step = cfg.damping
        while True:
            trial = disc.unpack_into(v, step * dx + disc.pack(v))
            try:
                R_try = disc.residual(trial)
                r_try = _max_interior(R_try, grid.interior)
            except FloatingPointError:
                r_try = np.inf
            if np.isfinite(r_try) and r_try < rnorm:
                break
            step *= 0.5
            if step < _MIN_STEP:
                raise DivergenceError(
                    f"line search stalled at residual {rnorm:.3e} after {it} steps", history
                )
        v, R, rnorm = trial, R_try, r_try
        it += 1
        history.append(rnorm)
        logger.debug("newton step %d: residual %.3e (step %.3g)", it, rnorm, step)
    fs = _fieldset(spec, disc, v, iterations=it, residual_history=history, converged=True)
    fs.boundary_mismatch = _boundary_mismatch(spec, fs)
    return fs


def _boundary_mismatch(spec: ProblemSpec, fs: FieldSet) -> float:
    """Largest ``| |phi|^2 - vacuum |`` on the first interior ring next to the boundary.

    Measures how far the solution still is from vacuum where the Dirichlet
    data is imposed; 0 when no vacuum exists (explicit boundary data).
    """
    try:
        vac = spec.vacuum()
    except NoVacuumError:
        return 0.0
    grid = fs.grid
    b = grid.active & ~grid.interior
    p = np.pad(b, 1)
    ring = grid.interior & (p[2:, 1:-1] | p[:-2, 1:-1] | p[1:-1, 2:] | p[1:-1, :-2])
    return float(np.max(np.abs(fs.phi_norm_sq[:, ring] - vac[:, None])))


def solve_single_with_impurity(spec: ProblemSpec, config: SolverConfig | None = None) -> FieldSet:
    """Single-flavor solve with an impurity.

    Delta impurities become logarithmic sources of weight ``alpha`` in the
    singular part; constant or sampled impurities are bounded sources.
    """
    if spec.n_flavors != 1:
        raise InvalidInputError("solve_single_with_impurity needs exactly one flavor")
    return newton_solve(spec, config)


class FreezeResult(NamedTuple):
    sigma: FloatArray
    effective_spec: ProblemSpec


def freeze_transform(coupled: FieldSet, spec: ProblemSpec | None = None) -> FreezeResult:
    """Rewrite flavor 1 of an upper-triangular two-flavor solve as a one-flavor impurity problem.

    ``sigma = -(Q12/Q11) F2 / Omega0`` with ``F2 / Omega0 = c2 - lambda
    (Q12 |phi_1|^2 + Q22 |phi_2|^2)`` taken from the converged fields. The
    effective problem has charge ``Q11``, FI term ``r1``, the flavor-1
    vortices and the coupled ``h_1`` as Dirichlet data.
    """
    spec = spec or coupled.spec
    Q = spec.charges.Q
    if Q.shape != (2, 2):
        raise UnsupportedInputError("freezing needs exactly two flavors and two gauge groups")
    if Q[1, 0] != 0.0:
        raise UnsupportedInputError("freezing needs an upper-triangular charge matrix (Q21 = 0)")
    if spec.impurity.kind != "none":
        raise UnsupportedInputError("freezing a problem that already has an impurity is not supported")
    if not coupled.converged:
        raise InvalidInputError("coupled fields are not converged")
    l0 = spec.constant_sign
    E = coupled.phi_norm_sq
    f2 = l0 * spec.charges.r[1] - spec.lam * (Q[0, 1] * E[0] + Q[1, 1] * E[1])
    sigma = -(Q[0, 1] / Q[0, 0]) * f2
    sigma = np.where(coupled.grid.active, sigma, np.nan)
    eff = ProblemSpec(
        surface=spec.surface,
        lam=spec.lam,
        charges=ChargeData([[Q[0, 0]]], [spec.charges.r[0]]),
        vortices=(spec.vortices[0],),
        impurity=ImpuritySpec.sampled(np.nan_to_num(sigma)),
        grid_n=spec.grid_n,
        boundary=(np.array(coupled.h[0]),),
        lambda0=spec.lambda0,
    )
    return FreezeResult(sigma=sigma, effective_spec=eff)
