"""Constant-curvature background surfaces and their Cartesian sampling grids.

The surface is described in a single complex chart ``z`` with conformal
factor ``4 / (1 - lambda0 |z|^2)^2``, so the Gauss curvature is ``-lambda0``:
``lambda0 = +1`` is the Poincare disk, ``0`` the flat plane and ``-1`` one
stereographic patch of the unit sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInputError

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

INTERIOR = 0
BOUNDARY = 1
EXCLUDED = 2

DEFAULT_DISK_RADIUS = 0.95
DEFAULT_PLANE_RADIUS = 4.0


@dataclass(frozen=True)
class Surface:
    """Background Riemann surface truncated to the disk ``|z| <= radius_cutoff``."""

    lambda0: int
    radius_cutoff: float | None = None

    def __post_init__(self) -> None:
        if self.lambda0 not in (-1, 0, 1):
            raise InvalidInputError(f"lambda0 must be -1, 0 or 1, got {self.lambda0!r}")
        if self.radius_cutoff is None:
            R = DEFAULT_DISK_RADIUS if self.lambda0 == 1 else DEFAULT_PLANE_RADIUS
        else:
            R = float(self.radius_cutoff)
        if not (np.isfinite(R) and R > 0):
            raise InvalidInputError("radius_cutoff must be a positive finite number")
        if self.lambda0 == 1 and R >= 1.0:
            raise InvalidInputError("the hyperbolic disk requires radius_cutoff < 1")
        object.__setattr__(self, "radius_cutoff", R)

    @property
    def gauss_curvature(self) -> int:
        return -self.lambda0

    def contains(self, z: complex | ComplexArray) -> bool | NDArray[np.bool_]:
        """True where ``z`` lies in the model domain (the open unit disk for lambda0=1)."""
        if self.lambda0 == 1:
            return np.abs(z) < 1.0
        return np.isfinite(z)


def conformal_factor(surface: Surface, z: complex | ComplexArray) -> float | FloatArray:
    """Omega0(z) = 4 / (1 - lambda0 |z|^2)^2.

    Works on scalars and arrays. Points outside the model domain raise
    :class:`InvalidInputError`.
    """
    zz = np.asarray(z, dtype=np.complex128)
    if not np.all(surface.contains(zz)):
        raise InvalidInputError("point outside the model domain of the surface")
    out = 4.0 / (1.0 - surface.lambda0 * (zz.real**2 + zz.imag**2)) ** 2
    return float(out) if out.ndim == 0 else out


def log_half_metric_factor(surface: Surface, z: complex | ComplexArray) -> float | FloatArray:
    """log((1 - lambda0 |z|^2) / 2), the shift taking g to h (and = -log sqrt(Omega0))."""
    zz = np.asarray(z, dtype=np.complex128)
    out = np.log((1.0 - surface.lambda0 * (zz.real**2 + zz.imag**2)) / 2.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform lattice of ``(2n+1)^2`` nodes over ``[-R, R]^2``.

    ``node_class`` tags each node INTERIOR, BOUNDARY or EXCLUDED. Arrays use
    ``indexing='ij'``: axis 0 is x, axis 1 is y.
    """

    surface: Surface
    n: int
    spacing: float
    x: FloatArray
    z: ComplexArray = field(repr=False)
    node_class: NDArray[np.int8] = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.z.shape  # type: ignore[return-value]

    @property
    def interior(self) -> NDArray[np.bool_]:
        return self.node_class == INTERIOR

    @property
    def boundary(self) -> NDArray[np.bool_]:
        return self.node_class == BOUNDARY

    @property
    def active(self) -> NDArray[np.bool_]:
        return self.node_class != EXCLUDED

    def conformal_factor(self) -> FloatArray:
        """Omega0 at every node; EXCLUDED nodes are NaN."""
        r2 = self.z.real**2 + self.z.imag**2
        with np.errstate(divide="ignore", invalid="ignore"):
            om = 4.0 / (1.0 - self.surface.lambda0 * r2) ** 2
        return np.where(self.active, om, np.nan)

    def same_as(self, other: Grid) -> bool:
        return (
            self.n == other.n
            and self.surface == other.surface
            and self.spacing == other.spacing
        )


def build_grid(surface: Surface, n: int) -> Grid:
    """Sample ``surface`` on ``(2n+1)^2`` nodes with spacing ``R / n``.

    A node is active when ``|z| <= R``; an active node is INTERIOR when its
    four axis neighbours are active, otherwise BOUNDARY.
    """
    if int(n) != n or n < 16:
        raise InvalidInputError(f"grid_n must be an integer >= 16, got {n!r}")
    n = int(n)
    R = surface.radius_cutoff
    h = R / n
    x = np.arange(-n, n + 1, dtype=np.float64) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    z = X + 1j * Y
    # tolerance keeps the four axis points at |z| = R active
    active = np.hypot(X, Y) <= R * (1.0 + 1e-12)
    padded = np.pad(active, 1, constant_values=False)
    all_nbrs = (
        padded[2:, 1:-1] & padded[:-2, 1:-1] & padded[1:-1, 2:] & padded[1:-1, :-2]
    )
    node_class = np.full(active.shape, EXCLUDED, dtype=np.int8)
    node_class[active] = BOUNDARY
    node_class[active & all_nbrs] = INTERIOR
    return Grid(surface=surface, n=n, spacing=h, x=x, z=z, node_class=node_class)


def laplacian(field: FloatArray, spacing: float, order: int = 2) -> FloatArray:
    """Discrete Laplacian on a uniform rectangular array.

    ``order=2`` is the 5-point stencil (the one the solver uses);
    ``order=4`` is the fourth-order 9-point cross, used to check closed forms.
    Nodes whose stencil leaves the array are NaN.
    """
    f = np.asarray(field, dtype=np.float64)
    out = np.full(f.shape, np.nan)
    h2 = spacing * spacing
    if order == 2:
        c = f[1:-1, 1:-1]
        out[1:-1, 1:-1] = (
            f[2:, 1:-1] + f[:-2, 1:-1] + f[1:-1, 2:] + f[1:-1, :-2] - 4.0 * c
        ) / h2
    elif order == 4:
        c = f[2:-2, 2:-2]
        dxx = (
            -f[4:, 2:-2] + 16.0 * f[3:-1, 2:-2] - 30.0 * c + 16.0 * f[1:-3, 2:-2] - f[:-4, 2:-2]
        )
        dyy = (
            -f[2:-2, 4:] + 16.0 * f[2:-2, 3:-1] - 30.0 * c + 16.0 * f[2:-2, 1:-3] - f[2:-2, :-4]
        )
        out[2:-2, 2:-2] = (dxx + dyy) / (12.0 * h2)
    else:
        raise InvalidInputError("order must be 2 or 4")
    return out
