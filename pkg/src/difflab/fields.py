"""Radial grids and cell-centered density fields."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError
from .profiles import sphere_area


@dataclass(frozen=True)
class RadialGrid:
    """Uniform cell-centered grid on the ball of radius r_max in R^d.

    Faces sit at i*dr for i = 0..N, centers at (i+1/2)*dr.  Face areas and
    cell volumes carry the full spherical measure, so sums of n*volume are
    d-dimensional integrals.
    """

    n_cells: int
    r_max: float
    dim: int

    def __post_init__(self):
        if self.n_cells < 3:
            raise DomainError("need at least 3 cells")
        if self.r_max <= 0:
            raise DomainError("outer radius must be positive")

    @property
    def dr(self) -> float:
        return self.r_max / self.n_cells

    @cached_property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dr

    @cached_property
    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dr

    @cached_property
    def face_areas(self) -> np.ndarray:
        return sphere_area(self.dim) * self.faces ** (self.dim - 1)

    @cached_property
    def cell_volumes(self) -> np.ndarray:
        f = self.faces
        return sphere_area(self.dim) * (f[1:] ** self.dim - f[:-1] ** self.dim) / self.dim


@dataclass
class RadialField:
    """Nonnegative density samples at cell centers, stamped with a time."""

    grid: RadialGrid
    values: np.ndarray
    time: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_cells,):
            raise DomainError(
                f"field has {self.values.shape} values for {self.grid.n_cells} cells")

    def mass(self) -> float:
        return float(self.values @ self.grid.cell_volumes)

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy(), self.time)


def l1_distance(a: RadialField, b: RadialField) -> float:
    """Integral of |a - b| over the ball; grids must coincide."""
    if a.grid != b.grid:
        raise DomainError("fields live on different grids")
    return float(np.abs(a.values - b.values) @ a.grid.cell_volumes)


def l1_distance_to(field: RadialField, reference_values: np.ndarray) -> float:
    return float(np.abs(field.values - reference_values) @ field.grid.cell_volumes)
