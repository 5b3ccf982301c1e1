"""Problem instance: diffusion exponent, dimension, and drift potential."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Potential:
    """Radial drift potential with analytic derivatives.

    ``grad`` and ``laplacian`` accept scalars or numpy arrays of radii.
    """

    kind: str
    value: Callable
    grad: Callable
    laplacian: Callable


def trivial_potential() -> Potential:
    return Potential(
        kind="trivial",
        value=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        grad=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        laplacian=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    )


def quadratic_potential(dim: int) -> Potential:
    """Confining potential V(r) = r^2/2 with ∇V = r and ΔV = d."""
    return Potential(
        kind="quadratic",
        value=lambda r: 0.5 * np.asarray(r, dtype=float) ** 2,
        grad=lambda r: np.asarray(r, dtype=float),
        laplacian=lambda r: np.full_like(np.asarray(r, dtype=float), float(dim)),
    )


def bounded_potential(dim: int) -> Potential:
    """V(r) = sqrt(1+r^2): all derivatives bounded, |∇V| < 1."""

    def lap(r):
        r = np.asarray(r, dtype=float)
        s = np.sqrt(1.0 + r * r)
        # V'' + (d-1) V'/r, with V'/r = 1/s finite at the axis
        return s ** -3 + (dim - 1) / s

    return Potential(
        kind="bounded",
        value=lambda r: np.sqrt(1.0 + np.asarray(r, dtype=float) ** 2),
        grad=lambda r: np.asarray(r, dtype=float) / np.sqrt(1.0 + np.asarray(r, dtype=float) ** 2),
        laplacian=lap,
    )


def make_potential(kind: str, dim: int) -> Potential:
    if kind == "trivial":
        return trivial_potential()
    if kind == "quadratic":
        return quadratic_potential(dim)
    if kind == "bounded":
        return bounded_potential(dim)
    raise DomainError(f"unknown potential kind {kind!r}")


@dataclass(frozen=True)
class DiffusionParams:
    """Exponent γ, dimension d, and the drift potential.

    γ > 0 is the slow (porous-medium) regime, -2/d < γ < 0 the fast-diffusion
    regime; γ below -2/d loses mass conservation and is rejected. d = 1 is
    accepted for solver sanity checks but flagged as nonstandard.
    """

    gamma: float
    dim: int
    potential: Potential = field(default_factory=trivial_potential)

    def __post_init__(self):
        if self.dim < 1 or int(self.dim) != self.dim:
            raise DomainError(f"dimension must be a positive integer, got {self.dim}")
        if self.gamma == 0:
            raise DomainError("gamma must be nonzero")
        if self.gamma < 0 and self.gamma <= -2.0 / self.dim:
            raise DomainError(
                f"gamma = {self.gamma} is at or below the mass-loss threshold -2/d = {-2.0 / self.dim}"
            )

    @property
    def alpha(self) -> float:
        """Self-similar exponent 1/(dγ+2); positive on the admitted range."""
        return 1.0 / (self.dim * self.gamma + 2.0)

    @property
    def sign(self) -> float:
        return 1.0 if self.gamma > 0 else -1.0

    @property
    def is_fast_diffusion(self) -> bool:
        return self.gamma < 0

    @property
    def standard_dimension(self) -> bool:
        """d >= 2; d = 1 is outside the reference setting."""
        return self.dim >= 2

    def with_potential(self, kind: str) -> "DiffusionParams":
        return DiffusionParams(self.gamma, self.dim, make_potential(kind, self.dim))
