"""Scalar functionals evaluated on radial density fields.

Everything is computed at cell centers from the signed pressure
p = sign(γ) n^γ; gradients are centered differences, one-sided at the axis
(even symmetry) and at the outer boundary, and one-sided from the positive
side at a free-boundary cell pair.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import DomainError
from .fields import RadialField
from .params import DiffusionParams
from .profiles import BarenblattProfile

KINDS = ("lipschitz", "weighted_gap", "linf", "mass", "fisher", "ab_min",
         "rel_err", "tail_norm")


@dataclass(frozen=True)
class FunctionalRequest:
    kind: str
    b: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown functional kind {self.kind!r}")
        if self.kind in ("lipschitz", "weighted_gap") and self.b is None:
            raise DomainError(f"{self.kind} needs the weight exponent b")

    @property
    def label(self) -> str:
        if self.b is None:
            return self.kind
        return f"{self.kind}_b={self.b:g}"


@dataclass
class FunctionalSeries:
    """Time-stamped samples of one functional along a run."""

    kind: str
    label: str
    times: list = dataclass_field(default_factory=list)
    values: list = dataclass_field(default_factory=list)

    def append(self, t: float, v: float) -> None:
        if self.times and t <= self.times[-1]:
            raise DomainError("series times must be strictly increasing")
        self.times.append(float(t))
        self.values.append(float(v))

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.times), np.asarray(self.values)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,value\n")
            for t, v in zip(self.times, self.values):
                fh.write(f"{t:.17g},{v:.17g}\n")

    @classmethod
    def from_csv(cls, path, kind: str = "series", label: str | None = None):
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        data = np.atleast_2d(data)
        out = cls(kind=kind, label=label or str(path))
        for t, v in data:
            out.append(float(t), float(v))
        return out


def pressure_values(field: RadialField, params: DiffusionParams) -> np.ndarray:
    n = field.values
    if params.gamma < 0:
        if np.any(n <= 0):
            raise DomainError("fast-diffusion pressure needs strictly positive density")
        return -(n ** params.gamma)
    p = np.zeros_like(n)
    mask = n > 0
    p[mask] = n[mask] ** params.gamma
    return p


def pressure_gradient_values(p: np.ndarray, grid, positive_mask: np.ndarray | None = None) -> np.ndarray:
    """Radial derivative of p at cell centers.

    Even reflection across the axis gives dp[0] = (p1 - p0)/(2 dr); at a
    free-boundary pair the difference is taken one-sided from the positive
    side so the vacuum value never enters.
    """
    dr = grid.dr
    dp = np.empty_like(p)
    dp[1:-1] = (p[2:] - p[:-2]) / (2.0 * dr)
    dp[0] = (p[1] - p[0]) / (2.0 * dr)
    dp[-1] = (p[-1] - p[-2]) / dr
    if positive_mask is not None and not positive_mask.all():
        m = positive_mask
        inner = np.zeros_like(m)
        outer = np.zeros_like(m)
        # positive cell whose outward neighbor is empty
        outer[1:-1] = m[1:-1] & ~m[2:]
        # positive cell whose inward neighbor is empty
        inner[1:-1] = m[1:-1] & ~m[:-2]
        idx = np.nonzero(outer & ~inner)[0]
        dp[idx] = (p[idx] - p[idx - 1]) / dr
        idx = np.nonzero(inner & ~outer)[0]
        dp[idx] = (p[idx + 1] - p[idx]) / dr
        dp[np.nonzero(inner & outer)[0]] = 0.0  # isolated positive cell
    return dp


def _weighted_max(p, grad_sq, b, mask):
    if b > 0:
        return float(np.max(np.abs(p) ** b * grad_sq))
    if not mask.any():
        warnings.warn("field vanishes everywhere; weighted maximum is 0", RuntimeWarning)
        return 0.0
    if not mask.all():
        edge = mask[:-1] != mask[1:]
        if edge.any():
            warnings.warn(
                "b <= 0 with vacuum cells adjacent to positive ones; vacuum excluded",
                RuntimeWarning)
    pa = np.abs(p[mask])
    return float(np.max(pa ** b * grad_sq[mask]))


def lipschitz_functional(field: RadialField, params: DiffusionParams, b: float) -> float:
    """max over cells of |p|^b |∂r p + ∂r V|²."""
    p = pressure_values(field, params)
    mask = field.values > 0
    dp = pressure_gradient_values(p, field.grid, mask if params.gamma > 0 else None)
    gq = dp + params.potential.grad(field.grid.centers)
    return _weighted_max(p, gq * gq, b, mask)


def weighted_gradient_gap(field: RadialField, params: DiffusionParams, b: float,
                          t: float | None = None) -> float:
    """max over cells of |p|^b |∂r p + α r/t|²: gap to the self-similar gradient.

    The reference gradient carries the similarity factor α = 1/(dγ+2); the
    Barenblatt pressure satisfies ∂r p = -α r/t exactly, so the gap vanishes
    on the attractor.
    """
    if t is None:
        t = field.time
    if t <= 0:
        raise DomainError("the gap functional needs t > 0")
    p = pressure_values(field, params)
    mask = field.values > 0
    dp = pressure_gradient_values(p, field.grid, mask if params.gamma > 0 else None)
    gap = dp + params.alpha * field.grid.centers / t
    return _weighted_max(p, gap * gap, b, mask)


def fisher_information(field: RadialField, params: DiffusionParams) -> float:
    """∫ n |x + ∂r p|² dx, the quadratic-potential dissipation functional."""
    p = pressure_values(field, params)
    mask = field.values > 0
    dp = pressure_gradient_values(p, field.grid, mask if params.gamma > 0 else None)
    r = field.grid.centers
    return float((field.values * (r + dp) ** 2) @ field.grid.cell_volumes)


def aronson_benilan_min(field: RadialField, params: DiffusionParams) -> float:
    """Minimum over interior cells of the discrete radial Laplacian of p.

    The axis cell uses the even-symmetric stencil d (p1 - p0)/dr², exact on
    radial quadratics; the outer boundary cell is excluded.
    """
    p = pressure_values(field, params)
    grid = field.grid
    dr = grid.dr
    r = grid.centers
    lap = np.empty(grid.n_cells - 1)
    lap[0] = params.dim * (p[1] - p[0]) / dr**2
    lap[1:] = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / dr**2 \
        + (params.dim - 1) / r[1:-1] * (p[2:] - p[:-2]) / (2.0 * dr)
    return float(np.min(lap))


def relative_error(field: RadialField, profile: BarenblattProfile) -> float:
    """max |n - B| / B against the fat-tailed profile at the field's time."""
    if profile.params.gamma > 0:
        raise DomainError("relative error is a fat-diffusion diagnostic (gamma < 0)")
    if np.any(field.values <= 0):
        raise DomainError("relative error needs a strictly positive field")
    ref = profile.density(field.time, field.grid.centers)
    return float(np.max(np.abs(field.values - ref) / ref))


def tail_norm(field: RadialField, params: DiffusionParams,
              tail_profile: BarenblattProfile | None = None,
              tail_power: tuple[float, float] | None = None) -> float:
    """sup over face radii R of R^{-2/γ-d} * (mass beyond R).

    The mass beyond the grid can be supplied analytically: either the
    far-field profile's exact tail, or a power law n ~ A r^k, which yields
    math.inf when k is too heavy for the weight (k > 2/γ) or for
    integrability (k + d >= 0).
    """
    if params.gamma >= 0:
        raise DomainError("the tail norm is defined in the fast-diffusion regime")
    exponent = -2.0 / params.gamma - params.dim
    grid = field.grid
    cell_mass = field.values * grid.cell_volumes
    beyond = 0.0
    if tail_power is not None:
        amp, k = tail_power
        if amp > 0 and (k > 2.0 / params.gamma or k + params.dim >= 0):
            return math.inf
        if amp > 0:
            from .profiles import sphere_area
            beyond = amp * sphere_area(params.dim) * grid.r_max ** (k + params.dim) / (-(k + params.dim))
    elif tail_profile is not None:
        beyond = tail_profile.tail_mass(field.time, grid.r_max)
    # mass beyond face j = sum of cells j..N-1 plus the analytic remainder
    tail_mass = np.concatenate([np.cumsum(cell_mass[::-1])[::-1], [0.0]]) + beyond
    radii = grid.faces[1:]
    return float(np.max(radii ** exponent * tail_mass[1:]))


def tail_envelope(field: RadialField, params: DiffusionParams,
                  r_min: float) -> tuple[float, float]:
    """Fitted tail model n ~ K (1+r²)^q over r > r_min (diagnostic only).

    Returns (K, q); for data trapped between two self-similar profiles the
    fitted q approaches 1/γ.
    """
    if params.gamma >= 0:
        raise DomainError("the tail envelope is a fast-diffusion diagnostic")
    r = field.grid.centers
    keep = r > r_min
    if int(np.count_nonzero(keep)) < 4:
        raise DomainError(f"need at least 4 cells beyond r = {r_min}")
    x = np.log1p(r[keep] ** 2)
    y = np.log(field.values[keep])
    q, intercept = np.polyfit(x, y, 1)
    return math.exp(intercept), float(q)


def evaluate(request: FunctionalRequest, field: RadialField, params: DiffusionParams,
             profile: BarenblattProfile | None = None) -> float:
    if request.kind == "lipschitz":
        return lipschitz_functional(field, params, request.b)
    if request.kind == "weighted_gap":
        return weighted_gradient_gap(field, params, request.b)
    if request.kind == "linf":
        return float(np.max(field.values))
    if request.kind == "mass":
        return field.mass()
    if request.kind == "fisher":
        return fisher_information(field, params)
    if request.kind == "ab_min":
        return aronson_benilan_min(field, params)
    if request.kind == "rel_err":
        if profile is None:
            raise DomainError("rel_err needs a reference profile")
        return relative_error(field, profile)
    if request.kind == "tail_norm":
        return tail_norm(field, params, tail_profile=profile)
    raise DomainError(f"unknown functional kind {request.kind!r}")
