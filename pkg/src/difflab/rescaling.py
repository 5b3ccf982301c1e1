"""Change of variables between the drift-less flow and the quadratic-potential
Fokker-Planck flow.

With rate k = dγ+2 and α = 1/k, a drift-less solution n(s, y) and a confined
solution n̂(t, x) correspond through

    n̂(t, x) = e^{dt} n(ψ(t), e^t x),    ψ(t) = α e^{kt},

and the correspondence is exact in both directions: ψ'(t) = e^{kt} is what the
substitution of the confined equation requires, and it puts the stationary
state at driftless time ψ(0) = α, where the self-similar profile's pressure
gradient is exactly -x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DomainError
from .fields import RadialField, RadialGrid
from .functionals import FunctionalSeries
from .params import DiffusionParams

TO_FOKKER_PLANCK = "to_fokker_planck"
TO_DRIFTLESS = "to_driftless"


@dataclass(frozen=True)
class ScalingMap:
    params: DiffusionParams
    direction: str

    def __post_init__(self):
        if self.direction not in (TO_FOKKER_PLANCK, TO_DRIFTLESS):
            raise DomainError(f"unknown direction {self.direction!r}")

    @property
    def rate(self) -> float:
        return self.params.dim * self.params.gamma + 2.0

    def inverse(self) -> "ScalingMap":
        other = TO_DRIFTLESS if self.direction == TO_FOKKER_PLANCK else TO_FOKKER_PLANCK
        return ScalingMap(self.params, other)


def map_time(smap: ScalingMap, value: float) -> float:
    """ToDriftless: s = α e^{kt}; ToFokkerPlanck: t = log(s/α)/k."""
    alpha = smap.params.alpha
    if smap.direction == TO_DRIFTLESS:
        return alpha * math.exp(smap.rate * value)
    if value <= 0.0:
        raise DomainError(f"driftless time must be positive, got {value}")
    return math.log(value / alpha) / smap.rate


def map_field(smap: ScalingMap, field: RadialField,
              target_grid: RadialGrid | None = None) -> RadialField:
    """Map a field between the two pictures (linear interpolation in r).

    The default target grid is the source grid with its radius scaled by the
    space factor, so source nodes map exactly onto target nodes and the
    discrete mass is preserved to rounding.
    """
    p = smap.params
    if smap.direction == TO_FOKKER_PLANCK:
        t_new = map_time(smap, field.time)
        scale = math.exp(t_new)          # mapped radii: x = y / scale
        amp = scale ** p.dim
    else:
        t_new = map_time(smap, field.time)
        scale = 1.0 / math.exp(field.time)  # mapped radii: y = x / scale
        amp = scale ** p.dim
    if target_grid is None:
        target_grid = RadialGrid(field.grid.n_cells, field.grid.r_max / scale, p.dim)
    source_r = target_grid.centers * scale
    if source_r[-1] > field.grid.r_max * (1.0 + 1e-12):
        raise CoverageError(
            f"target grid reaches back to r = {source_r[-1]:g} beyond the source "
            f"radius {field.grid.r_max:g}")
    values = amp * np.interp(source_r, field.grid.centers, field.values)
    return RadialField(target_grid, values, t_new)


def transfer_series(smap: ScalingMap, series: FunctionalSeries, b: float) -> FunctionalSeries:
    """Convert a confined Lipschitz series u(t) into the drift-less gap series.

    The substitution chain gives, exactly,

        max |p(s)|^b |∂r p(s) + α y/s|²  =  u(t) · (s/α)^β,   s = ψ(t),

    with β = -αγdb - 2 + 2α, so an exponential u = C0 e^{-Ct} becomes the
    power law C0 (s/α)^{β - C/(dγ+2)}.
    """
    p = smap.params
    alpha = p.alpha
    beta = -alpha * p.gamma * p.dim * b - 2.0 + 2.0 * alpha
    out = FunctionalSeries("weighted_gap", f"weighted_gap_b={b:g}_transferred")
    for t, u in zip(series.times, series.values):
        s = alpha * math.exp((p.dim * p.gamma + 2.0) * t)
        out.append(s, u * (s / alpha) ** beta)
    return out
