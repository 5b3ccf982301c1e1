"""Radially symmetric explicit finite-volume solver for

    ∂t n = ∇·(n ∇(sign(γ) n^γ + V))

on a ball, in conservative flux form.  Diffusion is discretized through
n^{γ+1} (two-point flux), which keeps the slow-diffusion free boundary a
regular point of the scheme; drift uses first-order upwinding; time stepping
is explicit with a per-step CFL bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import HAVE_NUMBA, advance_to
from .errors import DomainError, InstabilityError, NumericalFailureError
from .fields import RadialField, RadialGrid
from .functionals import FunctionalSeries, evaluate
from .params import DiffusionParams
from .profiles import BarenblattProfile

NEUMANN = "neumann"
FARFIELD = "farfield"
# far-field data frozen at the stationary similarity time, for confined runs
FARFIELD_STATIONARY = "farfield_stationary"


@dataclass(frozen=True)
class InitialSpec:
    """Initial condition menu.

    kinds: barenblatt, truncated_barenblatt, annulus, table, fp_stationary
    (the self-similar profile at t = α, the quadratic-potential steady state).
    A nonzero perturb_amp multiplies by 1 + a·exp(-(r/w)²)cos(π r/w) and
    renormalizes back to the requested mass.
    """

    kind: str = "barenblatt"
    mass: float = 1.0
    time_offset: float = 0.0
    height: float = 1.0
    r_inner: float = 1.0
    r_outer: float = 2.0
    cut_radius: float | None = None
    perturb_amp: float = 0.0
    perturb_width: float = 1.0
    table_r: tuple = ()
    table_n: tuple = ()


@dataclass(frozen=True)
class SolverConfig:
    params: DiffusionParams
    n_cells: int
    r_max: float
    t_start: float
    t_end: float
    initial: InitialSpec = InitialSpec()
    cfl_safety: float = 0.9
    samples_per_decade: int = 32
    record_start: float | None = None
    boundary: str = NEUMANN
    record: tuple = ()
    keep_fields: bool = True
    max_steps: int = 200_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl_safety <= 1.0:
            raise DomainError("CFL safety factor must lie in (0, 1]")
        if self.boundary not in (NEUMANN, FARFIELD, FARFIELD_STATIONARY):
            raise DomainError(f"unknown boundary mode {self.boundary!r}")
        if self.boundary in (FARFIELD, FARFIELD_STATIONARY) and self.params.gamma > 0:
            raise DomainError("far-field profile data only applies to gamma < 0")
        if self.boundary == FARFIELD_STATIONARY and self.params.potential.kind != "quadratic":
            raise DomainError("the stationary far field belongs to the quadratic-potential flow")
        if self.t_end <= self.t_start:
            raise DomainError("t_end must exceed t_start")

    @property
    def uses_farfield(self) -> bool:
        return self.boundary in (FARFIELD, FARFIELD_STATIONARY)

    @property
    def grid(self) -> RadialGrid:
        return RadialGrid(self.n_cells, self.r_max, self.params.dim)


def build_initial(config: SolverConfig) -> tuple[RadialField, BarenblattProfile | None]:
    """Construct the initial field and, in far-field mode, the tail profile."""
    grid = config.grid
    r = grid.centers
    spec = config.initial
    params = config.params
    profile = None
    if spec.kind in ("barenblatt", "truncated_barenblatt", "fp_stationary"):
        profile = BarenblattProfile.from_mass(params, spec.mass, spec.time_offset)
        t_eval = params.alpha if spec.kind == "fp_stationary" else config.t_start
        values = np.asarray(profile.density(t_eval, r), dtype=float)
        if spec.kind == "truncated_barenblatt":
            if spec.cut_radius is None:
                raise DomainError("truncated_barenblatt needs cut_radius")
            values = values * (r <= spec.cut_radius)
    elif spec.kind == "annulus":
        values = np.where((r >= spec.r_inner) & (r <= spec.r_outer), spec.height, 0.0)
    elif spec.kind == "table":
        if len(spec.table_r) < 2:
            raise DomainError("table initial data needs at least two points")
        values = np.interp(r, np.asarray(spec.table_r), np.asarray(spec.table_n))
    else:
        raise DomainError(f"unknown initial kind {spec.kind!r}")

    if spec.perturb_amp != 0.0:
        if abs(spec.perturb_amp) >= 1.0:
            raise DomainError("perturbation amplitude must stay below 1")
        w = spec.perturb_width
        bump = 1.0 + spec.perturb_amp * np.exp(-((r / w) ** 2)) * np.cos(math.pi * r / w)
        values = values * bump
        field = RadialField(grid, values, config.t_start)
        values = values * (spec.mass / field.mass())

    field = RadialField(grid, values, config.t_start)
    if config.uses_farfield:
        if profile is None:
            profile = BarenblattProfile.from_mass(params, spec.mass, spec.time_offset)
        if config.params.gamma < 0 and np.any(values <= 0):
            raise DomainError("fast-diffusion initial data must be strictly positive")
    return field, profile


def far_field_boundary(profile: BarenblattProfile, t: float, grid: RadialGrid) -> float:
    """Ghost-cell density just beyond the outer face, from the tail profile."""
    if profile.params.gamma > 0:
        raise DomainError("far-field ghost values only apply to gamma < 0")
    return float(profile.density(t, grid.r_max + 0.5 * grid.dr))


class _Stepper:
    """Preallocated kernel for one explicit conservative update."""

    def __init__(self, config: SolverConfig, profile: BarenblattProfile | None):
        p = config.params
        grid = config.grid
        if p.gamma + 1.0 <= 0.0:
            raise DomainError(
                "flux form n^{γ+1} needs γ > -1; only reachable at d = 1 outside scope")
        self.params = p
        self.grid = grid
        self.config = config
        self.profile = profile
        self.gp1 = p.gamma + 1.0
        self.coef = abs(p.gamma) / (p.gamma + 1.0)
        self.ag = abs(p.gamma)
        self.dr = grid.dr
        self.area = grid.face_areas
        self.vol = grid.cell_volumes
        self.inv_vol = 1.0 / self.vol
        vface = np.asarray(p.potential.grad(grid.faces), dtype=float)
        self.vface = -vface  # drift velocity points down the potential
        self.has_drift = bool(np.any(self.vface != 0.0))
        self.vmax = float(np.max(np.abs(self.vface))) if self.has_drift else 0.0
        self.ghost_r = grid.r_max + 0.5 * grid.dr
        # absolute similarity time of the frozen ghost; <= 0 means co-moving
        self.ghost_fixed = p.alpha if config.boundary == FARFIELD_STATIONARY else -1.0
        n_cells = grid.n_cells
        self.w = np.empty(n_cells)
        self.ngam = np.empty(n_cells)
        self.flux = np.zeros(n_cells + 1)
        self.diff_limit = 2.0 * p.dim / (self.dr * self.dr)

    def ghost_density(self, t: float) -> float:
        if self.ghost_fixed > 0.0:
            t = self.ghost_fixed - self.profile.time_offset
        return float(self.profile.density(t, self.ghost_r))

    def _powers(self, n: np.ndarray) -> None:
        np.power(n, self.gp1, out=self.w)
        # n^γ = n^{γ+1}/n, with vacuum cells pinned to zero diffusivity
        np.divide(self.w, n, out=self.ngam, where=n > 0.0)
        self.ngam[n <= 0.0] = 0.0

    def cfl_dt(self, n: np.ndarray, t: float) -> float:
        """σ · harmonic mean of the diffusive and drift stability limits."""
        self._powers(n)
        dmax = float(np.max(np.maximum(self.ngam[:-1], self.ngam[1:])))
        if self.config.uses_farfield:
            ng = self.ghost_density(t) ** self.params.gamma
            dmax = max(dmax, max(ng, self.ngam[-1]))
        dmax *= self.ag
        inv = 0.0
        if dmax > 0.0:
            inv += dmax * self.diff_limit
        if self.has_drift and self.vmax > 0.0:
            inv += self.vmax / self.dr
        if inv == 0.0:
            return math.inf
        return self.config.cfl_safety / inv

    def fluxes(self, n: np.ndarray, t: float) -> np.ndarray:
        """Face fluxes in the +r direction (already includes drift upwinding)."""
        f = self.flux
        w = self.w
        f[1:-1] = -(self.coef / self.dr) * (w[1:] - w[:-1])
        f[0] = 0.0
        if self.config.uses_farfield:
            ng = self.ghost_density(t)
            f[-1] = -(self.coef / self.dr) * (ng ** self.gp1 - w[-1])
        else:
            f[-1] = 0.0
        if self.has_drift:
            v = self.vface[1:-1]
            f[1:-1] += np.where(v > 0.0, n[:-1], n[1:]) * v
            v_out = self.vface[-1]
            if self.config.uses_farfield:
                f[-1] += (n[-1] if v_out > 0.0 else ng) * v_out
            # Neumann keeps the outer face flux at zero (∂ν V >= 0 setting)
        return f

    def limit_fluxes(self, n: np.ndarray, dt: float) -> None:
        """Cap each cell's total outflow at its content (donor scaling)."""
        f = self.flux
        out = self.area[:-1] * np.maximum(-f[:-1], 0.0) \
            + self.area[1:] * np.maximum(f[1:], 0.0)
        content = self.vol * n
        with np.errstate(divide="ignore", invalid="ignore"):
            theta = np.where(out * dt > content, content / (out * dt), 1.0)
        theta = np.where(np.isfinite(theta), theta, 1.0)
        if np.all(theta >= 1.0):
            return
        interior = f[1:-1]
        f[1:-1] = np.where(interior > 0.0, interior * theta[:-1], interior * theta[1:])
        if f[-1] > 0.0:
            f[-1] *= theta[-1]
        # inflow from the ghost cell is not limited

    def advance(self, n: np.ndarray, t: float, dt: float) -> float:
        """One conservative update in place; returns the boundary outflow mass."""
        self.fluxes(n, t)
        if self.params.gamma > 0:
            self.limit_fluxes(n, dt)
        f = self.flux
        af = self.area * f
        n += dt * self.inv_vol * (af[:-1] - af[1:])
        outflow = dt * af[-1]
        total = float(n.sum())
        if not math.isfinite(total):
            raise NumericalFailureError(f"non-finite field at t = {t + dt}")
        if self.params.gamma > 0:
            m = float(n.min())
            if m < -1e-12 * max(1.0, float(n.max())):
                cell = int(n.argmin())
                raise InstabilityError(
                    f"negative density {m:g} in cell {cell} at t = {t + dt}",
                    cell=cell, time=t + dt)
            np.maximum(n, 0.0, out=n)
        else:
            if float(n.min()) <= 0.0:
                cell = int(n.argmin())
                raise InstabilityError(
                    f"fast-diffusion positivity lost in cell {cell} at t = {t + dt}",
                    cell=cell, time=t + dt)
        return float(outflow)


def cfl_dt(field: RadialField, config: SolverConfig,
           profile: BarenblattProfile | None = None) -> float:
    """Stable explicit step from the current field (may be +inf if unconstrained)."""
    if config.uses_farfield and profile is None:
        _, profile = build_initial(config)
    stepper = _Stepper(config, profile)
    return stepper.cfl_dt(field.values, field.time)


def step(field: RadialField, dt: float, config: SolverConfig,
         profile: BarenblattProfile | None = None) -> RadialField:
    """One explicit update, returning a new field at time + dt."""
    if dt <= 0:
        raise DomainError("dt must be positive")
    if config.uses_farfield and profile is None:
        _, profile = build_initial(config)
    stepper = _Stepper(config, profile)
    n = field.values.copy()
    stepper._powers(n)
    stepper.advance(n, field.time, dt)
    return RadialField(field.grid, n, field.time + dt)


@dataclass
class Trajectory:
    """Recorded output of one run: fields, functional series, mass ledger."""

    config: SolverConfig
    times: list
    fields: list
    series: dict
    mass_series: FunctionalSeries
    outflow_series: FunctionalSeries
    profile: BarenblattProfile | None = None

    @property
    def final_field(self) -> RadialField:
        return self.fields[-1]

    def save(self, outdir, snapshots: bool = False) -> None:
        import os

        os.makedirs(outdir, exist_ok=True)
        for label, s in self.series.items():
            s.to_csv(os.path.join(outdir, f"{label}.csv"))
        self.mass_series.to_csv(os.path.join(outdir, "mass_ledger.csv"))
        self.outflow_series.to_csv(os.path.join(outdir, "boundary_outflow.csv"))
        if snapshots:
            p = self.config.params
            for fld in self.fields:
                path = os.path.join(outdir, f"snapshot_t={fld.time:.8g}.csv")
                pr = np.zeros_like(fld.values)
                mask = fld.values > 0
                pr[mask] = p.sign * fld.values[mask] ** p.gamma
                with open(path, "w") as fh:
                    fh.write("r,n,p\n")
                    for r, nn, pp in zip(fld.grid.centers, fld.values, pr):
                        fh.write(f"{r:.17g},{nn:.17g},{pp:.17g}\n")


def record_schedule(config: SolverConfig) -> np.ndarray:
    """Geometric sampling times: samples_per_decade per decade, end included."""
    start = config.record_start
    if start is None:
        start = config.t_start
    if start <= 0.0:
        start = config.t_end / 1000.0
    start = max(start, config.t_start) if config.t_start > 0 else start
    if start >= config.t_end:
        return np.array([config.t_end])
    decades = math.log10(config.t_end / start)
    count = max(int(round(config.samples_per_decade * decades)), 1) + 1
    times = np.geomspace(start, config.t_end, count)
    times[-1] = config.t_end
    return times


def run(config: SolverConfig) -> Trajectory:
    """Integrate from the initial data to t_end, recording functionals.

    Time stepping is sequential and deterministic; records happen exactly at
    the scheduled times (dt is clipped to land on them).
    """
    field, profile = build_initial(config)
    stepper = _Stepper(config, profile)
    n = field.values.copy()
    t = config.t_start

    series = {req.label: FunctionalSeries(req.kind, req.label) for req in config.record}
    mass_series = FunctionalSeries("mass", "mass_ledger")
    outflow_series = FunctionalSeries("outflow", "boundary_outflow")
    times: list[float] = []
    fields: list[RadialField] = []
    outflow_cum = 0.0
    steps = 0

    def record(t_now: float) -> None:
        fld = RadialField(config.grid, n.copy(), t_now)
        times.append(t_now)
        if config.keep_fields:
            fields.append(fld)
        for req in config.record:
            series[req.label].append(t_now, evaluate(req, fld, config.params, profile))
        mass_series.append(t_now, fld.mass())
        outflow_series.append(t_now, outflow_cum)

    schedule = record_schedule(config)
    if config.t_start < schedule[0] - 1e-12 * max(abs(schedule[0]), 1.0):
        pending = list(schedule)
    else:
        record(t)
        pending = [s for s in schedule if s > t * (1 + 1e-12)]

    if HAVE_NUMBA:
        grid = config.grid
        if config.uses_farfield:
            gc, goff = profile.profile_constant, profile.time_offset
        else:
            gc = goff = 0.0
        for target in pending:
            t, extra, ksteps, status, bad = advance_to(
                n, t, float(target), config.params.gamma, float(config.params.dim),
                grid.dr, grid.face_areas, grid.cell_volumes, stepper.inv_vol,
                stepper.vface, stepper.vmax, config.cfl_safety,
                config.uses_farfield, gc, config.params.alpha, goff,
                stepper.ghost_fixed, stepper.ghost_r, config.max_steps - steps,
                stepper.w, stepper.ngam, stepper.flux, np.empty(grid.n_cells))
            outflow_cum += extra
            steps += ksteps
            if status == 1:
                raise InstabilityError(
                    f"negative density in cell {bad} at t = {t}", cell=bad, time=t)
            if status == 2:
                raise NumericalFailureError(f"non-finite field value in cell {bad} at t = {t}")
            if status == 3:
                raise InstabilityError(
                    f"fast-diffusion positivity lost in cell {bad} at t = {t}",
                    cell=bad, time=t)
            if status == 4:
                raise NumericalFailureError(
                    f"exceeded {config.max_steps} steps before t = {target}")
            record(t)
    else:  # pragma: no cover - plain numpy fallback
        for target in pending:
            while t < target * (1.0 - 1e-13) - 1e-300:
                dt = stepper.cfl_dt(n, t)
                dt = min(dt, target - t)
                if not (dt > 0.0) or not math.isfinite(dt):
                    raise NumericalFailureError(f"non-positive step at t = {t}")
                outflow_cum += stepper.advance(n, t, dt)
                t += dt
                steps += 1
                if steps > config.max_steps:
                    raise NumericalFailureError(
                        f"exceeded {config.max_steps} steps before t = {target}")
            t = target
            record(t)

    if not config.keep_fields:
        fields.append(RadialField(config.grid, n.copy(), t))
    return Trajectory(config, times, fields, series, mass_series, outflow_series, profile)
