"""Experiment files: flat key = value sections parsed with configparser.

Solver sections: [problem], [grid], [time], [initial], [record].
Experiment-layer sections: [fit.NAME], [bound.NAME], [transfer.NAME] declare
the decay fits and one-sided bounds to verify, referencing recorded series by
label.  Bundled files under experiments/ double as documentation of each
verification recipe.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass

from .admissibility import check
from .errors import ConfigError
from .functionals import FunctionalRequest
from .params import DiffusionParams, make_potential
from .solver import FARFIELD, NEUMANN, InitialSpec, SolverConfig


@dataclass(frozen=True)
class FitSpec:
    name: str
    series: str
    model: str                      # power | exponential
    window: object = "default"      # "default" | "last_decade" | (lo, hi)
    expect: float | None = None
    tol: float = 0.05
    min_r2: float | None = None
    side: str = "two"               # two | below


@dataclass(frozen=True)
class BoundSpec:
    name: str
    series: str
    kind: str                       # const | power
    value: float | None = None
    exponent: float = 0.0
    scale_by_t: bool = False
    slack: float = 0.05
    calibrate_at: float | None = None
    start_at: float | None = None
    final_at_least: float | None = None


@dataclass(frozen=True)
class TransferSpec:
    name: str
    series: str
    b: float
    fit: FitSpec | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    solver: SolverConfig
    fits: tuple = ()
    bounds: tuple = ()
    transfers: tuple = ()


def _floats(text: str) -> list[float]:
    items = [x.strip() for x in text.split(",") if x.strip()]
    return [float(x) for x in items]


def _window(text: str):
    text = text.strip()
    if text in ("default", "last_decade"):
        return text
    vals = _floats(text)
    if len(vals) != 2:
        raise ConfigError(f"window must be 'default', 'last_decade' or 'lo,hi', got {text!r}")
    return tuple(vals)


class _Section:
    """Typed access with section/key context in error messages."""

    def __init__(self, parser, name, path):
        self.name = name
        self.path = path
        self.data = dict(parser[name]) if parser.has_section(name) else {}
        self.seen = set()

    def _raw(self, key, default):
        self.seen.add(key)
        if key in self.data:
            return self.data[key]
        if default is _REQUIRED:
            raise ConfigError(f"{self.path}: missing [{self.name}] {key}")
        return default

    def get_float(self, key, default=None):
        raw = self._raw(key, default)
        if raw is None or isinstance(raw, float):
            return raw
        try:
            return float(raw)
        except ValueError as err:
            raise ConfigError(f"{self.path}: [{self.name}] {key} = {raw!r}: {err}") from None

    def get_int(self, key, default=None):
        raw = self._raw(key, default)
        if raw is None or isinstance(raw, int):
            return raw
        try:
            return int(raw)
        except ValueError as err:
            raise ConfigError(f"{self.path}: [{self.name}] {key} = {raw!r}: {err}") from None

    def get_str(self, key, default=None):
        raw = self._raw(key, default)
        return raw.strip() if isinstance(raw, str) else raw

    def get_bool(self, key, default=False):
        raw = self._raw(key, default)
        if isinstance(raw, bool):
            return raw
        val = raw.strip().lower()
        if val in ("true", "yes", "on", "1"):
            return True
        if val in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"{self.path}: [{self.name}] {key} = {raw!r} is not a boolean")

    def get_floats(self, key):
        raw = self._raw(key, "")
        return _floats(raw) if raw else []

    def check_unknown(self):
        extra = set(self.data) - self.seen
        if extra:
            raise ConfigError(
                f"{self.path}: unknown key(s) {sorted(extra)} in [{self.name}]")


_REQUIRED = object()


def parse_experiment(path) -> ExperimentSpec:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        read = parser.read(path)
    except configparser.Error as err:
        raise ConfigError(f"{path}: {err}") from None
    if not read:
        raise ConfigError(f"{path}: file not found or unreadable")

    problem = _Section(parser, "problem", path)
    gamma = problem.get_float("gamma", _REQUIRED)
    dim = problem.get_int("dim", _REQUIRED)
    potential_kind = problem.get_str("potential", "trivial")
    boundary = problem.get_str("boundary", NEUMANN)
    problem.check_unknown()
    try:
        params = DiffusionParams(gamma, dim, make_potential(potential_kind, dim))
    except ValueError as err:
        raise ConfigError(f"{path}: [problem] {err}") from None

    grid = _Section(parser, "grid", path)
    n_cells = grid.get_int("cells", _REQUIRED)
    r_max = grid.get_float("outer_radius", _REQUIRED)
    grid.check_unknown()

    time = _Section(parser, "time", path)
    t_start = time.get_float("start", _REQUIRED)
    t_end = time.get_float("end", _REQUIRED)
    cfl_safety = time.get_float("cfl_safety", 0.9)
    spd = time.get_int("samples_per_decade", 32)
    record_start = time.get_float("record_start", None)
    time.check_unknown()

    init = _Section(parser, "initial", path)
    table_r = init.get_floats("table_r")
    table_n = init.get_floats("table_n")
    initial = InitialSpec(
        kind=init.get_str("kind", "barenblatt"),
        mass=init.get_float("mass", 1.0),
        time_offset=init.get_float("time_offset", 0.0),
        height=init.get_float("height", 1.0),
        r_inner=init.get_float("r_inner", 1.0),
        r_outer=init.get_float("r_outer", 2.0),
        cut_radius=init.get_float("cut_radius", None),
        perturb_amp=init.get_float("perturb_amp", 0.0),
        perturb_width=init.get_float("perturb_width", 1.0),
        table_r=tuple(table_r),
        table_n=tuple(table_n),
    )
    init.check_unknown()

    rec = _Section(parser, "record", path)
    requests = []
    allow_override = rec.get_bool("allow_inadmissible_b", False)
    b_values = rec.get_floats("lipschitz_b")
    gap_values = rec.get_floats("weighted_gap_b")
    for b in b_values:
        requests.append(FunctionalRequest("lipschitz", b))
    for b in gap_values:
        requests.append(FunctionalRequest("weighted_gap", b))
    for kind in ("linf", "mass", "fisher", "ab_min", "rel_err", "tail_norm"):
        if rec.get_bool(kind, False):
            requests.append(FunctionalRequest(kind))
    snapshots = rec.get_bool("snapshots", False)
    rec.check_unknown()

    for b in b_values + gap_values:
        report = check(gamma, b, dim, potential_kind)
        if not report.admissible and not allow_override:
            raise ConfigError(
                f"{path}: b = {b:g} (gamma*b = {gamma * b:g}) is not admissible for the "
                f"{potential_kind} clause set; set allow_inadmissible_b for limiting cases")

    if any(r.kind in ("rel_err", "tail_norm") for r in requests):
        if initial.kind not in ("barenblatt", "truncated_barenblatt", "fp_stationary") \
                and boundary != FARFIELD:
            raise ConfigError(
                f"{path}: rel_err/tail_norm need a reference profile "
                "(barenblatt-family initial data or far-field boundary)")

    try:
        solver = SolverConfig(
            params=params, n_cells=n_cells, r_max=r_max, t_start=t_start, t_end=t_end,
            initial=initial, cfl_safety=cfl_safety, samples_per_decade=spd,
            record_start=record_start, boundary=boundary, record=tuple(requests),
            keep_fields=snapshots)
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from None

    fits, bounds, transfers = [], [], []
    for section in parser.sections():
        if section.startswith("fit."):
            s = _Section(parser, section, path)
            fits.append(_parse_fit(section[4:], s))
        elif section.startswith("bound."):
            s = _Section(parser, section, path)
            bounds.append(BoundSpec(
                name=section[6:],
                series=s.get_str("series", _REQUIRED),
                kind=s.get_str("kind", "const"),
                value=s.get_float("value", None),
                exponent=s.get_float("exponent", 0.0),
                scale_by_t=s.get_bool("scale_by_t", False),
                slack=s.get_float("slack", 0.05),
                calibrate_at=s.get_float("calibrate_at", None),
                start_at=s.get_float("start_at", None),
                final_at_least=s.get_float("final_at_least", None),
            ))
            s.check_unknown()
        elif section.startswith("transfer."):
            s = _Section(parser, section, path)
            fit = None
            if s.get_str("fit_model", None):
                fit = FitSpec(
                    name=section[9:], series="",
                    model=s.get_str("fit_model", _REQUIRED),
                    window=_window(s.get_str("fit_window", "default")),
                    expect=s.get_float("expect", None),
                    tol=s.get_float("tol", 0.05),
                    min_r2=s.get_float("min_r2", None),
                    side=s.get_str("side", "two"),
                )
            transfers.append(TransferSpec(
                name=section[9:],
                series=s.get_str("series", _REQUIRED),
                b=s.get_float("b", _REQUIRED),
                fit=fit,
            ))
            s.check_unknown()
        elif section not in ("problem", "grid", "time", "initial", "record"):
            raise ConfigError(f"{path}: unknown section [{section}]")

    import os

    name = os.path.splitext(os.path.basename(str(path)))[0]
    return ExperimentSpec(name=name, solver=solver, fits=tuple(fits),
                          bounds=tuple(bounds), transfers=tuple(transfers))


def _parse_fit(name: str, s: _Section) -> FitSpec:
    fit = FitSpec(
        name=name,
        series=s.get_str("series", _REQUIRED),
        model=s.get_str("model", _REQUIRED),
        window=_window(s.get_str("window", "default")),
        expect=s.get_float("expect", None),
        tol=s.get_float("tol", 0.05),
        min_r2=s.get_float("min_r2", None),
        side=s.get_str("side", "two"),
    )
    s.check_unknown()
    if fit.model not in ("power", "exponential"):
        raise ConfigError(f"[fit.{name}] unknown model {fit.model!r}")
    if fit.side not in ("two", "below", "above"):
        raise ConfigError(f"[fit.{name}] unknown side {fit.side!r}")
    return fit
