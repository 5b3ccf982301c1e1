"""Least-squares decay-rate fits and one-sided bound verification."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .functionals import FunctionalSeries

POWER = "power"
EXPONENTIAL = "exponential"
MIN_SAMPLES = 8
BURN_IN_FRACTION = 0.2


@dataclass(frozen=True)
class RateFit:
    """Fitted decay model over a time window.

    ``value`` is the signed log-log slope for the power model and the decay
    rate (positive when decaying) for the exponential model.
    """

    model: str
    value: float
    prefactor: float
    r2: float
    window: tuple


@dataclass(frozen=True)
class BoundReport:
    holds: bool
    worst_ratio: float
    worst_t: float
    slack: float


def default_window(series: FunctionalSeries, model: str) -> tuple:
    """Discard the leading 20% of the time range as transient burn-in.

    Power fits measure the range logarithmically, exponential fits linearly.
    """
    t0, t1 = series.times[0], series.times[-1]
    if model == POWER:
        if t0 <= 0:
            raise DomainError("power-law windows need positive times")
        return (t0 * (t1 / t0) ** BURN_IN_FRACTION, t1)
    return (t0 + BURN_IN_FRACTION * (t1 - t0), t1)


def last_decade_window(series: FunctionalSeries) -> tuple:
    t1 = series.times[-1]
    return (t1 / 10.0, t1)


def _windowed(series, window):
    t, v = series.as_arrays()
    lo, hi = window
    keep = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    t, v = t[keep], v[keep]
    if len(t) < MIN_SAMPLES:
        raise DomainError(
            f"need at least {MIN_SAMPLES} samples in the window, found {len(t)}")
    bad = np.nonzero(v <= 0)[0]
    if len(bad):
        raise DomainError(
            f"nonpositive value {v[bad[0]]:g} at t = {t[bad[0]]:g} inside the fit window")
    return t, v


def _r2(x, y, slope, intercept):
    resid = y - (slope * x + intercept)
    total = y - np.mean(y)
    ss_tot = float(total @ total)
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - float(resid @ resid) / ss_tot


def fit_power(series: FunctionalSeries, window: tuple | None = None) -> RateFit:
    """Least squares on (log t, log v); the slope is the decay exponent."""
    if window is None:
        window = default_window(series, POWER)
    t, v = _windowed(series, window)
    if np.any(t <= 0):
        raise DomainError("power-law fits need positive times")
    x, y = np.log(t), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    return RateFit(POWER, float(slope), math.exp(intercept), _r2(x, y, slope, intercept),
                   tuple(window))


def fit_exponential(series: FunctionalSeries, window: tuple | None = None) -> RateFit:
    """Least squares on (t, log v); the negated slope is the decay rate."""
    if window is None:
        window = default_window(series, EXPONENTIAL)
    t, v = _windowed(series, window)
    y = np.log(v)
    slope, intercept = np.polyfit(t, y, 1)
    return RateFit(EXPONENTIAL, float(-slope), math.exp(intercept),
                   _r2(t, y, slope, intercept), tuple(window))


def verify_bound(series: FunctionalSeries, bound: Callable[[float], float],
                 slack: float) -> BoundReport:
    """Check v(t) <= bound(t) * (1 + slack) at every sample."""
    t, v = series.as_arrays()
    ratios = np.array([vv / bound(tt) for tt, vv in zip(t, v)])
    worst = int(np.argmax(ratios))
    return BoundReport(
        holds=bool(np.all(ratios <= 1.0 + slack)),
        worst_ratio=float(ratios[worst]),
        worst_t=float(t[worst]),
        slack=slack,
    )
