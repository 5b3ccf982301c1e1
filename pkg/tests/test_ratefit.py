import math

import numpy as np
import pytest

from difflab.errors import DomainError
from difflab.functionals import FunctionalSeries
from difflab.ratefit import (
    BoundReport,
    default_window,
    fit_exponential,
    fit_power,
    last_decade_window,
    verify_bound,
)


def make_series(ts, fn):
    s = FunctionalSeries("test", "test")
    for t in ts:
        s.append(float(t), float(fn(t)))
    return s


class TestFitPower:
    def test_exact_power_law(self):
        s = make_series(np.geomspace(1.0, 100.0, 40), lambda t: 3.0 * t ** (-5.0 / 3.0))
        fit = fit_power(s, window=(1.0, 100.0))
        assert fit.value == pytest.approx(-5.0 / 3.0, abs=1e-12)
        assert fit.prefactor == pytest.approx(3.0, rel=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        s = make_series(np.geomspace(1.0, 10.0, 16), lambda t: 2.5)
        fit = fit_power(s, window=(1.0, 10.0))
        assert fit.value == pytest.approx(0.0, abs=1e-13)
        assert fit.r2 == 1.0

    def test_nonpositive_value_reported(self):
        s = FunctionalSeries("test", "test")
        for k, t in enumerate(np.geomspace(1.0, 10.0, 12)):
            s.append(float(t), 1.0 if k != 5 else 0.0)
        with pytest.raises(DomainError, match="t ="):
            fit_power(s, window=(1.0, 10.0))

    def test_too_few_samples(self):
        s = make_series(np.geomspace(1.0, 10.0, 5), lambda t: t)
        with pytest.raises(DomainError):
            fit_power(s, window=(1.0, 10.0))

    def test_window_shift_stability(self):
        # smooth decaying series: dropping one sample barely moves the exponent
        s = make_series(np.geomspace(1.0, 100.0, 64),
                        lambda t: 2.0 * t ** -1.5 * (1.0 + 0.01 / t))
        full = fit_power(s, window=(s.times[1], s.times[-1]))
        shifted = fit_power(s, window=(s.times[2], s.times[-1]))
        assert abs(full.value - shifted.value) < 1e-3


class TestFitExponential:
    def test_exact_exponential(self):
        s = make_series(np.linspace(0.0, 10.0, 30), lambda t: 2.0 * math.exp(-0.6 * t))
        fit = fit_exponential(s, window=(0.0, 10.0))
        assert fit.value == pytest.approx(0.6, abs=1e-12)
        assert fit.prefactor == pytest.approx(2.0, rel=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_growth_has_negative_rate(self):
        s = make_series(np.linspace(0.0, 5.0, 20), lambda t: math.exp(0.3 * t))
        fit = fit_exponential(s, window=(0.0, 5.0))
        assert fit.value == pytest.approx(-0.3, abs=1e-12)


class TestWindows:
    def test_default_power_window_is_geometric(self):
        s = make_series(np.geomspace(1.0, 100.0, 33), lambda t: 1.0 / t)
        lo, hi = default_window(s, "power")
        assert lo == pytest.approx(100.0 ** 0.2, rel=1e-12)
        assert hi == 100.0

    def test_default_exponential_window_is_linear(self):
        s = make_series(np.linspace(0.0, 10.0, 21), lambda t: math.exp(-t))
        lo, hi = default_window(s, "exponential")
        assert lo == pytest.approx(2.0)
        assert hi == 10.0

    def test_last_decade(self):
        s = make_series(np.geomspace(1.0, 200.0, 33), lambda t: 1.0 / t)
        assert last_decade_window(s) == (20.0, 200.0)


class TestVerifyBound:
    def test_exact_bound_holds_with_ratio_one(self):
        s = make_series(np.geomspace(1.0, 10.0, 12), lambda t: 2.0 / t)
        rep = verify_bound(s, lambda t: 2.0 / t, slack=0.0)
        assert rep.holds
        assert rep.worst_ratio == pytest.approx(1.0, rel=1e-12)

    def test_violation_located(self):
        s = make_series([1.0, 2.0, 4.0], lambda t: 1.0 if t != 2.0 else 3.0)
        rep = verify_bound(s, lambda t: 1.5, slack=0.1)
        assert not rep.holds
        assert rep.worst_t == 2.0
        assert rep.worst_ratio == pytest.approx(2.0)

    def test_monotone_in_slack(self):
        s = make_series(np.geomspace(1.0, 10.0, 12), lambda t: 1.05 / t)
        for s1, s2 in [(0.0, 0.02), (0.02, 0.06), (0.06, 0.5)]:
            r1 = verify_bound(s, lambda t: 1.0 / t, s1)
            r2 = verify_bound(s, lambda t: 1.0 / t, s2)
            assert (not r1.holds) or r2.holds
        assert verify_bound(s, lambda t: 1.0 / t, 0.06).holds
        assert not verify_bound(s, lambda t: 1.0 / t, 0.04).holds
