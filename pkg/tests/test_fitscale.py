import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpt_echo.fitscale import (FitError, delta_trend, envelope, epsilon_exponent,
                               fit_exponential, fit_m1, loglog_envelope_slope,
                               power_law_exponent, scaling_gamma, scaling_xi)
from qpt_echo.gaussian import dicke_sp_effective
from qpt_echo.pairprod import survival_probability
from qpt_echo.semiclassics import m1_model, m2_model
from qpt_echo.series import SurvivalSeries
from qpt_echo.spectra import DickeParams, IsingParams, QuenchSpec


def series(t, m):
    return SurvivalSeries.from_probability(t, m)


def dicke(eps, delta, t):
    q = QuenchSpec.from_offsets(eps, delta, 0.5)
    return q, dicke_sp_effective(DickeParams(1, 1, q.lambda_), q, t)


class TestFitM1:
    def test_noise_free_round_trip(self):
        t = np.linspace(0, 2000, 300)
        rep = fit_m1(series(t, m1_model(t, 1.0, 1e-3, 1e-2)))
        assert rep.parameters["c0"] == pytest.approx(1.0, rel=1e-6)
        assert rep.parameters["gamma"] == pytest.approx(1e-3, rel=1e-6)
        assert rep.parameters["xi"] == pytest.approx(1e-2, rel=1e-6)
        assert rep.r_squared == pytest.approx(1.0)
        assert rep.converged and rep.model_form == "M1"

    @given(st.floats(0.5, 1.0), st.floats(0.01, 20.0), st.floats(1e-4, 1e-1))
    def test_round_trip_property(self, c0, ratio, xi):
        gamma = ratio * xi * xi
        t = np.linspace(0, 30 / xi, 200)
        rep = fit_m1(series(t, m1_model(t, c0, gamma, xi)))
        assert rep.parameters["xi"] == pytest.approx(xi, rel=1e-6)
        assert rep.parameters["gamma"] == pytest.approx(gamma, rel=1e-6)

    @given(st.floats(0.1, 100.0))
    def test_scale_equivariance(self, c):
        t = np.linspace(0, 2000, 300)
        m = m1_model(t, 0.95, 1e-3, 1e-2)
        a = fit_m1(series(t, m)).parameters
        b = fit_m1(series(c * t, m)).parameters
        assert b["gamma"] == pytest.approx(a["gamma"] / c**2, rel=1e-6)
        assert b["xi"] == pytest.approx(a["xi"] / c, rel=1e-6)

    def test_noise_within_three_stderr(self):
        t = np.linspace(0, 2000, 300)
        truth = {"gamma": 1e-3, "xi": 1e-2}
        rng = np.random.default_rng(11)
        hits = 0
        trials = 40
        for _ in range(trials):
            noisy = m1_model(t, 1.0, 1e-3, 1e-2) * (1 + 0.01 * rng.standard_normal(t.size))
            rep = fit_m1(series(t, noisy))
            hits += all(abs(rep.parameters[k] - v) <= 3 * rep.stderr[k] for k, v in truth.items())
        assert hits >= 0.9 * trials

    def test_gamma_xi_relation_reported(self):
        t = np.linspace(0, 2000, 300)
        rep = fit_m1(series(t, m1_model(t, 1.0, 1e-3, 1e-2)))
        assert rep.diagnostics["gamma_over_xi_sq"] == pytest.approx(10.0, rel=1e-6)

    def test_too_few_points(self):
        with pytest.raises(FitError):
            fit_m1(series(np.arange(5.0), np.ones(5)))

    def test_non_convergence_carries_report(self):
        t = np.linspace(0, 2000, 300)
        with pytest.raises(FitError) as info:
            fit_m1(series(t, m1_model(t, 1.0, 1e-3, 1e-2) * (1 + 0.2 * np.sin(t))), max_iter=1)
        assert info.value.report is not None and not info.value.report.converged

    def test_exact_dicke_fig2_regime(self):
        _, s = dicke(1e-5, -1e-10, np.logspace(0, math.log10(3e4), 300))
        rep = fit_m1(s)
        assert rep.residual_max <= 0.05
        assert rep.parameters["xi"] == pytest.approx(0.002236, rel=0.03)


class TestExponential:
    def test_synthetic(self):
        t = np.linspace(0, 500, 50)
        rep = fit_exponential(series(t, np.exp(-0.01 * t)))
        assert rep.parameters["rate"] == pytest.approx(0.01, abs=1e-10)

    def test_no_decay(self):
        t = np.linspace(0, 10, 20)
        rep = fit_exponential(series(t, np.ones_like(t)))
        assert rep.parameters["rate"] == 0.0 and rep.stderr["rate"] == 0.0

    def test_m_range_window(self):
        t = np.linspace(0, 1000, 101)
        rep = fit_exponential(series(t, 0.5 * np.exp(-0.01 * t) + 0.5 * (t == 0)),
                              m_range=(math.exp(-6), 0.9))
        assert rep.window[0] > 0

    def test_too_few(self):
        with pytest.raises(FitError):
            fit_exponential(series([0.0, 1.0], [1.0, 0.9]))

    @given(st.floats(0.1, 10))
    def test_scale_equivariance(self, c):
        t = np.linspace(0, 100, 30)
        m = np.exp(-0.03 * t - 0.001 * np.sin(t))
        a = fit_exponential(series(t, m)).parameters["rate"]
        b = fit_exponential(series(c * t, m)).parameters["rate"]
        assert b == pytest.approx(a / c, rel=1e-9)

    def test_ising_rate_scales_with_epsilon_squared(self):
        t = np.linspace(0, 120, 25)
        ks = []
        for eps in (8e-5 / math.sqrt(10), 8e-5 * 10**-0.25, 8e-5):
            q = QuenchSpec.from_offsets(eps, -4e-5, 1.0)
            s = survival_probability(IsingParams(200_001, q.lambda_), q, t)
            ks.append(fit_exponential(s).parameters["rate"] / eps**2)
        assert max(ks) / min(ks) - 1 <= 0.05


class TestEnvelope:
    def test_inverse_time_tail(self):
        t = np.logspace(1, 5, 800)
        m = (1 / (0.01 * t)) * (0.75 + 0.25 * np.cos(t) ** 2)
        rep = loglog_envelope_slope(series(t, np.minimum(m, 1.0)), (1e3, 1e5))
        assert rep.parameters["slope"] == pytest.approx(-1.0, abs=0.02)

    def test_gaussian_reports_steep_slope(self):
        t = np.logspace(0, 3, 600)
        s = series(t, np.exp(-1e-4 * t * t))
        early = loglog_envelope_slope(s, (20, 300)).parameters["slope"]
        late = loglog_envelope_slope(s, (90, 1000)).parameters["slope"]
        assert late < early < -1
        assert late < -10

    def test_needs_a_decade(self):
        t = np.linspace(10, 50, 100)
        with pytest.raises(FitError):
            loglog_envelope_slope(series(t, 1 / t))

    def test_needs_five_points(self):
        t = np.array([1.0, 3.0, 9.0, 20.0])
        with pytest.raises(FitError):
            loglog_envelope_slope(series(t, 1 / t))

    def test_bins_are_log_spaced_maxima(self):
        t = np.logspace(0, 2, 161)
        m = 0.5 + 0.5 * np.cos(t) ** 2
        et, ey = envelope(series(t, m))
        assert et.size == 16
        assert np.all(ey <= 0.0)

    def test_dicke_m11_slope(self):
        _, s = dicke(1e-5, -1e-11, np.logspace(0, 5, 400))
        rep = loglog_envelope_slope(s, (1e3, 1e5))
        assert rep.parameters["slope"] == pytest.approx(-1.0, abs=0.1)


class TestScaling:
    def test_gamma_collapse_equal_eta(self):
        batches = []
        for eps in (1e-6, 1e-5):
            dl = eps / -0.5
            q = QuenchSpec(0.5, dl, dl + eps)
            xi = 0.5 * math.sqrt(2) * math.sqrt(abs(q.eta * eps))
            batches.append(dicke(eps, q.delta, np.array([0.05 / xi, 0.1 / xi])))
        rep = scaling_gamma(batches)
        assert rep.passed
        vals = [r["value"] for r in rep.rows]
        assert 0.9 <= vals[0] / vals[-1] <= 1.1

    def test_gamma_collapse_small_eps_limit(self):
        # the exact frequency quench gives (-ln M)/(eps t^2) -> A^2 |eta| / 8 as t -> 0
        vals = []
        for eps in (1e-8, 1e-7):
            q = QuenchSpec(0.5, -eps, 0.0)
            _, s = dicke(eps, 0.0, np.array([10.0, 20.0]))
            vals.append(scaling_gamma([(q, s)]).extra["collapse_curve"][0][1])
        assert vals[0] == pytest.approx(2 * 1.0 / 8, rel=1e-3)
        assert vals[1] == pytest.approx(vals[0], rel=1e-3)

    def test_gamma_collapse_far_from_critical(self):
        q = QuenchSpec.from_lambdas(0.0, 1e-6, 0.5)
        _, s = dicke(q.epsilon, q.delta, np.array([1.0, 2.0]))
        rep = scaling_gamma([(q, s)])
        assert abs(rep.extra["collapse_curve"][0][1]) < 1e-3

    def test_gamma_needs_points(self):
        q, s = dicke(1e-5, -1e-6, np.array([0.0, 1.0]))
        with pytest.raises(FitError):
            scaling_gamma([(q, s)], window=(10, 20))

    def test_xi_overlay(self):
        t = np.logspace(0, 4.5, 300)
        batches = [dicke(eps, -1e-10, t) for eps in (1.2e-6, 3.5e-6, 9e-6)]
        rep = scaling_xi(batches, window=(math.exp(8.6), math.exp(9.5)), fit_window=(1, 3e4))
        assert rep.max_deviation <= 0.1
        assert rep.fit.parameters["slope"] == pytest.approx(0.5, abs=0.05)

    def test_epsilon_exponent_synthetic(self):
        t = np.array([10.0, 50.0])
        batches = [(QuenchSpec.from_offsets(e, -1e-3, 1.0), series(t, m2_model(t, 3.0, e)))
                   for e in np.logspace(-3, -2, 6)]
        rep = epsilon_exponent(batches)
        assert rep.parameters["slope"] == pytest.approx(2.0, abs=1e-6)

    def test_epsilon_exponent_needs_decay(self):
        t = np.array([0.0, 1.0])
        batches = [(QuenchSpec.from_offsets(e, 0, 1.0), series(t, [1.0, 1.0])) for e in (1, 2)]
        with pytest.raises(FitError):
            epsilon_exponent(batches)

    def test_delta_trend_monotone(self):
        t = np.linspace(0, 10, 11)
        batches = [(QuenchSpec.from_offsets(1e-3, -d, 1.0), series(t, np.exp(-(0.1 - d) * t)))
                   for d in (0.01, 0.02, 0.04)]
        assert delta_trend(batches, 10.0).passed
        flipped = [(QuenchSpec.from_offsets(1e-3, -d, 1.0), series(t, np.exp(-(0.05 + d) * t)))
                   for d in (0.01, 0.02, 0.04)]
        assert not delta_trend(flipped, 10.0).passed

    def test_power_law_exponent(self):
        x = np.logspace(0, 2, 7)
        assert power_law_exponent(x, 3 * x**0.5).parameters["slope"] == pytest.approx(0.5)
