"""Decay-law fits and scaling analyses on survival-probability series.

Every fit acts on ln M. Windows are explicit inputs.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .semiclassics import m1_model
from .series import SurvivalSeries
from .spectra import QuenchSpec

ENVELOPE_BINS_PER_DECADE = 8


class FitError(RuntimeError):
    """Fit could not be performed; ``report`` holds the best attempt if any."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class FitReport:
    model_form: str
    parameters: dict[str, float]
    stderr: dict[str, float]
    r_squared: float
    window: tuple
    residual_max: float
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "model_form": self.model_form,
            "parameters": dict(self.parameters),
            "stderr": dict(self.stderr),
            "r_squared": self.r_squared,
            "window": list(self.window),
            "residual_max": self.residual_max,
            "converged": self.converged,
            "diagnostics": dict(self.diagnostics),
        }


def _select(series: SurvivalSeries, window, m_range=None):
    t, y = series.times, series.log_m_values
    sel = np.isfinite(y)
    if window is not None:
        lo, hi = window
        if lo is not None:
            sel &= t >= lo
        if hi is not None:
            sel &= t <= hi
    if m_range is not None:
        sel &= (y >= math.log(m_range[0])) & (y <= math.log(m_range[1]))
    return t[sel], y[sel]


def _r_squared(y, pred) -> float:
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def _linear_fit(x, y):
    """Ordinary least squares y = a + b x; returns (a, b, se_a, se_b, pred)."""
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    pred = design @ coef
    dof = x.size - 2
    if dof > 0:
        s2 = float(np.sum((y - pred) ** 2)) / dof
        cov = s2 * np.linalg.inv(design.T @ design)
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    else:
        se = np.zeros(2)
    return coef[0], coef[1], se[0], se[1], pred


def fit_exponential(series: SurvivalSeries, window=None, m_range=None) -> FitReport:
    """Straight-line fit ln M = b - rate * t."""
    t, y = _select(series, window, m_range)
    if t.size < 3:
        raise FitError(f"exponential fit needs >= 3 points, got {t.size}")
    a, b, se_a, se_b, pred = _linear_fit(t, y)
    rate = 0.0 - b
    return FitReport(
        "exponential",
        {"rate": rate, "intercept": a},
        {"rate": se_b, "intercept": se_a},
        _r_squared(y, pred),
        (float(t[0]), float(t[-1])),
        float(np.max(np.abs(y - pred))),
        diagnostics={"n_points": int(t.size), "sign_ok": rate >= 0.0},
    )


def _log_m1(t, log_c0, gamma, xi):
    s = 1.0 + (xi * t) ** 2
    return log_c0 - 0.5 * np.log(s) - gamma * t * t / s


def _m1_jacobian(params, t, sw):
    log_c0, gamma, xi = params
    s = 1.0 + (xi * t) ** 2
    d_gamma = -t * t / s
    d_xi = -xi * t * t / s + 2.0 * gamma * xi * t**4 / s**2
    return np.column_stack([np.ones_like(t), d_gamma, d_xi]) * sw[:, None]


def _m1_initial(t, y):
    """Head/tail starting point: Gamma0 from a quadratic fit of the first 10%
    of points, xi0 from the last decade."""
    n_head = max(3, int(math.ceil(0.1 * t.size)))
    th, yh = t[:n_head], y[:n_head]
    coef = np.polyfit(th * th, yh, 1)
    initial_rate = max(-coef[0], 0.0)
    tail = t >= t[-1] / 10.0
    if np.count_nonzero(tail) < 2:
        tail = np.arange(t.size) >= t.size - 2
    xi0 = float(np.exp(np.mean(-y[tail] - np.log(t[tail]))))
    gamma0 = max(initial_rate - 0.5 * xi0**2, 0.1 * initial_rate)
    return np.array([float(coef[1]), gamma0, xi0])


def _profile_in_xi(t, y, sw, xi):
    """For fixed xi the model is linear in (ln c0, Gamma): solve it, Gamma >= 0."""
    s = 1.0 + (xi * t) ** 2
    target = (y + 0.5 * np.log(s)) * sw
    col = -(t * t / s) * sw
    design = np.column_stack([sw, col])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    if coef[1] < 0:
        coef = np.array([np.sum(sw * target) / np.sum(sw * sw), 0.0])
    r = design @ coef - target
    return float(r @ r), np.array([coef[0], coef[1], xi])


def _m1_start(t, y, sw):
    """Best of the head/tail guess and a log-grid profile scan over xi."""
    x0 = _m1_initial(t, y)
    candidates = [x0]
    t_pos = t[t > 0]
    if t_pos.size:
        for xi in np.logspace(math.log10(1e-3 / t_pos[-1]), math.log10(1e3 / t_pos[0]), 241):
            candidates.append(_profile_in_xi(t, y, sw, xi)[1])
    costs = [float(np.sum(((_log_m1(t, *c) - y) * sw) ** 2)) for c in candidates]
    return x0, candidates[int(np.argmin(costs))]


def fit_m1(series: SurvivalSeries, window=None, weights=None, max_iter=500,
           xtol=1e-10) -> FitReport:
    """Nonlinear least squares of ln M against ln M1(t; c0, Gamma, xi).

    Trust-region Levenberg-Marquardt-type iteration with Gamma, xi >= 0. The
    step tolerance sits below 1e-8 because Gamma converges slowly when
    Gamma << xi^2.
    """
    t, y = _select(series, window)
    if t.size < 8:
        raise FitError(f"M1 fit needs >= 8 points, got {t.size}")
    sw = np.ones_like(t) if weights is None else np.sqrt(np.asarray(weights, float))
    guess, x0 = _m1_start(t, y, sw)

    def resid(p):
        return (_log_m1(t, *p) - y) * sw

    sol = least_squares(resid, x0, jac=lambda p: _m1_jacobian(p, t, sw),
                        bounds=([-np.inf, 0.0, 0.0], [np.inf, np.inf, np.inf]),
                        x_scale="jac", xtol=xtol, ftol=1e-15, gtol=1e-15,
                        max_nfev=max_iter, method="trf")
    log_c0, gamma, xi = sol.x
    pred = _log_m1(t, *sol.x)
    dof = t.size - 3
    jac = sol.jac
    try:
        cov = np.linalg.pinv(jac.T @ jac) * (2.0 * sol.cost / dof if dof > 0 else 0.0)
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        se = np.full(3, np.nan)
    c0 = math.exp(log_c0)
    report = FitReport(
        "M1",
        {"c0": c0, "gamma": float(gamma), "xi": float(xi)},
        {"c0": c0 * float(se[0]), "gamma": float(se[1]), "xi": float(se[2])},
        _r_squared(y, pred),
        (float(t[0]), float(t[-1])),
        float(np.max(np.abs(y - pred))),
        converged=bool(sol.status > 0),
        diagnostics={
            "n_points": int(t.size),
            "iterations": int(sol.nfev),
            "gamma_over_xi_sq": float(gamma / xi**2) if xi > 0 else math.inf,
            "initial_gaussian_rate": float(gamma + 0.5 * xi**2),
            "initial_guess": guess.tolist(),
            "start": x0.tolist(),
        },
    )
    if not report.converged:
        raise FitError(f"M1 fit did not converge after {sol.nfev} evaluations", report)
    return report


def envelope(series: SurvivalSeries, window=None, bins_per_decade=ENVELOPE_BINS_PER_DECADE):
    """Per-bin maxima of ln M over log-spaced time bins: (t_at_max, lnM_max)."""
    t, y = _select(series, window)
    t_pos = t > 0
    t, y = t[t_pos], y[t_pos]
    if t.size == 0:
        return t, y
    decades = math.log10(t[-1] / t[0])
    n_bins = max(1, int(math.ceil(decades * bins_per_decade)))
    edges = np.logspace(math.log10(t[0]), math.log10(t[-1]), n_bins + 1)
    edges[-1] = np.nextafter(edges[-1], np.inf)
    idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, n_bins - 1)
    env_t, env_y = [], []
    for b in range(n_bins):
        members = np.flatnonzero(idx == b)
        if members.size:
            j = members[np.argmax(y[members])]
            env_t.append(t[j])
            env_y.append(y[j])
    return np.array(env_t), np.array(env_y)


def loglog_envelope_slope(series: SurvivalSeries, window=None,
                          bins_per_decade=ENVELOPE_BINS_PER_DECADE) -> FitReport:
    """Slope of ln M_env against ln t."""
    t, _ = _select(series, window)
    t = t[t > 0]
    if t.size == 0 or t[-1] / t[0] < 10.0 * (1 - 1e-12):
        raise FitError("envelope window must span at least one decade in t")
    et, ey = envelope(series, window, bins_per_decade)
    if et.size < 5:
        raise FitError(f"only {et.size} envelope points (need >= 5)")
    a, b, se_a, se_b, pred = _linear_fit(np.log(et), ey)
    return FitReport(
        "powerlaw-slope",
        {"slope": b, "intercept": a},
        {"slope": se_b, "intercept": se_a},
        _r_squared(ey, pred),
        (float(t[0]), float(t[-1])),
        float(np.max(np.abs(ey - pred))),
        diagnostics={"n_envelope": int(et.size)},
    )


def power_law_exponent(x, y) -> FitReport:
    """Slope of ln y against ln x (e.g. fitted xi against epsilon)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size < 2:
        raise FitError("need at least two points for an exponent")
    a, b, se_a, se_b, pred = _linear_fit(np.log(x), np.log(y))
    ly = np.log(y)
    return FitReport("powerlaw-slope", {"slope": b, "intercept": a},
                     {"slope": se_b, "intercept": se_a}, _r_squared(ly, pred),
                     (float(x.min()), float(x.max())), float(np.max(np.abs(ly - pred))))


# -- scaling analyses -------------------------------------------------------

@dataclass
class ScalingReport:
    kind: str
    rows: list[dict]
    max_deviation: float
    passed: bool
    tolerance: float
    fit: FitReport | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "rows": self.rows, "max_deviation": self.max_deviation,
                "passed": self.passed, "tolerance": self.tolerance,
                "fit": self.fit.as_dict() if self.fit else None, "extra": self.extra}


def _eta_key(eta: float) -> float:
    return float(f"{eta:.9g}")


def scaling_gamma(batches: Sequence[tuple[QuenchSpec, SurvivalSeries]], window=None,
                  tolerance=0.10) -> ScalingReport:
    """Collapse of (-ln M)/(|eps| t^2) at short times, grouped by eta.

    ``window`` selects the short-time points of every series. The deviation
    of a group is (max - min) / mean of its collapsed values.
    """
    rows = []
    for quench, series in batches:
        t, y = _select(series, window)
        keep = t > 0
        if not np.any(keep):
            raise FitError("series has no short-time points in the window")
        eps = abs(quench.epsilon)
        for ti, yi in zip(t[keep], y[keep]):
            rows.append({"eta": quench.eta, "epsilon": quench.epsilon, "delta": quench.delta,
                         "t": float(ti), "value": float(-yi / (eps * ti * ti))})
    groups: dict[float, list[float]] = {}
    for r in rows:
        groups.setdefault(_eta_key(r["eta"]), []).append(r["value"])
    deviations = {}
    for key, vals in groups.items():
        vals = np.array(vals)
        mean = float(np.mean(vals))
        deviations[key] = float((vals.max() - vals.min()) / abs(mean)) if mean != 0 else 0.0
    worst = max(deviations.values()) if deviations else 0.0
    curve = sorted((k, float(np.mean(v))) for k, v in groups.items())
    return ScalingReport("scaling_gamma", rows, worst, worst <= tolerance, tolerance,
                         extra={"collapse_curve": curve, "group_deviation": deviations})


def scaling_xi(batches: Sequence[tuple[QuenchSpec, SurvivalSeries]], window=None,
               tolerance=0.1, fit_window=None) -> ScalingReport:
    """Overlay ln M against x = ln(eps^(1/2) t) in the 1/t regime.

    Series taken over a common t window need not overlap in x, so the
    spread is measured about the pooled master line: one straight-line fit
    to all (x, ln M) points, spread = max residual - min residual. Where
    curves do overlap, the largest pairwise gap at equal x is reported too.

    Each series is also fitted with M1 over ``fit_window`` (default: the
    whole series) and the fitted xi is regressed against |eps|.
    """
    if len(batches) < 2:
        raise FitError("need at least two series to compare")
    xs, ys, curves = [], [], []
    for quench, series in batches:
        t, y = _select(series, window)
        keep = t > 0
        if np.count_nonzero(keep) < 2:
            raise FitError("series has fewer than two points in the window")
        x = np.log(math.sqrt(abs(quench.epsilon)) * t[keep])
        xs.append(x)
        ys.append(y[keep])
        curves.append((x, y[keep]))
    x_all, y_all = np.concatenate(xs), np.concatenate(ys)
    a, b, _, _, pred = _linear_fit(x_all, y_all)
    resid = y_all - pred
    worst = float(resid.max() - resid.min())
    lo = max(c[0][0] for c in curves)
    hi = min(c[0][-1] for c in curves)
    pairwise = None
    if hi > lo:
        grid = np.linspace(lo, hi, 200)
        stack = np.array([np.interp(grid, x, y) for x, y in curves])
        pairwise = float((stack.max(axis=0) - stack.min(axis=0)).max())
    rows, eps_list, xi_list = [], [], []
    for quench, series in batches:
        rep = fit_m1(series, fit_window)
        rows.append({"epsilon": quench.epsilon, "delta": quench.delta,
                     "xi": rep.parameters["xi"], "gamma": rep.parameters["gamma"],
                     "c0": rep.parameters["c0"], "residual_max": rep.residual_max})
        eps_list.append(abs(quench.epsilon))
        xi_list.append(rep.parameters["xi"])
    exponent = power_law_exponent(eps_list, xi_list)
    return ScalingReport("scaling_xi", rows, worst, worst <= tolerance, tolerance,
                         fit=exponent,
                         extra={"master_slope": float(b), "master_intercept": float(a),
                                "pairwise_spread": pairwise})


def epsilon_exponent(batches: Sequence[tuple[QuenchSpec, SurvivalSeries]], t=None) -> FitReport:
    """Slope of ln(-ln M) against ln|eps| at a common time ``t``.

    ``t`` defaults to the last time of each series.
    """
    xs, ys = [], []
    for quench, series in batches:
        _, log_m = series.value_at(series.times[-1] if t is None else t)
        if not log_m < 0:
            raise FitError("-ln M must be positive for the exponent fit")
        xs.append(abs(quench.epsilon))
        ys.append(-log_m)
    if len(xs) < 2:
        raise FitError("need at least two epsilon values")
    return power_law_exponent(xs, ys)


def delta_trend(batches: Sequence[tuple[QuenchSpec, SurvivalSeries]], t: float,
                fit_window=None) -> ScalingReport:
    """Is M(t) nondecreasing in |delta| at fixed epsilon, within fit stderr?

    The uncertainty of each M(t) is taken from an exponential fit of its
    series: sigma_M = M t sigma_rate.
    """
    rows = []
    for quench, series in batches:
        _, log_m = series.value_at(t)
        rep = fit_exponential(series, fit_window)
        m = math.exp(log_m)
        rows.append({"delta": quench.delta, "abs_delta": abs(quench.delta), "M": m,
                     "rate": rep.parameters["rate"], "rate_stderr": rep.stderr["rate"],
                     "M_stderr": m * t * rep.stderr["rate"]})
    rows.sort(key=lambda r: r["abs_delta"])
    worst = 0.0
    for a, b in zip(rows, rows[1:]):
        drop = a["M"] - b["M"]
        allowed = math.hypot(a["M_stderr"], b["M_stderr"])
        worst = max(worst, drop - allowed)
    return ScalingReport("delta_trend", rows, worst, worst <= 0.0, 0.0)
