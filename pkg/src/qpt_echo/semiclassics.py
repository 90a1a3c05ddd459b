"""Semiclassical survival-probability machinery for harmonic counterparts.

Phase-space convention (hbar = 1): a mode of frequency e has
H = (p^2 + e^2 q^2) / 2 and c = sqrt(e/2) q + i p / sqrt(2e).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .series import SurvivalSeries

PerturbationFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

_GL_NODES = 48
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_NODES)


class SemiclassicalError(RuntimeError):
    """Quadrature or finite-difference estimate failed to converge."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class ClassicalMode:
    """Harmonic classical counterpart with an initial Gaussian packet.

    ``packet_width`` is the rms position spread sigma of the packet and
    ``momentum_width`` is w = 1 / sigma, the width of the Gaussian weight
    exp(-(p0 - p0~)^2 / w^2) in the m_sc integral.
    """

    frequency: float
    packet_center: tuple[float, float] = (0.0, 0.0)
    packet_width: float | None = None
    momentum_width: float | None = None

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("frequency must be positive")
        sigma = self.packet_width
        if sigma is None:
            sigma = 1.0 / math.sqrt(2.0 * self.frequency)
            object.__setattr__(self, "packet_width", sigma)
        if self.momentum_width is None:
            object.__setattr__(self, "momentum_width", 1.0 / sigma)

    @classmethod
    def ground_state(cls, frequency: float, convention: str = "rms") -> "ClassicalMode":
        """Packet matching the oscillator ground state.

        ``"rms"``: sigma = 1/sqrt(2e), the standard deviation of |psi(q)|^2.
        ``"gaussian-exponent"``: sigma = 1/sqrt(e), from psi ~ exp(-q^2/(2 sigma^2)).
        """
        if convention == "rms":
            sigma = 1.0 / math.sqrt(2.0 * frequency)
        elif convention == "gaussian-exponent":
            sigma = 1.0 / math.sqrt(frequency)
        else:
            raise ValueError(f"unknown width convention {convention!r}")
        return cls(frequency, (0.0, 0.0), sigma)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.frequency


@dataclass(frozen=True)
class SemiclassicalEstimates:
    gamma: float
    xi: float
    c0: float
    period: float
    u_derivatives: tuple[float, float]


def trajectory(mode: ClassicalMode, q0, p0, t):
    """Closed-form harmonic flow from (q0, p0); broadcasts over all inputs."""
    e = mode.frequency
    t = np.asarray(t, dtype=float)
    c, s = np.cos(e * t), np.sin(e * t)
    return q0 * c + (p0 / e) * s, p0 * c - e * q0 * s


def _integrate_segment(mode, v, q0, p0, t0, t1):
    """Gauss-Legendre integral of V over [t0, t1] (broadcast over q0/p0/t1)."""
    half = 0.5 * (np.asarray(t1) - t0)
    mid = 0.5 * (np.asarray(t1) + t0)
    tau = mid[..., None] + half[..., None] * _GL_X
    q, p = trajectory(mode, np.asarray(q0)[..., None], np.asarray(p0)[..., None], tau)
    return half * np.sum(_GL_W * v(q, p), axis=-1)


def _integral_along(mode, v, q0, p0, t):
    """int_0^t V dt' using exact periodicity: n full periods plus a remainder.

    Each period is split into 4 Gauss-Legendre panels.
    """
    period = mode.period
    q0, p0, t = np.broadcast_arrays(np.asarray(q0, float), np.asarray(p0, float),
                                    np.asarray(t, float))
    quarter = 0.25 * period
    one_period = sum(_integrate_segment(mode, v, q0, p0, k * quarter, (k + 1) * quarter)
                     for k in range(4))
    n_full = np.floor(t / period)
    rest = t - n_full * period
    total = n_full * one_period
    for k in range(4):
        lo = k * quarter
        hi = np.clip(rest, lo, lo + quarter)
        total = total + np.where(hi > lo, _integrate_segment(mode, v, q0, p0, lo, hi), 0.0)
    return total


def action_difference(mode: ClassicalMode, v: PerturbationFunction, epsilon, q0, p0, t):
    """Delta S = epsilon * int_0^t V(q(t'), p(t')) dt' along one trajectory."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be nonnegative")
    if epsilon == 0:
        return np.zeros(np.broadcast(np.asarray(q0), np.asarray(p0), np.asarray(t)).shape)
    return epsilon * _integral_along(mode, v, q0, p0, t)


def period_averaged_perturbation(mode: ClassicalMode, v: PerturbationFunction, p0):
    """U(p0) = (1/T) int_0^T V dt on the orbit through (q0~, p0)."""
    q0 = mode.packet_center[0]
    one = sum(_integrate_segment(mode, v, q0, p0, k * 0.25 * mode.period, (k + 1) * 0.25 * mode.period)
              for k in range(4))
    return one / mode.period


def _msc_at(mode, v, epsilon, times, n_nodes):
    w = mode.momentum_width
    q0, pc = mode.packet_center
    x, wts = np.polynomial.legendre.leggauss(n_nodes)
    p0 = pc + 6.0 * w * x
    weight = wts * np.exp(-((p0 - pc) / w) ** 2)
    weight /= weight.sum()
    times = np.asarray(times, dtype=float)
    out = np.empty(times.size)
    block = max(1, (1 << 19) // (n_nodes * _GL_NODES))
    for lo in range(0, times.size, block):
        tb = times[lo:lo + block, None]
        ds = action_difference(mode, v, epsilon, q0, p0[None, :], tb)
        out[lo:lo + block] = np.abs(np.exp(1j * ds) @ weight) ** 2
    return out


def msc(mode: ClassicalMode, v: PerturbationFunction, epsilon, times,
        tol=1e-6, min_nodes=64, max_nodes=1 << 14) -> SurvivalSeries:
    """|m_sc(t)|^2 by Gauss-Legendre quadrature over p0 in p0~ +- 6w.

    The node count doubles until |m_sc|^2 changes by less than ``tol``.
    """
    times = np.asarray(times, dtype=float)
    n = min_nodes
    prev = _msc_at(mode, v, epsilon, times, n)
    delta = math.inf
    while n < max_nodes:
        n *= 2
        cur = _msc_at(mode, v, epsilon, times, n)
        delta = float(np.max(np.abs(cur - prev))) if times.size else 0.0
        prev = cur
        if delta < tol:
            break
    else:
        raise SemiclassicalError(
            f"m_sc quadrature not converged at {n} nodes (change {delta:.2e})", achieved=delta)
    meta = {"model": "semiclassical", "grid": {"frequency": mode.frequency,
                                                "momentum_width": mode.momentum_width,
                                                "nodes": n, "epsilon": epsilon}}
    return SurvivalSeries.from_probability(times, np.minimum(prev, 1.0), meta)


def _richardson(f, x, h, order):
    def central(step):
        if order == 1:
            return (f(x + step) - f(x - step)) / (2.0 * step)
        return (f(x + step) - 2.0 * f(x) + f(x - step)) / step**2

    coarse, fine = central(h), central(0.5 * h)
    return (4.0 * fine - coarse) / 3.0, fine


def semiclassical_estimates(mode: ClassicalMode, v: PerturbationFunction, epsilon,
                            rtol=1e-4) -> SemiclassicalEstimates:
    """Gamma and xi from finite-difference derivatives of U at p0~.

    Gamma = (eps w U')^2 / 2 and xi = |eps w^2 U'' / 2|.
    """
    w = mode.momentum_width
    pc = mode.packet_center[1]
    h = max(1e-4 * w, 1e-6)

    def u(p):
        return float(period_averaged_perturbation(mode, v, p))

    spread = max(abs(u(pc + w) - u(pc)), abs(u(pc - w) - u(pc)), 1e-300)
    derivs = []
    for order in (1, 2):
        est, fine = _richardson(u, pc, h, order)
        scale = max(abs(est), spread / w**order)
        if abs(est - fine) > rtol * scale:
            raise SemiclassicalError(
                f"order-{order} derivative of U not converged ({est!r} vs {fine!r})",
                achieved=abs(est - fine) / scale)
        derivs.append(est)
    d1, d2 = derivs
    gamma = 0.5 * (epsilon * w * d1) ** 2
    xi = abs(epsilon * w**2 * d2 / 2.0)
    return SemiclassicalEstimates(gamma, xi, 1.0, mode.period, (d1, d2))


def m1_model(t, c0, gamma, xi):
    """c0 (1 + xi^2 t^2)^(-1/2) exp(-gamma t^2 / (1 + xi^2 t^2))."""
    t = np.asarray(t, dtype=float)
    s = 1.0 + (xi * t) ** 2
    return c0 * np.exp(-gamma * t * t / s) / np.sqrt(s)


def m2_model(t, ks, epsilon):
    """exp(-K_s epsilon^2 t)."""
    return np.exp(-ks * epsilon**2 * np.asarray(t, dtype=float))


def dicke_perturbation(frequency: float, gap_coefficient: float) -> PerturbationFunction:
    """Classical image of V = -(A^2 / 2e)(c^+c + 2 c^+^2 + 2 c^2) for the Dicke soft mode."""
    e, a2 = frequency, gap_coefficient**2

    def v(q, p):
        number = 0.5 * (e * q * q + p * p / e)
        pair = e * q * q - p * p / e
        return -(a2 / (2.0 * e)) * (number + 2.0 * pair)

    return v


@dataclass(frozen=True)
class HarmonicFlow:
    """d independent oscillators; phase-space points are arrays (q[d], p[d])."""

    frequencies: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        if f.ndim != 1 or np.any(f <= 0):
            raise ValueError("frequencies must be a 1-d array of positive values")
        object.__setattr__(self, "frequencies", f)

    def flow(self, q0, p0, t):
        e = self.frequencies
        t = np.asarray(t, dtype=float)[..., None]
        c, s = np.cos(e * t), np.sin(e * t)
        return q0 * c + (p0 / e) * s, p0 * c - e * q0 * s


def ks_estimator(flow, v, ensemble: Sequence, horizon: float, panels_per_period=4):
    """K_s = Var_ensemble[int_0^t V dt'] / t, with its standard error.

    ``flow`` is a :class:`ClassicalMode` (``v`` takes plain q, p arrays) or a
    :class:`HarmonicFlow` (``v`` takes arrays with a trailing degree-of-freedom
    axis). Returns (ks, stderr).
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    ensemble = list(ensemble)
    if len(ensemble) < 2:
        raise ValueError("ensemble needs at least two initial conditions")
    single = isinstance(flow, ClassicalMode)
    if single:
        flow = HarmonicFlow(np.array([flow.frequency]))
    fastest = float(np.max(flow.frequencies))
    n_panels = max(1, int(math.ceil(horizon * fastest / (2 * math.pi) * panels_per_period)))
    edges = np.linspace(0.0, horizon, n_panels + 1)
    half = 0.5 * np.diff(edges)
    tau = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half[:, None] * _GL_X
    integrals = np.empty(len(ensemble))
    for i, (q0, p0) in enumerate(ensemble):
        q, p = flow.flow(np.atleast_1d(q0), np.atleast_1d(p0), tau)
        vals = v(q[..., 0], p[..., 0]) if single else v(q, p)
        integrals[i] = np.sum(half[:, None] * _GL_W * vals)
    n = integrals.size
    centred = integrals - integrals.mean()
    var = float(np.sum(centred**2) / (n - 1))
    m4 = float(np.mean(centred**4))
    se_var = math.sqrt(max(m4 - var**2 * (n - 3) / (n - 1), 0.0) / n)
    return var / horizon, se_var / horizon
