"""Exact survival probability of Ising/XY chains as a product over modes.

M(t) = prod_{k>0} F_k with F_k = 1 - sin^2(theta - theta') sin^2(e'_k t).
The product is accumulated as a sum of log1p terms, chunk by chunk, and the
chunk partial sums are merged by a fixed pairwise tree. Chunk boundaries do
not depend on the worker count, so neither does the result.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .series import SurvivalSeries
from .spectra import IsingParams, QuenchSpec, XYParams, grid_ka, mode_grid

DEFAULT_CHUNK = 1 << 16
TIME_BLOCK = 16


def _truncate(x: float, bits: int) -> float:
    m, e = math.frexp(x)
    return math.ldexp(math.floor(m * (1 << bits)), e - bits)


# Cody-Waite split of pi: k * _PI1 and k * _PI2 are exact for |k| < 2**26.
_PI1 = _truncate(math.pi, 26)
_PI2 = _truncate(math.pi - _PI1, 26)
_PI3 = (math.pi - _PI1 - _PI2) + 1.2246467991473532e-16
_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def sin_sq_phase(e, t):
    """sin^2(e * t) with the product formed and reduced mod pi in extended precision.

    The product is split into hi + lo exactly (Dekker), hi is reduced against
    a three-part pi, and lo is added back before the sine.
    """
    e = np.asarray(e, dtype=float)
    t = np.asarray(t, dtype=float)
    p = e * t
    ehi, elo = _split(e)
    thi, tlo = _split(t)
    err = ((ehi * thi - p) + ehi * tlo + elo * thi) + elo * tlo
    k = np.rint(p * (1.0 / math.pi))
    r = ((p - k * _PI1) - k * _PI2) - k * _PI3 + err
    s = np.sin(r)
    return s * s


def mode_factor(theta_pre, theta_post, e_post, t):
    """Single-mode survival factor 1 - sin^2(theta_pre - theta_post) sin^2(e_post t)."""
    d = np.sin(np.asarray(theta_pre, dtype=float) - theta_post)
    return 1.0 - d * d * sin_sq_phase(e_post, t)


def _lambda_minus_cos(ka, offset, lambda_c):
    """lambda - cos ka written around lambda_c = +-1 to avoid cancellation."""
    if lambda_c == 1.0:
        return offset + 2.0 * np.sin(0.5 * ka) ** 2
    if lambda_c == -1.0:
        return offset - 2.0 * np.cos(0.5 * ka) ** 2
    return (lambda_c + offset) - np.cos(ka)


def _mode_weights(ka, quench: QuenchSpec, gamma):
    """(sin^2(theta - theta'), e'_k) per mode, from the cross-product form.

    sin(theta - theta') = gamma eps sin ka / (|u| |u'|) with
    u = (cos ka - lambda, -gamma sin ka), so no angle difference is taken.
    """
    gs = gamma * np.sin(ka)
    a = _lambda_minus_cos(ka, quench.delta_lambda, quench.lambda_c)
    b = _lambda_minus_cos(ka, quench.delta, quench.lambda_c)
    pre = a * a + gs * gs
    post = b * b + gs * gs
    num = (quench.epsilon * gs) ** 2
    den = pre * post
    w = np.divide(num, den, out=np.zeros_like(num), where=num != 0.0)
    np.minimum(w, 1.0, out=w)
    return w, 2.0 * np.sqrt(post)


def _chunk_log_sum(ka, quench, gamma, times):
    """Sum over the modes in ``ka`` of ln F_k, for every time."""
    w, e = _mode_weights(ka, quench, gamma)
    out = np.empty(times.size)
    for lo in range(0, times.size, TIME_BLOCK):
        tb = times[lo:lo + TIME_BLOCK, None]
        with np.errstate(divide="ignore"):
            terms = np.log1p(-w * sin_sq_phase(e, tb))
        out[lo:lo + TIME_BLOCK] = terms.sum(axis=1)
    return out


def _tree_sum(parts: np.ndarray, lo: int, hi: int) -> np.ndarray:
    if hi - lo == 1:
        return parts[lo]
    mid = (lo + hi) // 2
    return _tree_sum(parts, lo, mid) + _tree_sum(parts, mid, hi)


def pairwise_row_sum(parts) -> np.ndarray:
    """Fixed-order pairwise sum of the rows of ``parts``."""
    parts = np.asarray(parts, dtype=float)
    if parts.shape[0] == 0:
        return np.zeros(parts.shape[1:])
    return _tree_sum(parts, 0, parts.shape[0])


def default_workers() -> int:
    env = os.environ.get("QPT_ECHO_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_chunks(fn, bounds, workers):
    if workers == 1 or len(bounds) == 1:
        return [fn(b) for b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, bounds))


def _prepare(params, quench, times):
    if not isinstance(params, (IsingParams, XYParams)):
        raise TypeError("params must be IsingParams or XYParams")
    if not math.isclose(params.lambda_, quench.lambda_, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError("params.lambda_ does not match quench.lambda_")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or not np.all(np.isfinite(times)):
        raise ValueError("times must be a finite 1-d sequence")
    gamma = getattr(params, "gamma", 1.0)
    return times, gamma


def _metadata(params, quench, chunk_size, workers, streamed):
    return {
        "model": "xy" if isinstance(params, XYParams) else "ising",
        "quench": quench.as_dict(),
        "grid": {
            "n_sites": params.n_sites,
            "n_modes": (params.n_sites - 1) // 2,
            "gamma": getattr(params, "gamma", 1.0),
            "chunk_size": chunk_size,
            "workers": workers,
            "streamed": streamed,
        },
    }


def survival_probability(params, quench: QuenchSpec, times, workers=None,
                         chunk_size=DEFAULT_CHUNK) -> SurvivalSeries:
    """M(t) with the full ka grid materialised (memory O(N)).

    Use :func:`survival_probability_streamed` for N in the 1e8 range.
    """
    times, gamma = _prepare(params, quench, times)
    workers = workers or default_workers()
    grid = mode_grid(params.n_sites)
    ka = np.asarray(grid)
    bounds = grid.chunk_bounds(chunk_size)
    parts = _run_chunks(lambda b: _chunk_log_sum(ka[b[0] - 1:b[1] - 1], quench, gamma, times),
                        bounds, workers)
    log_m = pairwise_row_sum(parts)
    return SurvivalSeries.from_log(times, log_m,
                                   _metadata(params, quench, chunk_size, workers, False))


def survival_probability_streamed(params, quench: QuenchSpec, times, workers=None,
                                  chunk_size=DEFAULT_CHUNK) -> SurvivalSeries:
    """Same contract as :func:`survival_probability`, O(chunk) memory per worker."""
    times, gamma = _prepare(params, quench, times)
    workers = workers or default_workers()
    grid = mode_grid(params.n_sites)
    n = grid.n_sites

    def job(b):
        return _chunk_log_sum(grid_ka(np.arange(b[0], b[1]), n), quench, gamma, times)

    parts = _run_chunks(job, grid.chunk_bounds(chunk_size), workers)
    log_m = pairwise_row_sum(parts)
    return SurvivalSeries.from_log(times, log_m,
                                   _metadata(params, quench, chunk_size, workers, True))


def log_survival_for_modes(ka, quench: QuenchSpec, times, gamma=1.0,
                           chunk_size=DEFAULT_CHUNK) -> np.ndarray:
    """ln prod F_k over an arbitrary set of momenta (e.g. another boundary sector)."""
    ka = np.asarray(ka, dtype=float)
    times = np.asarray(times, dtype=float)
    parts = [_chunk_log_sum(ka[lo:lo + chunk_size], quench, gamma, times)
             for lo in range(0, ka.size, chunk_size)]
    return pairwise_row_sum(parts) if parts else np.zeros(times.size)
