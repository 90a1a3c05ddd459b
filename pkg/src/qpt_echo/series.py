"""Time series container shared by every survival-probability engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class SurvivalSeries:
    """Survival probability M(t) on a time grid, stored with ln M.

    ``m_values`` is always derived from ``log_m_values`` so the two agree to
    the last bit of ``exp``. ``metadata`` carries the model name, the quench
    and the grid descriptor; engines may add diagnostics (e.g. Fock tail mass).
    """

    times: np.ndarray
    m_values: np.ndarray
    log_m_values: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_log(cls, times, log_m, metadata=None) -> "SurvivalSeries":
        times = np.asarray(times, dtype=float)
        log_m = np.asarray(log_m, dtype=float)
        if times.shape != log_m.shape or times.ndim != 1:
            raise ValueError("times and log_m must be 1-d arrays of equal length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        times.setflags(write=False)
        log_m.setflags(write=False)
        m = np.exp(log_m)
        m.setflags(write=False)
        return cls(times, m, log_m, dict(metadata or {}))

    @classmethod
    def from_probability(cls, times, m, metadata=None) -> "SurvivalSeries":
        """Build from M values; zeros map to ln M = -inf."""
        m = np.asarray(m, dtype=float)
        with np.errstate(divide="ignore"):
            log_m = np.log(m)
        return cls.from_log(times, log_m, metadata)

    def __len__(self) -> int:
        return self.times.size

    def window(self, t_min=None, t_max=None) -> "SurvivalSeries":
        """Sub-series with ``t_min <= t <= t_max`` (bounds optional)."""
        sel = np.ones(self.times.size, dtype=bool)
        if t_min is not None:
            sel &= self.times >= t_min
        if t_max is not None:
            sel &= self.times <= t_max
        meta = dict(self.metadata)
        meta["window"] = (t_min, t_max)
        return SurvivalSeries.from_log(self.times[sel], self.log_m_values[sel], meta)

    def value_at(self, t: float) -> tuple[float, float]:
        """(t_grid, ln M) at the grid point closest to ``t``."""
        i = int(np.argmin(np.abs(self.times - t)))
        return float(self.times[i]), float(self.log_m_values[i])
