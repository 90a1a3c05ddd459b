"""CSV series files and JSON run summaries.

CSV layout: ``# key: value`` header lines, a ``t,M,lnM`` column row, then one
row per time with 17 significant digits. Line endings are LF. Nothing
time-dependent is written, so identical inputs give identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import platform
from pathlib import Path

import numpy as np
import scipy

from .series import SurvivalSeries

SCHEMA_VERSION = 1
COLUMNS = "t,M,lnM"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _flatten(d: dict, prefix: str = "") -> list[tuple[str, str]]:
    out = []
    for key in sorted(d):
        value = d[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.extend(_flatten(value, name + "."))
        elif isinstance(value, float):
            out.append((name, _fmt(value)))
        else:
            out.append((name, json.dumps(value, default=_jsonable) if not isinstance(value, str)
                        else value))
    return out


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def csv_body(series: SurvivalSeries) -> str:
    """Column row plus data rows; the part compared for determinism."""
    lines = [COLUMNS]
    for t, m, lm in zip(series.times, series.m_values, series.log_m_values):
        lines.append(f"{_fmt(t)},{_fmt(m)},{_fmt(lm)}")
    return "\n".join(lines) + "\n"


def csv_text(series: SurvivalSeries, header: dict | None = None) -> str:
    meta = dict(series.metadata)
    meta.update(header or {})
    head = "".join(f"# {k}: {v}\n" for k, v in _flatten(meta))
    return head + csv_body(series)


def write_series_csv(path, series: SurvivalSeries, header: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(series, header))
    return path


def read_series_csv(path) -> tuple[SurvivalSeries, dict[str, str]]:
    """Parse a series file; header values come back as strings."""
    header: dict[str, str] = {}
    rows = []
    seen_columns = False
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                header[key.strip()] = value.strip()
            elif not seen_columns:
                if line.strip() != COLUMNS:
                    raise ValueError(f"unexpected column row {line!r}")
                seen_columns = True
            else:
                rows.append([float(x) for x in line.split(",")])
    if not seen_columns:
        raise ValueError("missing t,M,lnM column row")
    data = np.array(rows, dtype=float).reshape(-1, 3)
    return SurvivalSeries.from_log(data[:, 0], data[:, 2], {"source": str(path)}), header


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form of ``config``."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(canon.encode()).hexdigest()


def versions() -> dict[str, str]:
    from . import __version__

    return {"qpt_echo": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def write_summary(path, summary: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION, **summary}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path
