"""CSV import/export for simulation logs and wind traces.

Log files carry a metadata header of '# key = value' lines followed by one
header row naming the documented columns (SimLog.COLUMNS order) and one data
row per control tick.  Floats are written with repr-level precision so a
load/save round trip is byte-identical.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .simulator import SimLog
from .wind import WindSeries

_FLOAT_FMT = "{:.12g}"


def _fmt(value: float) -> str:
    return _FLOAT_FMT.format(value)


def save_log_csv(log: SimLog, path) -> Path:
    """Write a simulation log with its metadata header."""
    path = Path(path)
    lines = [f"# {key} = {value}" for key, value in sorted(log.meta.items())]
    lines.append(",".join(SimLog.COLUMNS))
    columns = [log[c] for c in SimLog.COLUMNS]
    for i in range(len(log)):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    path.write_text("\n".join(lines) + "\n")
    return path


def load_log_csv(path) -> SimLog:
    """Read a log written by save_log_csv."""
    path = Path(path)
    meta = {}
    header = None
    rows = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = line.split(",")
                if tuple(header) != SimLog.COLUMNS:
                    raise ValueError(f"{path}: unexpected column header {header[:4]}...")
                continue
            rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no column header found")
    arr = np.asarray(rows, dtype=float) if rows else np.zeros((0, len(SimLog.COLUMNS)))
    data = {name: arr[:, i] for i, name in enumerate(SimLog.COLUMNS)}
    return SimLog(data=data, meta=meta)


def save_wind_csv(series: WindSeries, path) -> Path:
    """Write a true-wind trace as (t_s, speed_mps, direction_deg)."""
    path = Path(path)
    lines = ["t_s,speed_mps,direction_deg"]
    for t, sp, d in zip(series.t, series.speed, series.direction):
        lines.append(f"{_fmt(t)},{_fmt(sp)},{_fmt(math.degrees(d))}")
    path.write_text("\n".join(lines) + "\n")
    return path


def load_wind_csv(path) -> WindSeries:
    """Read a trace written by save_wind_csv (or any file with its header)."""
    path = Path(path)
    with path.open() as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0].split(",") != ["t_s", "speed_mps", "direction_deg"]:
        raise ValueError(f"{path}: expected header 't_s,speed_mps,direction_deg'")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    arr = np.asarray(rows, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{path}: wind trace is empty")
    return WindSeries(t=arr[:, 0], speed=arr[:, 1], direction=np.radians(arr[:, 2]))
