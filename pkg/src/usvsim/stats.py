"""Summary statistics over simulation logs: pose-error statistics shaped like
the station-keeping comparison tables, and apparent-wind statistics.

Conventions: position error is the Euclidean norm of the North/East error;
heading error statistics use the absolute wrapped error in degrees; wind
direction statistics are circular (unit-vector mean, directional std) and
reported on [0, 360).  All statistics cover the full run window and use
population (ddof=0) standard deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import SimLog
from .wind import turbulence_stats


@dataclass(frozen=True)
class ErrorStats:
    mean_position: float       # [m]
    std_position: float        # [m]
    mean_heading_deg: float
    std_heading_deg: float


@dataclass(frozen=True)
class WindStats:
    mean_speed: float          # [m/s]
    std_speed: float           # [m/s]
    mean_direction_deg: float  # [0, 360)
    std_direction_deg: float
    intensity_pct: float       # turbulence intensity, percent


def circular_mean_deg(angles_rad) -> float:
    """Unit-vector mean of angles, in degrees on [0, 360)."""
    a = np.asarray(angles_rad, dtype=float)
    c = float(np.mean(np.cos(a)))
    s = float(np.mean(np.sin(a)))
    return math.degrees(math.atan2(s, c)) % 360.0


def circular_std_deg(angles_rad) -> float:
    """Directional standard deviation sqrt(-2 ln R) in degrees."""
    a = np.asarray(angles_rad, dtype=float)
    r = math.hypot(float(np.mean(np.cos(a))), float(np.mean(np.sin(a))))
    if r <= 0.0:
        return math.inf
    r = min(r, 1.0)
    return math.degrees(math.sqrt(-2.0 * math.log(r)))


def compute_error_stats(log: SimLog) -> ErrorStats:
    """Position and heading error statistics over the full log."""
    if len(log) == 0:
        raise ValueError("cannot compute error statistics of an empty log")
    pos = log.position_error()
    heading = np.degrees(np.abs(log.heading_error()))
    return ErrorStats(
        mean_position=float(np.mean(pos)),
        std_position=float(np.std(pos)),
        mean_heading_deg=float(np.mean(heading)),
        std_heading_deg=float(np.std(heading)))


def compute_wind_stats(log: SimLog, filtered: bool = False) -> WindStats:
    """Apparent-wind statistics from the anemometer samples in a log.

    Uses the rows where a fresh sample arrived (the anemometer runs slower
    than the log).  Set filtered=True for the post-moving-average channel.
    """
    mask = log.wind_sample_rows()
    if int(mask.sum()) < 2:
        raise ValueError("need at least two anemometer samples for wind statistics")
    prefix = "wind_speed_filt" if filtered else "wind_speed_raw"
    aprefix = "wind_angle_filt" if filtered else "wind_angle_raw"
    speeds = log[f"{prefix}_mps"][mask]
    angles = log[f"{aprefix}_rad"][mask]
    times = log.t[mask]
    dt = float(times[1] - times[0])
    turb = turbulence_stats(speeds, dt)
    return WindStats(
        mean_speed=turb.mean,
        std_speed=float(np.std(speeds)),
        mean_direction_deg=circular_mean_deg(angles),
        std_direction_deg=circular_std_deg(angles),
        intensity_pct=100.0 * turb.intensity)
