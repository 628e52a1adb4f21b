"""Angle wrapping helpers shared across the package.

All headings and relative angles live in (-pi, pi]; the wrap functions fold
-pi onto +pi so the interval is half-open on the negative side.
"""

from __future__ import annotations

import math

import numpy as np


def wrap_angle(angle: float) -> float:
    """Wrap a scalar angle into (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    return math.pi if wrapped <= -math.pi else wrapped


def wrap_angle_array(angles) -> np.ndarray:
    """Vectorized wrap into (-pi, pi]."""
    a = np.asarray(angles, dtype=float)
    wrapped = np.remainder(a + np.pi, 2.0 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def angle_diff(a: float, b: float) -> float:
    """Shortest signed difference a - b, wrapped into (-pi, pi]."""
    return wrap_angle(a - b)
