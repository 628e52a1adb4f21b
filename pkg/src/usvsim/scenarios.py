"""Canned station-keeping scenarios for the two disturbance orientations the
experiment protocol exercises: wind on the bow (friendly) and wind plus
current on the beam (harsh, the propulsion-limited direction).
"""

from __future__ import annotations

import math

from .control import Setpoint
from .simulator import Scenario
from .wind import CurrentParams, synthesize_wind


def headon_scenario(controller: str = "sliding", feedforward: bool = False,
                    seed: int = 0, mean_speed: float = 2.43, intensity: float = 0.15,
                    cutoff_hz: float = 0.03, current_speed: float = 0.0,
                    duration: float = 700.0) -> Scenario:
    """Wind blowing from dead ahead of the desired heading (North); optional
    aligned current pushing astern."""
    wind = synthesize_wind(seed=seed, mean_speed=mean_speed, mean_direction=0.0,
                           intensity=intensity, cutoff_hz=cutoff_hz,
                           duration=duration, dt=1.0)
    current = CurrentParams(speed=current_speed, direction=math.pi)
    return Scenario(name=f"headon-{controller}{'-ff' if feedforward else ''}-s{seed}",
                    setpoint=Setpoint(), controller=controller,
                    feedforward=feedforward, wind=wind, current=current)


def beam_scenario(controller: str = "sliding", feedforward: bool = False,
                  seed: int = 0, mean_speed: float = 2.5, intensity: float = 0.15,
                  cutoff_hz: float = 0.03, current_speed: float = 0.2,
                  duration: float = 700.0) -> Scenario:
    """Wind from starboard abeam plus a current flowing to port, so both
    disturbances push the vessel the same way across its weak axis."""
    wind = synthesize_wind(seed=seed, mean_speed=mean_speed, mean_direction=math.pi / 2.0,
                           intensity=intensity, cutoff_hz=cutoff_hz,
                           duration=duration, dt=1.0)
    current = CurrentParams(speed=current_speed, direction=-math.pi / 2.0)
    return Scenario(name=f"beam-{controller}{'-ff' if feedforward else ''}-s{seed}",
                    setpoint=Setpoint(), controller=controller,
                    feedforward=feedforward, wind=wind, current=current)
