"""Control allocation for the twin azimuthing thrusters.

A desired wrench is mapped to per-thruster x/y force components through the
weighted least-norm (Lagrangian) solution, converted to thrust magnitude and
azimuth, passed through the reachable-angle logic (reverse instead of turning
past the travel limit, zero inside the unreachable sector), clamped to the
thrust limits, and finally rate-limited by first-order low-pass filters that
stand in for the unmodeled thruster/linear-actuator dynamics.

Pipeline order: angle logic -> magnitude clamp -> low-pass, so the filters act
on physically achievable commands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import wrap_angle
from .dynamics import ThrusterSetpoint, VehicleParams, Wrench


@dataclass
class AllocatorConfig:
    """Actuator geometry, weighting and command-filter time constants."""

    lever_x_port: float = -1.30   # thruster position, body x [m]
    lever_y_port: float = -0.915  # body y [m]
    lever_x_stbd: float = -1.30
    lever_y_stbd: float = 0.915
    weights: np.ndarray = field(default_factory=lambda: np.ones(4))
    azimuth_max: float = math.pi / 4.0
    thrust_max: float = 127.0          # forward limit per thruster [N]
    thrust_reverse_max: float = 51.0   # reverse magnitude limit [N]
    # Thrust responds about an order of magnitude slower than the azimuth drive.
    tau_thrust: float = 5.0            # [s]
    tau_azimuth: float = 0.5           # [s]

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (4,) or not np.all(self.weights > 0):
            raise ValueError(f"weights must be 4 positive diagonal entries, got {self.weights}")
        if self.thrust_max <= 0 or self.thrust_reverse_max <= 0:
            raise ValueError("thrust limits must be positive")
        if not (0.0 < self.azimuth_max <= math.pi / 2.0):
            raise ValueError(f"azimuth limit must lie in (0, pi/2], got {self.azimuth_max}")
        if self.tau_thrust <= 0 or self.tau_azimuth <= 0:
            raise ValueError("filter time constants must be positive")

    @property
    def levers(self) -> list[tuple[float, float]]:
        return [(self.lever_x_port, self.lever_y_port),
                (self.lever_x_stbd, self.lever_y_stbd)]

    @staticmethod
    def from_params(params: VehicleParams, **overrides) -> "AllocatorConfig":
        base = dict(lever_x_port=-params.lcg, lever_y_port=-0.5 * params.hull_sep,
                    lever_x_stbd=-params.lcg, lever_y_stbd=0.5 * params.hull_sep,
                    azimuth_max=params.azimuth_max, thrust_max=params.thrust_max,
                    thrust_reverse_max=params.thrust_reverse_max)
        base.update(overrides)
        return AllocatorConfig(**base)


@dataclass(frozen=True)
class ExtendedThrust:
    """Per-thruster body-frame force components [Fx_port, Fy_port, Fx_stbd, Fy_stbd]."""

    fx_port: float
    fy_port: float
    fx_stbd: float
    fy_stbd: float

    def __post_init__(self):
        if not all(math.isfinite(f) for f in self.as_tuple()):
            raise ValueError(f"extended thrust must be finite, got {self}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.fx_port, self.fy_port, self.fx_stbd, self.fy_stbd)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())


@dataclass(frozen=True)
class AllocationResult:
    """Feasible setpoint plus the raw least-norm solution and clamp flags."""

    setpoint: ThrusterSetpoint
    extended: ExtendedThrust
    saturated: bool      # a thrust magnitude hit its clamp bound
    zeroed_port: bool    # port demand fell in the unreachable angle sector
    zeroed_stbd: bool


def build_transformation(levers) -> np.ndarray:
    """Map from stacked per-actuator (Fx, Fy) components to the body wrench.

    Rows: surge force, sway force, yaw moment; one (Fx, Fy) column pair per
    actuator at body position (lx, ly).
    """
    levers = list(levers)
    if len(levers) < 1:
        raise ValueError("need at least one actuator")
    t = np.zeros((3, 2 * len(levers)))
    for i, (lx, ly) in enumerate(levers):
        t[0, 2 * i] = 1.0
        t[1, 2 * i + 1] = 1.0
        t[2, 2 * i] = -ly
        t[2, 2 * i + 1] = lx
    return t


def weighted_pseudoinverse(t_matrix: np.ndarray, weights) -> np.ndarray:
    """Right inverse minimizing f^T W f subject to T f = tau.

    W is given by its positive diagonal.  Raises for degenerate geometry
    (T W^-1 T^T singular, e.g. collinear actuators losing a wrench direction).
    """
    t = np.asarray(t_matrix, dtype=float)
    w = np.asarray(weights, dtype=float)
    if w.shape != (t.shape[1],) or not np.all(w > 0):
        raise ValueError("weights must be a positive diagonal matching the actuator count")
    w_inv_tt = t.T / w[:, None]   # W^-1 T^T
    normal = t @ w_inv_tt
    try:
        return w_inv_tt @ np.linalg.inv(normal)
    except np.linalg.LinAlgError as exc:
        raise ValueError("degenerate actuator geometry: cannot realize all wrench directions") from exc


def apply_angle_logic(angle: float, thrust: float,
                      limit: float = math.pi / 4.0) -> tuple[float, float, bool]:
    """Fold a raw allocation angle into the reachable azimuth range.

    Within +/-limit: unchanged.  Between the limit and its supplement: the
    demand is unreachable, thrust is zeroed and the azimuth parks at the
    nearest travel limit.  At or beyond the supplement: reverse thrust and
    shift the angle by half a turn back into range.  Boundary angles belong to
    the adjacent reachable regions.
    """
    a = wrap_angle(angle)
    mag = abs(a)
    if mag <= limit:
        return a, thrust, False
    if mag >= math.pi - limit:
        return a - math.copysign(math.pi, a), -thrust, False
    return math.copysign(limit, a), 0.0, True


def allocate(tau: Wrench, cfg: AllocatorConfig) -> AllocationResult:
    """Full allocation: least-norm solution, angle logic, magnitude clamps.

    Always returns a feasible setpoint; the saturated flag reports whether a
    thrust magnitude clamp fired (consumed by the sliding-mode anti-windup).
    """
    t = build_transformation(cfg.levers)
    pinv = weighted_pseudoinverse(t, cfg.weights)
    f = pinv @ tau.as_array()
    extended = ExtendedThrust(*map(float, f))

    setvals = []
    zeroed_flags = []
    saturated = False
    for fx, fy in ((extended.fx_port, extended.fy_port), (extended.fx_stbd, extended.fy_stbd)):
        thrust = math.hypot(fx, fy)
        angle = math.atan2(fy, fx) if thrust > 0.0 else 0.0
        angle, thrust, zeroed = apply_angle_logic(angle, thrust, cfg.azimuth_max)
        clamped = min(max(thrust, -cfg.thrust_reverse_max), cfg.thrust_max)
        if clamped != thrust:
            saturated = True
        setvals.append((clamped, angle))
        zeroed_flags.append(zeroed)
    (tp, dp), (ts, ds) = setvals
    setpoint = ThrusterSetpoint(thrust_port=tp, thrust_stbd=ts,
                                azimuth_port=dp, azimuth_stbd=ds)
    return AllocationResult(setpoint=setpoint, extended=extended, saturated=saturated,
                            zeroed_port=zeroed_flags[0], zeroed_stbd=zeroed_flags[1])


def lowpass(previous: float, target: float, dt: float, time_constant: float) -> float:
    """One first-order IIR update toward the target."""
    if dt <= 0 or time_constant <= 0:
        raise ValueError("dt and time constant must be positive")
    alpha = min(dt / time_constant, 1.0)
    return previous + alpha * (target - previous)


class FirstOrderFilter:
    """First-order low-pass with optional wrap-aware angle differencing."""

    def __init__(self, time_constant: float, initial: float = 0.0, wrap: bool = False):
        if time_constant <= 0:
            raise ValueError(f"time constant must be positive, got {time_constant}")
        self.time_constant = time_constant
        self.value = initial
        self.wrap = wrap

    def update(self, target: float, dt: float) -> float:
        if self.wrap:
            step = wrap_angle(target - self.value)
            self.value = wrap_angle(self.value + min(dt / self.time_constant, 1.0) * step)
        else:
            self.value = lowpass(self.value, target, dt, self.time_constant)
        return self.value


class ThrusterCommandFilter:
    """Per-side thrust and azimuth low-pass filters for the allocation output.

    When a side has no thrust demand at all its azimuth target is held at the
    previous value (the angle is undefined for zero demand).
    """

    def __init__(self, cfg: AllocatorConfig):
        self.thrust_port = FirstOrderFilter(cfg.tau_thrust)
        self.thrust_stbd = FirstOrderFilter(cfg.tau_thrust)
        self.azimuth_port = FirstOrderFilter(cfg.tau_azimuth, wrap=True)
        self.azimuth_stbd = FirstOrderFilter(cfg.tau_azimuth, wrap=True)
        self._last_angle_port = 0.0
        self._last_angle_stbd = 0.0

    def update(self, setpoint: ThrusterSetpoint, dt: float,
               hold_port_angle: bool = False, hold_stbd_angle: bool = False) -> ThrusterSetpoint:
        angle_port = self._last_angle_port if hold_port_angle else setpoint.azimuth_port
        angle_stbd = self._last_angle_stbd if hold_stbd_angle else setpoint.azimuth_stbd
        self._last_angle_port = angle_port
        self._last_angle_stbd = angle_stbd
        return ThrusterSetpoint(
            thrust_port=self.thrust_port.update(setpoint.thrust_port, dt),
            thrust_stbd=self.thrust_stbd.update(setpoint.thrust_stbd, dt),
            azimuth_port=self.azimuth_port.update(angle_port, dt),
            azimuth_stbd=self.azimuth_stbd.update(angle_stbd, dt))
