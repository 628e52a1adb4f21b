"""Fixed-step closed-loop simulation of the station-keeping system and the
open-loop system-characterization maneuvers.

The loop runs three nested rates: physics integration (RK4, default 20 Hz),
the control/logging tick (default 4 Hz) and the anemometer (default 1 Hz).
Actuator commands are held between control ticks; the commanded wrench is the
post-filter thruster output, while the true wind/current disturbance acts at
every physics step.  Everything is deterministic for a given scenario.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from . import __version__
from .allocation import AllocatorConfig, ThrusterCommandFilter, allocate
from .angles import wrap_angle
from .control import (BackstepGains, PDGains, Setpoint, SlidingGains,
                      apply_feedforward, backstepping_control,
                      default_backstep_gains, default_pd_gains,
                      default_sliding_gains, pd_control, sliding_mode_control,
                      tracking_error)
from .dynamics import (ThrusterSetpoint, VehicleParams, VehicleState, Wrench,
                       _nu_dot, inverse_mass_matrix, propulsion_wrench,
                       thrust_per_side_from_command)
from .wind import (CurrentParams, MovingAverageFilter, WindParams, WindSample,
                   WindSeries, apparent_from_true, current_wrench, wind_wrench)

CONTROLLERS = ("pd", "backstepping", "sliding")
SYSID_MANEUVERS = ("bollard", "acceleration", "circle", "zigzag")


class SimulationError(RuntimeError):
    """Raised when integration produces a non-finite state."""


@dataclass
class SimConfig:
    """Timing, seeding and sensor-fidelity switches for one run."""

    dt: float = 0.05                  # physics step [s]
    control_rate_hz: float = 4.0      # control/log rate
    anemometer_rate_hz: float = 1.0
    duration: float = 700.0           # [s]
    seed: int = 0
    quantize_sensors: bool = False    # GPS/compass/anemometer quantization

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.dt <= 0 or self.duration <= 0:
            raise ValueError("dt and duration must be positive")
        if self.control_rate_hz <= 0 or self.anemometer_rate_hz <= 0:
            raise ValueError("rates must be positive")
        if self.control_rate_hz > 1.0 / self.dt + 1e-9:
            raise ValueError(
                f"control rate {self.control_rate_hz} Hz exceeds the physics rate {1.0 / self.dt} Hz")
        if abs(self.steps_per_tick - round(self.steps_per_tick)) > 1e-9:
            raise ValueError("control period must be an integer multiple of dt")
        if abs(self.ticks_per_wind - round(self.ticks_per_wind)) > 1e-9:
            raise ValueError("anemometer period must be an integer multiple of the control period")

    @property
    def control_period(self) -> float:
        return 1.0 / self.control_rate_hz

    @property
    def steps_per_tick(self) -> float:
        return self.control_period / self.dt

    @property
    def ticks_per_wind(self) -> float:
        return self.control_rate_hz / self.anemometer_rate_hz

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration * self.control_rate_hz))


@dataclass
class SensorModels:
    """Quantization levels mirroring the navigation sensor fidelity."""

    gps_grid: float = 1.0                 # position quantization [m]
    compass_resolution_deg: float = 0.1
    anemometer_resolution: float = 0.1    # [m/s]
    anemometer_range: tuple = (0.0, 40.0)

    def __post_init__(self):
        if self.gps_grid <= 0 or self.compass_resolution_deg <= 0 or self.anemometer_resolution <= 0:
            raise ValueError("sensor resolutions must be positive")


@dataclass
class Scenario:
    """Everything one station-keeping run needs."""

    name: str = "scenario"
    params: VehicleParams = field(default_factory=VehicleParams)
    wind_params: WindParams = field(default_factory=WindParams)
    setpoint: Setpoint = field(default_factory=Setpoint)
    initial: VehicleState | None = None     # None: start at the setpoint, zero error
    controller: str = "sliding"
    gains: object | None = None             # None: controller defaults
    feedforward: bool = False
    wind: WindSeries | None = None          # None: calm air
    current: CurrentParams = field(default_factory=CurrentParams)
    allocator: AllocatorConfig | None = None
    sensors: SensorModels = field(default_factory=SensorModels)

    def __post_init__(self):
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")

    def initial_state(self) -> VehicleState:
        if self.initial is not None:
            return copy.copy(self.initial)
        return VehicleState(self.setpoint.x, self.setpoint.y, self.setpoint.psi)

    def resolved_allocator(self) -> AllocatorConfig:
        return self.allocator if self.allocator is not None else AllocatorConfig.from_params(self.params)

    def resolved_gains(self):
        if self.gains is not None:
            gains = copy.deepcopy(self.gains)
        elif self.controller == "pd":
            gains = default_pd_gains()
        elif self.controller == "backstepping":
            gains = default_backstep_gains(self.params)
        else:
            gains = default_sliding_gains(self.params)
        if isinstance(gains, SlidingGains):
            gains.reset()
        expected = {"pd": PDGains, "backstepping": BackstepGains, "sliding": SlidingGains}
        if not isinstance(gains, expected[self.controller]):
            raise ValueError(
                f"{self.controller} controller needs {expected[self.controller].__name__} gains, "
                f"got {type(gains).__name__}")
        return gains


@dataclass
class SimLog:
    """Per-control-tick record of one run (struct of arrays)."""

    COLUMNS: ClassVar[tuple[str, ...]] = (
        "t_s",
        "x_m", "y_m", "psi_rad", "u_mps", "v_mps", "r_radps",
        "x_sens_m", "y_sens_m", "psi_sens_rad", "u_sens_mps", "v_sens_mps", "r_sens_radps",
        "err_x_m", "err_y_m", "err_psi_rad",
        "tau_x_n", "tau_y_n", "tau_n_nm",
        "tauw_x_n", "tauw_y_n", "tauw_n_nm",
        "tau1_x_n", "tau1_y_n", "tau1_n_nm",
        "fx_port_n", "fy_port_n", "fx_stbd_n", "fy_stbd_n",
        "thrust_port_raw_n", "thrust_stbd_raw_n", "azimuth_port_raw_rad", "azimuth_stbd_raw_rad",
        "thrust_port_n", "thrust_stbd_n", "azimuth_port_rad", "azimuth_stbd_rad",
        "saturated", "zeroed_port", "zeroed_stbd",
        "wind_speed_raw_mps", "wind_angle_raw_rad",
        "wind_speed_filt_mps", "wind_angle_filt_rad", "wind_new")

    data: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = [c for c in self.COLUMNS if c not in self.data]
        if missing:
            raise ValueError(f"log is missing columns: {missing}")
        n = len(self.data[self.COLUMNS[0]])
        for c in self.COLUMNS:
            self.data[c] = np.asarray(self.data[c], dtype=float)
            if len(self.data[c]) != n:
                raise ValueError(f"column {c} has length {len(self.data[c])}, expected {n}")

    def __len__(self) -> int:
        return len(self.data["t_s"])

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[column]

    @property
    def t(self) -> np.ndarray:
        return self.data["t_s"]

    def position_error(self) -> np.ndarray:
        return np.hypot(self.data["err_x_m"], self.data["err_y_m"])

    def heading_error(self) -> np.ndarray:
        return self.data["err_psi_rad"]

    def wind_sample_rows(self) -> np.ndarray:
        """Boolean mask of ticks where a fresh anemometer sample arrived."""
        return self.data["wind_new"] > 0.5


class _LogBuilder:
    def __init__(self):
        self.rows = []

    def append(self, *values):
        self.rows.append(values)

    def build(self, meta: dict) -> SimLog:
        arr = np.asarray(self.rows, dtype=float)
        if arr.size == 0:
            arr = np.zeros((0, len(SimLog.COLUMNS)))
        data = {name: arr[:, i] for i, name in enumerate(SimLog.COLUMNS)}
        return SimLog(data=data, meta=meta)


def step(params: VehicleParams, state: VehicleState, tau: Wrench, tau_w: Wrench,
         dt: float, m_inv: np.ndarray | None = None) -> VehicleState:
    """One classical fourth-order integration step with constant wrenches."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if m_inv is None:
        m_inv = inverse_mass_matrix(params)
    fx = tau.x + tau_w.x
    fy = tau.y + tau_w.y
    fn = tau.n + tau_w.n

    def deriv(y):
        _, _, psi, u, v, r = y
        c, s = math.cos(psi), math.sin(psi)
        ud, vd, rd = _nu_dot(params, m_inv, u, v, r, fx, fy, fn)
        return (c * u - s * v, s * u + c * v, r, ud, vd, rd)

    y0 = (state.x, state.y, state.psi, state.u, state.v, state.r)
    k1 = deriv(y0)
    k2 = deriv(tuple(y + 0.5 * dt * k for y, k in zip(y0, k1)))
    k3 = deriv(tuple(y + 0.5 * dt * k for y, k in zip(y0, k2)))
    k4 = deriv(tuple(y + dt * k for y, k in zip(y0, k3)))
    y1 = tuple(y + dt / 6.0 * (a + 2.0 * b + 2.0 * c_ + d)
               for y, a, b, c_, d in zip(y0, k1, k2, k3, k4))
    if not all(math.isfinite(v) for v in y1):
        raise SimulationError(
            f"integration diverged: state={y0}, wrench=({fx}, {fy}, {fn}), dt={dt}")
    return VehicleState(y1[0], y1[1], wrap_angle(y1[2]), y1[3], y1[4], y1[5])


def sample_sensors(state: VehicleState, models: SensorModels) -> VehicleState:
    """Quantize position to the GPS grid and heading to the compass resolution."""
    grid = models.gps_grid
    res = math.radians(models.compass_resolution_deg)
    return VehicleState(
        x=round(state.x / grid) * grid,
        y=round(state.y / grid) * grid,
        psi=wrap_angle(round(state.psi / res) * res),
        u=state.u, v=state.v, r=state.r)


def quantize_wind_sample(sample: WindSample, models: SensorModels) -> WindSample:
    res = models.anemometer_resolution
    lo, hi = models.anemometer_range
    speed = min(max(round(sample.speed / res) * res, lo), hi)
    return WindSample(t=sample.t, speed=speed, angle=sample.angle)


def _controller_step(scenario: Scenario, gains, control_period: float
                     ) -> Callable[[VehicleState, bool], Wrench]:
    if scenario.controller == "pd":
        return lambda sensed, _sat: pd_control(sensed, scenario.setpoint, gains)
    if scenario.controller == "backstepping":
        return lambda sensed, _sat: backstepping_control(sensed, scenario.setpoint, gains)
    return lambda sensed, sat: sliding_mode_control(
        sensed, scenario.setpoint, gains, control_period, prev_saturated=sat)


def run_station_keeping(scenario: Scenario, config: SimConfig | None = None) -> SimLog:
    """Closed-loop run: sense -> control -> (feedforward) -> allocate -> filter
    -> actuate -> integrate, at the configured rates.  Returns the full log."""
    config = config if config is not None else SimConfig()
    config.validate()
    params = scenario.params
    alloc_cfg = scenario.resolved_allocator()
    gains = scenario.resolved_gains()
    controller = _controller_step(scenario, gains, config.control_period)
    m_inv = inverse_mass_matrix(params)
    cmd_filter = ThrusterCommandFilter(alloc_cfg)
    anem_filter = MovingAverageFilter(span=20)

    state = scenario.initial_state()
    steps_per_tick = int(round(config.steps_per_tick))
    ticks_per_wind = int(round(config.ticks_per_wind))
    has_wind = scenario.wind is not None
    has_current = scenario.current.speed > 0 or (
        scenario.current.amplitude != 0 and scenario.current.period > 0)

    raw_sample = WindSample(t=0.0, speed=0.0, angle=0.0)
    filt_sample = raw_sample
    prev_saturated = False
    builder = _LogBuilder()

    for tick in range(config.n_ticks):
        t = tick * config.control_period
        wind_new = tick % ticks_per_wind == 0
        if wind_new:
            if has_wind:
                raw_sample = apparent_from_true(scenario.wind.at(t), state, t)
                if config.quantize_sensors:
                    raw_sample = quantize_wind_sample(raw_sample, scenario.sensors)
            else:
                raw_sample = WindSample(t=t, speed=0.0, angle=0.0)
            filt_sample = anem_filter.update(raw_sample)

        sensed = sample_sensors(state, scenario.sensors) if config.quantize_sensors else state
        tau = controller(sensed, prev_saturated)
        if scenario.feedforward and has_wind:
            tau_w_est = wind_wrench(scenario.wind_params, filt_sample)
        else:
            tau_w_est = Wrench()
        tau_cmd = apply_feedforward(tau, tau_w_est)

        alloc = allocate(tau_cmd, alloc_cfg)
        hold_port = math.hypot(alloc.extended.fx_port, alloc.extended.fy_port) < 1e-12
        hold_stbd = math.hypot(alloc.extended.fx_stbd, alloc.extended.fy_stbd) < 1e-12
        applied = cmd_filter.update(alloc.setpoint, config.control_period,
                                    hold_port_angle=hold_port, hold_stbd_angle=hold_stbd)
        tau_applied = propulsion_wrench(params, applied)

        eta_t, _ = tracking_error(state, scenario.setpoint)
        builder.append(
            t, state.x, state.y, state.psi, state.u, state.v, state.r,
            sensed.x, sensed.y, sensed.psi, sensed.u, sensed.v, sensed.r,
            eta_t[0], eta_t[1], eta_t[2],
            tau.x, tau.y, tau.n,
            tau_w_est.x, tau_w_est.y, tau_w_est.n,
            tau_cmd.x, tau_cmd.y, tau_cmd.n,
            alloc.extended.fx_port, alloc.extended.fy_port,
            alloc.extended.fx_stbd, alloc.extended.fy_stbd,
            alloc.setpoint.thrust_port, alloc.setpoint.thrust_stbd,
            alloc.setpoint.azimuth_port, alloc.setpoint.azimuth_stbd,
            applied.thrust_port, applied.thrust_stbd,
            applied.azimuth_port, applied.azimuth_stbd,
            float(alloc.saturated), float(alloc.zeroed_port), float(alloc.zeroed_stbd),
            raw_sample.speed, raw_sample.angle,
            filt_sample.speed, filt_sample.angle, float(wind_new))
        prev_saturated = alloc.saturated

        for i in range(steps_per_tick):
            t_phys = t + i * config.dt
            tau_dist = Wrench()
            if has_wind:
                apparent = apparent_from_true(scenario.wind.at(t_phys), state, t_phys)
                tau_dist = tau_dist + wind_wrench(scenario.wind_params, apparent)
            if has_current:
                tau_dist = tau_dist + current_wrench(scenario.current, state, params, t_phys)
            try:
                state = step(params, state, tau_applied, tau_dist, config.dt, m_inv=m_inv)
            except SimulationError as exc:
                raise SimulationError(f"run '{scenario.name}' aborted at t={t_phys:.2f} s: {exc}") from exc

    meta = {
        "scenario": scenario.name,
        "controller": scenario.controller,
        "feedforward": str(scenario.feedforward).lower(),
        "seed": str(config.seed),
        "duration_s": f"{config.duration:g}",
        "dt_s": f"{config.dt:g}",
        "control_rate_hz": f"{config.control_rate_hz:g}",
        "anemometer_rate_hz": f"{config.anemometer_rate_hz:g}",
        "quantize_sensors": str(config.quantize_sensors).lower(),
        "version": __version__,
    }
    return builder.build(meta)


def _sysid_schedule(kind: str, **kwargs) -> tuple[list[tuple[float, float, float]], float]:
    """Command schedule [(t_start, port %, stbd %)] and total duration."""
    if kind == "bollard":
        hold = kwargs.get("hold_s", 5.0)
        commands = kwargs.get("commands",
                              [-100, -90, -80, -70, -60, -50, -40, -30,
                               20, 30, 40, 50, 60, 70, 80, 90, 100])
        schedule = [(i * hold, float(c), float(c)) for i, c in enumerate(commands)]
        return schedule, hold * len(commands)
    if kind == "acceleration":
        cmd = kwargs.get("command", 100.0)
        accel_s = kwargs.get("accel_s", 60.0)
        decel_s = kwargs.get("decel_s", 60.0)
        return [(0.0, cmd, cmd), (accel_s, 0.0, 0.0)], accel_s + decel_s
    if kind == "circle":
        straight = kwargs.get("straight_s", 20.0)
        turn = kwargs.get("turn_s", 30.0)
        return [(0.0, 100.0, 100.0), (straight, -100.0, 100.0)], straight + turn
    if kind == "zigzag":
        straight = kwargs.get("straight_s", 20.0)
        leg = kwargs.get("leg_s", 10.0)
        legs = kwargs.get("legs", 8)
        schedule = [(0.0, 100.0, 100.0)]
        for i in range(legs):
            port, stbd = (100.0, 0.0) if i % 2 == 0 else (0.0, 100.0)
            schedule.append((straight + i * leg, port, stbd))
        return schedule, straight + legs * leg
    raise ValueError(f"maneuver must be one of {SYSID_MANEUVERS}, got {kind!r}")


def run_sysid_maneuver(kind: str, params: VehicleParams | None = None,
                       config: SimConfig | None = None, **kwargs) -> SimLog:
    """Open-loop characterization maneuvers with azimuths locked at zero.

    bollard: step through the calibration commands with the vessel restrained;
    acceleration: full-throttle run then coast-down; circle: straight run then
    opposed full throttle; zigzag: alternating single-side throttle legs.
    Runs in calm water (no wind or current).
    """
    params = params if params is not None else VehicleParams()
    schedule, duration = _sysid_schedule(kind, **kwargs)
    if config is None:
        config = SimConfig(duration=duration)
    config.validate()
    m_inv = inverse_mass_matrix(params)
    state = VehicleState()
    setpoint_pose = state.pose
    held = kind == "bollard"
    steps_per_tick = int(round(config.steps_per_tick))
    starts = [entry[0] for entry in schedule]
    builder = _LogBuilder()

    def commands_at(time: float) -> tuple[float, float]:
        idx = max(0, np.searchsorted(starts, time + 1e-12, side="right") - 1)
        return schedule[idx][1], schedule[idx][2]

    zero = Wrench()
    for tick in range(config.n_ticks):
        t = tick * config.control_period
        cmd_port, cmd_stbd = commands_at(t)
        tp = thrust_per_side_from_command(cmd_port)
        ts = thrust_per_side_from_command(cmd_stbd)
        setpoint = ThrusterSetpoint(thrust_port=tp, thrust_stbd=ts,
                                    azimuth_port=0.0, azimuth_stbd=0.0)
        tau = propulsion_wrench(params, setpoint)
        err = np.array([state.x - setpoint_pose[0], state.y - setpoint_pose[1],
                        wrap_angle(state.psi - setpoint_pose[2])])
        builder.append(
            t, state.x, state.y, state.psi, state.u, state.v, state.r,
            state.x, state.y, state.psi, state.u, state.v, state.r,
            err[0], err[1], err[2],
            tau.x, tau.y, tau.n,
            0.0, 0.0, 0.0,
            tau.x, tau.y, tau.n,
            tp, 0.0, ts, 0.0,
            tp, ts, 0.0, 0.0,
            tp, ts, 0.0, 0.0,
            0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 0.0)
        if not held:
            for _ in range(steps_per_tick):
                state = step(params, state, tau, zero, config.dt, m_inv=m_inv)

    meta = {
        "scenario": f"sysid-{kind}",
        "controller": "open-loop",
        "feedforward": "false",
        "seed": str(config.seed),
        "duration_s": f"{config.duration:g}",
        "dt_s": f"{config.dt:g}",
        "control_rate_hz": f"{config.control_rate_hz:g}",
        "anemometer_rate_hz": f"{config.anemometer_rate_hz:g}",
        "quantize_sensors": "false",
        "version": __version__,
    }
    return builder.build(meta)
