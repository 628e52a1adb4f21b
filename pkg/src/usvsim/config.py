"""Declarative YAML scenario and experiment-matrix configs.

Scenario keys carry explicit unit suffixes (duration_s, mean_speed_mps,
heading_deg, ...).  Unknown keys are rejected with the offending field path so
typos fail fast, before any simulation starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .allocation import AllocatorConfig
from .control import (BackstepGains, PDGains, Setpoint, SimplifiedModel,
                      SlidingGains, default_backstep_gains, default_pd_gains,
                      default_sliding_gains)
from .dynamics import VehicleParams, VehicleState
from .io import load_wind_csv
from .simulator import CONTROLLERS, Scenario, SensorModels, SimConfig
from .wind import CurrentParams, WindParams, synthesize_wind


class ScenarioError(ValueError):
    """Malformed scenario or matrix config."""


def _check_keys(mapping: dict, allowed: set, context: str):
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ScenarioError(f"{context}: unknown key(s) {unknown}; allowed: {sorted(allowed)}")


def _load_yaml(path: Path) -> dict:
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: YAML parse error: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: top level must be a mapping")
    return raw


def _number(mapping: dict, key: str, default, context: str) -> float:
    value = mapping.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f"{context}.{key}: expected a number, got {value!r}")
    return float(value)


def _build_setpoint(section: dict, context: str) -> Setpoint:
    _check_keys(section, {"north_m", "east_m", "heading_deg"}, context)
    return Setpoint(x=_number(section, "north_m", 0.0, context),
                    y=_number(section, "east_m", 0.0, context),
                    psi=math.radians(_number(section, "heading_deg", 0.0, context)))


def _build_wind(section: dict, seed: int, duration: float, base: Path, context: str):
    if "replay_csv" in section:
        _check_keys(section, {"replay_csv"}, context)
        trace = base / str(section["replay_csv"])
        if not trace.is_file():
            raise ScenarioError(f"{context}.replay_csv: file not found: {trace}")
        return load_wind_csv(trace)
    allowed = {"mean_speed_mps", "mean_direction_deg", "turbulence_intensity",
               "cutoff_hz", "direction_std_deg", "dt_s"}
    _check_keys(section, allowed, context)
    return synthesize_wind(
        seed=seed,
        mean_speed=_number(section, "mean_speed_mps", 2.43, context),
        mean_direction=math.radians(_number(section, "mean_direction_deg", 0.0, context)),
        intensity=_number(section, "turbulence_intensity", 0.0, context),
        cutoff_hz=_number(section, "cutoff_hz", 0.03, context),
        duration=duration,
        dt=_number(section, "dt_s", 1.0, context),
        direction_std=math.radians(_number(section, "direction_std_deg", 0.0, context)))


def _build_gains(kind: str, section: dict, params: VehicleParams, context: str):
    def vec(key, default):
        value = section.get(key, default)
        arr = np.asarray(value, dtype=float)
        if arr.shape != (3,):
            raise ScenarioError(f"{context}.{key}: expected 3 numbers, got {value!r}")
        return arr

    model = SimplifiedModel.from_params(params)
    if kind == "pd":
        _check_keys(section, {"kp", "kd"}, context)
        base = default_pd_gains()
        return PDGains(kp=vec("kp", base.kp), kd=vec("kd", base.kd))
    if kind == "backstepping":
        _check_keys(section, {"lam", "kp", "kd"}, context)
        base = default_backstep_gains(params)
        return BackstepGains(lam=vec("lam", base.lam), kd=vec("kd", base.kd),
                             kp=vec("kp", base.kp), model=model)
    _check_keys(section, {"lam", "r_bound", "boundary", "antiwindup_scale"}, context)
    base = default_sliding_gains(params)
    return SlidingGains(lam=vec("lam", base.lam), r_bound=vec("r_bound", base.r_bound),
                        boundary=vec("boundary", base.boundary), model=model,
                        antiwindup_scale=_number(section, "antiwindup_scale",
                                                 base.antiwindup_scale, context))


_SCENARIO_KEYS = {"name", "duration_s", "physics_dt_s", "control_rate_hz",
                  "anemometer_rate_hz", "seed", "quantize_sensors", "setpoint",
                  "initial_offset", "controller", "wind", "current", "vehicle",
                  "wind_params", "allocator", "sensors"}


def load_scenario(path, seed: int | None = None) -> tuple[Scenario, SimConfig]:
    """Load one scenario file; an explicit seed argument overrides the file's."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    raw = _load_yaml(path)
    _check_keys(raw, _SCENARIO_KEYS, str(path))
    name = str(raw.get("name", path.stem))

    run_seed = int(raw.get("seed", 0)) if seed is None else int(seed)
    duration = _number(raw, "duration_s", 700.0, name)
    try:
        config = SimConfig(
            dt=_number(raw, "physics_dt_s", 0.05, name),
            control_rate_hz=_number(raw, "control_rate_hz", 4.0, name),
            anemometer_rate_hz=_number(raw, "anemometer_rate_hz", 1.0, name),
            duration=duration, seed=run_seed,
            quantize_sensors=bool(raw.get("quantize_sensors", False)))
    except ValueError as exc:
        raise ScenarioError(f"{name}: {exc}") from exc

    vehicle_overrides = raw.get("vehicle", {}) or {}
    valid_fields = set(VehicleParams.__dataclass_fields__)
    _check_keys(vehicle_overrides, valid_fields, f"{name}.vehicle")
    try:
        params = VehicleParams(**vehicle_overrides)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{name}.vehicle: {exc}") from exc

    wp_section = raw.get("wind_params", {}) or {}
    _check_keys(wp_section, {"air_density_kgm3", "frontal_area_m2", "lateral_area_m2",
                             "lateral_lever_m", "c_x", "c_y", "c_z"}, f"{name}.wind_params")
    wind_params = WindParams(
        rho_air=_number(wp_section, "air_density_kgm3", 1.2, f"{name}.wind_params"),
        area_frontal=_number(wp_section, "frontal_area_m2", 1.2, f"{name}.wind_params"),
        area_lateral=_number(wp_section, "lateral_area_m2", 2.4, f"{name}.wind_params"),
        lever_lateral=_number(wp_section, "lateral_lever_m", 0.5, f"{name}.wind_params"),
        c_x=_number(wp_section, "c_x", 0.50, f"{name}.wind_params"),
        c_y=_number(wp_section, "c_y", 0.50, f"{name}.wind_params"),
        c_z=_number(wp_section, "c_z", 0.33, f"{name}.wind_params"))

    setpoint = _build_setpoint(raw.get("setpoint", {}) or {}, f"{name}.setpoint")
    initial = None
    if "initial_offset" in raw and raw["initial_offset"]:
        off = raw["initial_offset"]
        _check_keys(off, {"north_m", "east_m", "heading_deg"}, f"{name}.initial_offset")
        initial = VehicleState(
            x=setpoint.x + _number(off, "north_m", 0.0, f"{name}.initial_offset"),
            y=setpoint.y + _number(off, "east_m", 0.0, f"{name}.initial_offset"),
            psi=setpoint.psi + math.radians(_number(off, "heading_deg", 0.0,
                                                    f"{name}.initial_offset")))

    ctrl = raw.get("controller", {}) or {}
    _check_keys(ctrl, {"kind", "feedforward", "gains"}, f"{name}.controller")
    kind = str(ctrl.get("kind", "sliding"))
    if kind not in CONTROLLERS:
        raise ScenarioError(f"{name}.controller.kind: must be one of {CONTROLLERS}, got {kind!r}")
    feedforward = bool(ctrl.get("feedforward", False))
    gains = None
    if "gains" in ctrl and ctrl["gains"]:
        gains = _build_gains(kind, ctrl["gains"], params, f"{name}.controller.gains")

    wind = None
    if "wind" in raw and raw["wind"]:
        wind = _build_wind(raw["wind"], run_seed, duration, path.parent, f"{name}.wind")

    cur_section = raw.get("current", {}) or {}
    _check_keys(cur_section, {"speed_mps", "direction_deg", "amplitude_mps", "period_s"},
                f"{name}.current")
    current = CurrentParams(
        speed=_number(cur_section, "speed_mps", 0.0, f"{name}.current"),
        direction=math.radians(_number(cur_section, "direction_deg", 0.0, f"{name}.current")),
        amplitude=_number(cur_section, "amplitude_mps", 0.0, f"{name}.current"),
        period=_number(cur_section, "period_s", 0.0, f"{name}.current"))

    alloc = None
    alloc_section = raw.get("allocator", {}) or {}
    if alloc_section:
        _check_keys(alloc_section, {"tau_thrust_s", "tau_azimuth_s", "weights"},
                    f"{name}.allocator")
        overrides = {}
        if "tau_thrust_s" in alloc_section:
            overrides["tau_thrust"] = _number(alloc_section, "tau_thrust_s", 5.0, name)
        if "tau_azimuth_s" in alloc_section:
            overrides["tau_azimuth"] = _number(alloc_section, "tau_azimuth_s", 0.5, name)
        if "weights" in alloc_section:
            overrides["weights"] = np.asarray(alloc_section["weights"], dtype=float)
        alloc = AllocatorConfig.from_params(params, **overrides)

    sensor_section = raw.get("sensors", {}) or {}
    _check_keys(sensor_section, {"gps_grid_m", "compass_resolution_deg",
                                 "anemometer_resolution_mps"}, f"{name}.sensors")
    sensors = SensorModels(
        gps_grid=_number(sensor_section, "gps_grid_m", 1.0, f"{name}.sensors"),
        compass_resolution_deg=_number(sensor_section, "compass_resolution_deg", 0.1,
                                       f"{name}.sensors"),
        anemometer_resolution=_number(sensor_section, "anemometer_resolution_mps", 0.1,
                                      f"{name}.sensors"))

    scenario = Scenario(name=name, params=params, wind_params=wind_params,
                        setpoint=setpoint, initial=initial, controller=kind,
                        gains=gains, feedforward=feedforward, wind=wind,
                        current=current, allocator=alloc, sensors=sensors)
    return scenario, config


@dataclass
class MatrixSpec:
    """Cross product of scenarios, controllers, feedforward settings and seeds."""

    name: str
    scenario_paths: list
    controllers: list
    feedforward: list
    seeds: list
    output_dir: str = "results"

    def cells(self):
        for path in self.scenario_paths:
            for controller in self.controllers:
                for ff in self.feedforward:
                    for seed in self.seeds:
                        yield path, controller, bool(ff), int(seed)


def load_matrix(path) -> MatrixSpec:
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"matrix file not found: {path}")
    raw = _load_yaml(path)
    _check_keys(raw, {"name", "scenarios", "controllers", "feedforward", "seeds",
                      "output_dir"}, str(path))
    scenarios = raw.get("scenarios")
    if not isinstance(scenarios, list) or not scenarios:
        raise ScenarioError(f"{path}: 'scenarios' must be a non-empty list of file paths")
    paths = []
    for entry in scenarios:
        scenario_path = path.parent / str(entry)
        if not scenario_path.is_file():
            raise ScenarioError(f"{path}: scenario file not found: {scenario_path}")
        paths.append(scenario_path)
    controllers = raw.get("controllers", list(CONTROLLERS))
    for c in controllers:
        if c not in CONTROLLERS:
            raise ScenarioError(f"{path}: unknown controller {c!r}")
    feedforward = raw.get("feedforward", [False, True])
    seeds = raw.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds:
        raise ScenarioError(f"{path}: 'seeds' must be a non-empty list")
    return MatrixSpec(name=str(raw.get("name", path.stem)), scenario_paths=paths,
                      controllers=list(controllers), feedforward=list(feedforward),
                      seeds=[int(s) for s in seeds],
                      output_dir=str(raw.get("output_dir", "results")))
