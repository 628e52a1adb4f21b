"""Command-line harness.

Verbs:
  simulate <scenario.yaml>   one station-keeping run, log + stats
  matrix <matrix.yaml>       full experiment matrix, logs + summary table
  sysid <maneuver>           open-loop characterization maneuver
  windgen                    synthesize a wind trace to CSV
  stats <log.csv>            statistics of an existing log

Exit codes: 0 on success, 2 on config/usage errors, 1 on aborted runs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import ScenarioError, load_matrix, load_scenario
from .io import load_log_csv, save_log_csv, save_wind_csv
from .matrix import run_experiment_matrix
from .simulator import (SYSID_MANEUVERS, SimConfig, SimulationError,
                        run_station_keeping, run_sysid_maneuver)
from .stats import compute_error_stats, compute_wind_stats
from .wind import synthesize_wind


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="usvsim",
                                     description="Twin-hull USV station-keeping simulator")
    parser.add_argument("--version", action="version", version=f"usvsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one station-keeping scenario")
    sim.add_argument("scenario", help="scenario YAML file")
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sim.add_argument("--out", default="results", help="output directory")

    mat = sub.add_parser("matrix", help="run an experiment matrix")
    mat.add_argument("matrix", help="matrix YAML file")
    mat.add_argument("--out", default=None, help="override the matrix output directory")
    mat.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    sysid = sub.add_parser("sysid", help="run a characterization maneuver")
    sysid.add_argument("maneuver", choices=SYSID_MANEUVERS)
    sysid.add_argument("--command", type=float, default=100.0,
                       help="throttle percent for the acceleration maneuver")
    sysid.add_argument("--out", default="results", help="output directory")

    wind = sub.add_parser("windgen", help="synthesize a wind trace")
    wind.add_argument("--mean", type=float, default=2.43, help="mean speed [m/s]")
    wind.add_argument("--direction", type=float, default=180.0,
                      help="mean direction the wind blows from [deg]")
    wind.add_argument("--intensity", type=float, default=0.15, help="turbulence intensity")
    wind.add_argument("--cutoff", type=float, default=0.03, help="spectral cutoff [Hz]")
    wind.add_argument("--duration", type=float, default=700.0, help="[s]")
    wind.add_argument("--dt", type=float, default=1.0, help="sample period [s]")
    wind.add_argument("--seed", type=int, default=0)
    wind.add_argument("--out", default="wind.csv", help="output CSV path")

    stats = sub.add_parser("stats", help="statistics of an existing log")
    stats.add_argument("log", help="log CSV written by simulate/matrix")
    stats.add_argument("--format", choices=("text", "csv"), default="text")
    return parser


def _prepare_out_dir(path_str: str) -> Path:
    out = Path(path_str)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_error_stats(err, wind_stats, fmt: str = "text"):
    if fmt == "csv":
        print("mean_pos_err_m,std_pos_err_m,mean_heading_err_deg,std_heading_err_deg")
        print(f"{err.mean_position:.4f},{err.std_position:.4f},"
              f"{err.mean_heading_deg:.4f},{err.std_heading_deg:.4f}")
    else:
        print(f"position error   mean {err.mean_position:7.3f} m   std {err.std_position:7.3f} m")
        print(f"heading error    mean {err.mean_heading_deg:7.3f} deg std {err.std_heading_deg:7.3f} deg")
    if wind_stats is not None:
        if fmt == "csv":
            print("mean_wind_mps,std_wind_mps,mean_wind_dir_deg,std_wind_dir_deg,intensity_pct")
            print(f"{wind_stats.mean_speed:.4f},{wind_stats.std_speed:.4f},"
                  f"{wind_stats.mean_direction_deg:.2f},{wind_stats.std_direction_deg:.2f},"
                  f"{wind_stats.intensity_pct:.2f}")
        else:
            print(f"apparent wind    mean {wind_stats.mean_speed:7.3f} m/s std {wind_stats.std_speed:7.3f} m/s")
            print(f"wind direction   mean {wind_stats.mean_direction_deg:7.2f} deg "
                  f"std {wind_stats.std_direction_deg:7.2f} deg")
            print(f"turbulence intensity {wind_stats.intensity_pct:.2f} %")


def _cmd_simulate(args) -> int:
    scenario, config = load_scenario(args.scenario, seed=args.seed)
    out = _prepare_out_dir(args.out)
    for note in scenario.wind_params.range_notes:
        print(f"note: {note}", file=sys.stderr)
    log = run_station_keeping(scenario, config)
    path = save_log_csv(log, out / f"{scenario.name}.csv")
    print(f"log written to {path} ({len(log)} ticks)")
    err = compute_error_stats(log)
    wind_stats = compute_wind_stats(log) if scenario.wind is not None else None
    _print_error_stats(err, wind_stats)
    return 0


def _cmd_matrix(args) -> int:
    spec = load_matrix(args.matrix)
    report = run_experiment_matrix(spec, output_dir=args.out, jobs=args.jobs)
    out_dir = Path(args.out) if args.out is not None else Path(spec.output_dir)
    print(report.summary_text(), end="")
    print(f"{len(report.cells)} runs; summary written to {out_dir / 'summary.csv'}")
    return 0


def _cmd_sysid(args) -> int:
    out = _prepare_out_dir(args.out)
    kwargs = {"command": args.command} if args.maneuver == "acceleration" else {}
    log = run_sysid_maneuver(args.maneuver, **kwargs)
    path = save_log_csv(log, out / f"sysid_{args.maneuver}.csv")
    print(f"log written to {path} ({len(log)} ticks)")
    if args.maneuver in ("acceleration", "circle"):
        print(f"final speeds: u={log['u_mps'][-1]:.3f} m/s, "
              f"v={log['v_mps'][-1]:.3f} m/s, r={log['r_radps'][-1]:.3f} rad/s")
    return 0


def _cmd_windgen(args) -> int:
    import math

    series = synthesize_wind(seed=args.seed, mean_speed=args.mean,
                             mean_direction=math.radians(args.direction),
                             intensity=args.intensity, cutoff_hz=args.cutoff,
                             duration=args.duration, dt=args.dt)
    path = save_wind_csv(series, args.out)
    print(f"wind trace written to {path} ({len(series.t)} samples)")
    return 0


def _cmd_stats(args) -> int:
    path = Path(args.log)
    if not path.is_file():
        raise ScenarioError(f"log file not found: {path}")
    log = load_log_csv(path)
    err = compute_error_stats(log)
    try:
        wind_stats = compute_wind_stats(log)
    except ValueError:
        wind_stats = None
    if wind_stats is not None and wind_stats.mean_speed == 0.0:
        wind_stats = None
    _print_error_stats(err, wind_stats, args.format)
    return 0


_COMMANDS = {"simulate": _cmd_simulate, "matrix": _cmd_matrix, "sysid": _cmd_sysid,
             "windgen": _cmd_windgen, "stats": _cmd_stats}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
