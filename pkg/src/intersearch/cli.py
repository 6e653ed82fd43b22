"""Command line front end.

Subcommands:
  demo   one traced episode; writes <out>.trace.jsonl and <out>.map.json
  mc     a Monte Carlo batch; writes <out>.stats.json and <out>.hist.csv
  sweep  batches over several sensing scales; writes one CSV

Configuration is a YAML file with grid / sensor / strategy / experiment
sections (see configs/default.yaml). All files are written to a temp path and
renamed into place, so failures never leave partial outputs.

demo exit codes: 0 found_correct, 2 timeout, 3 found_wrong, 1 bad config.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys

import yaml

from .engine import EpisodeConfig, run_episode
from .grid import GridSpec
from .montecarlo import BatchConfig, BatchStats, export_histogram, run_batch, \
    sweep_sensing_scale
from .planner import STRATEGY_KINDS, StrategyParams
from .sensor import SensorParams
from .threatmap import to_rounded_list


class ConfigError(Exception):
    pass


# config key -> (constructor field, type)
_GRID_KEYS = {"side_cells": ("side_cells", int), "cell_pitch": ("cell_pitch", float)}
_SENSOR_KEYS = {
    "a": ("range_scale", float),
    "lambda": ("false_alarm_rate", float),
    "sigma_range": ("sigma_range", float),
    "sigma_azimuth": ("sigma_azimuth", float),
    "radius_factor": ("radius_factor", float),
    "tau0": ("scan_time", float),
}
_STRATEGY_KEYS = {
    "V0": ("ballistic_speed", float),
    "v0": ("surface_speed", float),
    "p_star": ("residual_prob", float),
    "zeta": ("hold_threshold", float),
    "epsilon": ("declare_margin", float),
    "action_count": ("action_count", int),
    "timeout": ("timeout", float),
    "strategy_kind": ("strategy_kind", str),
}
_EXPERIMENT_KEYS = {
    "runs": ("runs", int),
    "base_seed": ("base_seed", int),
    "workers": ("workers", int),
    "bin_width": ("bin_width", float),
    "seed": ("seed", int),
    "target_cell": ("target_cell", int),
    "start_cell": ("start_cell", int),
    "target_present": ("target_present", bool),
}


def _coerce(section: str, key: str, value, want):
    if want is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{section}.{key}: expected a boolean, got {value!r}")
    if want is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ConfigError(f"{section}.{key}: expected an integer, got {value!r}")
    if want is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    if want is str:
        if isinstance(value, str):
            return value
        raise ConfigError(f"{section}.{key}: expected a string, got {value!r}")
    raise AssertionError(want)


def _section(doc: dict, name: str, keymap: dict, required: bool) -> dict:
    raw = doc.get(name)
    if raw is None:
        if required:
            raise ConfigError(f"{name}: missing section")
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected a mapping")
    out = {}
    for key, value in raw.items():
        if key not in keymap:
            raise ConfigError(f"{name}.{key}: unknown key")
        field, want = keymap[key]
        out[field] = _coerce(name, key, value, want)
    return out


def load_config(path: str) -> tuple[GridSpec, SensorParams, StrategyParams, dict]:
    """Parse and validate a config file; raises ConfigError naming the bad key."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigError(f"config is not valid YAML: {err}") from err
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping of sections")
    for name in doc:
        if name not in ("grid", "sensor", "strategy", "experiment"):
            raise ConfigError(f"{name}: unknown section")
    try:
        grid = GridSpec(**_section(doc, "grid", _GRID_KEYS, required=True))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"grid: {err}") from err
    try:
        sensor = SensorParams(**_section(doc, "sensor", _SENSOR_KEYS, required=True))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"sensor: {err}") from err
    try:
        strategy = StrategyParams(**_section(doc, "strategy", _STRATEGY_KEYS, required=True))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"strategy: {err}") from err
    experiment = _section(doc, "experiment", _EXPERIMENT_KEYS, required=False)
    return grid, sensor, strategy, experiment


def _write_atomic(path: str, text: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _episode_from(grid, sensor, strategy, experiment, seed) -> EpisodeConfig:
    return EpisodeConfig(
        grid=grid, sensor=sensor, strategy=strategy, seed=seed,
        target_cell=experiment.get("target_cell"),
        start_cell=experiment.get("start_cell"),
        target_present=experiment.get("target_present", True),
    )


def cmd_demo(args: argparse.Namespace) -> int:
    grid, sensor, strategy, experiment = load_config(args.config)
    if args.strategy:
        strategy = dataclasses.replace(strategy, strategy_kind=args.strategy)
    seed = args.seed if args.seed is not None else experiment.get("seed", 0)
    cfg = dataclasses.replace(
        _episode_from(grid, sensor, strategy, experiment, seed), record_trace=True)
    result = run_episode(cfg)

    out = args.out or "demo_run"
    lines = []
    for e in result.trace or ():
        lines.append(json.dumps({"clock": e.clock, "x": e.x, "y": e.y,
                                 "phase": e.phase, "entropy": e.entropy,
                                 "max_belief": e.max_belief}))
    _write_atomic(f"{out}.trace.jsonl", "\n".join(lines) + "\n")

    _write_atomic(f"{out}.map.json",
                  json.dumps(to_rounded_list(result.final_map)) + "\n")

    print(f"outcome={result.outcome} search_time={result.search_time:.3f} "
          f"declared={result.declared_cell} true={result.true_cell} "
          f"scans={result.scan_count} jumps={result.jump_count}")
    return {"found_correct": 0, "timeout": 2, "found_wrong": 3}[result.outcome]


def cmd_mc(args: argparse.Namespace) -> int:
    grid, sensor, strategy, experiment = load_config(args.config)
    if args.strategy:
        strategy = dataclasses.replace(strategy, strategy_kind=args.strategy)
    episode = _episode_from(grid, sensor, strategy, experiment, seed=0)
    cfg = BatchConfig(
        episode=episode,
        runs=args.runs if args.runs is not None else experiment.get("runs", 100),
        base_seed=args.seed if args.seed is not None else experiment.get("base_seed", 0),
        workers=args.workers if args.workers is not None else experiment.get("workers", 1),
        hist_bin_width=experiment.get("bin_width", 100.0),
    )
    stats = run_batch(cfg)
    out = args.out or "mc_run"
    _write_atomic(f"{out}.stats.json", stats_json(stats))
    _write_atomic(f"{out}.hist.csv", histogram_csv(stats, cfg.hist_bin_width))
    print(f"runs={stats.runs} success={stats.success_rate:.4f} "
          f"wrong={stats.wrong_rate:.4f} timeout={stats.timeout_rate:.4f} "
          f"mean={stats.mean_time} median={stats.median_time}")
    return 0


def stats_json(stats: BatchStats) -> str:
    payload = {
        "runs": stats.runs,
        "success_rate": stats.success_rate,
        "wrong_rate": stats.wrong_rate,
        "timeout_rate": stats.timeout_rate,
        "mean_time": stats.mean_time,
        "median_time": stats.median_time,
        "timeout": stats.timeout,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def histogram_csv(stats: BatchStats, bin_width: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["bin_low", "bin_high", "count", "density"])
    for low, high, count, density in export_histogram(stats, bin_width):
        writer.writerow([f"{low:g}", f"{high:g}", count, repr(density)])
    return buf.getvalue()


def cmd_sweep(args: argparse.Namespace) -> int:
    grid, sensor, strategy, experiment = load_config(args.config)
    if args.strategy:
        strategy = dataclasses.replace(strategy, strategy_kind=args.strategy)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError as err:
        raise ConfigError(f"--values: {err}") from err
    if not values:
        raise ConfigError("--values: need at least one value")
    episode = _episode_from(grid, sensor, strategy, experiment, seed=0)
    cfg = BatchConfig(
        episode=episode,
        runs=args.runs if args.runs is not None else experiment.get("runs", 100),
        base_seed=args.seed if args.seed is not None else experiment.get("base_seed", 0),
        workers=args.workers if args.workers is not None else experiment.get("workers", 1),
        hist_bin_width=experiment.get("bin_width", 100.0),
    )
    points = sweep_sensing_scale(cfg, values)

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["a", "mean_time", "success_rate", "runs"])
    any_valid = False
    for p in points:
        if p.error is not None:
            writer.writerow([f"{p.value:g}", f"error: {p.error}", "", 0])
            continue
        any_valid = True
        mean = "" if p.stats.mean_time is None else repr(p.stats.mean_time)
        writer.writerow([f"{p.value:g}", mean, repr(p.stats.success_rate), p.stats.runs])
    _write_atomic(args.out or "sweep.csv", buf.getvalue())
    for p in points:
        label = f"error: {p.error}" if p.error else \
            f"mean={p.stats.mean_time} success={p.stats.success_rate:.4f}"
        print(f"a={p.value:g} {label}")
    return 0 if any_valid else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intersearch",
        description="Intermittent information-driven grid search simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML config path")
    common.add_argument("--seed", type=int, default=None,
                        help="seed (demo) or base seed (mc, sweep)")
    common.add_argument("--out", default=None, help="output path or prefix")
    common.add_argument("--strategy", choices=list(STRATEGY_KINDS), default=None,
                        help="override strategy_kind")

    p_demo = sub.add_parser("demo", parents=[common],
                            help="run one traced episode")
    p_demo.set_defaults(func=cmd_demo)

    batch = argparse.ArgumentParser(add_help=False)
    batch.add_argument("--runs", type=int, default=None)
    batch.add_argument("--workers", type=int, default=None)

    p_mc = sub.add_parser("mc", parents=[common, batch],
                          help="run a Monte Carlo batch")
    p_mc.set_defaults(func=cmd_mc)

    p_sweep = sub.add_parser("sweep", parents=[common, batch],
                             help="run batches over sensing scales")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated sensing scales, e.g. 2,3,4")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 1


def app() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
