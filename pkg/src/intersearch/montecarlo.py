"""Batch episode runner: repeated searches, rates, times, histograms, sweeps.

Episode i uses seed base_seed + i, so batch statistics are reproducible and
independent of the worker count; workers only split the same episode list.
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import OUTCOME_FOUND_CORRECT, OUTCOME_FOUND_WRONG, OUTCOME_TIMEOUT, \
    EpisodeConfig, RunResult, run_episode
from .planner import gamma_factor


@dataclass(frozen=True)
class BatchConfig:
    episode: EpisodeConfig
    runs: int
    base_seed: int = 0
    workers: int = 1
    hist_bin_width: float = 100.0

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not (self.hist_bin_width > 0.0):
            raise ValueError("hist_bin_width must be > 0")


@dataclass(frozen=True)
class BatchStats:
    runs: int
    success_rate: float
    wrong_rate: float
    timeout_rate: float
    mean_time: float | None
    median_time: float | None
    histogram: tuple[tuple[float, float, int], ...]
    timeout: float
    success_times: tuple[float, ...]
    sweep_value: float | None = None


class SweepPoint(NamedTuple):
    value: float
    stats: BatchStats | None
    error: str | None


def episode_config(cfg: BatchConfig, i: int) -> EpisodeConfig:
    return dataclasses.replace(cfg.episode, seed=cfg.base_seed + i, record_trace=False)


def run_batch(cfg: BatchConfig) -> BatchStats:
    """Run the batch and aggregate in episode order."""
    configs = [episode_config(cfg, i) for i in range(cfg.runs)]
    if cfg.workers == 1:
        results = [run_episode(c) for c in configs]
    else:
        chunk = max(1, math.ceil(cfg.runs / (cfg.workers * 4)))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_episode, configs, chunksize=chunk))
    return summarize(results, cfg)


def summarize(results: list[RunResult], cfg: BatchConfig,
              sweep_value: float | None = None) -> BatchStats:
    n = len(results)
    n_success = sum(1 for r in results if r.outcome == OUTCOME_FOUND_CORRECT)
    n_wrong = sum(1 for r in results if r.outcome == OUTCOME_FOUND_WRONG)
    n_timeout = sum(1 for r in results if r.outcome == OUTCOME_TIMEOUT)
    times = tuple(r.search_time for r in results if r.outcome == OUTCOME_FOUND_CORRECT)
    timeout = cfg.episode.strategy.timeout
    return BatchStats(
        runs=n,
        success_rate=n_success / n,
        wrong_rate=n_wrong / n,
        timeout_rate=n_timeout / n,
        mean_time=float(np.mean(times)) if times else None,
        median_time=float(np.median(times)) if times else None,
        histogram=tuple(_histogram(times, timeout, cfg.hist_bin_width)) if times else (),
        timeout=timeout,
        success_times=times,
        sweep_value=sweep_value,
    )


def _histogram(times: tuple[float, ...], timeout: float,
               bin_width: float) -> list[tuple[float, float, int]]:
    n_bins = max(1, math.ceil(timeout / bin_width))
    edges = np.arange(n_bins + 1, dtype=np.float64) * bin_width
    counts, _ = np.histogram(np.asarray(times), bins=edges)
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i]))
            for i in range(n_bins)]


def export_histogram(stats: BatchStats, bin_width: float | None = None
                     ) -> list[tuple[float, float, int, float]]:
    """Histogram rows (bin_low, bin_high, count, density) of successful times.

    Density integrates to one over the bins when any success exists.
    """
    width = bin_width if bin_width is not None else 100.0
    total = len(stats.success_times)
    if total == 0:
        return []
    rows = _histogram(stats.success_times, stats.timeout, width)
    out = []
    for low, high, count in rows:
        out.append((low, high, count, count / (total * (high - low))))
    return out


def sweep_sensing_scale(cfg: BatchConfig, values: list[float]) -> list[SweepPoint]:
    """Re-run the batch for each sensing scale; invalid values yield error rows."""
    points: list[SweepPoint] = []
    for value in values:
        try:
            sensor = dataclasses.replace(cfg.episode.sensor, range_scale=value)
            gamma_factor(cfg.episode.grid.side_cells, value,
                         cfg.episode.grid.cell_pitch)
        except ValueError as err:
            points.append(SweepPoint(value, None, str(err)))
            continue
        episode = dataclasses.replace(cfg.episode, sensor=sensor)
        batch = dataclasses.replace(cfg, episode=episode)
        stats = run_batch(batch)
        points.append(SweepPoint(value, dataclasses.replace(stats, sweep_value=value),
                                 None))
    return points
