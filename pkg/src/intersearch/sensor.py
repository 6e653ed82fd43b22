"""Detection model: range-decaying target detections plus Poisson false alarms.

A target at distance r is detected with probability exp(-r / range_scale)
regardless of range; the disc of radius radius_factor * range_scale only
bounds where that chance is worth acting on. The measured range and azimuth
carry independent Gaussian noise. False alarms arrive as a Poisson stream
(false_alarm_rate expected per scan) placed uniformly over the disc.

Three per-cell false-alarm probability models feed the Bayes updates:

* "matched" (default): the false-alarm probability assumed for a cell scales
  with its detection probability (rate * exp(-r / range_scale), zero outside
  the disc). Every detection then carries the same likelihood ratio 1/rate
  regardless of range, so distant hits stay informative while a single false
  alarm can never push a cell past odds of 1/rate.
* "scan_rate": every cell uses the scan-level rate itself. Near hits carry
  odds up to 1/rate but hits near the disc edge carry none (detection and
  false-alarm probability coincide there when radius_factor = -ln(rate)).
* "uniform_disc": the scan-level rate is split evenly over the in-disc cells
  (rate / N_disc, zero outside), conserving the expected false-alarm count.
  One false alarm can saturate a cell; timid choice for declare thresholds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .grid import GridSpec, Position, cell_center, distance, nearest_cell

FA_MODELS = ("matched", "scan_rate", "uniform_disc")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SensorParams:
    range_scale: float
    false_alarm_rate: float
    sigma_range: float = 0.5
    sigma_azimuth: float = 0.05
    radius_factor: float = 3.0
    scan_time: float = 1.0
    false_alarm_model: str = "matched"

    def __post_init__(self) -> None:
        if not (self.range_scale > 0.0 and math.isfinite(self.range_scale)):
            raise ValueError("range_scale must be positive and finite")
        if not (self.false_alarm_rate >= 0.0 and math.isfinite(self.false_alarm_rate)):
            raise ValueError("false_alarm_rate must be >= 0 and finite")
        if self.sigma_range < 0.0:
            raise ValueError("sigma_range must be >= 0")
        if self.sigma_azimuth < 0.0:
            raise ValueError("sigma_azimuth must be >= 0")
        if not (self.radius_factor > 0.0):
            raise ValueError("radius_factor must be > 0")
        if not (self.scan_time > 0.0 and math.isfinite(self.scan_time)):
            raise ValueError("scan_time must be positive and finite")
        if self.false_alarm_model not in FA_MODELS:
            raise ValueError(f"false_alarm_model must be one of {FA_MODELS}")

    @property
    def sensing_radius(self) -> float:
        return self.radius_factor * self.range_scale


class Detection(NamedTuple):
    range: float
    azimuth: float


@dataclass(frozen=True)
class Scan:
    sensor_position: Position
    timestamp: float
    detections: tuple[Detection, ...]


def detection_probability(sensor: SensorParams, r: float) -> float:
    """Probability that a target at distance r produces a detection."""
    if r < 0.0:
        raise ValueError("distance must be >= 0")
    return math.exp(-r / sensor.range_scale)


def per_cell_false_alarm_probability(sensor: SensorParams, grid: GridSpec,
                                     sensor_pos: Position, cell: int) -> float:
    """False-alarm probability used in the Bayes update of `cell`.

    Capped at 0.5 so a false alarm is never better evidence of presence than
    absence.
    """
    if sensor.false_alarm_model == "scan_rate":
        return min(sensor.false_alarm_rate, 0.5)
    d = distance(sensor_pos, cell_center(grid, cell))
    if d > sensor.sensing_radius:
        return 0.0
    if sensor.false_alarm_model == "matched":
        return min(sensor.false_alarm_rate * detection_probability(sensor, d), 0.5)
    n_disc = disc_cell_count(sensor, grid, sensor_pos)
    return min(sensor.false_alarm_rate / n_disc, 0.5)


def disc_false_alarm_probability(sensor: SensorParams, n_disc: int) -> float:
    """Scalar false-alarm probability for the flat models; the kernel argument.

    For "matched" this returns the bare rate: the kernels multiply it by each
    cell's detection probability themselves.
    """
    if sensor.false_alarm_model == "scan_rate":
        return min(sensor.false_alarm_rate, 0.5)
    if sensor.false_alarm_model == "matched":
        return sensor.false_alarm_rate
    if n_disc <= 0:
        return 0.0
    return min(sensor.false_alarm_rate / n_disc, 0.5)


def disc_cell_count(sensor: SensorParams, grid: GridSpec, sensor_pos: Position) -> int:
    idx, _ = backend.disc_cells(grid.side_cells, grid.cell_pitch,
                                grid.origin.x, grid.origin.y,
                                sensor_pos[0], sensor_pos[1], sensor.sensing_radius)
    return int(idx.shape[0])


def generate_scan(sensor: SensorParams, grid: GridSpec, sensor_pos: Position,
                  target_cell: int | None, rng: np.random.Generator,
                  timestamp: float = 0.0) -> Scan:
    """Draw one scan.

    Fixed draw order: target-detection Bernoulli, then (on success) range and
    azimuth noise, then the Poisson false-alarm count, then one (radius, angle)
    pair per false alarm. The detection law has unbounded support, so a target
    slightly beyond the disc can still produce a hit; measured ranges are
    clipped to sensing_radius + 4 sigma_range.
    """
    detections: list[Detection] = []
    max_range = sensor.sensing_radius + 4.0 * sensor.sigma_range
    if target_cell is not None:
        tx, ty = cell_center(grid, target_cell)
        r = distance(sensor_pos, (tx, ty))
        if rng.random() < detection_probability(sensor, r):
            eps_r = rng.normal(0.0, sensor.sigma_range) if sensor.sigma_range > 0.0 else 0.0
            eps_a = rng.normal(0.0, sensor.sigma_azimuth) if sensor.sigma_azimuth > 0.0 else 0.0
            azimuth = (math.atan2(ty - sensor_pos[1], tx - sensor_pos[0]) + eps_a) % TWO_PI
            measured = min(max(r + eps_r, 0.0), max_range)
            detections.append(Detection(measured, azimuth))
    n_false = int(rng.poisson(sensor.false_alarm_rate))
    for _ in range(n_false):
        rad = sensor.sensing_radius * math.sqrt(rng.random())
        ang = TWO_PI * rng.random()
        detections.append(Detection(rad, ang))
    return Scan(Position(*sensor_pos), timestamp, tuple(detections))


def associate_to_cells(scan: Scan, grid: GridSpec) -> tuple[int, ...]:
    """Cells holding at least one detection, ascending, duplicates merged."""
    px, py = scan.sensor_position
    cells = {nearest_cell(grid, (px + d.range * math.cos(d.azimuth),
                                 py + d.range * math.sin(d.azimuth)))
             for d in scan.detections}
    return tuple(sorted(cells))
