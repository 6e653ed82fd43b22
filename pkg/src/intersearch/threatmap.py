"""Per-cell Bernoulli occupancy posterior over the search lattice.

The map holds one presence probability per cell, started at 0.5 and updated
cell-by-cell after every scan. Posteriors are clamped away from 0 and 1 so a
cell can always recover from contradictory evidence.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .grid import GridSpec, Position, cell_center, distance
from .sensor import SensorParams, detection_probability, disc_false_alarm_probability

log = logging.getLogger(__name__)

P_FLOOR = 1e-6
P_CEIL = 1.0 - 1e-6


@dataclass
class ThreatMap:
    probs: np.ndarray  # float64, length cell_count, row-major

    def copy(self) -> "ThreatMap":
        return ThreatMap(self.probs.copy())


def init_map(grid: GridSpec) -> ThreatMap:
    """Uninformative prior: every cell at 0.5."""
    return ThreatMap(np.full(grid.cell_count, 0.5, dtype=np.float64))


def binary_entropy(p: float) -> float:
    """Entropy of a Bernoulli(p) in bits, with 0 log 0 = 0."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def bernoulli_posterior(prior: float, p_d: float, p_fa: float, hit: bool) -> float:
    """Two-hypothesis Bayes update for a single cell, unclamped.

    Parameters
    ----------
    prior : presence probability before the scan.
    p_d   : detection probability if the target occupies the cell.
    p_fa  : probability of a false hit on the cell if it is empty.
    hit   : whether the scan produced a detection in the cell.
    """
    if hit:
        num = p_d * prior
        alt = p_fa * (1.0 - prior)
    else:
        num = (1.0 - p_d) * prior
        alt = (1.0 - p_fa) * (1.0 - prior)
    den = num + alt
    if den <= 0.0:
        # zero-probability observation under both hypotheses; keep the prior
        return prior
    return num / den


def bayes_update(tmap: ThreatMap, sensor: SensorParams, grid: GridSpec,
                 sensor_pos: Position, hit_cells: tuple[int, ...]) -> ThreatMap:
    """Posterior map after one scan from `sensor_pos`.

    Every cell inside the sensing disc is updated: hit cells with the
    detection branch, the rest with the no-detection branch. A hit cell
    outside the disc (a noise-displaced detection) is updated with the
    detection branch as well; cells outside the disc with no hit keep their
    probability. Results are clamped to [P_FLOOR, P_CEIL].
    """
    probs = tmap.probs.copy()
    _apply_scan(probs, sensor, grid, sensor_pos, hit_cells)
    return ThreatMap(probs)


def _apply_scan(probs: np.ndarray, sensor: SensorParams, grid: GridSpec,
                sensor_pos: Position, hit_cells: tuple[int, ...],
                disc: tuple[np.ndarray, np.ndarray] | None = None) -> None:
    """In-place scan update; `disc` may carry precomputed (idx, dist) arrays."""
    if disc is None:
        idx, dist = backend.disc_cells(grid.side_cells, grid.cell_pitch,
                                       grid.origin.x, grid.origin.y,
                                       sensor_pos[0], sensor_pos[1],
                                       sensor.sensing_radius)
    else:
        idx, dist = disc
    pfa = disc_false_alarm_probability(sensor, int(idx.shape[0]))
    matched = sensor.false_alarm_model == "matched"
    if hit_cells:
        hits = np.isin(idx, np.asarray(hit_cells, dtype=np.int64))
    else:
        hits = np.zeros(idx.shape[0], dtype=np.bool_)
    if idx.shape[0]:
        backend.bayes_update_cells(probs, idx, dist, hits,
                                   sensor.range_scale, pfa, matched,
                                   P_FLOOR, P_CEIL)
    if hit_cells:
        in_disc = set(int(i) for i in idx[hits])
        for cell in hit_cells:
            if cell in in_disc:
                continue
            d = distance(sensor_pos, cell_center(grid, cell))
            p_d = detection_probability(sensor, d)
            if sensor.false_alarm_model == "scan_rate":
                pfa_out = min(sensor.false_alarm_rate, 0.5)
            elif matched:
                pfa_out = min(sensor.false_alarm_rate * p_d, 0.5)
            else:
                pfa_out = P_FLOOR
            post = bernoulli_posterior(probs[cell], p_d, pfa_out, True)
            probs[cell] = min(max(post, P_FLOOR), P_CEIL)
            log.debug("hit outside sensing disc: cell %d at distance %.3f", cell, d)


def entropy(tmap: ThreatMap) -> float:
    """Normalized map entropy: mean per-cell binary entropy, in [0, 1]."""
    return backend.sum_binary_entropy(tmap.probs) / tmap.probs.shape[0]


def max_belief(tmap: ThreatMap) -> tuple[float, int]:
    """(highest cell probability, its cell index); ties pick the smallest index."""
    cell = int(np.argmax(tmap.probs))
    return float(tmap.probs[cell]), cell


def to_rounded_list(tmap: ThreatMap) -> list[float]:
    """Row-major probabilities rounded to 6 significant digits, for JSON dumps."""
    return [float(f"{p:.6g}") for p in tmap.probs]
