"""Phase parameters and the information-gain action rule.

The searcher alternates fast blind relocation hops with slow sensing stays.
gamma_factor sets the mean hop so consecutive sensing discs barely overlap;
diffusion_budget is the number of scans after which a target within the last
hop length would almost surely have been detected. Hop destinations are chosen
among random exponential-length proposals by expected entropy reduction of a
single scan taken at the destination.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .grid import GridSpec, Position, cell_center, distance, nearest_cell
from .sensor import SensorParams, disc_false_alarm_probability
from .threatmap import ThreatMap, entropy, max_belief

STRATEGY_KINDS = ("intermittent", "pure_infotaxis")
BUDGET_MODES = ("mean_flight", "flight_adaptive")

PHASE_BALLISTIC = "ballistic"
PHASE_DIFFUSION = "diffusion"

TWO_PI = 2.0 * math.pi

_HUGE_BUDGET = 10 ** 18


@dataclass(frozen=True)
class StrategyParams:
    ballistic_speed: float
    surface_speed: float
    residual_prob: float
    hold_threshold: float
    declare_margin: float
    action_count: int
    timeout: float
    strategy_kind: str = "intermittent"
    budget_mode: str = "mean_flight"

    def __post_init__(self) -> None:
        if not (self.ballistic_speed > 0.0 and math.isfinite(self.ballistic_speed)):
            raise ValueError("ballistic_speed must be positive and finite")
        if not (0.0 < self.surface_speed < self.ballistic_speed):
            raise ValueError("surface_speed must satisfy 0 < surface_speed < ballistic_speed")
        if not (0.0 < self.residual_prob < 1.0):
            raise ValueError("residual_prob must be in (0, 1)")
        if not (0.5 < self.hold_threshold < 1.0):
            raise ValueError("hold_threshold must be in (0.5, 1)")
        if not (0.0 < self.declare_margin < 0.5):
            raise ValueError("declare_margin must be in (0, 0.5)")
        if self.action_count < 1:
            raise ValueError("action_count must be >= 1")
        if not (self.timeout > 0.0 and math.isfinite(self.timeout)):
            raise ValueError("timeout must be positive and finite")
        if self.strategy_kind not in STRATEGY_KINDS:
            raise ValueError(f"strategy_kind must be one of {STRATEGY_KINDS}")
        if self.budget_mode not in BUDGET_MODES:
            raise ValueError(f"budget_mode must be one of {BUDGET_MODES}")


class BallisticAction(NamedTuple):
    length: float       # travel distance to the snapped destination, a.u.
    angle: float        # proposal heading, radians
    destination: int    # destination cell index


def gamma_factor(side_cells: int, range_scale: float, cell_pitch: float = 1.0) -> float:
    """Dimensionless mean-hop multiplier sqrt(ln(span / range_scale) - 1/2).

    Zero when the domain span is sqrt(e) times the sensing scale; undefined
    (ValueError) for smaller domains, where hopping cannot beat crawling.
    """
    span = side_cells * cell_pitch
    arg = math.log(span / range_scale) - 0.5
    if arg < 0.0:
        raise ValueError(
            "domain too small for ballistic hops: need side_cells * cell_pitch"
            " >= sqrt(e) * range_scale")
    return math.sqrt(arg)


def tau_ballistic(gamma: float, range_scale: float, ballistic_speed: float) -> float:
    """Mean hop duration: gamma * range_scale / ballistic_speed."""
    return gamma * range_scale / ballistic_speed


def sample_duration(mean: float, rng: np.random.Generator) -> float:
    """One exponentially distributed phase duration."""
    return float(rng.exponential(mean))


def diffusion_budget(residual_prob: float, hop_length: float, range_scale: float) -> int:
    """Scans to spend sensing after a hop of `hop_length`.

    Smallest n with (1 - exp(-hop_length / range_scale))^n <= residual_prob,
    floored at one scan.
    """
    if not (0.0 < residual_prob < 1.0):
        raise ValueError("residual_prob must be in (0, 1)")
    if not (hop_length > 0.0):
        raise ValueError("hop_length must be > 0")
    miss_once = -math.expm1(-hop_length / range_scale)  # 1 - exp(-L/a)
    denom = math.log(miss_once)
    if denom == 0.0:
        # hop so long that one scan can never clear it; sense until termination
        return _HUGE_BUDGET
    return max(1, math.ceil(math.log(residual_prob) / denom))


def propose_actions(params: StrategyParams, tau_flight: float, pos: Position,
                    grid: GridSpec, rng: np.random.Generator) -> list[BallisticAction]:
    """Draw action_count hop candidates.

    Each candidate draws a duration ~ Exp(tau_flight) and a uniform heading;
    the endpoint is clamped into the lattice and snapped to the nearest cell.
    Candidates that snap back onto the current cell are re-drawn (at most ten
    times, then kept). `length` is the travel distance to the snapped center.
    """
    current = nearest_cell(grid, pos)
    actions: list[BallisticAction] = []
    for _ in range(params.action_count):
        dest = current
        angle = 0.0
        for _attempt in range(11):
            t = rng.exponential(tau_flight)
            angle = rng.uniform(0.0, TWO_PI)
            hop = t * params.ballistic_speed
            endpoint = (pos[0] + hop * math.cos(angle), pos[1] + hop * math.sin(angle))
            dest = nearest_cell(grid, endpoint)
            if dest != current:
                break
        center = cell_center(grid, dest)
        actions.append(BallisticAction(distance(pos, center), angle, dest))
    return actions


def expected_posterior_entropy(tmap: ThreatMap, sensor: SensorParams, grid: GridSpec,
                               candidate_pos: Position) -> float:
    """Expected normalized map entropy after one scan taken at `candidate_pos`.

    Cells outside the candidate's sensing disc keep their current entropy.
    The expectation uses the raw (unclamped) per-cell posteriors.
    """
    total = backend.sum_binary_entropy(tmap.probs)
    gain = _disc_gain(tmap, sensor, grid, candidate_pos)
    return (total - gain) / tmap.probs.shape[0]


def reward(tmap: ThreatMap, sensor: SensorParams, grid: GridSpec,
           candidate_pos: Position) -> float:
    """Expected information gain of one scan at `candidate_pos` (bits, >= 0)."""
    return entropy(tmap) - expected_posterior_entropy(tmap, sensor, grid, candidate_pos)


def _disc_gain(tmap: ThreatMap, sensor: SensorParams, grid: GridSpec,
               candidate_pos: Position) -> float:
    idx, dist = backend.disc_cells(grid.side_cells, grid.cell_pitch,
                                   grid.origin.x, grid.origin.y,
                                   candidate_pos[0], candidate_pos[1],
                                   sensor.sensing_radius)
    pfa = disc_false_alarm_probability(sensor, int(idx.shape[0]))
    if idx.shape[0] == 0:
        return 0.0
    return backend.gain_at(tmap.probs, idx, dist, sensor.range_scale, pfa,
                           sensor.false_alarm_model == "matched")


def candidate_gains(tmap: ThreatMap, sensor: SensorParams, grid: GridSpec,
                    positions: list[Position]) -> np.ndarray:
    """Unnormalized scan gains for a batch of candidate positions.

    Equals reward * cell_count up to roundoff; shares the argmax with reward
    when the false-alarm model is homogeneous.
    """
    pxs = np.fromiter((p[0] for p in positions), np.float64, len(positions))
    pys = np.fromiter((p[1] for p in positions), np.float64, len(positions))
    pfa = disc_false_alarm_probability(sensor, 0)
    if sensor.false_alarm_model == "uniform_disc":
        # per-position disc sizes differ near the boundary; fall back per call
        return np.array([_disc_gain(tmap, sensor, grid, p) for p in positions])
    return backend.gains_at_positions(tmap.probs, grid.side_cells, grid.cell_pitch,
                                      grid.origin.x, grid.origin.y, pxs, pys,
                                      sensor.sensing_radius, sensor.range_scale, pfa,
                                      sensor.false_alarm_model == "matched")


def select_ballistic_action(candidates: list[BallisticAction], tmap: ThreatMap,
                            sensor: SensorParams, grid: GridSpec) -> BallisticAction:
    """Highest-gain candidate; ties pick the shortest hop, then proposal order."""
    if not candidates:
        raise ValueError("no candidates to select from")
    positions = [cell_center(grid, c.destination) for c in candidates]
    gains = candidate_gains(tmap, sensor, grid, positions)
    best = 0
    for i in range(1, len(candidates)):
        if gains[i] > gains[best] or (gains[i] == gains[best]
                                      and candidates[i].length < candidates[best].length):
            best = i
    return candidates[best]


def diffusion_decision(tmap: ThreatMap, params: StrategyParams) -> int | None:
    """End-of-budget choice: the cell to creep toward, or None to hop away.

    The searcher holds its ground whenever the strongest cell is at least
    hold_threshold, however far away it sits; suspicion anywhere outranks
    relocation.
    """
    pi, cell = max_belief(tmap)
    if pi < params.hold_threshold:
        return None
    return cell
