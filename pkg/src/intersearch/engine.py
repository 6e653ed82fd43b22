"""Single-episode search simulation.

One episode places a target (usually) and a searcher on the lattice, then runs
the chosen strategy until some cell's presence probability reaches
1 - declare_margin, or the clock passes the timeout.

The intermittent strategy alternates sensing stays with blind ballistic hops:
it scans once per scan_time, and when the sensing budget runs out either creeps
toward the strongest cell (if its probability is at least hold_threshold) or
hops to the most informative of several random candidate destinations. The
pure_infotaxis strategy never hops: every step it evaluates the one-scan gain
of staying put or moving to one of the eight neighbor cells, moves at surface
speed, and scans.

Determinism: an episode is a pure function of its config. The seed feeds two
independent substreams, one for the world (target and start placement, scan
noise) and one for the policy (hop proposals), so policy draws never perturb
the world.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .grid import GridSpec, Position, cell_center, distance, nearest_cell
from .planner import (PHASE_BALLISTIC, PHASE_DIFFUSION, StrategyParams,
                      candidate_gains, diffusion_budget, diffusion_decision,
                      gamma_factor, propose_actions, select_ballistic_action,
                      tau_ballistic)
from .sensor import SensorParams, associate_to_cells, generate_scan
from .threatmap import P_CEIL, P_FLOOR, ThreatMap, _apply_scan, entropy

OUTCOME_FOUND_CORRECT = "found_correct"
OUTCOME_FOUND_WRONG = "found_wrong"
OUTCOME_TIMEOUT = "timeout"


class TraceEntry(NamedTuple):
    clock: float
    x: float
    y: float
    phase: str
    entropy: float
    max_belief: float


@dataclass(frozen=True)
class EpisodeConfig:
    grid: GridSpec
    sensor: SensorParams
    strategy: StrategyParams
    seed: int
    target_cell: int | None = None   # None: drawn uniformly when target_present
    start_cell: int | None = None    # None: drawn uniformly
    target_present: bool = True
    record_trace: bool = False


@dataclass(frozen=True)
class RunResult:
    outcome: str
    search_time: float
    declared_cell: int | None
    true_cell: int | None
    scan_count: int
    jump_count: int
    flight_time: float
    creep_time: float
    final_entropy: float
    trace: tuple[TraceEntry, ...] | None = None
    final_map: ThreatMap | None = None   # populated only when tracing


class _Sim:
    """Mutable episode state shared by both strategies."""

    def __init__(self, cfg: EpisodeConfig, start_cell: int, target_cell: int | None,
                 world_rng: np.random.Generator):
        self.grid = cfg.grid
        self.sensor = cfg.sensor
        self.strategy = cfg.strategy
        self.world_rng = world_rng
        self.target_cell = target_cell
        self.probs = np.full(cfg.grid.cell_count, 0.5, dtype=np.float64)
        self.pos = cell_center(cfg.grid, start_cell)
        self.scan_count = 0
        self.jump_count = 0
        self.flight_time = 0.0
        self.creep_time = 0.0
        self.trace: list[TraceEntry] | None = [] if cfg.record_trace else None
        self._refresh_disc()
        if self.trace is not None:
            self.trace.append(TraceEntry(0.0, self.pos.x, self.pos.y,
                                         PHASE_DIFFUSION, 1.0, 0.5))

    @property
    def clock(self) -> float:
        return (self.scan_count * self.sensor.scan_time
                + self.flight_time + self.creep_time)

    def can_scan(self) -> bool:
        return self.clock + self.sensor.scan_time <= self.strategy.timeout

    def _refresh_disc(self) -> None:
        self.disc = backend.disc_cells(self.grid.side_cells, self.grid.cell_pitch,
                                       self.grid.origin.x, self.grid.origin.y,
                                       self.pos.x, self.pos.y,
                                       self.sensor.sensing_radius)

    def move_to_cell(self, cell: int, flight: bool) -> None:
        """Relocate to a cell center, charging flight or surface travel time."""
        dest = cell_center(self.grid, cell)
        hop = distance(self.pos, dest)
        if flight:
            self.flight_time += hop / self.strategy.ballistic_speed
            self.jump_count += 1
        else:
            self.creep_time += hop / self.strategy.surface_speed
        self.pos = dest
        self._refresh_disc()

    def scan_once(self, phase: str) -> tuple[float, int]:
        """One scan plus map update; returns (max belief, argmax cell)."""
        scan = generate_scan(self.sensor, self.grid, self.pos, self.target_cell,
                             self.world_rng, timestamp=self.clock)
        hits = associate_to_cells(scan, self.grid)
        _apply_scan(self.probs, self.sensor, self.grid, self.pos, hits, self.disc)
        self.scan_count += 1
        cell = int(np.argmax(self.probs))
        pi = float(self.probs[cell])
        if self.trace is not None:
            h = backend.sum_binary_entropy(self.probs) / self.probs.shape[0]
            self.trace.append(TraceEntry(self.clock, self.pos.x, self.pos.y,
                                         phase, h, pi))
        return pi, cell

    def declared(self, pi: float) -> bool:
        return pi >= 1.0 - self.strategy.declare_margin


def run_episode(cfg: EpisodeConfig) -> RunResult:
    """Simulate one episode; pure function of the config."""
    grid, strat = cfg.grid, cfg.strategy
    if cfg.target_cell is not None and not 0 <= cfg.target_cell < grid.cell_count:
        raise ValueError("target_cell outside the grid")
    if cfg.start_cell is not None and not 0 <= cfg.start_cell < grid.cell_count:
        raise ValueError("start_cell outside the grid")
    if strat.strategy_kind == "intermittent":
        # fails fast when the domain is too small for hops
        gamma_factor(grid.side_cells, cfg.sensor.range_scale, grid.cell_pitch)

    seq = np.random.SeedSequence(cfg.seed)
    world_seq, policy_seq = seq.spawn(2)
    world_rng = np.random.default_rng(world_seq)
    policy_rng = np.random.default_rng(policy_seq)

    if cfg.target_present:
        target = cfg.target_cell if cfg.target_cell is not None \
            else int(world_rng.integers(grid.cell_count))
    else:
        target = None
    start = cfg.start_cell if cfg.start_cell is not None \
        else int(world_rng.integers(grid.cell_count))

    sim = _Sim(cfg, start, target, world_rng)
    if strat.strategy_kind == "pure_infotaxis":
        outcome, declared_cell = _run_infotaxis(sim)
    else:
        outcome, declared_cell = _run_intermittent(sim, policy_rng)

    if outcome == OUTCOME_TIMEOUT:
        search_time = strat.timeout
    else:
        search_time = sim.clock
    return RunResult(
        outcome=outcome,
        search_time=search_time,
        declared_cell=declared_cell,
        true_cell=target,
        scan_count=sim.scan_count,
        jump_count=sim.jump_count,
        flight_time=sim.flight_time,
        creep_time=sim.creep_time,
        final_entropy=entropy(ThreatMap(sim.probs)),
        trace=tuple(sim.trace) if sim.trace is not None else None,
        final_map=ThreatMap(sim.probs) if cfg.record_trace else None,
    )


def _verdict(sim: _Sim, cell: int) -> tuple[str, int]:
    """Classify a declaration: correct when on or 8-adjacent to the target."""
    if sim.target_cell is None:
        return OUTCOME_FOUND_WRONG, cell
    side = sim.grid.side_cells
    dr = abs(cell // side - sim.target_cell // side)
    dc = abs(cell % side - sim.target_cell % side)
    if dr <= 1 and dc <= 1:
        return OUTCOME_FOUND_CORRECT, cell
    return OUTCOME_FOUND_WRONG, cell


def _run_intermittent(sim: _Sim, policy_rng: np.random.Generator) -> tuple[str, int | None]:
    grid, sensor, strat = sim.grid, sim.sensor, sim.strategy
    gamma = gamma_factor(grid.side_cells, sensor.range_scale, grid.cell_pitch)
    tau_flight = tau_ballistic(gamma, sensor.range_scale, strat.ballistic_speed)
    mean_hop = gamma * sensor.range_scale
    reach = sensor.sensing_radius

    def stay_budget(hop: float) -> int:
        # clearing beyond sensing reach is impossible; cap the target radius
        return diffusion_budget(strat.residual_prob,
                                min(max(hop, 1e-12), reach), sensor.range_scale)

    budget = stay_budget(mean_hop)
    phase = PHASE_DIFFUSION
    tmap = ThreatMap(sim.probs)

    while True:
        if not sim.can_scan():
            return OUTCOME_TIMEOUT, None
        pi, cell = sim.scan_once(phase)
        phase = PHASE_DIFFUSION
        if sim.declared(pi):
            return _verdict(sim, cell)
        budget -= 1
        if budget > 0:
            continue

        creep_target = diffusion_decision(tmap, strat)
        if creep_target is None:
            candidates = propose_actions(strat, tau_flight, sim.pos, grid, policy_rng)
            action = select_ballistic_action(candidates, tmap, sensor, grid)
            sim.move_to_cell(action.destination, flight=True)
            hop = action.length if strat.budget_mode == "flight_adaptive" else mean_hop
            budget = stay_budget(hop)
            phase = PHASE_BALLISTIC
            continue

        # creep one cell at a time toward the strongest cell, scanning after
        # each step; stop on arrival or when the peak falls below the threshold
        creeped = 0.0
        terminated: tuple[str, int | None] | None = None
        while True:
            target = diffusion_decision(tmap, strat)
            if target is None or nearest_cell(grid, sim.pos) == target:
                break
            nxt = _step_toward(grid, nearest_cell(grid, sim.pos), target)
            before = sim.pos
            sim.move_to_cell(nxt, flight=False)
            creeped += distance(before, sim.pos)
            if not sim.can_scan():
                terminated = (OUTCOME_TIMEOUT, None)
                break
            pi, cell = sim.scan_once(PHASE_DIFFUSION)
            if sim.declared(pi):
                terminated = _verdict(sim, cell)
                break
        if terminated is not None:
            return terminated
        budget = stay_budget(max(creeped, sensor.range_scale))


def _step_toward(grid: GridSpec, here: int, target: int) -> int:
    """Next cell of the 8-connected greedy path from `here` to `target`."""
    side = grid.side_cells
    r0, c0 = divmod(here, side)
    r1, c1 = divmod(target, side)
    r0 += (r1 > r0) - (r1 < r0)
    c0 += (c1 > c0) - (c1 < c0)
    return r0 * side + c0


# stay first, then the 8 neighbors in row-major order; ties favor earlier entries
_NEIGHBOR_STEPS = ((0, 0), (-1, -1), (-1, 0), (-1, 1), (0, -1),
                   (0, 1), (1, -1), (1, 0), (1, 1))


def _run_infotaxis(sim: _Sim) -> tuple[str, int | None]:
    """Greedy one-step gain walk: stay or move to a neighbor, scan, repeat."""
    grid = sim.grid
    side = grid.side_cells
    tmap = ThreatMap(sim.probs)

    while True:
        here = nearest_cell(grid, sim.pos)
        r0, c0 = divmod(here, side)
        cells = []
        lengths = []
        for dr, dc in _NEIGHBOR_STEPS:
            r, c = r0 + dr, c0 + dc
            if 0 <= r < side and 0 <= c < side:
                cells.append(r * side + c)
                lengths.append(math.hypot(dr, dc) * grid.cell_pitch)
        gains = candidate_gains(tmap, sim.sensor, grid,
                                [cell_center(grid, c) for c in cells])
        best = 0
        for i in range(1, len(cells)):
            if gains[i] > gains[best] or (gains[i] == gains[best]
                                          and lengths[i] < lengths[best]):
                best = i
        if cells[best] != here:
            sim.move_to_cell(cells[best], flight=False)
        if not sim.can_scan():
            return OUTCOME_TIMEOUT, None
        pi, cell = sim.scan_once(PHASE_DIFFUSION)
        if sim.declared(pi):
            return _verdict(sim, cell)
