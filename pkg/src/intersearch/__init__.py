"""Discrete-grid simulator for intermittent, information-driven search.

A searcher on a square lattice looks for a hidden target with an unreliable
proximity sensor, keeping a per-cell Bernoulli belief map. The intermittent
strategy alternates slow sensing stays with fast blind hops chosen by expected
entropy reduction; a greedy always-sensing walker is included as a baseline.
"""
from .backend import ACTIVE_BACKEND
from .engine import (EpisodeConfig, RunResult, TraceEntry, run_episode)
from .grid import GridSpec, Position, cell_center, distance, nearest_cell
from .montecarlo import (BatchConfig, BatchStats, SweepPoint, export_histogram,
                         run_batch, sweep_sensing_scale)
from .planner import StrategyParams, diffusion_budget, gamma_factor, tau_ballistic
from .sensor import Detection, Scan, SensorParams, detection_probability, generate_scan
from .threatmap import (ThreatMap, bayes_update, binary_entropy, entropy,
                        init_map, max_belief)

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND",
    "BatchConfig",
    "BatchStats",
    "Detection",
    "EpisodeConfig",
    "GridSpec",
    "Position",
    "RunResult",
    "Scan",
    "SensorParams",
    "StrategyParams",
    "SweepPoint",
    "ThreatMap",
    "TraceEntry",
    "bayes_update",
    "binary_entropy",
    "cell_center",
    "detection_probability",
    "diffusion_budget",
    "distance",
    "entropy",
    "export_histogram",
    "gamma_factor",
    "generate_scan",
    "init_map",
    "max_belief",
    "nearest_cell",
    "run_batch",
    "run_episode",
    "sweep_sensing_scale",
    "tau_ballistic",
    "__version__",
]
