"""Square search lattice and coordinate conversions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class Position(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class GridSpec:
    """b x b lattice of cell centers, row-major indexed (x varies fastest)."""

    side_cells: int
    cell_pitch: float = 1.0
    origin: Position = Position(0.0, 0.0)

    def __post_init__(self) -> None:
        if self.side_cells < 2:
            raise ValueError("side_cells must be >= 2")
        if not (self.cell_pitch > 0.0 and math.isfinite(self.cell_pitch)):
            raise ValueError("cell_pitch must be positive and finite")

    @property
    def cell_count(self) -> int:
        return self.side_cells * self.side_cells


def cell_center(grid: GridSpec, index: int) -> Position:
    """Center of cell `index`."""
    if not 0 <= index < grid.cell_count:
        raise ValueError(f"cell index {index} outside [0, {grid.cell_count})")
    row, col = divmod(index, grid.side_cells)
    return Position(grid.origin.x + col * grid.cell_pitch,
                    grid.origin.y + row * grid.cell_pitch)


def nearest_cell(grid: GridSpec, p: Position | tuple[float, float]) -> int:
    """Index of the cell center nearest to `p`.

    Positions off the lattice clamp to the nearest edge cell; exact midpoints
    resolve to the smaller index.
    """
    col = _axis_cell(p[0] - grid.origin.x, grid.cell_pitch, grid.side_cells)
    row = _axis_cell(p[1] - grid.origin.y, grid.cell_pitch, grid.side_cells)
    return row * grid.side_cells + col


def _axis_cell(offset: float, pitch: float, side: int) -> int:
    # ceil(u - 1/2) rounds midpoints down, so distance ties pick the smaller index
    k = math.ceil(offset / pitch - 0.5)
    return min(max(k, 0), side - 1)


def distance(p: Position | tuple[float, float], q: Position | tuple[float, float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])
