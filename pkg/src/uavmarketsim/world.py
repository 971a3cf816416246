"""Grid world: seeded forest generation, deterministic fire spread, spatial queries."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .domain import GridSize, Position
from .rng import SplitMix64


class CellState(IntEnum):
    EMPTY = 0
    FOREST = 1
    BURNING = 2


@dataclass
class GridWorld:
    """Mutable world state for a single mission run.

    `cells` holds CellState codes. Burning is absorbing, and the target and
    fire origin are fixed for the whole mission.
    """

    size: GridSize
    cells: np.ndarray  # uint8, shape (rows, cols)
    target: Position
    fire_origin: Position
    spread_period: int

    def copy(self) -> "GridWorld":
        """Snapshot for read-only inspection."""
        return GridWorld(self.size, self.cells.copy(), self.target, self.fire_origin, self.spread_period)


def chebyshev(a: Position, b: Position) -> int:
    return max(abs(a.row - b.row), abs(a.col - b.col))


def generate_grid(
    size: GridSize,
    density: float,
    target: Position,
    fire_origin: Position,
    seed: int,
    spread_period: int = 1,
) -> GridWorld:
    """Sample a forest layout and ignite the origin.

    Stream contract (fixed so an independent reimplementation reproduces the
    layout): a SplitMix64 stream seeded with `seed` is consumed in row-major
    cell order, one `next_float` draw per cell including the origin; a cell is
    Forest iff its draw is < density, Empty otherwise. The origin is then
    overwritten to Burning. The target cell keeps its sampled state: the
    target occupies it but does not change its flammability.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError("density out of [0,1]")
    if not (size.contains(target) and size.contains(fire_origin)):
        raise ValueError("target and fire origin must lie inside the grid")
    if target == fire_origin:
        raise ValueError("target must not coincide with the fire origin")
    if spread_period < 1:
        raise ValueError("spread_period must be >= 1")

    stream = SplitMix64(seed)
    cells = np.empty((size.rows, size.cols), dtype=np.uint8)
    for r in range(size.rows):
        for c in range(size.cols):
            cells[r, c] = CellState.FOREST if stream.next_float() < density else CellState.EMPTY
    cells[fire_origin.row, fire_origin.col] = CellState.BURNING
    return GridWorld(size, cells, target, fire_origin, spread_period)


def step_fire(grid: GridWorld, tick: int) -> GridWorld:
    """Advance the fire at `tick`; in place, returning the same grid.

    On ticks that are multiples of the spread period, every Forest cell
    4-adjacent to a Burning cell ignites in one synchronous update. All other
    ticks leave the grid unchanged.
    """
    if tick % grid.spread_period != 0:
        return grid
    burning = grid.cells == CellState.BURNING
    near_fire = np.zeros_like(burning)
    near_fire[1:, :] |= burning[:-1, :]
    near_fire[:-1, :] |= burning[1:, :]
    near_fire[:, 1:] |= burning[:, :-1]
    near_fire[:, :-1] |= burning[:, 1:]
    grid.cells[(grid.cells == CellState.FOREST) & near_fire] = CellState.BURNING
    return grid


def fire_reached_target(grid: GridWorld) -> bool:
    return grid.cells[grid.target.row, grid.target.col] == CellState.BURNING


def grid_hash(grid: GridWorld) -> str:
    """Stable hex digest of the layout, for constancy checks in run manifests."""
    h = hashlib.sha256()
    h.update(f"{grid.size.rows}x{grid.size.cols};".encode())
    h.update(grid.cells.tobytes())
    return h.hexdigest()[:16]
