"""Grid generation and fire spread, checked against independent oracles:
a from-scratch SplitMix64 transcription for layouts and BFS for burn times."""

import collections

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavmarketsim import (
    CellState,
    GridSize,
    Position,
    chebyshev,
    fire_reached_target,
    generate_grid,
    grid_hash,
    step_fire,
)

MASK = (1 << 64) - 1


def reference_layout(rows, cols, density, seed):
    """Independent reimplementation of the declared generation stream."""
    state = seed & MASK
    cells = []
    for _ in range(rows * cols):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = ((state ^ (state >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        word = z ^ (z >> 31)
        cells.append(1 if (word >> 11) * 2.0**-53 < density else 0)
    return np.array(cells, dtype=np.uint8).reshape(rows, cols)


def bfs_burn_ticks(grid):
    """First-burn tick per cell: spread_period * 4-neighbor BFS distance from
    the origin through Forest cells; None when unreachable."""
    rows, cols = grid.size.rows, grid.size.cols
    dist = {(grid.fire_origin.row, grid.fire_origin.col): 0}
    queue = collections.deque([(grid.fire_origin.row, grid.fire_origin.col)])
    while queue:
        r, c = queue.popleft()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and (nr, nc) not in dist:
                if grid.cells[nr, nc] == CellState.FOREST:
                    dist[(nr, nc)] = dist[(r, c)] + 1
                    queue.append((nr, nc))
    return {cell: grid.spread_period * d for cell, d in dist.items()}


def full_forest(rows, cols, origin, spread_period=1):
    g = generate_grid(GridSize(rows, cols), 1.0, Position(rows - 1, cols - 1), origin, seed=1,
                      spread_period=spread_period)
    return g


class TestGenerateGrid:
    def test_zero_density_has_no_forest(self):
        g = generate_grid(GridSize(8, 8), 0.0, Position(3, 3), Position(0, 0), seed=9)
        assert (g.cells == CellState.FOREST).sum() == 0
        assert g.cells[0, 0] == CellState.BURNING

    def test_full_density_all_forest_except_origin(self):
        g = generate_grid(GridSize(8, 8), 1.0, Position(3, 3), Position(0, 0), seed=9)
        assert (g.cells == CellState.FOREST).sum() == 63
        assert g.cells[0, 0] == CellState.BURNING

    def test_half_density_fraction_and_exact_layout(self):
        g = generate_grid(GridSize(20, 20), 0.5, Position(10, 10), Position(0, 0), seed=77)
        fraction = (g.cells == CellState.FOREST).sum() / 400
        assert 0.35 <= fraction <= 0.65
        want = reference_layout(20, 20, 0.5, 77)
        want[0, 0] = CellState.BURNING
        assert np.array_equal(g.cells, want)

    def test_same_seed_same_grid(self):
        a = generate_grid(GridSize(9, 7), 0.4, Position(5, 5), Position(1, 1), seed=3)
        b = generate_grid(GridSize(9, 7), 0.4, Position(5, 5), Position(1, 1), seed=3)
        assert np.array_equal(a.cells, b.cells)
        assert grid_hash(a) == grid_hash(b)

    def test_invalid_positions_raise(self):
        with pytest.raises(ValueError):
            generate_grid(GridSize(5, 5), 0.5, Position(5, 0), Position(0, 0), seed=1)
        with pytest.raises(ValueError):
            generate_grid(GridSize(5, 5), 0.5, Position(2, 2), Position(2, 2), seed=1)


class TestStepFire:
    def test_one_step_burns_orthogonal_neighbors(self):
        g = full_forest(5, 5, Position(2, 2))
        step_fire(g, 1)
        burning = {(r, c) for r in range(5) for c in range(5) if g.cells[r, c] == CellState.BURNING}
        assert burning == {(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)}

    def test_off_period_tick_changes_nothing(self):
        g = full_forest(5, 5, Position(2, 2), spread_period=3)
        before = g.cells.copy()
        step_fire(g, 2)
        assert np.array_equal(g.cells, before)

    def test_first_burn_tick_is_manhattan_distance_on_full_forest(self):
        period = 2
        g = full_forest(7, 7, Position(3, 3), spread_period=period)
        first_burn = {}
        for tick in range(1, 7 * 7 * period):
            step_fire(g, tick)
            for r in range(7):
                for c in range(7):
                    if g.cells[r, c] == CellState.BURNING and (r, c) not in first_burn:
                        first_burn[(r, c)] = tick
        for (r, c), tick in first_burn.items():
            if (r, c) == (3, 3):
                continue
            assert tick == period * (abs(r - 3) + abs(c - 3))

    def test_burning_is_absorbing_and_counts_conserved(self):
        g = generate_grid(GridSize(12, 12), 0.7, Position(6, 6), Position(0, 0), seed=5)
        burned = g.cells == CellState.BURNING
        for tick in range(1, 40):
            step_fire(g, tick)
            now = g.cells == CellState.BURNING
            assert (burned & ~now).sum() == 0  # monotone
            burned = now
            states = (g.cells == CellState.EMPTY).sum() + (g.cells == CellState.FOREST).sum() + now.sum()
            assert states == 144


class TestBfsOracle:
    @given(st.integers(min_value=0, max_value=2**32), st.floats(min_value=0.0, max_value=1.0),
           st.integers(min_value=1, max_value=3))
    @settings(max_examples=30, deadline=None)
    def test_first_burn_matches_bfs(self, seed, density, period):
        g = generate_grid(GridSize(12, 12), density, Position(11, 11), Position(2, 3), seed=seed,
                          spread_period=period)
        expected = bfs_burn_ticks(g)
        first_burn = {}
        tick = 0
        while True:
            tick += period
            before = (g.cells == CellState.BURNING).sum()
            step_fire(g, tick)
            for r in range(12):
                for c in range(12):
                    if g.cells[r, c] == CellState.BURNING and (r, c) not in first_burn:
                        first_burn[(r, c)] = tick
            if (g.cells == CellState.BURNING).sum() == before:
                break
        first_burn[(2, 3)] = 0
        assert first_burn == {cell: t for cell, t in expected.items()}


class TestFireReachedTarget:
    def test_fresh_grid_not_reached(self):
        g = full_forest(5, 5, Position(0, 0))
        assert not fire_reached_target(g)

    def test_reached_after_front_crosses(self):
        g = full_forest(5, 5, Position(0, 0))
        target_tick = bfs_burn_ticks(g)[(4, 4)]
        for tick in range(1, target_tick + 1):
            step_fire(g, tick)
        assert fire_reached_target(g)

    def test_never_reached_without_forest(self):
        g = generate_grid(GridSize(5, 5), 0.0, Position(4, 4), Position(0, 0), seed=2)
        for tick in range(1, 100):
            step_fire(g, tick)
        assert not fire_reached_target(g)


class TestChebyshev:
    @pytest.mark.parametrize(
        "a,b,want",
        [
            (Position(0, 0), Position(0, 0), 0),
            (Position(2, 3), Position(5, 3), 3),
            (Position(1, 1), Position(4, 5), 4),
        ],
    )
    def test_examples(self, a, b, want):
        assert chebyshev(a, b) == want
        assert chebyshev(b, a) == want
