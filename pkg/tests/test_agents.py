import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavmarketsim import (
    AgentMode,
    AgentState,
    BehaviorProfile,
    GridSize,
    Position,
    SplitMix64,
    TargetClaim,
    UavSpec,
    VerifyOutcome,
    assign_bands,
    generate_grid,
    handle_claim,
    maybe_emit_false_claim,
    plan_sweep_step,
    sense,
    tick_agent,
    verify_claim,
)
from uavmarketsim.agents import CLAIM_RADIUS, CLAIM_SENT, FLAG, MOVE, TARGET_FOUND, VERIFY_FAIL
from uavmarketsim.world import chebyshev


def make_agent(uav_id=0, byzantine=False, speed=1, sensor_range=0, battery=100,
               band=(0, 4), cols=5, pos=None, claim_rate=1.0, max_claims=3):
    behavior = (BehaviorProfile.byzantine(claim_rate, max_claims) if byzantine
                else BehaviorProfile.cooperative())
    spec = UavSpec(uav_id, speed, sensor_range, battery, behavior)
    start = pos or Position(band[0], 0)
    return AgentState(spec=spec, pos=start, battery_left=battery, band=band,
                      grid_cols=cols, sweep_cursor=start)


def empty_grid(rows=5, cols=5, target=Position(4, 4), origin=Position(0, 0), seed=1):
    return generate_grid(GridSize(rows, cols), 0.0, target, origin, seed)


class TestAssignBands:
    def test_even_split(self):
        assert assign_bands([0, 1, 2], GridSize(6, 6)) == {0: (0, 1), 1: (2, 3), 2: (4, 5)}

    def test_ceil_first_split(self):
        assert assign_bands([0, 1], GridSize(5, 6)) == {0: (0, 2), 1: (3, 4)}

    def test_single_uav_owns_all_rows(self):
        assert assign_bands([7], GridSize(9, 4)) == {7: (0, 8)}

    def test_more_uavs_than_rows_rejected(self):
        with pytest.raises(ValueError):
            assign_bands([0, 1, 2], GridSize(2, 5))

    def test_assignment_follows_id_order(self):
        bands = assign_bands([5, 2, 9], GridSize(6, 6))
        assert bands[2] == (0, 1) and bands[5] == (2, 3) and bands[9] == (4, 5)

    @given(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=30))
    @settings(max_examples=100, deadline=None)
    def test_partition_property(self, k, rows):
        if k > rows:
            return
        bands = assign_bands(list(range(k)), GridSize(rows, 5))
        covered = []
        for lo, hi in bands.values():
            covered.extend(range(lo, hi + 1))
        assert sorted(covered) == list(range(rows))
        sizes = [hi - lo + 1 for lo, hi in bands.values()]
        assert max(sizes) - min(sizes) <= 1


class TestPlanSweepStep:
    def test_west_to_east_step(self):
        agent = make_agent(band=(0, 1), cols=3, pos=Position(0, 0))
        assert plan_sweep_step(agent) == Position(0, 1)

    def test_line_complete_moves_to_next_row_west_edge(self):
        agent = make_agent(band=(0, 1), cols=3, pos=Position(0, 2))
        assert plan_sweep_step(agent) == Position(1, 0)

    def test_band_complete_holds(self):
        agent = make_agent(band=(0, 1), cols=3, pos=Position(1, 2))
        assert plan_sweep_step(agent) == Position(1, 2)


class TestSense:
    def test_on_target_zero_range(self):
        grid = empty_grid(target=Position(2, 2))
        agent = make_agent(pos=Position(2, 2))
        assert sense(agent, grid)

    def test_outside_radius(self):
        grid = empty_grid(target=Position(2, 2))
        agent = make_agent(pos=Position(0, 0), sensor_range=1)
        assert not sense(agent, grid)

    def test_boundary_inclusive(self):
        grid = empty_grid(target=Position(2, 2))
        agent = make_agent(pos=Position(0, 0), sensor_range=2)
        assert sense(agent, grid)


class TestMaybeEmitFalseClaim:
    def test_zero_rate_never_emits(self):
        grid = empty_grid()
        agent = make_agent(byzantine=True, claim_rate=0.0)
        stream = SplitMix64(1)
        assert all(maybe_emit_false_claim(agent, grid, t, stream) is None for t in range(1, 200))

    def test_cap_stops_emission(self):
        grid = empty_grid()
        agent = make_agent(byzantine=True, claim_rate=1.0, max_claims=2)
        stream = SplitMix64(1)
        claims = [maybe_emit_false_claim(agent, grid, t, stream) for t in range(1, 10)]
        assert sum(c is not None for c in claims) == 2
        assert agent.claims_sent == 2

    def test_corner_agent_uniform_over_clipped_ball(self):
        # 5x5 grid fits entirely inside the radius-10 ball, so all 25 cells
        # should be hit uniformly.
        from scipy.stats import chisquare

        grid = empty_grid()
        agent = make_agent(byzantine=True, claim_rate=1.0, max_claims=10**9, pos=Position(0, 0))
        stream = SplitMix64(99)
        counts = {}
        for t in range(10_000):
            claim = maybe_emit_false_claim(agent, grid, t, stream)
            counts[claim.claimed_pos] = counts.get(claim.claimed_pos, 0) + 1
        assert len(counts) == 25
        result = chisquare(list(counts.values()))
        assert result.pvalue > 0.01

    @given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=19),
           st.integers(min_value=0, max_value=19))
    @settings(max_examples=60, deadline=None)
    def test_claims_respect_radius_and_bounds(self, seed, row, col):
        grid = empty_grid(rows=20, cols=20, target=Position(19, 19))
        agent = make_agent(byzantine=True, claim_rate=1.0, pos=Position(row, col), max_claims=10)
        stream = SplitMix64(seed)
        for t in range(1, 11):
            claim = maybe_emit_false_claim(agent, grid, t, stream)
            assert claim is not None
            assert grid.size.contains(claim.claimed_pos)
            assert chebyshev(Position(row, col), claim.claimed_pos) <= CLAIM_RADIUS


class TestHandleClaim:
    def test_cooperative_diverts_and_preserves_cursor(self):
        agent = make_agent(pos=Position(1, 2))
        agent.sweep_cursor = Position(1, 2)
        claim = TargetClaim(9, Position(4, 4), 1)
        handle_claim(agent, claim)
        assert agent.mode is AgentMode.DIVERTING
        assert agent.current_claim == claim
        assert agent.sweep_cursor == Position(1, 2)

    def test_flagged_sender_ignored(self):
        agent = make_agent()
        agent.flags.add(9)
        handle_claim(agent, TargetClaim(9, Position(4, 4), 1))
        assert agent.mode is AgentMode.SWEEPING

    def test_byzantine_receiver_ignores(self):
        agent = make_agent(byzantine=True)
        handle_claim(agent, TargetClaim(9, Position(4, 4), 1))
        assert agent.mode is AgentMode.SWEEPING


class TestVerifyClaim:
    def test_false_claim_flags_sender(self):
        grid = empty_grid(target=Position(4, 4))
        agent = make_agent(pos=Position(0, 0))
        agent.mode = AgentMode.VERIFYING
        claim = TargetClaim(9, Position(0, 0), 1)
        assert verify_claim(agent, claim, grid) is VerifyOutcome.SENDER_FLAGGED
        assert 9 in agent.flags
        assert agent.mode is AgentMode.SWEEPING

    def test_claim_near_true_target_finds_it(self):
        grid = empty_grid(target=Position(2, 2))
        agent = make_agent(pos=Position(2, 3), sensor_range=1)
        agent.mode = AgentMode.VERIFYING
        assert verify_claim(agent, TargetClaim(9, Position(2, 3), 1), grid) is VerifyOutcome.TARGET_FOUND


class TestTickAgent:
    def test_speed_two_sweep_trace(self):
        grid = empty_grid(target=Position(4, 4))
        agent = make_agent(speed=2, band=(0, 0), cols=5)
        _, _, events = tick_agent(agent, grid, [], 1, SplitMix64(1))
        assert agent.pos == Position(0, 2)
        moves = [e.detail for e in events if e.kind == MOVE]
        assert moves == ["pos=(0,1)", "pos=(0,2)"]

    def test_detection_on_first_substep_when_landing_in_range(self):
        grid = empty_grid(target=Position(0, 1))
        agent = make_agent(sensor_range=1, band=(0, 0))
        _, _, events = tick_agent(agent, grid, [], 1, SplitMix64(1))
        assert any(e.kind == TARGET_FOUND for e in events)
        assert agent.pos == Position(0, 1)

    def test_speed_senses_each_substep(self):
        # Target on the second cell of the line: a speed-2 agent must not skip it.
        grid = empty_grid(target=Position(0, 2))
        agent = make_agent(speed=2, band=(0, 0), cols=5)
        _, _, events = tick_agent(agent, grid, [], 1, SplitMix64(1))
        assert [e.kind for e in events][-1] == TARGET_FOUND
        assert agent.pos == Position(0, 2)

    def test_battery_boundary_acts_then_deactivates(self):
        grid = empty_grid(target=Position(4, 4))
        agent = make_agent(battery=1)
        assert agent.active
        _, _, events = tick_agent(agent, grid, [], 1, SplitMix64(1))
        assert any(e.kind == MOVE for e in events)
        assert not agent.active
        assert tick_agent(agent, grid, [], 2, SplitMix64(1))[2] == []

    def test_byzantine_never_reports_target(self):
        grid = empty_grid(target=Position(0, 1))
        agent = make_agent(byzantine=True, sensor_range=2, claim_rate=0.0)
        for tick in range(1, 30):
            _, _, events = tick_agent(agent, grid, [], tick, SplitMix64(1))
            assert all(e.kind != TARGET_FOUND for e in events)

    def test_verify_fail_then_resume_trace(self):
        """Hand-executed state machine: divert at tick 2, arrive and flag at
        tick 5, walk back to the saved cursor, resume the sweep."""
        grid = empty_grid(rows=5, cols=5, target=Position(4, 4))
        agent = make_agent(speed=1, sensor_range=0, band=(0, 4), cols=5)
        stream = SplitMix64(1)

        tick_agent(agent, grid, [], 1, stream)
        assert agent.pos == Position(0, 1)

        claim = TargetClaim(9, Position(2, 0), 1)
        tick_agent(agent, grid, [claim], 2, stream)
        assert agent.mode is AgentMode.DIVERTING
        assert agent.pos == Position(1, 1)  # row difference reduced first

        tick_agent(agent, grid, [], 3, stream)
        assert agent.pos == Position(2, 1)
        tick_agent(agent, grid, [], 4, stream)
        assert agent.pos == Position(2, 0)

        _, _, events = tick_agent(agent, grid, [], 5, stream)
        kinds = [e.kind for e in events]
        assert kinds == [VERIFY_FAIL, FLAG]
        assert 9 in agent.flags
        assert agent.mode is AgentMode.SWEEPING
        assert agent.sweep_cursor == Position(0, 1)

        for tick, want in [(6, Position(1, 0)), (7, Position(0, 0)), (8, Position(0, 1))]:
            tick_agent(agent, grid, [], tick, stream)
            assert agent.pos == want
        tick_agent(agent, grid, [], 9, stream)
        assert agent.pos == Position(0, 2)  # sweep continues past the saved cursor

    def test_later_claim_overrides_diversion(self):
        grid = empty_grid(rows=5, cols=5, target=Position(4, 4))
        agent = make_agent(speed=1, band=(0, 4))
        first = TargetClaim(8, Position(4, 0), 1)
        second = TargetClaim(9, Position(0, 4), 1)
        tick_agent(agent, grid, [first, second], 2, SplitMix64(1))
        assert agent.current_claim == second

    def test_byzantine_emits_at_most_once_per_tick(self):
        grid = empty_grid()
        agent = make_agent(byzantine=True, claim_rate=1.0, max_claims=100)
        stream = SplitMix64(4)
        for tick in range(1, 20):
            _, emitted, events = tick_agent(agent, grid, [], tick, stream)
            assert len(emitted) == 1
            assert sum(1 for e in events if e.kind == CLAIM_SENT) == 1

    @given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=30))
    @settings(max_examples=40, deadline=None)
    def test_battery_bounds_substeps(self, speed, battery):
        grid = empty_grid(rows=8, cols=8, target=Position(7, 7))
        agent = make_agent(speed=speed, battery=battery, band=(0, 7), cols=8)
        moves = 0
        ticks = 0
        tick = 0
        while agent.active:
            tick += 1
            _, _, events = tick_agent(agent, grid, [], tick, SplitMix64(1))
            moves += sum(1 for e in events if e.kind == MOVE)
            ticks += 1
        assert ticks <= battery
        assert moves <= battery * speed
