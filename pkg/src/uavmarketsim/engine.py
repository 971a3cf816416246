"""Mission tick loop, episode execution, and the cycle scheduler.

Seeding layout: every cycle gets an environment seed (frozen to cycle 0 when
the configuration requests constancy) and every episode a simulation seed.
The forest layout and each Byzantine UAV's claim schedule derive from the
environment seed, so all strategies inside one cycle face byte-identical
grids and identical attacker timing; the simulation seed only feeds team
selection. Everything else is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import agents
from .agents import AgentState, Event, TargetClaim, assign_bands, tick_agent
from .domain import Marketplace, MissionTemplate, Position, SimConfig, byzantine_fraction, validate_mission
from .reputation import (
    FeedbackReport,
    TeamStrategy,
    TrustState,
    apply_feedback,
    generate_feedback,
    make_strategy,
    strategy_names,
)
from .rng import PURPOSE_CLAIMS, PURPOSE_ENV, PURPOSE_GRID, PURPOSE_SELECT, PURPOSE_SIM, SplitMix64, derive_seed
from .world import generate_grid, fire_reached_target, grid_hash, step_fire


class MissionOutcome(str, Enum):
    TARGET_FOUND = "TargetFound"
    FIRE_REACHED_TARGET = "FireReachedTarget"
    BATTERY_EXHAUSTED = "BatteryExhausted"
    TICK_LIMIT = "TickLimit"


@dataclass
class MissionRecord:
    mission_id: str
    completion_ticks: int
    outcome: MissionOutcome
    adversarial: dict[int, bool]  # per team member: attacked during this episode
    events: list[Event]
    grid_hash: str
    final_states: dict[int, AgentState]


@dataclass
class EpisodeResult:
    cycle_index: int
    episode_index: int
    strategy_name: str
    marketplace_name: str
    byzantine_pct: float
    team: list[int]
    reputation_before: dict[int, float]
    reputation_after: dict[int, float]
    record: MissionRecord
    feedback: list[FeedbackReport] = field(default_factory=list)


def run_mission(
    marketplace: Marketplace,
    mission: MissionTemplate,
    team: list[int],
    env_seed: int,
    sim_seed: int,
    max_ticks_factor: int = 4,
) -> MissionRecord:
    """Execute one mission for a fixed team; deterministic given the seeds.

    The tick loop delivers the previous tick's claims, advances every active
    agent in marketplace order, then steps the fire. Termination is checked in
    fixed priority order: target found by a cooperative agent, fire reaching
    the target, every cooperative agent out of battery (vacuously true for an
    all-Byzantine team), then the tick cap of max_ticks_factor * rows * cols.

    Mission dynamics draw only from env_seed-derived streams (grid layout and
    per-UAV claim schedules), so within a cycle every strategy faces the same
    world and the same attack timing; sim_seed is reserved for selection-side
    randomness and is unused here.
    """
    report = validate_mission(mission, marketplace)
    if not report.ok:
        raise ValueError("invalid mission: " + "; ".join(report.violations))
    if len(team) != mission.team_size:
        raise ValueError(f"team has {len(team)} members, mission wants {mission.team_size}")
    if len(set(team)) != len(team):
        raise ValueError("team contains duplicate ids")

    grid = generate_grid(
        mission.size,
        mission.forest_density,
        mission.target,
        mission.fire_origin,
        derive_seed(env_seed, 0, 0, PURPOSE_GRID),
        mission.spread_period,
    )
    layout_hash = grid_hash(grid)

    bands = assign_bands(team, mission.size)
    team_specs = [marketplace.spec(uav_id) for uav_id in team]
    tick_order = [u.id for u in marketplace.uavs if u.id in set(team)]

    states: dict[int, AgentState] = {}
    claim_streams: dict[int, SplitMix64] = {}
    for spec in team_specs:
        start = Position(bands[spec.id][0], 0)
        states[spec.id] = AgentState(
            spec=spec,
            pos=start,
            battery_left=spec.battery,
            band=bands[spec.id],
            grid_cols=mission.size.cols,
            sweep_cursor=start,
        )
        claim_streams[spec.id] = SplitMix64(derive_seed(env_seed, spec.id, 0, PURPOSE_CLAIMS))

    cooperative_ids = [s.id for s in team_specs if not s.behavior.is_byzantine]
    max_ticks = max_ticks_factor * mission.size.rows * mission.size.cols
    all_events: list[Event] = []
    inbox: list[TargetClaim] = []

    outcome = MissionOutcome.TICK_LIMIT
    completion = max_ticks
    for tick in range(1, max_ticks + 1):
        outbox: list[TargetClaim] = []
        found = False
        for uav_id in tick_order:
            state = states[uav_id]
            if not state.active:
                continue
            _, emitted, events = tick_agent(state, grid, inbox, tick, claim_streams[uav_id])
            outbox.extend(emitted)
            all_events.extend(events)
            if any(ev.kind == agents.TARGET_FOUND for ev in events):
                found = True
        step_fire(grid, tick)
        inbox = outbox

        if found:
            outcome, completion = MissionOutcome.TARGET_FOUND, tick
            break
        if fire_reached_target(grid):
            outcome, completion = MissionOutcome.FIRE_REACHED_TARGET, tick
            break
        if all(not states[uav_id].active for uav_id in cooperative_ids):
            outcome, completion = MissionOutcome.BATTERY_EXHAUSTED, tick
            break

    adversarial = {uav_id: states[uav_id].claims_sent > 0 for uav_id in team}
    return MissionRecord(
        mission_id=mission.id,
        completion_ticks=completion,
        outcome=outcome,
        adversarial=adversarial,
        events=all_events,
        grid_hash=layout_hash,
        final_states=states,
    )


def run_episode(
    strategy: TeamStrategy | str,
    marketplace: Marketplace,
    mission: MissionTemplate,
    state: TrustState,
    env_seed: int,
    sim_seed: int,
    max_ticks_factor: int = 4,
    cycle_index: int = 0,
    episode_index: int = 0,
) -> tuple[EpisodeResult, TrustState]:
    """Select a team, fly the mission, collect feedback, update trust."""
    if isinstance(strategy, str):
        strategy = make_strategy(strategy)
    if state.strategy_name != strategy.name:
        raise ValueError(f"trust state belongs to {state.strategy_name!r}, not {strategy.name!r}")

    select_stream = SplitMix64(derive_seed(sim_seed, 0, 0, PURPOSE_SELECT))
    team = strategy.select(marketplace, state, mission.team_size, select_stream)
    scores_before = strategy.scores(marketplace, state)

    record = run_mission(marketplace, mission, team, env_seed, sim_seed, max_ticks_factor)

    team_specs = [marketplace.spec(uav_id) for uav_id in team]
    reports: list[FeedbackReport] = []
    for spec in sorted(team_specs, key=lambda s: marketplace.index_of(s.id)):
        reports.extend(generate_feedback(record.final_states[spec.id], team_specs, mission))
    apply_feedback(state, reports)
    scores_after = strategy.scores(marketplace, state)

    # Dishonest feedback (self-promotion, clique scoring) also marks a UAV adversarial.
    for spec in team_specs:
        if spec.behavior.is_byzantine:
            record.adversarial[spec.id] = True

    result = EpisodeResult(
        cycle_index=cycle_index,
        episode_index=episode_index,
        strategy_name=strategy.name,
        marketplace_name=marketplace.name,
        byzantine_pct=100.0 * byzantine_fraction(marketplace),
        team=list(team),
        reputation_before={uav_id: scores_before[uav_id] for uav_id in team},
        reputation_after={uav_id: scores_after[uav_id] for uav_id in team},
        record=record,
        feedback=reports,
    )
    return result, state


def validate_run_inputs(config: SimConfig, marketplace: Marketplace, mission: MissionTemplate) -> list[str]:
    """Everything that must hold before a batch run starts."""
    from .domain import validate_marketplace  # local import keeps module deps one-way

    problems = list(validate_marketplace(marketplace).violations)
    problems += validate_mission(mission, marketplace).violations
    if mission.team_size > mission.size.rows:
        problems.append(f"mission {mission.id!r}: team size exceeds grid rows")
    if config.cycles < 1:
        problems.append("cycles must be >= 1")
    if not config.strategies:
        problems.append("strategies must not be empty")
    if len(set(config.strategies)) != len(config.strategies):
        problems.append("strategy names must be unique")
    for name in config.strategies:
        if name not in strategy_names():
            problems.append(f"unknown strategy {name!r}")
    if not 0 <= config.master_seed < 2**64:
        problems.append("master_seed must fit in 64 bits")
    if config.max_ticks_factor < 1:
        problems.append("max_ticks_factor must be >= 1")
    et = config.eigentrust
    if not 0.0 < et.alpha <= 1.0:
        problems.append("eigentrust alpha must be in (0, 1]")
    if et.epsilon <= 0.0:
        problems.append("eigentrust epsilon must be positive")
    if et.max_iter < 1:
        problems.append("eigentrust max_iter must be >= 1")
    return problems


def run_cycles(config: SimConfig, marketplace: Marketplace, mission: MissionTemplate) -> list[EpisodeResult]:
    """Run the full experiment: each cycle applies every strategy once, in the
    declared order, under identical environmental conditions.

    The environment seed advances per cycle unless constancy is requested, in
    which case every cycle replays cycle 0's environment. Per-strategy trust
    states persist across cycles.
    """
    problems = validate_run_inputs(config, marketplace, mission)
    if problems:
        raise ValueError("invalid run configuration: " + "; ".join(problems))

    strategies = [make_strategy(name, config.eigentrust) for name in config.strategies]
    states = {name: TrustState.fresh(name, marketplace) for name in config.strategies}

    results: list[EpisodeResult] = []
    for cycle in range(config.cycles):
        env_cycle = 0 if config.constancy else cycle
        env_seed = derive_seed(config.master_seed, env_cycle, 0, PURPOSE_ENV)
        for episode, strategy in enumerate(strategies):
            sim_seed = derive_seed(config.master_seed, cycle, episode, PURPOSE_SIM)
            result, _ = run_episode(
                strategy,
                marketplace,
                mission,
                states[strategy.name],
                env_seed,
                sim_seed,
                config.max_ticks_factor,
                cycle_index=cycle,
                episode_index=episode,
            )
            results.append(result)
    return results
