"""Per-tick UAV behavior: band-partitioned sweep search, sensing, false claims,
claim verification, and battery accounting.

Agents are updated synchronously: claims emitted at tick k arrive in every
teammate's inbox at tick k+1. Within a tick an agent spends up to `speed`
sub-steps. A sweeping agent advances one sweep-order cell per sub-step (the
jump from a line's east edge to the next line's west edge counts as one
sub-step); a diverted agent walks single 4-neighbor cells toward the claimed
position, reducing the row difference first. Cooperative agents sense after
every sub-step and stop the moment they detect the target; Byzantine agents
never report it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .domain import GridSize, Position, UavSpec
from .rng import SplitMix64
from .world import GridWorld, chebyshev

CLAIM_RADIUS = 10  # Chebyshev radius of a false claim around its sender

# Event kinds appearing in per-UAV logs.
MOVE = "MOVE"
SENSE = "SENSE"
CLAIM_SENT = "CLAIM_SENT"
CLAIM_RECV = "CLAIM_RECV"
DIVERT = "DIVERT"
VERIFY_FAIL = "VERIFY_FAIL"
FLAG = "FLAG"
TARGET_FOUND = "TARGET_FOUND"
BATTERY_OUT = "BATTERY_OUT"


class AgentMode(Enum):
    SWEEPING = "sweeping"
    DIVERTING = "diverting"
    VERIFYING = "verifying"


@dataclass(frozen=True)
class TargetClaim:
    """A (possibly false) report that the target sits at `claimed_pos`."""

    sender: int
    claimed_pos: Position
    tick: int


@dataclass
class Event:
    tick: int
    uav_id: int
    kind: str
    detail: str


@dataclass
class AgentState:
    """Mutable per-mission state of one UAV."""

    spec: UavSpec
    pos: Position
    battery_left: int
    band: tuple[int, int]  # inclusive row interval owned by this agent
    grid_cols: int
    sweep_cursor: Position  # last sweep-order cell reached; resume point after a diversion
    mode: AgentMode = AgentMode.SWEEPING
    current_claim: TargetClaim | None = None
    claims_sent: int = 0
    flags: set[int] = field(default_factory=set)  # senders verified unreliable

    @property
    def active(self) -> bool:
        return self.battery_left > 0


def assign_bands(team: list[int], size: GridSize) -> dict[int, tuple[int, int]]:
    """Partition grid rows into contiguous bands, one per team member.

    Band sizes differ by at most one, with the larger bands first, and are
    assigned in ascending id order top to bottom. Each member later starts its
    sweep at the west edge of its band.
    """
    if not team:
        raise ValueError("team must not be empty")
    if len(team) > size.rows:
        raise ValueError(f"more UAVs ({len(team)}) than grid rows ({size.rows})")
    base, extra = divmod(size.rows, len(team))
    bands: dict[int, tuple[int, int]] = {}
    row = 0
    for i, uav_id in enumerate(sorted(team)):
        height = base + (1 if i < extra else 0)
        bands[uav_id] = (row, row + height - 1)
        row += height
    return bands


def plan_sweep_step(state: AgentState) -> Position:
    """Next sweep-order cell: east while possible, then the next line's west
    edge; the cursor holds at the band's last cell once the band is covered."""
    cur = state.sweep_cursor
    if cur.col < state.grid_cols - 1:
        return Position(cur.row, cur.col + 1)
    if cur.row < state.band[1]:
        return Position(cur.row + 1, 0)
    return cur


def sense(state: AgentState, grid: GridWorld) -> bool:
    """True iff the target is within this agent's sensor radius."""
    return chebyshev(state.pos, grid.target) <= state.spec.sensor_range


def maybe_emit_false_claim(
    state: AgentState, grid: GridWorld, tick: int, stream: SplitMix64
) -> TargetClaim | None:
    """Bernoulli false-claim emission for a Byzantine agent.

    While the agent is under its per-mission cap, one float is drawn per tick;
    on success one more draw indexes uniformly into the Chebyshev ball of
    radius 10 around the agent, clipped to the grid (a rectangle, enumerated
    row-major).
    """
    behavior = state.spec.behavior
    if not behavior.is_byzantine or not state.active:
        return None
    if state.claims_sent >= behavior.max_claims:
        return None
    if stream.next_float() >= behavior.claim_rate:
        return None
    rows, cols = grid.size.rows, grid.size.cols
    r_lo = max(0, state.pos.row - CLAIM_RADIUS)
    r_hi = min(rows - 1, state.pos.row + CLAIM_RADIUS)
    c_lo = max(0, state.pos.col - CLAIM_RADIUS)
    c_hi = min(cols - 1, state.pos.col + CLAIM_RADIUS)
    width = c_hi - c_lo + 1
    idx = stream.next_below((r_hi - r_lo + 1) * width)
    claimed = Position(r_lo + idx // width, c_lo + idx % width)
    state.claims_sent += 1
    return TargetClaim(state.spec.id, claimed, tick)


def handle_claim(state: AgentState, claim: TargetClaim) -> AgentState:
    """Divert a cooperative agent toward a received claim.

    Byzantine receivers, inactive agents, self-claims, and claims from senders
    already flagged unreliable are ignored. The sweep cursor is left untouched
    so the agent can resume where it left off. A later claim overrides an
    in-progress diversion.
    """
    if not state.active or state.spec.behavior.is_byzantine:
        return state
    if claim.sender == state.spec.id or claim.sender in state.flags:
        return state
    state.mode = AgentMode.DIVERTING
    state.current_claim = claim
    return state


class VerifyOutcome(Enum):
    TARGET_FOUND = "target_found"
    SENDER_FLAGGED = "sender_flagged"


def verify_claim(state: AgentState, claim: TargetClaim, grid: GridWorld) -> VerifyOutcome:
    """Resolve a verification once the agent is within sensor range of the
    claimed position: either the true target really is in range, or the sender
    is flagged unreliable and the agent resumes sweeping at its saved cursor."""
    if sense(state, grid):
        return VerifyOutcome.TARGET_FOUND
    state.flags.add(claim.sender)
    state.mode = AgentMode.SWEEPING
    state.current_claim = None
    return VerifyOutcome.SENDER_FLAGGED


def _step_toward(pos: Position, goal: Position) -> Position:
    # Single 4-neighbor move; row difference is reduced before column.
    if pos.row != goal.row:
        return Position(pos.row + (1 if goal.row > pos.row else -1), pos.col)
    if pos.col != goal.col:
        return Position(pos.row, pos.col + (1 if goal.col > pos.col else -1))
    return pos


def _fmt(pos: Position) -> str:
    return f"({pos.row},{pos.col})"


def tick_agent(
    state: AgentState,
    grid: GridWorld,
    inbox: list[TargetClaim],
    tick: int,
    claim_stream: SplitMix64,
) -> tuple[AgentState, list[TargetClaim], list[Event]]:
    """Run one tick for one agent; mutates and returns the state.

    Order within the tick: deliver the inbox, spend up to `speed` sub-steps
    (movement, sensing, verification), emit at most one false claim, then pay
    one tick of battery.
    """
    if not state.active:
        return state, [], []

    uid = state.spec.id
    events: list[Event] = []

    for claim in inbox:
        if claim.sender == uid:
            continue
        events.append(Event(tick, uid, CLAIM_RECV, f"from={claim.sender} claimed={_fmt(claim.claimed_pos)}"))
        handle_claim(state, claim)
        if state.mode is AgentMode.DIVERTING and state.current_claim is claim:
            events.append(Event(tick, uid, DIVERT, f"from={claim.sender} claimed={_fmt(claim.claimed_pos)}"))

    cooperative = not state.spec.behavior.is_byzantine
    detected = False

    for _ in range(state.spec.speed):
        if state.mode in (AgentMode.DIVERTING, AgentMode.VERIFYING):
            claim = state.current_claim
            assert claim is not None
            if chebyshev(state.pos, claim.claimed_pos) <= state.spec.sensor_range:
                # Arrived: verification consumes this sub-step.
                state.mode = AgentMode.VERIFYING
                outcome = verify_claim(state, claim, grid)
                if outcome is VerifyOutcome.TARGET_FOUND:
                    events.append(Event(tick, uid, SENSE, f"pos={_fmt(state.pos)} result=true"))
                    events.append(Event(tick, uid, TARGET_FOUND, f"pos={_fmt(grid.target)}"))
                    detected = True
                    break
                events.append(Event(tick, uid, VERIFY_FAIL, f"claimed={_fmt(claim.claimed_pos)} sender={claim.sender}"))
                events.append(Event(tick, uid, FLAG, f"uav={claim.sender}"))
                continue
            state.pos = _step_toward(state.pos, claim.claimed_pos)
            events.append(Event(tick, uid, MOVE, f"pos={_fmt(state.pos)}"))
        else:
            if state.pos != state.sweep_cursor:
                # Returning to the saved cursor after a diversion.
                state.pos = _step_toward(state.pos, state.sweep_cursor)
            else:
                nxt = plan_sweep_step(state)
                if nxt == state.pos:
                    break  # band fully covered; hold position
                state.pos = nxt
                state.sweep_cursor = nxt
            events.append(Event(tick, uid, MOVE, f"pos={_fmt(state.pos)}"))

        if cooperative and sense(state, grid):
            events.append(Event(tick, uid, SENSE, f"pos={_fmt(state.pos)} result=true"))
            events.append(Event(tick, uid, TARGET_FOUND, f"pos={_fmt(grid.target)}"))
            detected = True
            break

    emitted: list[TargetClaim] = []
    if not detected:
        claim = maybe_emit_false_claim(state, grid, tick, claim_stream)
        if claim is not None:
            emitted.append(claim)
            events.append(Event(tick, uid, CLAIM_SENT, f"pos={_fmt(state.pos)} claimed={_fmt(claim.claimed_pos)}"))

    state.battery_left -= 1
    if state.battery_left == 0:
        events.append(Event(tick, uid, BATTERY_OUT, f"pos={_fmt(state.pos)}"))
    return state, emitted, events
