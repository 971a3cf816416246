"""Core data model: marketplaces, UAVs, missions, and simulation configuration.

All types here are immutable after construction and safe to share across
concurrently running episodes. Validation never raises; it returns a report
listing every violated invariant so callers can print all problems at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class BehaviorKind(str, Enum):
    COOPERATIVE = "cooperative"
    BYZANTINE = "byzantine"


@dataclass(frozen=True)
class BehaviorProfile:
    """Cooperative or Byzantine conduct, with the attack knobs for the latter."""

    kind: BehaviorKind
    claim_rate: float = 0.0  # per-tick probability of a false target claim
    max_claims: int = 0  # per-mission cap on emitted claims

    @staticmethod
    def cooperative() -> "BehaviorProfile":
        return BehaviorProfile(BehaviorKind.COOPERATIVE)

    @staticmethod
    def byzantine(claim_rate: float = 0.01, max_claims: int = 3) -> "BehaviorProfile":
        return BehaviorProfile(BehaviorKind.BYZANTINE, claim_rate, max_claims)

    @property
    def is_byzantine(self) -> bool:
        return self.kind is BehaviorKind.BYZANTINE


@dataclass(frozen=True)
class UavSpec:
    id: int
    speed: int  # cells per tick
    sensor_range: int  # Chebyshev radius, cells
    battery: int  # ticks of activity
    behavior: BehaviorProfile


@dataclass(frozen=True)
class Marketplace:
    """A fixed pool of UAVs; membership never changes during a simulation."""

    name: str
    uavs: tuple[UavSpec, ...]

    def ids(self) -> tuple[int, ...]:
        return tuple(u.id for u in self.uavs)

    def spec(self, uav_id: int) -> UavSpec:
        for u in self.uavs:
            if u.id == uav_id:
                return u
        raise KeyError(f"no UAV with id {uav_id} in marketplace {self.name!r}")

    def index_of(self, uav_id: int) -> int:
        for i, u in enumerate(self.uavs):
            if u.id == uav_id:
                return i
        raise KeyError(f"no UAV with id {uav_id} in marketplace {self.name!r}")


@dataclass(frozen=True)
class Position:
    row: int
    col: int


@dataclass(frozen=True)
class GridSize:
    rows: int
    cols: int

    def contains(self, pos: Position) -> bool:
        return 0 <= pos.row < self.rows and 0 <= pos.col < self.cols


@dataclass(frozen=True)
class MissionTemplate:
    """One search-and-locate mission: who flies, where, and how the fire moves."""

    id: str
    team_size: int
    forest_density: float  # probability a cell is forest, in [0, 1]
    spread_period: int  # ticks between fire-spread steps
    fire_origin: Position
    size: GridSize
    target: Position  # stationary human target
    collaboration: bool  # Byzantine raters coordinate their feedback when True


@dataclass(frozen=True)
class EigenTrustParams:
    alpha: float = 0.1  # damping toward the pre-trust distribution
    epsilon: float = 1e-6  # L1 convergence threshold
    max_iter: int = 100


@dataclass(frozen=True)
class SimConfig:
    cycles: int
    constancy: bool  # freeze the environment seed across cycles
    master_seed: int
    strategies: tuple[str, ...]
    marketplace_name: str
    mission_id: str
    eigentrust: EigenTrustParams = EigenTrustParams()
    max_ticks_factor: int = 4  # mission tick cap = factor * rows * cols


class Difficulty(str, Enum):
    EASY = "Easy"
    MEDIUM = "Medium"
    HARD = "Hard"


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)


def validate_marketplace(m: Marketplace) -> ValidationReport:
    """Report every violated marketplace invariant; an empty report means valid."""
    report = ValidationReport()
    if not m.uavs:
        report.add(f"marketplace {m.name!r}: empty population")
    seen: set[int] = set()
    for u in m.uavs:
        tag = f"marketplace {m.name!r} uav {u.id}"
        if u.id in seen:
            report.add(f"{tag}: duplicate id")
        seen.add(u.id)
        if u.id < 0:
            report.add(f"{tag}: id must be non-negative")
        if u.speed < 1:
            report.add(f"{tag}: speed must be >= 1")
        if u.battery < 1:
            report.add(f"{tag}: battery must be >= 1")
        if u.sensor_range < 0:
            report.add(f"{tag}: sensor_range must be >= 0")
        b = u.behavior
        if not 0.0 <= b.claim_rate <= 1.0:
            report.add(f"{tag}: claim_rate out of [0,1]")
        if b.max_claims < 0:
            report.add(f"{tag}: max_claims must be >= 0")
        if not b.is_byzantine and (b.claim_rate != 0.0 or b.max_claims != 0):
            report.add(f"{tag}: cooperative profile carries attack parameters")
    return report


def byzantine_fraction(m: Marketplace) -> float:
    """Proportion of Byzantine members, in [0, 1]."""
    if not m.uavs:
        return 0.0
    return sum(1 for u in m.uavs if u.behavior.is_byzantine) / len(m.uavs)


def difficulty_label(fraction: float) -> Difficulty:
    """Classify a Byzantine proportion. Informational only; never affects dynamics.

    Thresholds: < 0.2 Easy, 0.2..0.4 Medium, > 0.4 Hard.
    """
    if fraction < 0.2:
        return Difficulty.EASY
    if fraction <= 0.4:
        return Difficulty.MEDIUM
    return Difficulty.HARD


def validate_mission_template(t: MissionTemplate) -> ValidationReport:
    """Check the invariants a mission must satisfy on its own."""
    report = ValidationReport()
    tag = f"mission {t.id!r}"
    if t.team_size < 1:
        report.add(f"{tag}: team size must be >= 1")
    if not 0.0 <= t.forest_density <= 1.0:
        report.add(f"{tag}: density out of [0,1]")
    if t.spread_period < 1:
        report.add(f"{tag}: fire spread period must be >= 1")
    if t.size.rows < 1 or t.size.cols < 1:
        report.add(f"{tag}: grid size must be positive in both dimensions")
    else:
        if not t.size.contains(t.fire_origin):
            report.add(f"{tag}: fire origin outside grid")
        if not t.size.contains(t.target):
            report.add(f"{tag}: target outside grid")
    if t.fire_origin == t.target:
        report.add(f"{tag}: target inside fire origin")
    return report


def validate_mission(t: MissionTemplate, m: Marketplace) -> ValidationReport:
    """Validate a mission against the marketplace it will draw a team from."""
    report = validate_mission_template(t)
    if t.team_size > len(m.uavs):
        report.add(f"mission {t.id!r}: team larger than marketplace {m.name!r}")
    return report
