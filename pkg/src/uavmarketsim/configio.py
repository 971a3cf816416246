"""JSON configuration: strict schema parsing, validation, and round-trip save.

Unknown fields are rejected so a typo in an adversary parameter cannot
silently fall back to a default. Parsing accumulates every problem it can
find before raising, and each failure mode has its own exception class so the
CLI can map it to an exit code.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .domain import (
    BehaviorKind,
    BehaviorProfile,
    EigenTrustParams,
    GridSize,
    Marketplace,
    MissionTemplate,
    Position,
    SimConfig,
    UavSpec,
    validate_marketplace,
    validate_mission,
    validate_mission_template,
)
from .engine import validate_run_inputs
from .reputation import strategy_names


class ConfigError(Exception):
    """Base for all configuration failures; carries the full problem list."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("\n".join(problems))


class ConfigNotFoundError(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class ConfigSchemaError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


@dataclass(frozen=True)
class ConfigFile:
    marketplaces: tuple[Marketplace, ...]
    missions: tuple[MissionTemplate, ...]
    simulation: SimConfig

    def marketplace(self) -> Marketplace:
        for m in self.marketplaces:
            if m.name == self.simulation.marketplace_name:
                return m
        raise KeyError(self.simulation.marketplace_name)

    def mission(self) -> MissionTemplate:
        for t in self.missions:
            if t.id == self.simulation.mission_id:
                return t
        raise KeyError(self.simulation.mission_id)


class _Parser:
    """Accumulates schema problems instead of failing on the first one."""

    def __init__(self) -> None:
        self.problems: list[str] = []

    def fail(self, path: str, message: str) -> None:
        self.problems.append(f"{path}: {message}")

    def obj(self, value, path: str, allowed: set[str], required: set[str]) -> dict | None:
        if not isinstance(value, dict):
            self.fail(path, "expected an object")
            return None
        for key in value:
            if key not in allowed:
                self.fail(path, f"unknown field {key!r}")
        for key in required:
            if key not in value:
                self.fail(path, f"missing field {key!r}")
        return value

    def string(self, value, path: str) -> str:
        if not isinstance(value, str):
            self.fail(path, "expected a string")
            return ""
        return value

    def integer(self, value, path: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, "expected an integer")
            return 0
        return value

    def number(self, value, path: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, "expected a number")
            return 0.0
        return float(value)

    def boolean(self, value, path: str) -> bool:
        if not isinstance(value, bool):
            self.fail(path, "expected a boolean")
            return False
        return value

    def position(self, value, path: str) -> Position:
        if not (isinstance(value, list) and len(value) == 2):
            self.fail(path, "expected [row, col]")
            return Position(0, 0)
        return Position(self.integer(value[0], f"{path}[0]"), self.integer(value[1], f"{path}[1]"))


def _parse_behavior(p: _Parser, value, path: str) -> BehaviorProfile:
    obj = p.obj(value, path, {"kind", "claim_rate", "max_claims"}, {"kind"})
    if obj is None:
        return BehaviorProfile.cooperative()
    kind = p.string(obj.get("kind", ""), f"{path}.kind")
    if kind == BehaviorKind.COOPERATIVE.value:
        for extra in ("claim_rate", "max_claims"):
            if extra in obj:
                p.fail(path, f"cooperative profile carries attack parameter {extra!r}")
        return BehaviorProfile.cooperative()
    if kind == BehaviorKind.BYZANTINE.value:
        rate = p.number(obj["claim_rate"], f"{path}.claim_rate") if "claim_rate" in obj else 0.01
        cap = p.integer(obj["max_claims"], f"{path}.max_claims") if "max_claims" in obj else 3
        return BehaviorProfile.byzantine(rate, cap)
    p.fail(f"{path}.kind", f"expected 'cooperative' or 'byzantine', got {kind!r}")
    return BehaviorProfile.cooperative()


def _parse_uav(p: _Parser, value, path: str) -> UavSpec:
    obj = p.obj(value, path, {"id", "speed", "sensor_range", "battery", "behavior"},
                {"id", "speed", "sensor_range", "battery", "behavior"})
    if obj is None:
        return UavSpec(0, 1, 0, 1, BehaviorProfile.cooperative())
    return UavSpec(
        id=p.integer(obj.get("id", 0), f"{path}.id"),
        speed=p.integer(obj.get("speed", 1), f"{path}.speed"),
        sensor_range=p.integer(obj.get("sensor_range", 0), f"{path}.sensor_range"),
        battery=p.integer(obj.get("battery", 1), f"{path}.battery"),
        behavior=_parse_behavior(p, obj.get("behavior", {}), f"{path}.behavior"),
    )


def _parse_marketplace(p: _Parser, value, path: str) -> Marketplace:
    obj = p.obj(value, path, {"name", "uavs"}, {"name", "uavs"})
    if obj is None:
        return Marketplace("", ())
    uavs_value = obj.get("uavs", [])
    if not isinstance(uavs_value, list):
        p.fail(f"{path}.uavs", "expected a list")
        uavs_value = []
    uavs = tuple(_parse_uav(p, u, f"{path}.uavs[{i}]") for i, u in enumerate(uavs_value))
    return Marketplace(name=p.string(obj.get("name", ""), f"{path}.name"), uavs=uavs)


def _parse_mission(p: _Parser, value, path: str) -> MissionTemplate:
    fields = {"id", "team_size", "forest_density", "fire_spread_period",
              "fire_origin", "grid_size", "target", "byzantine_collaboration"}
    obj = p.obj(value, path, fields, fields)
    if obj is None:
        return MissionTemplate("", 1, 0.0, 1, Position(0, 0), GridSize(1, 2), Position(0, 1), False)
    size_value = obj.get("grid_size", [1, 1])
    if not (isinstance(size_value, list) and len(size_value) == 2):
        p.fail(f"{path}.grid_size", "expected [rows, cols]")
        size = GridSize(1, 1)
    else:
        size = GridSize(p.integer(size_value[0], f"{path}.grid_size[0]"),
                        p.integer(size_value[1], f"{path}.grid_size[1]"))
    return MissionTemplate(
        id=p.string(obj.get("id", ""), f"{path}.id"),
        team_size=p.integer(obj.get("team_size", 1), f"{path}.team_size"),
        forest_density=p.number(obj.get("forest_density", 0.0), f"{path}.forest_density"),
        spread_period=p.integer(obj.get("fire_spread_period", 1), f"{path}.fire_spread_period"),
        fire_origin=p.position(obj.get("fire_origin", [0, 0]), f"{path}.fire_origin"),
        size=size,
        target=p.position(obj.get("target", [0, 0]), f"{path}.target"),
        collaboration=p.boolean(obj.get("byzantine_collaboration", False), f"{path}.byzantine_collaboration"),
    )


def _parse_simulation(p: _Parser, value, path: str) -> SimConfig:
    allowed = {"cycles", "constancy", "master_seed", "strategies", "marketplace",
               "mission", "eigentrust", "max_ticks_factor"}
    required = {"cycles", "constancy", "master_seed", "strategies", "marketplace", "mission"}
    obj = p.obj(value, path, allowed, required)
    if obj is None:
        return SimConfig(1, False, 0, (), "", "")
    strategies_value = obj.get("strategies", [])
    if not isinstance(strategies_value, list):
        p.fail(f"{path}.strategies", "expected a list of names")
        strategies_value = []
    strategies = tuple(p.string(s, f"{path}.strategies[{i}]") for i, s in enumerate(strategies_value))
    eigentrust = EigenTrustParams()
    if "eigentrust" in obj:
        et = p.obj(obj["eigentrust"], f"{path}.eigentrust", {"alpha", "epsilon", "max_iter"}, set())
        if et is not None:
            eigentrust = EigenTrustParams(
                alpha=p.number(et["alpha"], f"{path}.eigentrust.alpha") if "alpha" in et else 0.1,
                epsilon=p.number(et["epsilon"], f"{path}.eigentrust.epsilon") if "epsilon" in et else 1e-6,
                max_iter=p.integer(et["max_iter"], f"{path}.eigentrust.max_iter") if "max_iter" in et else 100,
            )
    return SimConfig(
        cycles=p.integer(obj.get("cycles", 1), f"{path}.cycles"),
        constancy=p.boolean(obj.get("constancy", False), f"{path}.constancy"),
        master_seed=p.integer(obj.get("master_seed", 0), f"{path}.master_seed"),
        strategies=strategies,
        marketplace_name=p.string(obj.get("marketplace", ""), f"{path}.marketplace"),
        mission_id=p.string(obj.get("mission", ""), f"{path}.mission"),
        eigentrust=eigentrust,
        max_ticks_factor=p.integer(obj.get("max_ticks_factor", 4), f"{path}.max_ticks_factor"),
    )


def parse_config(data: object) -> ConfigFile:
    """Schema-check a decoded JSON document, then validate it semantically."""
    p = _Parser()
    top = p.obj(data, "config", {"marketplaces", "missions", "simulation"},
                {"marketplaces", "missions", "simulation"})
    if top is None:
        raise ConfigSchemaError(p.problems)

    marketplaces_value = top.get("marketplaces", [])
    if not isinstance(marketplaces_value, list):
        p.fail("config.marketplaces", "expected a list")
        marketplaces_value = []
    missions_value = top.get("missions", [])
    if not isinstance(missions_value, list):
        p.fail("config.missions", "expected a list")
        missions_value = []

    marketplaces = tuple(_parse_marketplace(p, m, f"marketplaces[{i}]") for i, m in enumerate(marketplaces_value))
    missions = tuple(_parse_mission(p, t, f"missions[{i}]") for i, t in enumerate(missions_value))
    simulation = _parse_simulation(p, top.get("simulation", {}), "simulation")
    if p.problems:
        raise ConfigSchemaError(p.problems)

    config = ConfigFile(marketplaces, missions, simulation)
    problems = _semantic_problems(config)
    if problems:
        raise ConfigValidationError(problems)
    return config


def _semantic_problems(config: ConfigFile) -> list[str]:
    problems: list[str] = []
    if not config.marketplaces:
        problems.append("config: at least one marketplace is required")
    if not config.missions:
        problems.append("config: at least one mission is required")

    names = [m.name for m in config.marketplaces]
    if len(set(names)) != len(names):
        problems.append("config: duplicate marketplace names")
    ids = [t.id for t in config.missions]
    if len(set(ids)) != len(ids):
        problems.append("config: duplicate mission ids")

    for m in config.marketplaces:
        problems += validate_marketplace(m).violations
    for t in config.missions:
        problems += validate_mission_template(t).violations

    sim = config.simulation
    marketplace = next((m for m in config.marketplaces if m.name == sim.marketplace_name), None)
    mission = next((t for t in config.missions if t.id == sim.mission_id), None)
    if marketplace is None:
        problems.append(f"simulation: unknown marketplace reference {sim.marketplace_name!r}")
    if mission is None:
        problems.append(f"simulation: unknown mission reference {sim.mission_id!r}")

    if not sim.strategies:
        problems.append("simulation: strategies must not be empty")
    elif len(set(sim.strategies)) != len(sim.strategies):
        problems.append("simulation: strategy names must be unique")
    for name in sim.strategies:
        if name and name not in strategy_names():
            problems.append(f"simulation: unknown strategy {name!r}")
    if sim.cycles < 1:
        problems.append("simulation: cycles must be >= 1")
    if not 0 <= sim.master_seed < 2**64:
        problems.append("simulation: master_seed must fit in 64 bits")

    if marketplace is not None and mission is not None:
        # Only the referenced pair has to be runnable together.
        pair = validate_mission(mission, marketplace).violations
        problems += [v for v in pair if v not in problems]
        problems += [
            v for v in validate_run_inputs(sim, marketplace, mission)
            if v not in problems and v not in pair
        ]
    return problems


def load_config(path: str) -> ConfigFile:
    """Read, schema-check, and validate a configuration file."""
    if not os.path.exists(path):
        raise ConfigNotFoundError([f"config file not found: {path}"])
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError([f"malformed JSON in {path}: {exc}"]) from exc
    return parse_config(data)


def config_to_dict(config: ConfigFile) -> dict:
    """Serializable form; load_config(save_config(c)) reproduces c exactly."""

    def behavior(b: BehaviorProfile) -> dict:
        if b.is_byzantine:
            return {"kind": b.kind.value, "claim_rate": b.claim_rate, "max_claims": b.max_claims}
        return {"kind": b.kind.value}

    return {
        "marketplaces": [
            {
                "name": m.name,
                "uavs": [
                    {
                        "id": u.id,
                        "speed": u.speed,
                        "sensor_range": u.sensor_range,
                        "battery": u.battery,
                        "behavior": behavior(u.behavior),
                    }
                    for u in m.uavs
                ],
            }
            for m in config.marketplaces
        ],
        "missions": [
            {
                "id": t.id,
                "team_size": t.team_size,
                "forest_density": t.forest_density,
                "fire_spread_period": t.spread_period,
                "fire_origin": [t.fire_origin.row, t.fire_origin.col],
                "grid_size": [t.size.rows, t.size.cols],
                "target": [t.target.row, t.target.col],
                "byzantine_collaboration": t.collaboration,
            }
            for t in config.missions
        ],
        "simulation": {
            "cycles": config.simulation.cycles,
            "constancy": config.simulation.constancy,
            "master_seed": config.simulation.master_seed,
            "strategies": list(config.simulation.strategies),
            "marketplace": config.simulation.marketplace_name,
            "mission": config.simulation.mission_id,
            "eigentrust": {
                "alpha": config.simulation.eigentrust.alpha,
                "epsilon": config.simulation.eigentrust.epsilon,
                "max_iter": config.simulation.eigentrust.max_iter,
            },
            "max_ticks_factor": config.simulation.max_ticks_factor,
        },
    }


def save_config(config: ConfigFile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")
