"""Deterministic simulator of UAV marketplace search missions under Byzantine
adversaries, for comparing team-formation strategies in batch experiments."""

from .agents import (
    AgentMode,
    AgentState,
    Event,
    TargetClaim,
    VerifyOutcome,
    assign_bands,
    handle_claim,
    maybe_emit_false_claim,
    plan_sweep_step,
    sense,
    tick_agent,
    verify_claim,
)
from .configio import (
    ConfigError,
    ConfigFile,
    ConfigNotFoundError,
    ConfigSchemaError,
    ConfigSyntaxError,
    ConfigValidationError,
    config_to_dict,
    load_config,
    parse_config,
    save_config,
)
from .domain import (
    BehaviorKind,
    BehaviorProfile,
    Difficulty,
    EigenTrustParams,
    GridSize,
    Marketplace,
    MissionTemplate,
    Position,
    SimConfig,
    UavSpec,
    ValidationReport,
    byzantine_fraction,
    difficulty_label,
    validate_marketplace,
    validate_mission,
    validate_mission_template,
)
from .engine import (
    EpisodeResult,
    MissionOutcome,
    MissionRecord,
    run_cycles,
    run_episode,
    run_mission,
)
from .export import (
    CSV_HEADER,
    StrategySummary,
    export_csv,
    format_summary_table,
    summarize,
    write_manifest,
    write_summary,
    write_uav_logs,
)
from .reputation import (
    DirectAverageRanking,
    EigenTrustRanking,
    FeedbackReport,
    RandomSelection,
    TrustState,
    apply_feedback,
    eigentrust_global,
    generate_feedback,
    make_strategy,
    mean_received_scores,
    normalize_local_trust,
    register_strategy,
    select_team,
    strategy_names,
    uniform_pretrust,
)
from .rng import SplitMix64, derive_seed
from .world import CellState, GridWorld, chebyshev, fire_reached_target, generate_grid, grid_hash, step_fire

__version__ = "0.1.0"
