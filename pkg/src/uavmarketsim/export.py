"""Structured output: per-strategy CSV files, per-UAV logs, the run manifest,
and summary statistics.

Formats are pinned byte-exactly (column order, decimal places, separators) so
that reruns of the same configuration produce identical files.
"""

from __future__ import annotations

import csv
import os
import statistics
from dataclasses import dataclass

from .engine import EpisodeResult, MissionOutcome

CSV_HEADER = [
    "cycle",
    "episode",
    "strategy",
    "marketplace",
    "byzantine_pct",
    "mission_id",
    "outcome",
    "completion_ticks",
    "team",
    "adversarial_flags",
    "reputation_before",
    "reputation_after",
]

SUMMARY_HEADER = [
    "strategy",
    "episodes",
    "success_rate",
    "mean_ticks",
    "median_ticks",
    "mean_byzantine_per_team",
    "mean_rep_change_byzantine",
    "mean_rep_change_cooperative",
]


def _csv_row(r: EpisodeResult) -> list[str]:
    team = ";".join(str(uav_id) for uav_id in r.team)
    flags = ";".join(f"{uav_id}:{1 if r.record.adversarial.get(uav_id) else 0}" for uav_id in r.team)
    before = ";".join(f"{uav_id}:{r.reputation_before[uav_id]:.6f}" for uav_id in r.team)
    after = ";".join(f"{uav_id}:{r.reputation_after[uav_id]:.6f}" for uav_id in r.team)
    return [
        str(r.cycle_index),
        str(r.episode_index),
        r.strategy_name,
        r.marketplace_name,
        f"{r.byzantine_pct:.2f}",
        r.record.mission_id,
        r.record.outcome.value,
        str(r.record.completion_ticks),
        team,
        flags,
        before,
        after,
    ]


def export_csv(results: list[EpisodeResult], out_dir: str, strategies: list[str] | None = None) -> list[str]:
    """Write one `<strategy>.csv` per strategy, rows in (cycle, episode) order.

    `strategies` pins which files exist (so an empty result list still yields
    header-only files for every configured strategy); by default the strategy
    set is taken from the results in order of first appearance.
    """
    if strategies is None:
        strategies = []
        for r in results:
            if r.strategy_name not in strategies:
                strategies.append(r.strategy_name)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name in strategies:
        rows = sorted(
            (r for r in results if r.strategy_name == name),
            key=lambda r: (r.cycle_index, r.episode_index),
        )
        path = os.path.join(out_dir, f"{name}.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)  # RFC-4180: CRLF rows, minimal quoting
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow(_csv_row(r))
        written.append(path)
    return written


def write_uav_logs(results: list[EpisodeResult], out_dir: str) -> list[str]:
    """One log file per team member per episode, tab-separated, in tick order."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for r in results:
        by_uav: dict[int, list] = {uav_id: [] for uav_id in r.team}
        for ev in r.record.events:
            by_uav[ev.uav_id].append(ev)
        for uav_id in r.team:
            path = os.path.join(out_dir, f"cycle{r.cycle_index}_ep{r.episode_index}_uav{uav_id}.log")
            with open(path, "w", encoding="utf-8") as fh:
                for ev in by_uav[uav_id]:
                    fh.write(f"{ev.tick}\t{ev.uav_id}\t{ev.kind}\t{ev.detail}\n")
            written.append(path)
    return written


def write_manifest(results: list[EpisodeResult], out_dir: str) -> str:
    """Per-episode manifest, including the grid hash used by constancy checks."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "run_manifest.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cycle\tepisode\tstrategy\tmission_id\tgrid_hash\toutcome\tcompletion_ticks\n")
        for r in results:
            fh.write(
                f"{r.cycle_index}\t{r.episode_index}\t{r.strategy_name}\t{r.record.mission_id}"
                f"\t{r.record.grid_hash}\t{r.record.outcome.value}\t{r.record.completion_ticks}\n"
            )
    return path


@dataclass
class StrategySummary:
    strategy: str
    episodes: int
    success_rate: float
    mean_ticks: float | None  # over successful episodes; None when there were none
    median_ticks: float | None
    mean_byzantine_per_team: float
    mean_rep_change_byzantine: float | None
    mean_rep_change_cooperative: float | None


def _parse_pairs(cell: str) -> dict[int, float]:
    if not cell:
        return {}
    out = {}
    for pair in cell.split(";"):
        key, value = pair.split(":")
        out[int(key)] = float(value)
    return out


def summarize(csv_dir: str) -> list[StrategySummary]:
    """Aggregate the exported CSVs into one summary row per strategy.

    Pure function of the CSV bytes: files are read in sorted name order and
    grouped by the strategy column, so the result is independent of how the
    directory is listed.
    """
    rows_by_strategy: dict[str, list[dict[str, str]]] = {}
    names = sorted(f for f in os.listdir(csv_dir) if f.endswith(".csv") and f != "summary.csv")
    if not names:
        raise FileNotFoundError(f"no strategy CSV files in {csv_dir}")
    for name in names:
        with open(os.path.join(csv_dir, name), newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_HEADER:
                raise ValueError(f"{name}: unexpected CSV schema")
            for row in reader:
                record = dict(zip(CSV_HEADER, row))
                rows_by_strategy.setdefault(record["strategy"], []).append(record)

    summaries = []
    for strategy in sorted(rows_by_strategy):
        rows = rows_by_strategy[strategy]
        success_ticks = [
            int(r["completion_ticks"]) for r in rows if r["outcome"] == MissionOutcome.TARGET_FOUND.value
        ]
        byz_deltas: list[float] = []
        coop_deltas: list[float] = []
        byz_per_team: list[int] = []
        for r in rows:
            flags = _parse_pairs(r["adversarial_flags"])
            before = _parse_pairs(r["reputation_before"])
            after = _parse_pairs(r["reputation_after"])
            byz_per_team.append(sum(1 for v in flags.values() if v == 1.0))
            for uav_id, flagged in flags.items():
                delta = after[uav_id] - before[uav_id]
                (byz_deltas if flagged == 1.0 else coop_deltas).append(delta)
        summaries.append(
            StrategySummary(
                strategy=strategy,
                episodes=len(rows),
                success_rate=len(success_ticks) / len(rows) if rows else 0.0,
                mean_ticks=statistics.mean(success_ticks) if success_ticks else None,
                median_ticks=statistics.median(success_ticks) if success_ticks else None,
                mean_byzantine_per_team=statistics.mean(byz_per_team) if byz_per_team else 0.0,
                mean_rep_change_byzantine=statistics.mean(byz_deltas) if byz_deltas else None,
                mean_rep_change_cooperative=statistics.mean(coop_deltas) if coop_deltas else None,
            )
        )
    return summaries


def _num(value: float | None, places: int) -> str:
    return "NA" if value is None else f"{value:.{places}f}"


def summary_rows(summaries: list[StrategySummary]) -> list[list[str]]:
    return [
        [
            s.strategy,
            str(s.episodes),
            f"{s.success_rate:.4f}",
            _num(s.mean_ticks, 2),
            _num(s.median_ticks, 2),
            f"{s.mean_byzantine_per_team:.2f}",
            _num(s.mean_rep_change_byzantine, 6),
            _num(s.mean_rep_change_cooperative, 6),
        ]
        for s in summaries
    ]


def write_summary(summaries: list[StrategySummary], csv_dir: str) -> str:
    path = os.path.join(csv_dir, "summary.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        writer.writerows(summary_rows(summaries))
    return path


def format_summary_table(summaries: list[StrategySummary]) -> str:
    """Aligned text table for terminal output."""
    rows = [SUMMARY_HEADER] + summary_rows(summaries)
    widths = [max(len(row[i]) for row in rows) for i in range(len(SUMMARY_HEADER))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
