"""Feedback accumulation, trust computation, and the team-formation strategies.

Three strategies ship behind one interface: uniform random selection,
EigenTrust ranking (damped power iteration over the normalized feedback
matrix), and a direct feedback-average baseline exported as `mdbr_standin`.
The stand-in is NOT the MDBR algorithm; it is a transparent placeholder kept
behind the same interface and labeled as such in every output. New strategies
can be registered without touching the engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .agents import AgentState
from .domain import EigenTrustParams, Marketplace, MissionTemplate, UavSpec
from .rng import SplitMix64


@dataclass(frozen=True)
class FeedbackReport:
    rater: int
    ratee: int
    score: float  # in [0, 1]
    mission_id: str


@dataclass
class TrustState:
    """Per-strategy feedback history over one marketplace.

    `raw[i, j]` accumulates the scores rater i gave ratee j and `counts[i, j]`
    how many reports that was (the average baseline needs the distinction).
    Indices follow marketplace order; `ids` maps them back to UAV ids.
    `global_trust` holds the most recently computed trust distribution.
    """

    strategy_name: str
    ids: tuple[int, ...]
    raw: np.ndarray
    counts: np.ndarray
    global_trust: np.ndarray

    @staticmethod
    def fresh(strategy_name: str, marketplace: Marketplace) -> "TrustState":
        n = len(marketplace.uavs)
        return TrustState(
            strategy_name=strategy_name,
            ids=marketplace.ids(),
            raw=np.zeros((n, n)),
            counts=np.zeros((n, n), dtype=np.int64),
            global_trust=np.full(n, 1.0 / n),
        )

    def index_of(self, uav_id: int) -> int:
        try:
            return self.ids.index(uav_id)
        except ValueError:
            raise ValueError(f"unknown UAV id {uav_id} in trust state {self.strategy_name!r}") from None


def uniform_pretrust(n: int) -> np.ndarray:
    """No pre-trusted peers exist among mutually untrusting owners, so the
    pre-trust distribution is uniform."""
    return np.full(n, 1.0 / n)


def normalize_local_trust(raw: np.ndarray, pretrust: np.ndarray) -> np.ndarray:
    """Row-normalize accumulated feedback into a stochastic matrix.

    Entries are clipped at zero; each row with positive mass is divided by its
    sum, and rows with no history fall back to the pre-trust distribution.
    """
    raw = np.asarray(raw, dtype=float)
    pretrust = np.asarray(pretrust, dtype=float)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise ValueError(f"raw matrix must be square, got shape {raw.shape}")
    if pretrust.shape != (raw.shape[0],):
        raise ValueError("pretrust dimension does not match the raw matrix")
    clipped = np.maximum(raw, 0.0)
    sums = clipped.sum(axis=1)
    out = np.empty_like(clipped)
    has_history = sums > 0.0
    out[has_history] = clipped[has_history] / sums[has_history, None]
    out[~has_history] = pretrust
    return out


def eigentrust_global(
    C: np.ndarray,
    pretrust: np.ndarray,
    alpha: float,
    epsilon: float,
    max_iter: int,
) -> np.ndarray:
    """Damped trust iteration: v <- (1-alpha) * C^T v + alpha * pretrust.

    Starts from the pre-trust vector and stops when the L1 change drops below
    epsilon or after max_iter rounds. The fixed point is
    alpha * (I - (1-alpha) C^T)^-1 * pretrust; loosening epsilon trades
    accuracy for rounds.
    """
    C = np.asarray(C, dtype=float)
    pretrust = np.asarray(pretrust, dtype=float)
    n = C.shape[0]
    if C.ndim != 2 or C.shape != (n, n):
        raise ValueError(f"C must be square, got shape {C.shape}")
    if pretrust.shape != (n,):
        raise ValueError("pretrust dimension does not match C")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if np.any(C < -1e-12) or np.any(np.abs(C.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("C is not row-stochastic")

    CT = C.T
    v = pretrust.copy()
    for _ in range(max_iter):
        nxt = (1.0 - alpha) * (CT @ v) + alpha * pretrust
        delta = np.abs(nxt - v).sum()
        v = nxt
        if delta < epsilon:
            break
    return v


def mean_received_scores(state: TrustState) -> np.ndarray:
    """Average score each UAV has received, 0.5 where it has no history."""
    got = state.counts.sum(axis=0)
    totals = state.raw.sum(axis=0)
    return np.where(got > 0, totals / np.maximum(got, 1), 0.5)


class TeamStrategy(Protocol):
    name: str

    def select(self, marketplace: Marketplace, state: TrustState, n: int, stream: SplitMix64) -> list[int]: ...

    def scores(self, marketplace: Marketplace, state: TrustState) -> dict[int, float]: ...


def _top_n(marketplace: Marketplace, values: np.ndarray, n: int) -> list[int]:
    # Ties break toward the lower id.
    ranked = sorted(zip(marketplace.ids(), values), key=lambda p: (-p[1], p[0]))
    return [uav_id for uav_id, _ in ranked[:n]]


class RandomSelection:
    """Uniform sample without replacement; reputation plays no role."""

    name = "random"

    def select(self, marketplace: Marketplace, state: TrustState, n: int, stream: SplitMix64) -> list[int]:
        picked = stream.sample(len(marketplace.uavs), n)
        ids = marketplace.ids()
        return [ids[i] for i in picked]

    def scores(self, marketplace: Marketplace, state: TrustState) -> dict[int, float]:
        # Reported for the CSV columns: the neutral received-average view.
        return dict(zip(state.ids, mean_received_scores(state)))


class EigenTrustRanking:
    """Top-n by global trust recomputed from the raw feedback sums.

    Self-reports stay in the matrix deliberately: the simulated attack is
    self-promotion, and zeroing the diagonal would erase it.
    """

    name = "eigentrust"

    def __init__(self, params: EigenTrustParams | None = None) -> None:
        self.params = params or EigenTrustParams()

    def _recompute(self, state: TrustState) -> np.ndarray:
        pretrust = uniform_pretrust(len(state.ids))
        C = normalize_local_trust(state.raw, pretrust)
        trust = eigentrust_global(C, pretrust, self.params.alpha, self.params.epsilon, self.params.max_iter)
        state.global_trust = trust
        return trust

    def select(self, marketplace: Marketplace, state: TrustState, n: int, stream: SplitMix64) -> list[int]:
        return _top_n(marketplace, self._recompute(state), n)

    def scores(self, marketplace: Marketplace, state: TrustState) -> dict[int, float]:
        return dict(zip(state.ids, self._recompute(state)))


class DirectAverageRanking:
    """Direct feedback-average baseline (the `mdbr_standin` strategy)."""

    name = "mdbr_standin"

    def select(self, marketplace: Marketplace, state: TrustState, n: int, stream: SplitMix64) -> list[int]:
        return _top_n(marketplace, mean_received_scores(state), n)

    def scores(self, marketplace: Marketplace, state: TrustState) -> dict[int, float]:
        return dict(zip(state.ids, mean_received_scores(state)))


_FACTORIES: dict[str, Callable[[EigenTrustParams], TeamStrategy]] = {
    "random": lambda _: RandomSelection(),
    "eigentrust": EigenTrustRanking,
    "mdbr_standin": lambda _: DirectAverageRanking(),
}


def register_strategy(name: str, factory: Callable[[EigenTrustParams], TeamStrategy]) -> None:
    """Add a strategy to the registry; the engine picks it up by name."""
    _FACTORIES[name] = factory


def strategy_names() -> tuple[str, ...]:
    return tuple(_FACTORIES)


def make_strategy(name: str, eigentrust: EigenTrustParams | None = None) -> TeamStrategy:
    if name not in _FACTORIES:
        raise ValueError(f"unknown strategy {name!r}; registered: {', '.join(_FACTORIES)}")
    return _FACTORIES[name](eigentrust or EigenTrustParams())


def select_team(
    strategy: str,
    marketplace: Marketplace,
    state: TrustState,
    n: int,
    stream: SplitMix64,
    eigentrust: EigenTrustParams | None = None,
) -> list[int]:
    """Dispatch to a registered strategy and return an ordered team of n ids."""
    if n > len(marketplace.uavs):
        raise ValueError(f"team size {n} exceeds marketplace of {len(marketplace.uavs)}")
    return make_strategy(strategy, eigentrust).select(marketplace, state, n, stream)


def generate_feedback(
    agent_end_state: AgentState,
    team: list[UavSpec],
    mission: MissionTemplate,
) -> list[FeedbackReport]:
    """Post-mission reports from one team member.

    Cooperative raters score flagged senders 0 and everyone else 1, and never
    rate themselves. Byzantine raters self-promote: with collaboration enabled
    they score the whole Byzantine clique (themselves included) 1 and
    cooperative teammates 0; without it they score only themselves 1.
    """
    rater = agent_end_state.spec
    reports: list[FeedbackReport] = []
    if not rater.behavior.is_byzantine:
        for mate in team:
            if mate.id == rater.id:
                continue
            score = 0.0 if mate.id in agent_end_state.flags else 1.0
            reports.append(FeedbackReport(rater.id, mate.id, score, mission.id))
        return reports
    for mate in team:
        if mission.collaboration:
            score = 1.0 if mate.behavior.is_byzantine else 0.0
        else:
            score = 1.0 if mate.id == rater.id else 0.0
        reports.append(FeedbackReport(rater.id, mate.id, score, mission.id))
    return reports


def apply_feedback(state: TrustState, reports: list[FeedbackReport]) -> TrustState:
    """Accumulate reports into the raw matrix (scores clipped at zero).

    Self-reports are accepted: they carry the self-promotion attack, and each
    strategy's own math decides whether they matter. The global trust vector
    is recomputed lazily at the next selection.
    """
    for report in reports:
        i = state.index_of(report.rater)
        j = state.index_of(report.ratee)
        state.raw[i, j] += max(report.score, 0.0)
        state.counts[i, j] += 1
    return state
