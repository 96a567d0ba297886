"""Allocation policies and decision tracks for the sequential loop.

Three ways to pick the next run (randomized factorial schedule, one-step
D-optimal, expected improvement) and two ways to declare the current best
material: straight from the approximate belief, or from a censored-MLE
refit on all data collected so far.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import acquisition
from .errors import NonIdentifiableError, ScheduleExhaustedError
from .model import CandidateSet, DesignPoint, Observation, PosteriorState, feature_map
from .update import mle_refit


class PolicyKind(enum.Enum):
    FACTORIAL_RANDOMIZED = "factorial"
    SEQ_D_OPTIMAL = "seq-d"
    SEQ_EI = "seq-ei"


class DecisionTrack(enum.Enum):
    APPROX = "approx"
    EXACT_REFIT = "exact"


def build_factorial_schedule(
    cands: CandidateSet, n_total: int, seed: int
) -> list[DesignPoint]:
    """Cycle through the K*M factorial cells until n_total runs are listed
    (cell counts differ by at most one), then shuffle the whole list."""
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    cells = [
        (j, m) for j in range(cands.n_materials) for m in range(cands.n_stresses)
    ]
    picks = [cells[i % len(cells)] for i in range(n_total)]
    rng = np.random.default_rng(seed)
    rng.shuffle(picks)
    return [cands.design(j, m) for j, m in picks]


@dataclass
class PolicyState:
    kind: PolicyKind
    rng_seed: int
    schedule: list[DesignPoint] | None = None
    cursor: int = 0

    def __post_init__(self):
        if (self.schedule is not None) != (self.kind is PolicyKind.FACTORIAL_RANDOMIZED):
            raise ValueError("schedule is required exactly for the factorial policy")
        if self.schedule is not None and not 0 <= self.cursor <= len(self.schedule):
            raise ValueError("cursor out of range")

    @classmethod
    def create(
        cls, kind: PolicyKind, cands: CandidateSet, n_total: int, seed: int
    ) -> "PolicyState":
        schedule = None
        if kind is PolicyKind.FACTORIAL_RANDOMIZED:
            schedule = [] if n_total == 0 else build_factorial_schedule(cands, n_total, seed)
        return cls(kind=kind, rng_seed=seed, schedule=schedule)


def next_design(
    pstate: PolicyState, belief: PosteriorState, cands: CandidateSet
) -> DesignPoint:
    """The next run under the policy: scheduled cell, max posterior-variance
    direction, or the EI maximizer."""
    if pstate.kind is PolicyKind.FACTORIAL_RANDOMIZED:
        assert pstate.schedule is not None
        if pstate.cursor >= len(pstate.schedule):
            raise ScheduleExhaustedError(
                f"factorial schedule of length {len(pstate.schedule)} exhausted"
            )
        dp = pstate.schedule[pstate.cursor]
        pstate.cursor += 1
        return dp
    if pstate.kind is PolicyKind.SEQ_D_OPTIMAL:
        best_dp = None
        best_q = -np.inf
        for j in range(cands.n_materials):
            for m in range(cands.n_stresses):
                dp = cands.design(j, m)
                x = feature_map(dp)
                q = float(x @ belief.sigma_mat @ x)
                if q > best_q:
                    best_dp, best_q = dp, q
        assert best_dp is not None
        return best_dp
    score = acquisition.select_next(belief, cands)
    return cands.design(score.z_index, score.v_index)


@dataclass(frozen=True)
class BestDecision:
    index: int
    used_fallback: bool = False


def decide_best_detail(
    track: DecisionTrack,
    belief: PosteriorState,
    data: list[Observation],
    cands: CandidateSet,
    noise_var: float,
) -> BestDecision:
    """Best-material decision plus whether the exact track fell back to the
    approximate belief (refit not identifiable)."""
    if track is DecisionTrack.APPROX:
        return BestDecision(index=acquisition.current_best(belief, cands))
    if not data:
        raise ValueError("ExactRefit requires at least one observation")
    try:
        fit = mle_refit(data, noise_var, init=belief.theta)
    except NonIdentifiableError:
        return BestDecision(
            index=acquisition.current_best(belief, cands), used_fallback=True
        )
    means = [
        float(feature_map(cands.target_design(k)) @ fit.beta_hat)
        for k in range(cands.n_materials)
    ]
    return BestDecision(index=int(np.argmax(means)))


def decide_best(
    track: DecisionTrack,
    belief: PosteriorState,
    data: list[Observation],
    cands: CandidateSet,
    noise_var: float,
) -> int:
    return decide_best_detail(track, belief, data, cands, noise_var).index
