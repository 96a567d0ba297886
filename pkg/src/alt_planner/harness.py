"""Batch simulation harness: synthetic truths, replications, PCS curves.

Reproduces the synthetic benchmark protocol: a K-level material factor
(dummy-encoded against level 1) crossed with d stress factors at lab levels,
level-1 coefficients drawn U(-1/30, 0) and each further level offset by an
independent U(-1/30, 0) draw, so level 1 is always the planted optimum at
the target stress. Each (policy, track) method runs R independent
replications of: fit a prior from per-material pilot runs, then loop
next_design / simulate / absorb / decide for n_steps, recording the decided
best material per step. Probability of correct selection is the per-step
fraction of replications whose decision hits the planted optimum.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .acquisition import select_next
from .errors import ConfigError
from .model import CandidateSet, DesignPoint, Observation, PosteriorState, feature_map
from .policy import DecisionTrack, PolicyKind, PolicyState, decide_best_detail, next_design
from .update import absorb

Method = tuple[PolicyKind, DecisionTrack]

ALL_METHODS: tuple[Method, ...] = tuple(
    (kind, track) for kind in PolicyKind for track in DecisionTrack
)

# replications of the same policy share design streams across tracks
_POLICY_STREAM_ID = {
    PolicyKind.FACTORIAL_RANDOMIZED: 0,
    PolicyKind.SEQ_D_OPTIMAL: 1,
    PolicyKind.SEQ_EI: 2,
}


@dataclass(frozen=True)
class SyntheticTruth:
    beta: np.ndarray
    noise_sd: float
    best_index: int
    log_tau: float


@dataclass
class StudyConfig:
    K: int = 2
    d: int = 3
    stress_levels: tuple[float, ...] = (0.5, 1.0)
    target_stress: tuple[float, ...] = (0.1, 0.1, 0.1)
    noise_sd: float = 0.1
    tau: float = 1.2
    n_steps: int = 50
    replications: int = 100
    prior_points_per_material: int = 20
    methods: tuple[Method, ...] = ALL_METHODS
    seed: int = 0
    refit_every: int = 1
    prior_scale: float = 100.0

    def validate(self) -> None:
        """Collect field-level complaints into one ConfigError."""
        msgs: dict[str, str] = {}
        if self.K < 2:
            msgs["K"] = f"need at least 2 material levels, got {self.K}"
        if self.d < 1:
            msgs["d"] = f"need at least 1 stress factor, got {self.d}"
        if len(self.stress_levels) < 1:
            msgs["stress_levels"] = "need at least one lab stress level"
        elif len(set(self.stress_levels)) != len(self.stress_levels):
            msgs["stress_levels"] = "lab stress levels must be distinct"
        if len(self.target_stress) != self.d:
            msgs["target_stress"] = (
                f"length {len(self.target_stress)} does not match d={self.d}"
            )
        if not self.noise_sd > 0:
            msgs["noise_sd"] = f"must be > 0, got {self.noise_sd}"
        if not self.tau > 0:
            msgs["tau"] = f"must be > 0, got {self.tau}"
        if self.n_steps < 1:
            msgs["n_steps"] = f"must be >= 1, got {self.n_steps}"
        if self.replications < 1:
            msgs["replications"] = f"must be >= 1, got {self.replications}"
        if self.prior_points_per_material < 0:
            msgs["prior_points_per_material"] = "must be >= 0"
        if not self.methods:
            msgs["methods"] = "need at least one (policy, track) method"
        elif len(set(self.methods)) != len(self.methods):
            msgs["methods"] = "methods must be distinct"
        if self.refit_every < 1:
            msgs["refit_every"] = f"must be >= 1, got {self.refit_every}"
        if not self.prior_scale > 0:
            msgs["prior_scale"] = "must be > 0"
        if msgs:
            raise ConfigError(msgs)

    @property
    def noise_var(self) -> float:
        return self.noise_sd * self.noise_sd

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "d": self.d,
            "stress_levels": list(self.stress_levels),
            "target_stress": list(self.target_stress),
            "noise_sd": self.noise_sd,
            "tau": self.tau,
            "n_steps": self.n_steps,
            "replications": self.replications,
            "prior_points_per_material": self.prior_points_per_material,
            "methods": [[k.value, t.value] for k, t in self.methods],
            "seed": self.seed,
            "refit_every": self.refit_every,
            "prior_scale": self.prior_scale,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StudyConfig":
        known = {
            "K", "d", "stress_levels", "target_stress", "noise_sd", "tau",
            "n_steps", "replications", "prior_points_per_material", "methods",
            "seed", "refit_every", "prior_scale",
        }
        msgs = {k: "unknown field" for k in doc.keys() - known}
        kwargs: dict = {}
        for key in ("K", "d", "n_steps", "replications",
                    "prior_points_per_material", "seed", "refit_every"):
            if key in doc:
                try:
                    kwargs[key] = int(doc[key])
                except (TypeError, ValueError):
                    msgs[key] = f"expected an integer, got {doc[key]!r}"
        for key in ("noise_sd", "tau", "prior_scale"):
            if key in doc:
                try:
                    kwargs[key] = float(doc[key])
                except (TypeError, ValueError):
                    msgs[key] = f"expected a number, got {doc[key]!r}"
        for key in ("stress_levels", "target_stress"):
            if key in doc:
                try:
                    kwargs[key] = tuple(float(v) for v in doc[key])
                except (TypeError, ValueError):
                    msgs[key] = f"expected a list of numbers, got {doc[key]!r}"
        if "methods" in doc:
            try:
                kwargs["methods"] = tuple(
                    (PolicyKind(pair[0]), DecisionTrack(pair[1])) for pair in doc["methods"]
                )
            except (TypeError, ValueError, IndexError, KeyError):
                msgs["methods"] = (
                    "expected [policy, track] pairs with policy in "
                    f"{[k.value for k in PolicyKind]} and track in "
                    f"{[t.value for t in DecisionTrack]}"
                )
        if msgs:
            raise ConfigError(msgs)
        config = cls(**kwargs)
        config.validate()
        return config


def candidate_set_for(config: StudyConfig) -> CandidateSet:
    """Dummy-encode the K material levels (level 1 baseline) and cross the
    per-factor lab levels into the full stress grid."""
    p = config.K - 1
    materials = []
    for k in range(config.K):
        z = np.zeros(p)
        if k > 0:
            z[k - 1] = 1.0
        materials.append(z)
    stresses = [
        np.array(combo)
        for combo in itertools.product(config.stress_levels, repeat=config.d)
    ]
    return CandidateSet(
        materials=tuple(materials),
        stresses=tuple(stresses),
        target_stress=np.array(config.target_stress),
        material_labels=tuple(f"level-{k + 1}" for k in range(config.K)),
    )


def gen_truth(config: StudyConfig, rep_seed) -> SyntheticTruth:
    """Draw the true coefficients with level 1 planted as the optimum."""
    rng = np.random.default_rng(rep_seed)
    cands = candidate_set_for(config)
    d, p = config.d, config.K - 1
    dim = (p + 1) * (d + 1)
    while True:
        base = rng.uniform(-1.0 / 30.0, 0.0, size=d + 1)
        offsets = rng.uniform(-1.0 / 30.0, 0.0, size=(p, d + 1))
        beta = np.empty(dim)
        beta[0] = base[0]
        beta[1:1 + d] = base[1:]
        beta[1 + d:1 + d + p] = offsets[:, 0]
        for j in range(p):
            beta[1 + d + p + j * d:1 + d + p + (j + 1) * d] = offsets[j, 1:]
        means = [
            float(feature_map(cands.target_design(k)) @ beta)
            for k in range(config.K)
        ]
        # cannot fail (offsets <= 0 and target stress > 0), kept as a guard
        if int(np.argmax(means)) == 0:
            return SyntheticTruth(
                beta=beta,
                noise_sd=config.noise_sd,
                best_index=0,
                log_tau=math.log(config.tau),
            )


def simulate_observation(
    truth: SyntheticTruth, dp: DesignPoint, rng: np.random.Generator
) -> Observation:
    """Draw one lifetime at dp, right-censored at the observation bound."""
    y = float(feature_map(dp) @ truth.beta) + truth.noise_sd * float(rng.standard_normal())
    if y <= truth.log_tau:
        return Observation(design=dp, log_tau=truth.log_tau, delta=True, y=y)
    return Observation(design=dp, log_tau=truth.log_tau, delta=False)


Simulator = Callable[[SyntheticTruth, DesignPoint, np.random.Generator], Observation]


def _fit_prior_full(
    config: StudyConfig,
    truth: SyntheticTruth,
    rng: np.random.Generator,
    simulator: Simulator = simulate_observation,
) -> tuple[PosteriorState, list[Observation]]:
    cands = candidate_set_for(config)
    dim = (cands.p + 1) * (cands.d + 1)
    belief = PosteriorState.diffuse(dim, config.noise_var, config.prior_scale)
    observations: list[Observation] = []
    for k in range(cands.n_materials):
        for i in range(config.prior_points_per_material):
            dp = cands.design(k, i % cands.n_stresses)
            obs = simulator(truth, dp, rng)
            observations.append(obs)
            belief = absorb(belief, obs)
    reset = PosteriorState(
        theta=belief.theta, sigma_mat=belief.sigma_mat, noise_var=belief.noise_var, n=0
    )
    return reset, observations


def fit_prior(
    config: StudyConfig, truth: SyntheticTruth, rng: np.random.Generator
) -> PosteriorState:
    """Absorb the pilot runs (per material, stresses cycled over the lab
    grid) into a diffuse belief; the step counter restarts at zero."""
    belief, _ = _fit_prior_full(config, truth, rng)
    return belief


@dataclass(frozen=True)
class StepRecord:
    step: int
    z_index: int
    v_index: int
    censored: bool
    ei_value: float | None
    decision: int
    used_fallback: bool = False


@dataclass
class ReplicationTrace:
    policy: PolicyKind
    track: DecisionTrack
    rep_index: int
    truth_best: int
    records: list[StepRecord] = field(default_factory=list)
    prior_censored: int = 0
    prior_total: int = 0


def _stream_children(config_seed: int, policy: PolicyKind, rep_index: int):
    ss = np.random.SeedSequence(
        entropy=config_seed, spawn_key=(_POLICY_STREAM_ID[policy], rep_index)
    )
    return ss.spawn(4)  # truth, prior, loop, schedule


def run_replication(
    config: StudyConfig,
    method: Method,
    rep_index: int,
    simulator: Simulator = simulate_observation,
) -> ReplicationTrace:
    """One full campaign: prior fit, then n_steps of select/observe/update
    with a per-step best-material decision."""
    kind, track = method
    truth_child, prior_child, loop_child, sched_child = _stream_children(
        config.seed, kind, rep_index
    )
    truth = gen_truth(config, truth_child)
    cands = candidate_set_for(config)
    belief, data = _fit_prior_full(config, truth, np.random.default_rng(prior_child), simulator)
    data = list(data)
    trace = ReplicationTrace(
        policy=kind,
        track=track,
        rep_index=rep_index,
        truth_best=truth.best_index,
        prior_censored=sum(1 for o in data if not o.delta),
        prior_total=len(data),
    )
    sched_seed = int(sched_child.generate_state(1, np.uint64)[0])
    pstate = PolicyState.create(kind, cands, config.n_steps, sched_seed)
    rng = np.random.default_rng(loop_child)
    index_of = {
        (tuple(cands.materials[j]), tuple(cands.stresses[m])): (j, m)
        for j in range(cands.n_materials)
        for m in range(cands.n_stresses)
    }

    if config.n_steps == 0:
        decision = decide_best_detail(track, belief, data, cands, config.noise_var)
        trace.records.append(StepRecord(
            step=0, z_index=-1, v_index=-1, censored=False, ei_value=None,
            decision=decision.index, used_fallback=decision.used_fallback,
        ))
        return trace

    last_decision = None
    for step in range(1, config.n_steps + 1):
        ei_value = None
        if kind is PolicyKind.SEQ_EI:
            score = select_next(belief, cands)
            dp = cands.design(score.z_index, score.v_index)
            ei_value = score.value
        else:
            dp = next_design(pstate, belief, cands)
        obs = simulator(truth, dp, rng)
        belief = absorb(belief, obs)
        data.append(obs)
        refit_due = step % config.refit_every == 0 or step == config.n_steps
        if track is DecisionTrack.EXACT_REFIT and not refit_due and last_decision is not None:
            decision = last_decision
        else:
            decision = decide_best_detail(track, belief, data, cands, config.noise_var)
            last_decision = decision
        j, m = index_of[(tuple(dp.z), tuple(dp.v))]
        trace.records.append(StepRecord(
            step=step,
            z_index=j,
            v_index=m,
            censored=not obs.delta,
            ei_value=ei_value,
            decision=decision.index,
            used_fallback=decision.used_fallback,
        ))
    return trace


def estimate_pcs(traces: list[ReplicationTrace], truth_best: int) -> np.ndarray:
    """Per-step fraction of replications whose decision hit truth_best."""
    if not traces:
        raise ValueError("need at least one trace")
    n_steps = len(traces[0].records)
    if any(len(t.records) != n_steps for t in traces):
        raise ValueError("traces must have equal length")
    hits = np.zeros(n_steps)
    for t in traces:
        hits += [1.0 if r.decision == truth_best else 0.0 for r in t.records]
    return hits / len(traces)


@dataclass
class StudyResult:
    config: StudyConfig
    pcs: dict[Method, np.ndarray]
    stderr: dict[Method, np.ndarray]
    traces: dict[Method, list[ReplicationTrace]]
    censor_rate: float
    censor_rate_by_method: dict[Method, float]
    wall_time_s: float


def _run_cell(args) -> tuple[int, int, ReplicationTrace]:
    config, method_idx, rep = args
    return method_idx, rep, run_replication(config, config.methods[method_idx], rep)


def run_study(config: StudyConfig, threads: int = 1) -> StudyResult:
    """Run every (method, replication) cell and aggregate PCS curves and
    empirical censoring rates. Deterministic given config.seed."""
    config.validate()
    start = time.monotonic()
    cells = [
        (config, mi, rep)
        for mi in range(len(config.methods))
        for rep in range(config.replications)
    ]
    traces: dict[Method, list[ReplicationTrace]] = {m: [] for m in config.methods}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=4))
    else:
        results = [_run_cell(c) for c in cells]
    results.sort(key=lambda r: (r[0], r[1]))
    for method_idx, _, trace in results:
        traces[config.methods[method_idx]].append(trace)

    pcs: dict[Method, np.ndarray] = {}
    stderr: dict[Method, np.ndarray] = {}
    censored = 0
    total = 0
    by_method: dict[Method, float] = {}
    for method, method_traces in traces.items():
        curve = estimate_pcs(method_traces, truth_best=0)
        pcs[method] = curve
        stderr[method] = np.sqrt(curve * (1.0 - curve) / len(method_traces))
        c = sum(t.prior_censored + sum(r.censored for r in t.records) for t in method_traces)
        n = sum(t.prior_total + len(t.records) for t in method_traces)
        by_method[method] = c / n if n else 0.0
        censored += c
        total += n
    return StudyResult(
        config=config,
        pcs=pcs,
        stderr=stderr,
        traces=traces,
        censor_rate=censored / total if total else 0.0,
        censor_rate_by_method=by_method,
        wall_time_s=time.monotonic() - start,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csvs(result: StudyResult, out_dir: Path) -> None:
    """pcs.csv, traces.csv, meta.csv with LF endings and '.' decimals."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "pcs.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["method", "track", "step", "pcs", "stderr"])
        for method in result.config.methods:
            kind, track = method
            for i, (p, se) in enumerate(zip(result.pcs[method], result.stderr[method])):
                step = i if result.config.n_steps == 0 else i + 1
                w.writerow([kind.value, track.value, step, _fmt(p), _fmt(se)])
    with open(out_dir / "traces.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(
            ["method", "track", "replication", "step", "chosen_index", "censored", "ei_value"]
        )
        for method in result.config.methods:
            kind, track = method
            for trace in result.traces[method]:
                for r in trace.records:
                    w.writerow([
                        kind.value, track.value, trace.rep_index, r.step, r.decision,
                        int(r.censored), "" if r.ei_value is None else _fmt(r.ei_value),
                    ])
    with open(out_dir / "meta.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerow(["seed", result.config.seed])
        w.writerow(["n_steps", result.config.n_steps])
        w.writerow(["replications", result.config.replications])
        w.writerow(["noise_sd", _fmt(result.config.noise_sd)])
        w.writerow(["tau", _fmt(result.config.tau)])
        w.writerow(["material_encoding", "dummy-baseline-level-1"])
        w.writerow(["censor_rate_overall", _fmt(result.censor_rate)])
        for method, rate in result.censor_rate_by_method.items():
            kind, track = method
            w.writerow([f"censor_rate_{kind.value}_{track.value}", _fmt(rate)])
        w.writerow(["wall_time_s", _fmt(result.wall_time_s)])
