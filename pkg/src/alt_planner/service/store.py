"""Event-sourced session persistence for the advisor service.

Each session is one append-only JSONL file under the data directory; the
log is the source of truth and replaying it reconstructs the belief
exactly. In-memory Session objects are just a cache of the fold.
"""

from __future__ import annotations

import json
import math
import threading
import time
import uuid
from pathlib import Path

import numpy as np

from ..acquisition import current_best, ei_score, select_next
from ..errors import ConfigError, ScheduleExhaustedError
from ..model import CandidateSet, DesignPoint, Observation, PosteriorState, feature_map
from ..policy import DecisionTrack, PolicyKind, PolicyState, decide_best_detail, next_design
from ..update import absorb


def _parse_prior(doc: dict, dim: int, noise_var: float) -> PosteriorState:
    prior = doc.get("prior", "diffuse")
    if prior == "diffuse":
        scale = float(doc.get("prior_scale", 100.0))
        return PosteriorState.diffuse(dim, noise_var, scale)
    theta = np.asarray(prior["theta"], dtype=float)
    sigma = np.asarray(prior["sigma_mat"], dtype=float).reshape(dim, dim)
    return PosteriorState(theta=theta, sigma_mat=sigma, noise_var=noise_var, n=0)


def validate_session_config(doc: dict) -> dict[str, str]:
    """Field-level complaints for a create-session payload; empty when OK."""
    msgs: dict[str, str] = {}
    materials = doc.get("materials")
    stresses = doc.get("stresses")
    target = doc.get("target_stress")
    if not materials:
        msgs["materials"] = "need at least one material encoding"
    else:
        lengths = {len(z) for z in materials}
        if len(lengths) != 1:
            msgs["materials"] = "material encodings must all have the same length"
        elif len({tuple(float(v) for v in z) for z in materials}) != len(materials):
            msgs["materials"] = "material encodings must be distinct"
        elif 0 in lengths:
            msgs["materials"] = "material encodings must be nonempty"
    if not stresses:
        msgs["stresses"] = "need at least one stress combination"
    if not target:
        msgs["target_stress"] = "target stress is required"
    elif stresses and any(len(v) != len(target) for v in stresses):
        msgs["stresses"] = "stress vectors must match target_stress length"
    if not float(doc.get("noise_var", 0.0)) > 0:
        msgs["noise_var"] = "noise_var must be > 0"
    if not float(doc.get("tau", 0.0)) > 0:
        msgs["tau"] = "tau must be > 0"
    labels = doc.get("material_labels")
    if labels is not None and materials and len(labels) != len(materials):
        msgs["material_labels"] = "one label per material required"
    try:
        policy = PolicyKind(doc.get("policy", PolicyKind.SEQ_EI.value))
    except ValueError:
        msgs["policy"] = f"unknown policy; expected one of {[k.value for k in PolicyKind]}"
        policy = None
    try:
        DecisionTrack(doc.get("track", DecisionTrack.APPROX.value))
    except ValueError:
        msgs["track"] = f"unknown track; expected one of {[t.value for t in DecisionTrack]}"
    if policy is PolicyKind.FACTORIAL_RANDOMIZED:
        if int(doc.get("schedule_length", 0)) < 1:
            msgs["schedule_length"] = "factorial sessions need schedule_length >= 1"
    if msgs:
        return msgs
    # structural checks passed; let the model constructors vet the numbers
    try:
        cands = CandidateSet(
            materials=tuple(np.asarray(z, dtype=float) for z in materials),
            stresses=tuple(np.asarray(v, dtype=float) for v in stresses),
            target_stress=np.asarray(target, dtype=float),
            material_labels=tuple(labels) if labels else (),
        )
        _parse_prior(doc, (cands.p + 1) * (cands.d + 1), float(doc["noise_var"]))
    except (ValueError, KeyError, TypeError) as exc:
        msgs["prior" if "prior" in doc else "materials"] = str(exc)
    return msgs


class Session:
    """One live campaign: candidate set, belief, outstanding recommendation,
    and the event log that everything folds from."""

    def __init__(self, session_id: str, created: dict):
        config = created["config"]
        self.session_id = session_id
        self.config = config
        self.cands = CandidateSet(
            materials=tuple(np.asarray(z, dtype=float) for z in config["materials"]),
            stresses=tuple(np.asarray(v, dtype=float) for v in config["stresses"]),
            target_stress=np.asarray(config["target_stress"], dtype=float),
            material_labels=tuple(config.get("material_labels") or ()),
        )
        self.noise_var = float(config["noise_var"])
        self.tau = float(config["tau"])
        self.policy = PolicyKind(config.get("policy", PolicyKind.SEQ_EI.value))
        self.track = DecisionTrack(config.get("track", DecisionTrack.APPROX.value))
        dim = (self.cands.p + 1) * (self.cands.d + 1)
        self.belief = _parse_prior(config, dim, self.noise_var)
        self.pstate = PolicyState.create(
            self.policy,
            self.cands,
            int(config.get("schedule_length", 0)),
            int(config.get("seed", 0)),
        )
        self.data: list[Observation] = []
        self.events: list[dict] = [created]
        self.outstanding: dict | None = None
        self.best_index = current_best(self.belief, self.cands)
        self.lock = threading.Lock()

    # --- event application -------------------------------------------------

    def apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "recommended":
            self.outstanding = event
            # schedule state moves with the log so replay lands on the same cell
            if self.policy is PolicyKind.FACTORIAL_RANDOMIZED:
                self.pstate.cursor += 1
        elif kind == "observed":
            dp = self.cands.design(int(event["z_index"]), int(event["v_index"]))
            lifetime = event["lifetime"]
            tau = float(event["tau"])
            if lifetime is None:
                obs = Observation(design=dp, log_tau=math.log(tau), delta=False)
            else:
                obs = Observation(
                    design=dp, log_tau=math.log(tau), delta=True, y=math.log(float(lifetime))
                )
            self.belief = absorb(self.belief, obs)
            self.data.append(obs)
            self.outstanding = None
        elif kind == "decided":
            self.best_index = int(event["best_index"])
        elif kind == "voided":
            if self.outstanding is not None and self.policy is PolicyKind.FACTORIAL_RANDOMIZED:
                self.pstate.cursor = max(0, self.pstate.cursor - 1)
            self.outstanding = None
        elif kind != "created":
            raise ValueError(f"unknown event kind {kind!r}")
        if kind != "created":
            self.events.append(event)

    @classmethod
    def from_events(cls, session_id: str, events: list[dict]) -> "Session":
        if not events or events[0]["event"] != "created":
            raise ValueError(f"session {session_id}: log must start with a created event")
        session = cls(session_id, events[0])
        for event in events[1:]:
            session.apply(event)
        return session

    # --- derived views -----------------------------------------------------

    def ranking(self) -> list[dict]:
        rows = []
        best = current_best(self.belief, self.cands) if self.track is DecisionTrack.APPROX \
            else self.best_index
        for k in range(self.cands.n_materials):
            x = feature_map(self.cands.target_design(k))
            mean = float(x @ self.belief.theta)
            var = float(x @ self.belief.sigma_mat @ x)
            rows.append({
                "material_index": k,
                "label": self.cands.material_labels[k],
                "mean": mean,
                "sd": math.sqrt(max(var, 0.0)),
                "best": k == best,
            })
        return rows

    def next_recommendation_event(self) -> dict:
        """Compute the next run without consuming schedule state; the
        factorial cursor moves when the recommended event is applied."""
        if self.policy is PolicyKind.SEQ_EI:
            score = select_next(self.belief, self.cands)
            j, m, value = score.z_index, score.v_index, score.value
        else:
            if self.policy is PolicyKind.FACTORIAL_RANDOMIZED:
                assert self.pstate.schedule is not None
                if self.pstate.cursor >= len(self.pstate.schedule):
                    raise ScheduleExhaustedError(
                        f"factorial schedule of length {len(self.pstate.schedule)} exhausted"
                    )
                dp = self.pstate.schedule[self.pstate.cursor]
            else:
                dp = next_design(self.pstate, self.belief, self.cands)
            j, m = self._indices_of(dp)
            value = ei_score(self.belief, dp, self.cands)
        dp = self.cands.design(j, m)
        return {
            "ts": time.time(),
            "event": "recommended",
            "z_index": j,
            "v_index": m,
            "z": dp.z.tolist(),
            "v": dp.v.tolist(),
            "ei_value": value,
        }

    def decision_event(self) -> dict:
        decision = decide_best_detail(
            self.track, self.belief, self.data, self.cands, self.noise_var
        )
        return {
            "ts": time.time(),
            "event": "decided",
            "best_index": decision.index,
            "used_fallback": decision.used_fallback,
        }

    def _indices_of(self, dp: DesignPoint) -> tuple[int, int]:
        for j in range(self.cands.n_materials):
            if np.array_equal(self.cands.materials[j], dp.z):
                for m in range(self.cands.n_stresses):
                    if np.array_equal(self.cands.stresses[m], dp.v):
                        return j, m
        raise ValueError("design point not on the candidate grid")


class SessionStore:
    """Directory of JSONL event logs, one per session, loaded eagerly."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        for path in sorted(self.data_dir.glob("*.jsonl")):
            events = [json.loads(line) for line in path.read_text().splitlines() if line]
            session = Session.from_events(path.stem, events)
            self._sessions[session.session_id] = session

    def _append(self, session_id: str, event: dict) -> None:
        with open(self.data_dir / f"{session_id}.jsonl", "a", encoding="utf-8") as f:
            f.write(json.dumps(event) + "\n")

    def create(self, config: dict) -> Session:
        msgs = validate_session_config(config)
        if msgs:
            raise ConfigError(msgs)
        session_id = uuid.uuid4().hex
        created = {"ts": time.time(), "event": "created", "config": config}
        session = Session(session_id, created)
        with self._lock:
            self._append(session_id, created)
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def record(self, session: Session, event: dict) -> None:
        """Append to the log first, then to the in-memory fold."""
        self._append(session.session_id, event)
        session.apply(event)

    def session_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions)
