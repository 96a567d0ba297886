"""HTTP advisor: one-unit-at-a-time campaigns over a persisted event log.

Endpoints: create a session, read the (idempotent) next-run recommendation,
post an observed lifetime or censoring event, inspect or export the full
session, void an outstanding recommendation, and elicit a prior from
historical uncensored runs. The UI bundle is served from ./static.
"""

from __future__ import annotations

import math
import os
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from ..errors import ConfigError, ScheduleExhaustedError
from ..model import DesignPoint, feature_map
from .schemas import ObservationIn, PriorElicitIn, SessionCreateIn
from .store import Session, SessionStore

DATA_DIR_ENV = "ALT_PLANNER_DATA_DIR"


def _session_view(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "policy": session.policy.value,
        "track": session.track.value,
        "noise_var": session.noise_var,
        "tau": session.tau,
        "materials": [z.tolist() for z in session.cands.materials],
        "stresses": [v.tolist() for v in session.cands.stresses],
        "target_stress": session.cands.target_stress.tolist(),
        "material_labels": list(session.cands.material_labels),
        "belief": session.belief.to_dict(),
        "ranking": session.ranking(),
        "best_index": session.best_index,
        "outstanding": _recommendation_view(session) if session.outstanding else None,
        "events": session.events,
    }


def _recommendation_view(session: Session) -> dict:
    rec = session.outstanding
    assert rec is not None
    return {
        "design": {
            "z_index": rec["z_index"],
            "v_index": rec["v_index"],
            "z": rec["z"],
            "v": rec["v"],
        },
        "ei_value": rec["ei_value"],
        "ranking": session.ranking(),
    }


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get(DATA_DIR_ENV, "./alt-planner-data")
    store = SessionStore(Path(data_dir))
    app = FastAPI(title="alt-planner advisor")
    app.state.store = store

    def _get_or_404(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreateIn) -> dict:
        try:
            session = store.create(body.as_config())
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail={"errors": exc.messages})
        return _session_view(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        session = _get_or_404(session_id)
        with session.lock:
            return _session_view(session)

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str) -> dict:
        session = _get_or_404(session_id)
        with session.lock:
            return {"session_id": session.session_id, "events": session.events}

    @app.get("/sessions/{session_id}/recommendation")
    def get_recommendation(session_id: str) -> dict:
        session = _get_or_404(session_id)
        with session.lock:
            if session.outstanding is None:
                try:
                    store.record(session, session.next_recommendation_event())
                except ScheduleExhaustedError as exc:
                    raise HTTPException(status_code=409, detail=str(exc))
            return _recommendation_view(session)

    @app.delete("/sessions/{session_id}/recommendation")
    def void_recommendation(session_id: str) -> dict:
        session = _get_or_404(session_id)
        with session.lock:
            if session.outstanding is None:
                raise HTTPException(status_code=409, detail="no outstanding recommendation")
            store.record(session, {"ts": time.time(), "event": "voided"})
            return _session_view(session)

    @app.post("/sessions/{session_id}/observations")
    def post_observation(session_id: str, body: ObservationIn) -> dict:
        session = _get_or_404(session_id)
        if not body.tau > 0:
            raise HTTPException(status_code=422, detail="tau must be > 0")
        if body.lifetime is not None:
            if not body.lifetime > 0:
                raise HTTPException(status_code=422, detail="lifetime must be > 0")
            if body.lifetime > body.tau:
                raise HTTPException(
                    status_code=422,
                    detail="a failure cannot be recorded after the termination time tau; "
                    "report a censored run (lifetime null) instead",
                )
        with session.lock:
            rec = session.outstanding
            if rec is None:
                raise HTTPException(
                    status_code=409,
                    detail="no outstanding recommendation; GET a recommendation first",
                )
            store.record(session, {
                "ts": time.time(),
                "event": "observed",
                "z_index": rec["z_index"],
                "v_index": rec["v_index"],
                "lifetime": body.lifetime,
                "tau": body.tau,
            })
            store.record(session, session.decision_event())
            return {
                "censored": body.lifetime is None,
                "best_index": session.best_index,
                "ranking": session.ranking(),
                "belief": session.belief.to_dict(),
            }

    @app.post("/prior-elicitation")
    def elicit_prior(body: PriorElicitIn) -> dict:
        """OLS on log-lifetimes of historical uncensored runs; the residual
        variance doubles as the noise_var suggestion."""
        if not body.observations:
            raise HTTPException(status_code=400, detail="need at least one observation")
        if any(o.lifetime <= 0 for o in body.observations):
            raise HTTPException(status_code=422, detail="lifetimes must be > 0")
        xs = np.array([
            feature_map(DesignPoint(z=np.asarray(o.z), v=np.asarray(o.v)))
            for o in body.observations
        ])
        ys = np.array([math.log(o.lifetime) for o in body.observations])
        n, dim = xs.shape
        if n <= dim:
            raise HTTPException(
                status_code=400,
                detail=f"need more than {dim} observations to estimate noise (got {n})",
            )
        if np.linalg.matrix_rank(xs) < dim:
            raise HTTPException(status_code=400, detail="design matrix is rank deficient")
        beta, _, _, _ = np.linalg.lstsq(xs, ys, rcond=None)
        resid = ys - xs @ beta
        noise_var = float(resid @ resid / (n - dim))
        if noise_var <= 0:
            raise HTTPException(status_code=400, detail="residual variance is zero")
        sigma = noise_var * np.linalg.inv(xs.T @ xs)
        return {
            "theta": beta.tolist(),
            "sigma_mat": sigma.reshape(-1).tolist(),
            "noise_var": noise_var,
            "n": n,
        }

    static_dir = Path(__file__).parent / "static"
    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app
