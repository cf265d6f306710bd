"""HTTP facade for the planning engine.

A thin FastAPI app over one loaded scenario and a what-if session. Bound
analysis streams per-type results as server-sent events so a client can
render them progressively; alteration solves are side-effect free until a
decision promotes them into the session's current mix.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from . import capacity, mcdm
from .alteration import AlterationRequest, AlterationResult, alter_subtype, alter_type
from .model import SchemaError, scenario_from_dict, scenario_to_dict
from .session import (
    Session,
    SessionRegistry,
    apply_decision,
    record_alteration,
    session_to_dict,
)
from .store import StoredScenario, StoreError, from_scenario

MAIN_SESSION = "main"


class SolveBody(BaseModel):
    mix: Optional[list[float]] = None
    sub_mix: Optional[list[list[float]]] = None


class FeasibleBody(BaseModel):
    mix: list[float]


class AlterBody(BaseModel):
    type: Optional[str] = None
    sub_type: Optional[str] = None
    delta: float
    method: str = "eq"
    session: str = MAIN_SESSION
    baseline: Optional[list[float]] = None
    segments: int = 500


class DecisionBody(BaseModel):
    entry_index: int
    decision: str
    session: str = MAIN_SESSION


class CompareBody(BaseModel):
    a: list[float]
    b: list[float]
    upper: Optional[list[float]] = None
    lower: Optional[list[float]] = None
    mode: str = "normalized"
    eps: Optional[list[float]] = None
    subset: Optional[list[str]] = None
    upper_bound_only: bool = False


class SimilarityBody(BaseModel):
    a: list[float]
    b: list[float]
    eps: Optional[list[float]] = None


class ProximityBody(BaseModel):
    mix: list[float]
    ideal: Optional[list[float]] = None
    anti_ideal: Optional[list[float]] = None
    eps: Optional[list[float]] = None


def _finite(v: float) -> Optional[float]:
    return None if v is None or not math.isfinite(v) else float(v)


def _utilization_payload(util: dict[str, tuple[float, float]]) -> dict:
    out = {}
    for zid, (used, cap) in util.items():
        out[zid] = {
            "hours_used": float(used),
            "capacity": float(cap),
            "percent": 100.0 * used / cap if cap > 0 else None,
        }
    return out


def _capacity_payload(res: capacity.CapacityResult) -> dict:
    return {
        "status": res.status,
        "case_mix": [float(v) for v in res.case_mix],
        "sub_mix": [[float(v) for v in row] for row in res.sub_mix],
        "total": float(res.total),
        "utilization": _utilization_payload(res.utilization),
        "message": res.message,
    }


def _alteration_payload(res: AlterationResult) -> dict:
    return {
        "status": res.status,
        "method": res.method,
        "new_mix": [float(v) for v in res.new_mix],
        "new_sub_mix": [[float(v) for v in row] for row in res.new_sub_mix],
        "deviations": [float(v) for v in res.deviations],
        "sub_deviations": None
        if res.sub_deviations is None
        else [[float(v) for v in row] for row in res.sub_deviations],
        "uniform_deviation": _finite(res.uniform_deviation)
        if res.uniform_deviation is not None
        else None,
        "objective_value": _finite(res.objective_value),
        "total": _finite(res.total),
        "total_impact": _finite(res.total_impact),
        "utilization": _utilization_payload(res.utilization),
        "approximate": res.approximate,
        "message": res.message,
    }


def _error(status_code: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status_code, detail={"code": code, "message": message})


class ServiceState:
    def __init__(self, stored: StoredScenario, state_dir: Optional[Path] = None):
        self.stored = stored
        self.state_dir = Path(state_dir) if state_dir else None
        self.sessions = SessionRegistry()
        self._init_session()

    def _init_session(self) -> None:
        s = self.stored.scenario
        mix = s.mix_fractions()
        if abs(float(mix.sum()) - 1.0) <= 1e-6:
            res = capacity.max_throughput(s, mix=mix)
            baseline = res.case_mix
            baseline_sub = res.sub_mix
        else:
            baseline = np.zeros(len(s.patient_types))
            baseline_sub = [np.zeros(len(t.sub_types)) for t in s.patient_types]
        self.sessions.put(
            Session(
                id=MAIN_SESSION,
                scenario_ref=self.stored.fingerprint,
                baseline_mix=baseline,
                baseline_sub_mix=baseline_sub,
            )
        )

    def persist_session(self, session: Session) -> None:
        if self.state_dir is None:
            return
        self.state_dir.mkdir(parents=True, exist_ok=True)
        path = self.state_dir / f"session-{session.id}.json"
        path.write_text(json.dumps(session_to_dict(session), indent=2) + "\n")

    def session_or_404(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise _error(404, "unknown_session", f"no session {session_id!r}")
        return session


def create_app(
    stored: StoredScenario,
    state_dir: Optional[Path] = None,
    ui_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="casemix", version="0.1.0")
    state = ServiceState(stored, state_dir)
    app.state.engine = state

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422, content={"error": {"code": "validation", "message": str(exc)}}
        )

    @app.exception_handler(HTTPException)
    async def http_error_handler(request: Request, exc: HTTPException):
        detail = exc.detail if isinstance(exc.detail, dict) else {"code": "error", "message": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content={"error": detail})

    # -- scenario ----------------------------------------------------------

    @app.get("/api/scenario")
    def get_scenario():
        st = state.stored
        return {
            "scenario": scenario_to_dict(st.scenario),
            "fingerprint": st.fingerprint,
            "type_bounds": None
            if st.type_bounds is None
            else [_finite(v) for v in st.type_bounds],
        }

    @app.put("/api/scenario")
    def put_scenario(doc: dict):
        try:
            scenario = scenario_from_dict(doc.get("scenario", doc))
            state.stored = from_scenario(scenario)
        except (SchemaError, StoreError) as exc:
            code = getattr(exc, "code", "parse")
            raise _error(422, code, str(exc))
        state._init_session()
        if state.state_dir is not None:
            from .store import save_scenario

            state.state_dir.mkdir(parents=True, exist_ok=True)
            save_scenario(state.stored, state.state_dir / "scenario.json")
        return {"ok": True, "fingerprint": state.stored.fingerprint}

    # -- analysis ----------------------------------------------------------

    @app.get("/api/bounds")
    def stream_bounds():
        st = state.stored
        scenario = st.scenario
        ids = [t.id for t in scenario.patient_types]

        def gen():
            results = np.zeros(len(ids))

            if st.type_bounds is not None:
                cached = st.type_bounds
                for g, tid in enumerate(ids):
                    results[g] = cached[g]
                    payload = {"index": g, "type": tid, "bound": _finite(cached[g]),
                               "total_types": len(ids)}
                    yield f"event: bound\ndata: {json.dumps(payload)}\n\n"
            else:
                computed = np.zeros(len(ids))
                for g, tid in enumerate(ids):
                    mix = np.zeros(len(ids))
                    mix[g] = 1.0
                    value = capacity._single_focus_bound(
                        scenario, mix, scenario.sub_mix_fractions()
                    )
                    computed[g] = value
                    override = scenario.patient_types[g].upper_bound_override
                    results[g] = override if override is not None else value
                    payload = {"index": g, "type": tid, "bound": _finite(results[g]),
                               "total_types": len(ids)}
                    yield f"event: bound\ndata: {json.dumps(payload)}\n\n"
                st.type_bounds = results.copy()
            done = {"bounds": [_finite(v) for v in results]}
            yield f"event: done\ndata: {json.dumps(done)}\n\n"

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.post("/api/solve")
    def solve(body: SolveBody):
        sub = None
        if body.sub_mix is not None:
            sub = [np.asarray(r, dtype=float) for r in body.sub_mix]
        res = capacity.max_throughput(state.stored.scenario, mix=body.mix, sub_mix=sub)
        if res.status != "optimal":
            raise _error(409, "infeasible", res.message or "no feasible cohort")
        return _capacity_payload(res)

    @app.post("/api/feasible")
    def feasible(body: FeasibleBody):
        rep = capacity.check_feasibility(state.stored.scenario, body.mix)
        return {"feasible": rep.feasible, "overloads": {k: float(v) for k, v in rep.overloads.items()}}

    @app.post("/api/proximity")
    def proximity_score(body: ProximityBody):
        bounds = state.stored.ensure_type_bounds()
        ideal = body.ideal if body.ideal is not None else [float(v) for v in bounds]
        anti = body.anti_ideal if body.anti_ideal is not None else [0.0] * len(ideal)
        score = mcdm.proximity(body.mix, ideal, anti, eps=body.eps)
        return {"proximity": score.proximity, "progress": score.progress}

    @app.post("/api/similarity")
    def similarity_report(body: SimilarityBody):
        eps = body.eps
        if eps is None:
            eps = [float(v) for v in state.stored.ensure_type_bounds()]
        rep = mcdm.similarity(body.a, body.b, eps)
        ids = [t.id for t in state.stored.scenario.patient_types]
        return {
            "per_type_significant": [bool(v) for v in rep.per_type_significant],
            "significant_types": rep.significant_ids(ids),
            "los": rep.los,
            "lod": rep.lod,
            "similar_overall": rep.similar_overall,
            "eps": [float(v) for v in eps],
        }

    @app.post("/api/compare")
    def compare_mixes(body: CompareBody):
        scenario = state.stored.scenario
        upper = body.upper
        if upper is None:
            upper = [float(v) for v in state.stored.ensure_type_bounds()]
        subset_idx = None
        if body.subset is not None:
            subset_idx = [scenario.type_index(tid) for tid in body.subset]
        rep = mcdm.compare(
            body.a,
            body.b,
            upper=upper,
            lower=body.lower,
            mode=body.mode,
            eps=body.eps,
            subset=subset_idx,
            upper_bound_only=body.upper_bound_only,
        )
        return {
            "deltas": [float(v) for v in rep.deltas],
            "gain_vector": [float(v) for v in rep.gain_vector],
            "loss_vector": [float(v) for v in rep.loss_vector],
            "gain": rep.gain,
            "loss": rep.loss,
            "ratio": rep.ratio,
            "verdict": rep.verdict,
            "significant": rep.significant,
            "subset": None
            if rep.subset is None
            else [scenario.patient_types[i].id for i in rep.subset],
        }

    # -- alteration workflow -------------------------------------------------

    def _run_alteration(body: AlterBody) -> dict:
        if body.delta == 0:
            raise _error(422, "validation", "delta must be nonzero")
        scenario = state.stored.scenario
        session = state.session_or_404(body.session)
        baseline = (
            np.asarray(body.baseline, dtype=float)
            if body.baseline is not None
            else session.current_mix
        )
        request = AlterationRequest(
            baseline=baseline,
            delta=body.delta,
            method=body.method,
            target_type=body.type,
            target_subtype=body.sub_type,
            type_bounds=state.stored.ensure_type_bounds(),
            sub_type_bounds=state.stored.ensure_sub_type_bounds()
            if body.sub_type is not None
            else None,
            baseline_sub_mix=[np.array(r) for r in session.current_sub_mix]
            if body.baseline is None
            else None,
            segments=body.segments,
        )
        if body.sub_type is not None:
            result = alter_subtype(scenario, request)
        else:
            result = alter_type(scenario, request)
        if result.status == "infeasible":
            raise _error(409, "infeasible", result.message)
        with state.sessions.lock(session.id):
            index = record_alteration(session, request, result)
            state.persist_session(session)
        payload = _alteration_payload(result)
        payload["entry_index"] = index
        return payload

    @app.post("/api/alter")
    def alter(body: AlterBody):
        if body.type is None:
            raise _error(422, "validation", "field 'type' is required")
        return _run_alteration(body)

    @app.post("/api/alter-subtype")
    def alter_sub(body: AlterBody):
        if body.sub_type is None:
            raise _error(422, "validation", "field 'sub_type' is required")
        return _run_alteration(body)

    @app.post("/api/decision")
    def decide(body: DecisionBody):
        session = state.session_or_404(body.session)
        with state.sessions.lock(session.id):
            apply_decision(session, body.entry_index, body.decision)
            state.persist_session(session)
        return session_to_dict(session)

    @app.get("/api/session")
    def get_session(session: str = MAIN_SESSION):
        return session_to_dict(state.session_or_404(session))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(scenario_path: str | Path, host: str = "127.0.0.1", port: int = 8000,
          state_dir: Optional[str | Path] = None,
          ui_dir: Optional[str | Path] = None) -> None:
    """Blocking entry point used by the command line."""
    import uvicorn

    from .store import load_scenario

    stored = load_scenario(scenario_path)
    app = create_app(
        stored,
        state_dir=Path(state_dir) if state_dir else None,
        ui_dir=Path(ui_dir) if ui_dir else None,
    )
    uvicorn.run(app, host=host, port=port)
