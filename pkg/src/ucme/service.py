"""HTTP service exposing interactive sessions to the companion UI.

Evolution work (warm-up, post-selection expansion) runs on a background
thread per session; requests observe the latest completed state and get
conflict responses while the session is busy.
"""

from __future__ import annotations

import threading
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .archive import ArchiveConfig, Elite
from .domain import (
    DomainConfig,
    SpecError,
    apartment_spec,
    parse_design_spec,
    tessellation_of,
)
from .domain.evaluate import room_sides, trace_loops
from .engine import DasMethod, Session, SessionConfig, init_session
from .metrics import RunLog, Snapshot, usc_metrics

INITIALIZING = "initializing"
AWAITING = "awaiting_selection"
EVOLVING = "evolving"
FAILED = "failed"


class SessionRequest(BaseModel):
    ds: Optional[dict] = None
    seed: int = 0
    das: str = "corners"
    resolution: int = 64
    window_size: int = 9
    evals_per_selection: int = 10_000
    initial_individuals: int = 100
    sites: int = Field(default_factory=lambda: DomainConfig().sites)
    warmup_eval_cap: int = 500_000
    snapshot_every: int = 1000


class SelectionRequest(BaseModel):
    alt_id: str


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status,
                         detail={"code": code, "message": message})


class SessionRuntime:
    """One live session plus its background worker bookkeeping."""

    def __init__(self, sid: str, ds, config: SessionConfig, das: DasMethod,
                 snapshot_every: int):
        self.id = sid
        self.ds = ds
        self.config = config
        self.das = das
        self.snapshot_every = snapshot_every
        self.lock = threading.Lock()
        self.status = INITIALIZING
        self.error: str | None = None
        self.session: Session | None = None
        self.pending: dict[str, Elite] = {}
        self.pending_payload: list[dict] = []
        self.archive_views: dict[str, dict] = {}
        self.history_payload: list[dict] = []
        self.snapshots: list[Snapshot] = []

    # -- worker-side ----------------------------------------------------

    def observer(self, session: Session) -> None:
        if session.evals_done % self.snapshot_every == 0:
            self.snapshots.append(self._snapshot(session))

    def _snapshot(self, session: Session) -> Snapshot:
        feas = session.feasible
        mx = feas.max_fitness()
        return Snapshot(
            evals_so_far=session.evals_done,
            selection_index=session.selections_done,
            coverage=feas.coverage(),
            max_fitness=0.0 if mx is None else mx,
            qd_score=feas.qd_score(),
            max_usc=0.0, mean_usc=0.0, mean_wusc=0.0, sum_wusc=0.0,
            local_diversity=0.0, local_mean_fitness=0.0, local_mean_usc=0.0,
        )

    def warm_up(self) -> None:
        try:
            session = init_session(self.ds, self.config)
            with self.lock:
                self.session = session
                self.snapshots.append(self._snapshot(session))
            self._finish_activity(first=True)
        except Exception as exc:
            with self.lock:
                self.status = FAILED
                self.error = str(exc)

    def evolve(self, chosen: Elite) -> None:
        try:
            self.session.apply_selection(chosen, observer=self.observer)
            record = self.session.history[-1]
            entry = {
                "s": record.s,
                "method": record.method.value,
                "cell": list(chosen.cell),
                "bc": list(chosen.evaluation.bc),
                "fitness": chosen.evaluation.fitness,
                "geometry": alternative_geometry(chosen, self.ds,
                                                 self.config.domain),
            }
            with self.lock:
                self.history_payload.append(entry)
                self.snapshots.append(self._snapshot(self.session))
            self._finish_activity()
        except Exception as exc:   # pragma: no cover - defensive
            with self.lock:
                self.status = FAILED
                self.error = str(exc)

    def _finish_activity(self, first: bool = False) -> None:
        session = self.session
        alternatives = session.sample_alternatives(self.das)
        payload = self._describe(alternatives)
        views = {
            "feasible": self._archive_view(session, "feasible"),
            "infeasible": self._archive_view(session, "infeasible"),
        }
        with self.lock:
            self.pending = {d["alt_id"]: e
                            for d, e in zip(payload, alternatives)}
            self.pending_payload = payload
            self.archive_views = views
            self.status = AWAITING

    def resample(self, das: DasMethod) -> None:
        session = self.session
        alternatives = session.sample_alternatives(das)
        payload = self._describe(alternatives)
        with self.lock:
            self.pending = {d["alt_id"]: e
                            for d, e in zip(payload, alternatives)}
            self.pending_payload = payload

    def _describe(self, alternatives: list[Elite]) -> list[dict]:
        out = []
        for i, elite in enumerate(alternatives):
            out.append({
                "alt_id": f"{self.id}-{len(self.history_payload)}-{i}",
                "cell": list(elite.cell),
                "bc": list(elite.evaluation.bc),
                "fitness": elite.evaluation.fitness,
                "feasibility": elite.evaluation.feasibility_score,
                "geometry": alternative_geometry(elite, self.ds,
                                                 self.config.domain),
            })
        return out

    def _archive_view(self, session: Session, which: str) -> dict:
        archive = session.feasible if which == "feasible" \
            else session.infeasible
        return {
            "which": which,
            "resolution": archive.resolution,
            "bc1_range": list(archive.config.bc1_range),
            "bc2_range": list(archive.config.bc2_range),
            "quality": archive.quality_grid(),
            "window": {
                "origin": list(session.window.origin),
                "size": session.window.size,
            },
            "coverage": archive.coverage(),
            "evals_done": session.evals_done,
            "selections": session.selections_done,
        }

    # -- request-side ---------------------------------------------------

    def handle(self) -> dict:
        with self.lock:
            out = {
                "id": self.id,
                "status": self.status,
                "das": self.das.value,
                "selections": len(self.history_payload),
                "alternatives_ready": bool(self.pending_payload),
            }
            if self.session is not None:
                out["evals_done"] = self.session.evals_done
                out["warmup_evals"] = self.session.warmup_evals
            if self.error:
                out["error"] = self.error
            return out

    def export_runlog(self) -> str:
        with self.lock:
            log = RunLog(
                config={
                    "user": "human",
                    "das": self.das.value,
                    "selections": len(self.history_payload),
                    "evals_per_selection": self.config.evals_per_selection,
                    "window_size": self.config.window_size,
                    "resolution": self.config.archive.resolution,
                    "sites": self.config.domain.sites,
                    "warmup_evals": (self.session.warmup_evals
                                     if self.session else 0),
                },
                seed=self.config.seed,
                run_index=0,
                snapshots=list(self.snapshots),
                selections=[
                    {k: v for k, v in entry.items() if k != "geometry"}
                    for entry in self.history_payload
                ],
            )
            if self.session is not None:
                log.final_feasible = self.session.feasible.dump()
                log.final_infeasible = self.session.infeasible.dump()
            return log.to_jsonl()


def alternative_geometry(elite: Elite, ds, domain_config) -> dict:
    """Render-ready geometry: room boundary polygons in meters plus
    opening segments."""
    genome = elite.genome
    tess = tessellation_of(genome, ds, domain_config)
    ra, rb, _ = room_sides(tess, genome.assignment)
    boundary = ra != rb
    rooms = []
    for unit in ds.units:
        eids = np.nonzero(boundary & ((ra == unit.id) | (rb == unit.id)))[0]
        if len(eids) == 0:
            continue
        loops = trace_loops(tess, eids)
        polygons = [
            [[float(x), float(y)] for x, y in chain]
            for chain, _ in loops if len(chain) >= 3
        ]
        if polygons:
            rooms.append({
                "id": unit.id,
                "name": unit.name,
                "kind": unit.kind,
                "polygons": polygons,
            })
    openings = []
    for o in genome.openings:
        eid = tess.edge_id_of(o.edge)
        if eid is None:
            continue
        seg = tess.edge_segment(eid)
        openings.append({
            "kind": o.kind,
            "rooms": list(o.rooms),
            "segment": [[float(seg[0][0]), float(seg[0][1])],
                        [float(seg[1][0]), float(seg[1][1])]],
        })
    return {
        "bounds": {"width": ds.width, "height": ds.height},
        "rooms": rooms,
        "openings": openings,
    }


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="ucme session service")
    sessions: dict[str, SessionRuntime] = {}

    def get_runtime(sid: str) -> SessionRuntime:
        runtime = sessions.get(sid)
        if runtime is None:
            raise _error(404, "unknown_session", f"no session {sid}")
        return runtime

    @app.post("/sessions", status_code=201)
    def create_session(req: SessionRequest) -> dict:
        try:
            ds = parse_design_spec(req.ds) if req.ds else apartment_spec()
            das = DasMethod(req.das)
            config = SessionConfig(
                archive=ArchiveConfig(resolution=req.resolution),
                domain=DomainConfig(sites=req.sites),
                window_size=req.window_size,
                evals_per_selection=req.evals_per_selection,
                initial_individuals=req.initial_individuals,
                warmup_eval_cap=req.warmup_eval_cap,
                seed=req.seed,
            )
        except (SpecError, ValueError) as exc:
            raise _error(422, "invalid_request", str(exc))
        sid = uuid.uuid4().hex[:12]
        runtime = SessionRuntime(sid, ds, config, das, req.snapshot_every)
        sessions[sid] = runtime
        threading.Thread(target=runtime.warm_up, daemon=True).start()
        return runtime.handle()

    @app.get("/sessions/{sid}")
    def get_session(sid: str) -> dict:
        return get_runtime(sid).handle()

    @app.get("/sessions/{sid}/alternatives")
    def get_alternatives(sid: str, das: str | None = Query(None)) -> dict:
        runtime = get_runtime(sid)
        with runtime.lock:
            if runtime.status != AWAITING:
                raise _error(409, "not_awaiting",
                             f"session is {runtime.status}")
        if das is not None:
            try:
                method = DasMethod(das)
            except ValueError as exc:
                raise _error(422, "invalid_das", str(exc))
            runtime.resample(method)
        with runtime.lock:
            return {"alternatives": runtime.pending_payload}

    @app.post("/sessions/{sid}/selection")
    def submit_selection(sid: str, req: SelectionRequest) -> dict:
        runtime = get_runtime(sid)
        with runtime.lock:
            if runtime.status != AWAITING:
                raise _error(409, "not_awaiting",
                             f"session is {runtime.status}")
            chosen = runtime.pending.get(req.alt_id)
            if chosen is None:
                raise _error(404, "unknown_alternative",
                             f"no pending alternative {req.alt_id}")
            runtime.status = EVOLVING
            runtime.pending = {}
            runtime.pending_payload = []
        threading.Thread(target=runtime.evolve, args=(chosen,),
                         daemon=True).start()
        return {"status": EVOLVING, "accepted": req.alt_id}

    @app.get("/sessions/{sid}/archive")
    def get_archive(sid: str, which: str = Query("feasible")) -> dict:
        runtime = get_runtime(sid)
        if which not in ("feasible", "infeasible"):
            raise _error(422, "invalid_archive", f"unknown archive {which}")
        with runtime.lock:
            view = runtime.archive_views.get(which)
            if view is None:
                raise _error(409, "not_ready", "archive view not ready yet")
            return view

    @app.get("/sessions/{sid}/history")
    def get_history(sid: str) -> dict:
        runtime = get_runtime(sid)
        with runtime.lock:
            return {"history": runtime.history_payload}

    @app.get("/sessions/{sid}/export", response_class=PlainTextResponse)
    def export(sid: str) -> str:
        return get_runtime(sid).export_runlog()

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app
