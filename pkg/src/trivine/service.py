"""Stateless JSON-over-HTTP service exposing the engine to the viewer.

All handlers are pure functions of their request body; repeated identical
requests return byte-identical payloads. Long computations can be submitted
as background jobs and polled by id (in-memory store, TTL-evicted). The
server binds loopback by default and performs no authentication.
"""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from fastapi import APIRouter, FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator

from . import __version__
from . import scenarios as scen
from .errors import (
    BinTooSmall,
    DegenerateData,
    DomainError,
    IngestError,
    InvalidParams,
    OutOfRange,
    TrivineError,
    UnknownScenario,
)
from .estimate import fit_nonsimplified_binned, fit_simplified_vine, simplified_approx
from .families import family_metadata
from .field import (
    DEFAULT_LEVELS,
    GridSpec,
    marching_cubes,
    marching_squares,
    mesh_bundle,
    sample_density,
)
from .kde import read_csv_columns, rank_transform
from .vine import VineSpec3D

MAX_GRID = 192
_WORKERS = 2


class GridModel(BaseModel):
    n: int = Field(default=96, ge=2, le=MAX_GRID)
    lo: float = -3.0
    hi: float = 3.0

    def to_grid3(self) -> GridSpec:
        return GridSpec.cube(self.lo, self.hi, self.n)

    def to_grid2(self) -> GridSpec:
        return GridSpec.square(self.lo, self.hi, self.n)


class SpecRequest(BaseModel):
    spec: dict | None = None
    scenario: str | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.spec is None) == (self.scenario is None):
            raise ValueError("provide exactly one of 'spec' or 'scenario'")
        return self

    def resolve(self) -> VineSpec3D:
        if self.scenario is not None:
            return scen.get(self.scenario).spec
        return VineSpec3D.from_json(self.spec)


class MeshRequest(SpecRequest):
    grid: GridModel = GridModel()
    levels: list[float] = Field(default=list(DEFAULT_LEVELS))

    @model_validator(mode="after")
    def _levels_ascending(self):
        if any(lv <= 0 for lv in self.levels) or self.levels != sorted(self.levels):
            raise ValueError("levels must be positive and ascending")
        return self


class MarginsRequest(MeshRequest):
    pair: Literal["12", "23", "13"] = "13"


class TauCurveRequest(SpecRequest):
    points: int = Field(default=101, ge=3, le=4096)


class ApproxRequest(SpecRequest):
    n: int = Field(default=100_000, ge=100, le=1_000_000)
    seed: int = 0
    background: bool = False


class _JobStore:
    TTL = 900.0

    def __init__(self):
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=_WORKERS)

    def submit(self, fn) -> str:
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {
                "status": "pending", "progress": 0.0, "result": None,
                "error": None, "created": time.time(),
            }

        def set_progress(p: float):
            with self._lock:
                self._jobs[job_id]["progress"] = p
                self._jobs[job_id]["status"] = "running"

        def run():
            try:
                result = fn(set_progress)
            except Exception as exc:
                with self._lock:
                    self._jobs[job_id].update(status="error", error=str(exc))
                return
            with self._lock:
                self._jobs[job_id].update(status="done", progress=1.0, result=result)

        self._pool.submit(run)
        return job_id

    def get(self, job_id: str) -> dict | None:
        now = time.time()
        with self._lock:
            stale = [k for k, v in self._jobs.items() if now - v["created"] > self.TTL]
            for k in stale:
                del self._jobs[k]
            job = self._jobs.get(job_id)
            return dict(job) if job else None


def create_app() -> FastAPI:
    app = FastAPI(title="trivine service", version=__version__)
    jobs = _JobStore()
    grid_gate = threading.Semaphore(_WORKERS)
    router = APIRouter()

    @router.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @router.get("/scenarios")
    def scenarios_route():
        return scen.gallery_json()

    @router.get("/families")
    def families_route():
        return family_metadata()

    @router.post("/mesh")
    def mesh_route(req: MeshRequest):
        spec = req.resolve()
        grid = req.grid.to_grid3()
        with grid_gate:
            fld = sample_density(spec, grid)
            meshes = [marching_cubes(fld, lv) for lv in req.levels]
        return mesh_bundle(spec.to_json(), grid, meshes)

    @router.post("/margins")
    def margins_route(req: MarginsRequest):
        spec = req.resolve()
        grid = req.grid.to_grid2()
        with grid_gate:
            contours = marching_squares(spec, req.pair, grid, tuple(req.levels))
        return {
            "pair": req.pair,
            "grid": grid.to_json(),
            "contours": [c.to_json() for c in contours],
        }

    @router.post("/tau-curve")
    def tau_curve_route(req: TauCurveRequest):
        spec = req.resolve()
        grid = np.linspace(0.0, 1.0, req.points + 2)[1:-1]
        tau = spec.tau_curve(grid)
        return {"u2": grid.tolist(), "tau": tau.tolist()}

    def _approx_payload(spec: VineSpec3D, n: int, seed: int, progress) -> dict:
        progress(0.1)
        fitted = simplified_approx(spec, n=n, seed=seed)
        progress(0.9)
        cond = fitted.c13_2.as_copula()
        return {
            "spec": fitted.to_json(),
            "conditional": {**cond.to_json(), "tau": cond.tau()},
            "n": n,
            "seed": seed,
        }

    @router.post("/approx")
    def approx_route(req: ApproxRequest):
        spec = req.resolve()
        if req.background:
            job_id = jobs.submit(
                lambda progress: _approx_payload(spec, req.n, req.seed, progress)
            )
            return {"job_id": job_id}
        return _approx_payload(spec, req.n, req.seed, lambda p: None)

    @router.post("/fit")
    def fit_route(
        file: UploadFile = File(...),
        mode: Literal["simplified", "nonsimplified"] = Form("simplified"),
        bins: int = Form(8),
        bootstrap: int = Form(50),
        seed: int = Form(0),
        ranks: Literal["apply", "none"] = Form("apply"),
    ):
        text = file.file.read().decode("utf-8", errors="replace")
        data, _ = read_csv_columns(text)
        u = rank_transform(data) if ranks == "apply" else np.clip(data, 1e-10, 1 - 1e-10)
        if mode == "simplified":
            spec = fit_simplified_vine(u)
            return {"spec": spec.to_json()}
        spec, curve = fit_nonsimplified_binned(u, bins=bins, bootstrap=bootstrap, seed=seed)
        return {"spec": spec.to_json(), "tau_curve": curve.to_json()}

    @router.get("/jobs/{job_id}")
    def job_route(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"detail": "unknown job id"})
        return {k: job[k] for k in ("status", "progress", "result", "error")}

    app.include_router(router, prefix="/api/v1")
    app.include_router(router, prefix="/api")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = [
            {"loc": ".".join(str(p) for p in e["loc"]), "msg": e["msg"]}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": errors})

    @app.exception_handler(UnknownScenario)
    async def scenario_handler(request: Request, exc: UnknownScenario):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(InvalidParams)
    @app.exception_handler(DomainError)
    @app.exception_handler(OutOfRange)
    @app.exception_handler(IngestError)
    @app.exception_handler(BinTooSmall)
    @app.exception_handler(DegenerateData)
    async def params_handler(request: Request, exc: TrivineError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(Exception)
    async def internal_handler(request: Request, exc: Exception):
        error_id = uuid.uuid4().hex
        return JSONResponse(status_code=500, content={"error_id": error_id})

    _mount_viewer(app)
    return app


def _mount_viewer(app: FastAPI) -> None:
    """Serve the built viewer when its bundle exists next to the package."""
    from pathlib import Path

    from fastapi.staticfiles import StaticFiles

    for base in (Path(__file__).resolve().parents[2] / "frontend", Path("frontend")):
        if (base / "dist" / "bundle.js").exists() and (base / "index.html").exists():
            app.mount("/dist", StaticFiles(directory=base / "dist"), name="viewer-dist")
            app.mount("/", StaticFiles(directory=base, html=True), name="viewer")
            return


app = create_app()
