"""HTTP service exposing experiment runs, the network benchmark, and reports.

The CLI is a thin client of this app; it either spawns it in-process or
talks to a remote instance, so everything the package can do is reachable
through these endpoints.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import SwarmMeshError, ValidationError
from ..metrics import write_report
from ..netbench import run_netbench
from ..policy import random_weights, save_weights
from ..runtime import load_plan, plan_from_json, run_experiment
from ..metrics import summarize
from ..transport import PRESET_NAMES
from .schemas import (
    CdfSummary,
    HealthResponse,
    NetbenchRequest,
    NetbenchResponse,
    RandomWeightsRequest,
    RandomWeightsResponse,
    ReportRequest,
    ReportResponse,
    RunRequest,
    RunResponse,
)

SEED_ENV_VAR = "SWARM_MESH_SEED"


def create_app() -> FastAPI:
    app = FastAPI(title="swarm-mesh", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/presets")
    def presets():
        return {"presets": list(PRESET_NAMES)}

    @app.post("/weights/random", response_model=RandomWeightsResponse)
    def weights_random(req: RandomWeightsRequest):
        w = random_weights(req.seed, latent_dim=req.latent_dim,
                           hidden=tuple(req.hidden))
        if req.path is not None:
            try:
                save_weights(w, req.path)
            except OSError as exc:
                raise HTTPException(status_code=500, detail=f"io error: {exc}")
        return RandomWeightsResponse(
            path=req.path,
            latent_dim=w.latent_dim,
            layer_counts={"enc": len(w.enc.layers), "gnn": len(w.gnn.layers),
                          "act": len(w.act.layers)},
        )

    @app.post("/run", response_model=RunResponse)
    def run(req: RunRequest):
        if (req.plan is None) == (req.plan_path is None):
            raise HTTPException(
                status_code=400, detail="provide exactly one of plan, plan_path"
            )
        try:
            plan = (
                load_plan(req.plan_path)
                if req.plan_path is not None
                else plan_from_json(req.plan)
            )
        except FileNotFoundError as exc:
            raise HTTPException(status_code=500, detail=f"io error: {exc}")
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        seed = req.seed_override
        if seed is None and os.environ.get(SEED_ENV_VAR):
            seed = int(os.environ[SEED_ENV_VAR])
        if seed is not None:
            from dataclasses import replace

            plan = replace(plan, seed=seed)
        try:
            traces = run_experiment(plan, out_dir=req.out_dir)
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"io error: {exc}")
        files = sorted(
            f for f in os.listdir(req.out_dir) if f.endswith(".ndjson")
        )
        return RunResponse(
            out_dir=req.out_dir,
            episodes=len(traces),
            trace_files=files,
            summary=summarize(traces, plan.mode.name),
        )

    @app.post("/netbench", response_model=NetbenchResponse)
    def netbench(req: NetbenchRequest):
        try:
            datasets = run_netbench(
                nodes=req.nodes, rates=req.rates, presets=req.presets,
                backend=req.backend, duration=req.duration, seed=req.seed,
                out_dir=req.out_dir,
            )
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"io error: {exc}")
        out = []
        for ds in datasets:
            file = None
            if req.out_dir is not None:
                safe_rate = f"{ds.rate:g}".replace(".", "_")
                file = f"cdf_{ds.preset}_{safe_rate}.csv"
            out.append(CdfSummary(
                preset=ds.preset, rate=ds.rate, total_records=ds.total_records,
                delivered_fraction=ds.delivered_fraction,
                saturated=ds.saturated, file=file,
            ))
        return NetbenchResponse(datasets=out)

    @app.post("/report", response_model=ReportResponse)
    def report(req: ReportRequest):
        try:
            summary = write_report(
                req.traces_dir, req.out_dir, compare_dir=req.compare_dir,
                label=req.label,
            )
        except (ValidationError, SwarmMeshError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except FileNotFoundError as exc:
            raise HTTPException(status_code=500, detail=f"io error: {exc}")
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"io error: {exc}")
        return ReportResponse(out_dir=req.out_dir, summary=summary)

    return app


app = create_app()
