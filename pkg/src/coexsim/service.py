"""HTTP facade over the simulator: run, replay, audit.

The service owns no state; every request builds a scenario, runs it, and
returns trace-derived reports. The command line can either call the same
functions in-process or talk to a running instance of this app.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import __version__
from .builtins import get_builtin, list_builtins
from .golden import GoldenError, golden_names, replay_builtin
from .metrics import audit_compliance
from .runner import RunArtifacts, run_scenario
from .scenario import Scenario, ScenarioError, scenario_from_dict
from .trace import TraceParseError, parse_trace

app = FastAPI(title="coexsim", version=__version__,
              description="Deterministic Wi-Fi / LTE-u coexistence simulator")


class RunRequest(BaseModel):
    builtin: str | None = None
    scenario: dict | None = None
    seed: int | None = Field(default=None, ge=0)
    duration_ms: int | None = Field(default=None, gt=0)
    include_trace: bool = False

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "RunRequest":
        if (self.builtin is None) == (self.scenario is None):
            raise ValueError("provide exactly one of 'builtin' or 'scenario'")
        return self


class RunResponse(BaseModel):
    scenario: str
    seed: int
    horizon_ns: int
    trace_sha256: str
    metrics: dict
    compliance: dict
    trace: str | None = None


class ReplayResponse(BaseModel):
    name: str
    ok: bool
    expected_sha256: str
    actual_sha256: str
    divergence_line: int | None
    expected_line: str
    actual_line: str


class AuditRequest(BaseModel):
    trace: str


class AuditResponse(BaseModel):
    ok: bool
    records: int
    report: dict


def _resolve_scenario(req: RunRequest) -> Scenario:
    if req.builtin is not None:
        try:
            return get_builtin(req.builtin)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
    try:
        return scenario_from_dict(req.scenario or {})
    except ScenarioError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def run_to_response(artifacts: RunArtifacts, include_trace: bool) -> RunResponse:
    return RunResponse(
        scenario=artifacts.scenario.simulation.name,
        seed=artifacts.seed,
        horizon_ns=artifacts.horizon_ns,
        trace_sha256=artifacts.trace.sha256(),
        metrics=artifacts.metrics.to_dict(),
        compliance=artifacts.compliance.to_dict(),
        trace=artifacts.trace.text() if include_trace else None,
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/scenarios")
def scenarios() -> dict:
    return {"builtin": list_builtins(), "golden": list(golden_names())}


@app.get("/scenarios/{name}")
def scenario_detail(name: str) -> dict:
    try:
        return get_builtin(name).model_dump()
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc


@app.post("/runs")
def runs(req: RunRequest) -> RunResponse:
    scenario = _resolve_scenario(req)
    horizon = req.duration_ms * 1_000_000 if req.duration_ms else None
    artifacts = run_scenario(scenario, seed=req.seed, horizon_ns=horizon)
    return run_to_response(artifacts, req.include_trace)


@app.post("/replays/{name}")
def replays(name: str) -> ReplayResponse:
    try:
        result = replay_builtin(name)
    except (GoldenError, KeyError) as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return ReplayResponse(**result.to_dict())


@app.post("/audits")
def audits(req: AuditRequest) -> AuditResponse:
    try:
        records = parse_trace(req.trace)
    except TraceParseError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    report = audit_compliance(records)
    return AuditResponse(ok=report.ok, records=len(records),
                         report=report.to_dict())
