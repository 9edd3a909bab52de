"""HTTP front end: FastAPI routes over the service operations."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from . import api
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    HealthResponse,
    ReportRequest,
    ReportResponse,
    ScenarioListResponse,
    SimulateRequest,
    SimulateResponse,
)

app = FastAPI(
    title="botcorr",
    version=__version__,
    description=(
        "Behavioral keylogging-bot detection: simulate scenario traces, "
        "window and correlate per-process activity, and classify detection "
        "confidence."
    ),
)


@app.get("/healthz", response_model=HealthResponse)
def healthz() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/scenarios", response_model=ScenarioListResponse)
def scenarios() -> ScenarioListResponse:
    return ScenarioListResponse(scenarios=api.scenario_names())


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest) -> SimulateResponse:
    return api.simulate(request)


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
    # TraceError, MissingBytesError, and bad selector strings are all
    # ValueErrors: the payload was well-formed but the data wasn't.
    try:
        return api.analyze(request)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.post("/report", response_model=ReportResponse)
def report(request: ReportRequest) -> ReportResponse:
    try:
        return api.report(request)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
