"""Service operations, independent of any transport.

The FastAPI routes and the command line both funnel through these
functions, so a CLI run and an HTTP request with the same payload produce
the same bytes. Domain errors (TraceError, ValueError) propagate; the HTTP
layer maps them to status codes and the CLI maps them to exit codes.
"""

from __future__ import annotations

from ..detector import DetectorConfig, detect
from ..reporting import merge_reports, parse_report, series_dump, verdict_record
from ..simulator import Scenario, ScenarioSpec, generate
from ..trace import KEYBOARD_STATE_FUNCS, trace_from_text, trace_to_text
from ..windows import WindowGrid
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    ReportRequest,
    ReportResponse,
    SimulateRequest,
    SimulateResponse,
    TraceHeader,
)


def simulate(request: SimulateRequest) -> SimulateResponse:
    spec_kwargs = dict(
        scenario=Scenario.parse(request.scenario),
        seed=request.seed,
        duration_ms=request.duration_ms,
    )
    if request.process_id is not None:
        spec_kwargs["process_id"] = request.process_id
    if request.process_name is not None:
        spec_kwargs["process_name"] = request.process_name
    trace = generate(ScenarioSpec(**spec_kwargs))
    return SimulateResponse(
        header=TraceHeader(
            duration_ms=trace.duration_ms, scenario=trace.scenario, seed=trace.seed
        ),
        event_count=len(trace.events),
        trace=trace_to_text(trace),
    )


def _config_from_options(options) -> DetectorConfig:
    return DetectorConfig.from_snapshot(
        {
            "window_ms": options.window_ms,
            "threshold": options.threshold,
            "idle_policy": options.idle_policy,
            "method": options.method,
            "set": options.correlation_set,
            "keyboard_signal": options.keyboard_signal,
            "comm_signal": "bytes-sent",
            "file_signal": "call:WriteFile",
            "markers": sorted(KEYBOARD_STATE_FUNCS),
        }
    )


def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
    trace = trace_from_text(request.trace)
    config = _config_from_options(request.options)
    trace_info = {
        "scenario": trace.scenario,
        "seed": trace.seed,
        "duration_ms": trace.duration_ms,
    }
    records = []
    for verdict in detect(trace, config):
        series = None
        if request.options.dump_series:
            grid = WindowGrid.for_duration(trace.duration_ms, config.window_ms)
            series = series_dump(
                spec.build(trace, verdict.process_id, grid)
                for spec in (config.keyboard_signal, config.comm_signal, config.file_signal)
            )
        records.append(verdict_record(verdict, trace_info=trace_info, series=series))
    detected = any(r["confidence"] != "NoDetection" for r in records)
    return AnalyzeResponse(verdicts=records, detected=detected)


def report(request: ReportRequest) -> ReportResponse:
    parsed = [parse_report(text) for text in request.reports]
    rows, warnings = merge_reports(parsed, request.labels)
    return ReportResponse(rows=rows, warnings=warnings)


def scenario_names() -> list[str]:
    return [s.value for s in Scenario]


# Transport-agnostic dispatch table; the CLI uses it to run "requests"
# in-process with the exact payloads it would send over HTTP.
ENDPOINTS = {
    "/simulate": (SimulateRequest, simulate),
    "/analyze": (AnalyzeRequest, analyze),
    "/report": (ReportRequest, report),
}


def dispatch(path: str, payload: dict) -> dict:
    request_model, handler = ENDPOINTS[path]
    response = handler(request_model.model_validate(payload))
    return response.model_dump(mode="json")
