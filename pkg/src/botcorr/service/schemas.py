"""Request/response models for the analysis service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

ScenarioName = Literal["e1", "e2", "e3.1", "e3.2", "e4.1", "e4.2", "e5"]


class SimulateRequest(BaseModel):
    scenario: ScenarioName
    seed: int
    duration_ms: int = Field(default=900_000, gt=0)
    process_id: Optional[int] = Field(default=None, gt=0)
    process_name: Optional[str] = None


class TraceHeader(BaseModel):
    duration_ms: int
    scenario: Optional[str]
    seed: Optional[int]


class SimulateResponse(BaseModel):
    header: TraceHeader
    event_count: int
    trace: str  # canonical NDJSON trace document


class AnalyzeOptions(BaseModel):
    """Analyzer knobs; defaults give the standard ten-second analysis."""

    window_ms: int = Field(default=10_000, gt=0)
    threshold: float = Field(default=0.5, gt=0, lt=1)
    idle_policy: Literal["both-zero", "either-zero"] = "both-zero"
    method: Literal["rank-pearson", "classic-d2"] = "rank-pearson"
    correlation_set: Literal["s1", "s2"] = "s2"
    # Keyboard-side selector: "call:<Name>", "category:<Category>", or
    # "any-of:<Name,Name,...>".
    keyboard_signal: str = "call:GetAsyncKeyState"
    dump_series: bool = False


class AnalyzeRequest(BaseModel):
    trace: str  # NDJSON trace document
    options: AnalyzeOptions = AnalyzeOptions()


class WindowsRemaining(BaseModel):
    comm: int
    file: int


class VerdictRecord(BaseModel):
    pid: int
    proc: str
    rho_comm_s1: float
    rho_comm_s2: Optional[float]
    rho_file_s1: float
    rho_file_s2: Optional[float]
    n_with: int
    n_without: WindowsRemaining
    keylog: bool
    confidence: Literal["NoDetection", "Weak", "Normal", "Strong"]
    config: dict
    notes: list[str] = []
    series: Optional[dict] = None


class AnalyzeResponse(BaseModel):
    verdicts: list[VerdictRecord]
    detected: bool


class ReportRequest(BaseModel):
    reports: list[str] = Field(min_length=1)  # NDJSON report documents
    labels: Optional[list[str]] = None


class MergedRow(BaseModel):
    run: str
    pid: int
    proc: str
    rho_comm_s1: float
    rho_comm_s2: Optional[float]
    rho_file_s1: float
    rho_file_s2: Optional[float]
    n_with: int
    n_without: WindowsRemaining
    keylog: bool
    confidence: str
    config: dict
    notes: list[str] = []
    series: Optional[dict] = None


class ReportResponse(BaseModel):
    rows: list[MergedRow]
    warnings: list[str]


class ScenarioListResponse(BaseModel):
    scenarios: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
