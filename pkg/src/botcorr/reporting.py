"""Verdict records, NDJSON report serialization, and table rendering.

A report is one NDJSON record per analyzed process. Field layout (order is
part of the format): pid, proc, rho_comm_s1, rho_comm_s2, rho_file_s1,
rho_file_s2, n_with, n_without, keylog, confidence, config. The *_s1
values are correlations over the full window grid, *_s2 after idle-window
removal; an undefined s2 correlation serializes as null. `n_without` holds
the post-removal window count per pair, since each pair drops its own idle
windows.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from .detector import DetectionVerdict
from .windows import normalize

RECORD_FIELDS = (
    "pid",
    "proc",
    "rho_comm_s1",
    "rho_comm_s2",
    "rho_file_s1",
    "rho_file_s2",
    "n_with",
    "n_without",
    "keylog",
    "confidence",
    "config",
)


def verdict_record(
    verdict: DetectionVerdict,
    trace_info: Optional[dict] = None,
    series: Optional[dict] = None,
) -> dict:
    """Flatten one verdict into its report record.

    `trace_info` (scenario/seed/duration of the analyzed trace) is echoed
    inside the config snapshot; `series` attaches the underlying per-window
    values when a caller asks for them.
    """
    config = verdict.config.to_snapshot()
    if trace_info is not None:
        config["trace"] = trace_info
    return {
        "pid": verdict.process_id,
        "proc": verdict.process_name,
        "rho_comm_s1": verdict.result_comm.rho_with_zeros,
        "rho_comm_s2": verdict.result_comm.rho_without_zeros,
        "rho_file_s1": verdict.result_file.rho_with_zeros,
        "rho_file_s2": verdict.result_file.rho_without_zeros,
        "n_with": verdict.result_comm.n_with,
        "n_without": {
            "comm": verdict.result_comm.n_without,
            "file": verdict.result_file.n_without,
        },
        "keylog": verdict.keylogging_present,
        "confidence": verdict.confidence.wire,
        "config": config,
        "notes": list(verdict.notes),
        "series": series,
    }


def series_dump(signals) -> dict:
    """Raw and peak-normalized per-window values for a list of signals."""
    dump = {}
    for signal in signals:
        dump[signal.label] = {
            "window_ms": signal.grid.window_ms,
            "values": list(signal.values),
            "normalized": list(normalize(signal).values),
        }
    return dump


def dumps_records(records: Sequence[dict]) -> str:
    """Records to NDJSON text; deterministic byte-for-byte."""
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)


def parse_report(text: str) -> list[dict]:
    """Parse NDJSON report text, checking each record carries the full
    field set."""
    records = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"report line {line_no}: invalid JSON: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise ValueError(f"report line {line_no}: expected a JSON object")
        missing = [f for f in RECORD_FIELDS if f not in record]
        if missing:
            raise ValueError(
                f"report line {line_no}: missing fields {', '.join(missing)}"
            )
        records.append(record)
    return records


def _fmt_rho(value) -> str:
    if value is None:
        return "undef"
    return f"{value:.3f}"


_CONFIDENCE_DISPLAY = {"NoDetection": "N/A"}

_COLUMNS = (
    ("run", 10),
    ("pid", 6),
    ("proc", 16),
    ("comm s1", 9),
    ("comm s2", 9),
    ("file s1", 9),
    ("file s2", 9),
    ("keylog", 7),
    ("confidence", 10),
)


def _record_row(record: dict, run: str = "") -> list[str]:
    confidence = record["confidence"]
    return [
        run,
        str(record["pid"]),
        str(record["proc"]),
        _fmt_rho(record["rho_comm_s1"]),
        _fmt_rho(record["rho_comm_s2"]),
        _fmt_rho(record["rho_file_s1"]),
        _fmt_rho(record["rho_file_s2"]),
        "Yes" if record["keylog"] else "No",
        _CONFIDENCE_DISPLAY.get(confidence, confidence),
    ]


def run_label(record: dict, fallback: str = "") -> str:
    trace_info = record.get("config", {}).get("trace") or {}
    scenario = trace_info.get("scenario")
    seed = trace_info.get("seed")
    if scenario and seed is not None:
        return f"{scenario}/{seed}"
    return scenario or fallback


def render_table(records: Sequence[dict], labels: Optional[Sequence[str]] = None) -> str:
    """Fixed-width comparison table, one row per record."""
    if labels is None:
        labels = [run_label(r) for r in records]
    rows = [_record_row(r, label) for r, label in zip(records, labels)]

    show_run = any(row[0] for row in rows)
    columns = _COLUMNS if show_run else _COLUMNS[1:]
    if not show_run:
        rows = [row[1:] for row in rows]

    widths = [
        max(width, *(len(row[i]) for row in rows)) if rows else width
        for i, (_, width) in enumerate(columns)
    ]
    header = "  ".join(name.ljust(w) for (name, _), w in zip(columns, widths))
    rule = "-" * len(header)
    lines = [header, rule]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def merge_reports(
    reports: Sequence[Sequence[dict]], labels: Optional[Sequence[str]] = None
) -> tuple[list[dict], list[str]]:
    """Merge several reports into labeled rows plus compatibility warnings.

    Rows keep their source order. When analyzer configurations differ
    across reports the merge still proceeds, but a warning says so and each
    row keeps its own config for inspection.
    """
    if labels is None:
        labels = [f"run{i + 1}" for i in range(len(reports))]
    rows: list[dict] = []
    warnings: list[str] = []
    configs = []
    for report, label in zip(reports, labels):
        for record in report:
            merged = {"run": run_label(record, fallback=label), **record}
            rows.append(merged)
            config = {k: v for k, v in record["config"].items() if k != "trace"}
            configs.append(config)
    if configs and any(c != configs[0] for c in configs[1:]):
        warnings.append(
            "analyzer configurations differ across reports; "
            "each row keeps its own config"
        )
    return rows, warnings
