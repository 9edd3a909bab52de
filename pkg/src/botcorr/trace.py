"""Call vocabulary, event/trace containers, and line-delimited trace I/O.

A trace is the unit of analysis: a time-ordered sequence of API-call and
traffic observations for one monitored run. The on-disk format is UTF-8
NDJSON: one header line followed by one line per event (see `read_trace`
and `write_trace`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Optional, Union


class CallCategory(Enum):
    """Behavioral grouping of monitored call names."""

    COMM_FUNC = "CommFunc"
    FILE_ACCESS = "FileAccess"
    KEYBOARD_STATE = "KeyboardState"
    OTHER = "Other"


# The monitored user-mode call vocabulary, grouped by behavior. Names are
# matched case-sensitively; anything else is retained as OTHER so noisy hook
# logs still parse.
COMM_FUNCS = frozenset(
    {"socket", "send", "recv", "sendto", "recvfrom", "IcmpSendEcho"}
)
FILE_ACCESS_FUNCS = frozenset({"CreateFile", "OpenFile", "ReadFile", "WriteFile"})
KEYBOARD_STATE_FUNCS = frozenset(
    {"GetKeyboardState", "GetAsyncKeyState", "GetKeyNameText", "keybd_event"}
)

# Calls that move payload bytes and may carry a byte count.
TRAFFIC_CALLS = frozenset({"send", "sendto", "recv", "recvfrom"})
# Outgoing-direction subset, used for sent-byte aggregation.
SEND_CALLS = frozenset({"send", "sendto"})


def category_of(call: str) -> CallCategory:
    """Return the category of a call name; unrecognized names map to OTHER."""
    if call in COMM_FUNCS:
        return CallCategory.COMM_FUNC
    if call in FILE_ACCESS_FUNCS:
        return CallCategory.FILE_ACCESS
    if call in KEYBOARD_STATE_FUNCS:
        return CallCategory.KEYBOARD_STATE
    return CallCategory.OTHER


class TraceError(ValueError):
    """Base class for trace input problems."""


class TraceParseError(TraceError):
    """A line of trace input is malformed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TraceRangeError(TraceError):
    """An event timestamp falls outside [0, duration_ms)."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class ApiEvent:
    """One time-stamped observation attributed to a process.

    `bytes` is the payload size and is only meaningful on traffic calls
    (send/sendto/recv/recvfrom); constructing any other call with a byte
    count is rejected.
    """

    timestamp_ms: int
    process_id: int
    process_name: str
    call: str
    bytes: Optional[int] = None

    def __post_init__(self):
        if self.timestamp_ms < 0:
            raise ValueError(f"negative timestamp: {self.timestamp_ms}")
        if self.process_id <= 0:
            raise ValueError(f"process_id must be positive: {self.process_id}")
        if self.bytes is not None:
            if self.bytes < 0:
                raise ValueError(f"negative byte count: {self.bytes}")
            if self.call not in TRAFFIC_CALLS:
                raise ValueError(
                    f"byte count given for non-traffic call {self.call!r}"
                )

    @property
    def category(self) -> CallCategory:
        return category_of(self.call)


@dataclass(frozen=True)
class Trace:
    """An immutable, time-sorted event sequence for one monitored run.

    Events are stably sorted by timestamp on construction, so ties keep
    their input order. `scenario` and `seed` identify simulator output and
    stay None for captured traces.
    """

    duration_ms: int
    events: tuple[ApiEvent, ...] = ()
    scenario: Optional[str] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ValueError(f"duration_ms must be positive: {self.duration_ms}")
        ordered = tuple(sorted(self.events, key=lambda e: e.timestamp_ms))
        object.__setattr__(self, "events", ordered)
        for event in ordered:
            if event.timestamp_ms >= self.duration_ms:
                raise ValueError(
                    f"event at t={event.timestamp_ms} outside trace duration "
                    f"{self.duration_ms}"
                )

    def process_ids(self) -> list[int]:
        return sorted({e.process_id for e in self.events})

    def events_for(self, process_id: int) -> tuple[ApiEvent, ...]:
        return tuple(e for e in self.events if e.process_id == process_id)


def _require(record: dict, key: str, line_no: int):
    if key not in record:
        raise TraceParseError(line_no, f"missing required field {key!r}")
    return record[key]


def _require_int(record: dict, key: str, line_no: int) -> int:
    value = _require(record, key, line_no)
    if isinstance(value, bool) or not isinstance(value, int):
        raise TraceParseError(line_no, f"field {key!r} must be an integer")
    return value


def _require_str(record: dict, key: str, line_no: int) -> str:
    value = _require(record, key, line_no)
    if not isinstance(value, str):
        raise TraceParseError(line_no, f"field {key!r} must be a string")
    return value


def _decode_line(raw: Union[str, bytes], line_no: int) -> Optional[dict]:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceParseError(line_no, f"invalid UTF-8: {exc}") from exc
    text = raw.strip()
    if not text:
        return None
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceParseError(line_no, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(record, dict):
        raise TraceParseError(line_no, "expected a JSON object")
    return record


def read_trace(source: Union[IO[str], IO[bytes]]) -> Trace:
    """Parse a trace document from a text or binary stream.

    Line 1 must be the header object
    ``{"duration_ms": <int>, "scenario": <str|null>, "seed": <int|null>}``;
    each further non-blank line is one event
    ``{"t": <int>, "pid": <int>, "proc": <str>, "call": <str>, "bytes": <int>}``
    with ``bytes`` optional. Blank lines are skipped.

    Raises TraceParseError (malformed line) or TraceRangeError (timestamp at
    or past the declared duration), both naming the offending line number.
    """
    header: Optional[dict] = None
    duration_ms = 0
    events: list[ApiEvent] = []
    scenario: Optional[str] = None
    seed: Optional[int] = None
    line_no = 0

    for raw in source:
        line_no += 1
        record = _decode_line(raw, line_no)
        if record is None:
            continue
        if header is None:
            header = record
            duration_ms = _require_int(record, "duration_ms", line_no)
            if duration_ms <= 0:
                raise TraceParseError(line_no, "duration_ms must be positive")
            scenario = record.get("scenario")
            if scenario is not None and not isinstance(scenario, str):
                raise TraceParseError(line_no, "field 'scenario' must be a string or null")
            seed = record.get("seed")
            if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
                raise TraceParseError(line_no, "field 'seed' must be an integer or null")
            continue

        t = _require_int(record, "t", line_no)
        if t < 0:
            raise TraceParseError(line_no, f"negative timestamp: {t}")
        if t >= duration_ms:
            raise TraceRangeError(
                line_no, f"timestamp {t} is outside duration {duration_ms}"
            )
        pid = _require_int(record, "pid", line_no)
        proc = _require_str(record, "proc", line_no)
        call = _require_str(record, "call", line_no)
        nbytes = record.get("bytes")
        if nbytes is not None and (isinstance(nbytes, bool) or not isinstance(nbytes, int)):
            raise TraceParseError(line_no, "field 'bytes' must be an integer")
        try:
            events.append(
                ApiEvent(
                    timestamp_ms=t,
                    process_id=pid,
                    process_name=proc,
                    call=call,
                    bytes=nbytes,
                )
            )
        except ValueError as exc:
            raise TraceParseError(line_no, str(exc)) from exc

    if header is None:
        raise TraceParseError(max(line_no, 1), "missing header line")
    return Trace(
        duration_ms=duration_ms, events=tuple(events), scenario=scenario, seed=seed
    )


def trace_to_text(trace: Trace) -> str:
    """Serialize a trace to its canonical NDJSON document.

    The output is deterministic byte-for-byte: fixed key order, compact
    separators, one trailing newline per line.
    """
    header = {
        "duration_ms": trace.duration_ms,
        "scenario": trace.scenario,
        "seed": trace.seed,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for event in trace.events:
        record: dict = {
            "t": event.timestamp_ms,
            "pid": event.process_id,
            "proc": event.process_name,
            "call": event.call,
        }
        if event.bytes is not None:
            record["bytes"] = event.bytes
        lines.append(json.dumps(record, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def trace_from_text(text: str) -> Trace:
    """Parse a trace from an in-memory NDJSON document."""
    return read_trace(iter(text.splitlines(keepends=True)))


def write_trace(trace: Trace, sink: Union[IO[str], IO[bytes]]) -> None:
    """Write a trace to a text or binary stream; inverse of `read_trace`."""
    text = trace_to_text(trace)
    try:
        sink.write(text)  # type: ignore[arg-type]
    except TypeError:
        sink.write(text.encode("utf-8"))  # type: ignore[arg-type]
