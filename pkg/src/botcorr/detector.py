"""Per-process keylogging-bot verdicts from correlated behavior signals.

A process is flagged only if it ever invoked a keyboard-interception call;
without that gate the verdict is NO_DETECTION no matter how the signals
correlate. For flagged processes, confidence comes from how many of the
two configured correlations (keyboard activity vs outgoing bytes, keyboard
activity vs file writes) strictly exceed the threshold: both -> STRONG,
one -> NORMAL, none -> WEAK.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Optional, Union

from .correlation import CorrelationResult, SpearmanMethod, correlate_pair
from .trace import KEYBOARD_STATE_FUNCS, CallCategory, Trace
from .windows import (
    DEFAULT_WINDOW_MS,
    IdlePolicy,
    Selector,
    SignalPair,
    SignalSeries,
    WindowGrid,
    bytes_sent_signal,
    count_signal,
    selector_label,
)


class Confidence(IntEnum):
    """Detection confidence, ordered so comparisons read naturally."""

    NO_DETECTION = 0
    WEAK = 1
    NORMAL = 2
    STRONG = 3

    @property
    def wire(self) -> str:
        return _WIRE_NAMES[self]

    @property
    def display(self) -> str:
        """Human table form; NO_DETECTION renders as N/A."""
        return "N/A" if self is Confidence.NO_DETECTION else _WIRE_NAMES[self]

    @classmethod
    def from_wire(cls, name: str) -> "Confidence":
        try:
            return _FROM_WIRE[name]
        except KeyError:
            raise ValueError(f"unknown confidence {name!r}") from None


_WIRE_NAMES = {
    Confidence.NO_DETECTION: "NoDetection",
    Confidence.WEAK: "Weak",
    Confidence.NORMAL: "Normal",
    Confidence.STRONG: "Strong",
}
_FROM_WIRE = {name: level for level, name in _WIRE_NAMES.items()}


class CorrelationSet(Enum):
    """Which correlation feeds the threshold test: the full grid (s1) or
    the idle-removed one (s2)."""

    WITH_IDLE = "s1"
    WITHOUT_IDLE = "s2"


@dataclass(frozen=True)
class CountSignalSpec:
    """A count series over the calls picked by `selector`."""

    selector: Selector
    label: str = ""

    def build(self, trace: Trace, process_id: int, grid: WindowGrid) -> SignalSeries:
        return count_signal(trace, process_id, self.selector, grid, self.label)

    def describe(self) -> str:
        return self.label or selector_label(self.selector)


@dataclass(frozen=True)
class BytesSentSignalSpec:
    """The outgoing-byte series (send/sendto payload sums)."""

    label: str = "BytesSent"

    def build(self, trace: Trace, process_id: int, grid: WindowGrid) -> SignalSeries:
        return bytes_sent_signal(trace, process_id, grid, self.label)

    def describe(self) -> str:
        return self.label


SignalSpec = Union[CountSignalSpec, BytesSentSignalSpec]


@dataclass(frozen=True)
class DetectorConfig:
    """Everything detect() needs; defaults reproduce the standard analysis.

    The keyboard-side signal is shared by both correlated pairs by
    construction: pair one is (keyboard, comm), pair two is
    (keyboard, file).
    """

    threshold: float = 0.5
    correlation_set: CorrelationSet = CorrelationSet.WITHOUT_IDLE
    keyboard_signal: CountSignalSpec = CountSignalSpec("GetAsyncKeyState")
    comm_signal: SignalSpec = BytesSentSignalSpec()
    file_signal: SignalSpec = CountSignalSpec("WriteFile")
    keylog_markers: frozenset = KEYBOARD_STATE_FUNCS
    method: SpearmanMethod = SpearmanMethod.RANK_PEARSON
    idle: IdlePolicy = IdlePolicy.BOTH_ZERO
    window_ms: int = DEFAULT_WINDOW_MS

    def __post_init__(self):
        if not 0 < self.threshold < 1:
            raise ValueError(f"threshold must lie in (0, 1): {self.threshold}")
        if self.window_ms <= 0:
            raise ValueError(f"window_ms must be positive: {self.window_ms}")
        if not self.keylog_markers:
            raise ValueError("keylog_markers must not be empty")

    def to_snapshot(self) -> dict:
        """Flat JSON-safe echo of the effective configuration."""
        return {
            "window_ms": self.window_ms,
            "threshold": self.threshold,
            "idle_policy": self.idle.value,
            "method": self.method.value,
            "set": self.correlation_set.value,
            "keyboard_signal": _selector_snapshot(self.keyboard_signal.selector),
            "comm_signal": _signal_snapshot(self.comm_signal),
            "file_signal": _signal_snapshot(self.file_signal),
            "markers": sorted(self.keylog_markers),
        }

    @classmethod
    def from_snapshot(cls, snapshot: dict) -> "DetectorConfig":
        """Rebuild a config from its echo; extra keys are ignored."""
        return cls(
            threshold=snapshot["threshold"],
            correlation_set=CorrelationSet(snapshot["set"]),
            keyboard_signal=CountSignalSpec(
                _selector_from_snapshot(snapshot["keyboard_signal"])
            ),
            comm_signal=_signal_from_snapshot(snapshot["comm_signal"]),
            file_signal=_signal_from_snapshot(snapshot["file_signal"]),
            keylog_markers=frozenset(snapshot["markers"]),
            method=SpearmanMethod(snapshot["method"]),
            idle=IdlePolicy(snapshot["idle_policy"]),
            window_ms=snapshot["window_ms"],
        )


def _selector_snapshot(selector: Selector) -> str:
    if isinstance(selector, CallCategory):
        return f"category:{selector.value}"
    if isinstance(selector, str):
        return f"call:{selector}"
    return "any-of:" + ",".join(sorted(selector))


def _selector_from_snapshot(text: str) -> Selector:
    kind, _, rest = text.partition(":")
    if kind == "category":
        return CallCategory(rest)
    if kind == "call":
        return rest
    if kind == "any-of":
        return frozenset(rest.split(","))
    raise ValueError(f"unknown selector snapshot {text!r}")


def _signal_snapshot(spec: SignalSpec) -> str:
    if isinstance(spec, BytesSentSignalSpec):
        return "bytes-sent"
    return _selector_snapshot(spec.selector)


def _signal_from_snapshot(text: str) -> SignalSpec:
    if text == "bytes-sent":
        return BytesSentSignalSpec()
    return CountSignalSpec(_selector_from_snapshot(text))


@dataclass(frozen=True)
class DetectionVerdict:
    process_id: int
    process_name: str
    keylogging_present: bool
    result_comm: CorrelationResult
    result_file: CorrelationResult
    confidence: Confidence
    config: DetectorConfig
    notes: tuple = ()


def keylogging_present(
    trace: Trace, process_id: int, markers: frozenset = KEYBOARD_STATE_FUNCS
) -> bool:
    """True iff the process invoked any keyboard-interception marker call."""
    return any(
        e.process_id == process_id and e.call in markers for e in trace.events
    )


def classify(
    rho_comm: Optional[float],
    rho_file: Optional[float],
    keylog: bool,
    threshold: float = 0.5,
) -> Confidence:
    """Four-level confidence from the two correlations and the keylog gate.

    Comparison is strict: a rho exactly at the threshold does not count as
    high. An undefined rho (None) never exceeds the threshold.
    """
    if not keylog:
        return Confidence.NO_DETECTION
    high = sum(
        1 for rho in (rho_comm, rho_file) if rho is not None and rho > threshold
    )
    if high == 2:
        return Confidence.STRONG
    if high == 1:
        return Confidence.NORMAL
    return Confidence.WEAK


def _selected_rho(result: CorrelationResult, which: CorrelationSet) -> Optional[float]:
    if which is CorrelationSet.WITH_IDLE:
        return result.rho_with_zeros
    return result.rho_without_zeros


def detect(trace: Trace, config: DetectorConfig = DetectorConfig()) -> list[DetectionVerdict]:
    """One verdict per process in the trace, ordered by process id.

    Deterministic: identical (trace, config) inputs yield identical
    verdicts.
    """
    grid = WindowGrid.for_duration(trace.duration_ms, config.window_ms)
    names: dict[int, str] = {}
    for event in trace.events:
        names.setdefault(event.process_id, event.process_name)

    verdicts = []
    for pid in sorted(names):
        keyboard = config.keyboard_signal.build(trace, pid, grid)
        comm = config.comm_signal.build(trace, pid, grid)
        file_writes = config.file_signal.build(trace, pid, grid)
        result_comm = correlate_pair(
            SignalPair(keyboard, comm), config.method, config.idle
        )
        result_file = correlate_pair(
            SignalPair(keyboard, file_writes), config.method, config.idle
        )
        keylog = keylogging_present(trace, pid, config.keylog_markers)
        rho_comm = _selected_rho(result_comm, config.correlation_set)
        rho_file = _selected_rho(result_file, config.correlation_set)
        confidence = classify(rho_comm, rho_file, keylog, config.threshold)

        notes = []
        if rho_comm is None:
            notes.append(f"{result_comm.label_a} vs {result_comm.label_b}: "
                         "correlation undefined after idle removal")
        if rho_file is None:
            notes.append(f"{result_file.label_a} vs {result_file.label_b}: "
                         "correlation undefined after idle removal")

        verdicts.append(
            DetectionVerdict(
                process_id=pid,
                process_name=names[pid],
                keylogging_present=keylog,
                result_comm=result_comm,
                result_file=result_file,
                confidence=confidence,
                config=config,
                notes=tuple(notes),
            )
        )
    return verdicts
