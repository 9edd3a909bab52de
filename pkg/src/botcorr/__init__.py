"""Behavioral keylogging-bot detection over windowed API-call traces."""

from .correlation import CorrelationResult, SpearmanMethod, correlate_pair, rank_average, spearman
from .detector import (
    BytesSentSignalSpec,
    Confidence,
    CorrelationSet,
    CountSignalSpec,
    DetectionVerdict,
    DetectorConfig,
    classify,
    detect,
    keylogging_present,
)
from .simulator import (
    LONG_SENTENCES,
    SHORT_SENTENCES,
    Scenario,
    ScenarioSpec,
    TypingProfile,
    generate,
    generate_suite,
)
from .trace import (
    ApiEvent,
    CallCategory,
    COMM_FUNCS,
    FILE_ACCESS_FUNCS,
    KEYBOARD_STATE_FUNCS,
    Trace,
    TraceError,
    TraceParseError,
    TraceRangeError,
    category_of,
    read_trace,
    trace_from_text,
    trace_to_text,
    write_trace,
)
from .windows import (
    DEFAULT_WINDOW_MS,
    IdlePolicy,
    MissingBytesError,
    SignalPair,
    SignalSeries,
    WindowGrid,
    bytes_sent_signal,
    count_signal,
    normalize,
    remove_idle,
)

__version__ = "0.1.0"
