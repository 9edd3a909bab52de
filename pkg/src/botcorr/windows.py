"""Fixed-width windowing of traces into per-signal series.

Every signal is a per-window aggregate for one process: a call-count series
or a sent-byte series on a shared window grid. Idle-window removal operates
on pairs, since which windows count as idle depends on both series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Collection, Union

from .trace import CallCategory, SEND_CALLS, Trace, category_of

DEFAULT_WINDOW_MS = 10_000

# A selector picks which calls feed a count series: one call name, a whole
# category, or an explicit set of names.
Selector = Union[str, CallCategory, Collection[str]]


class IdlePolicy(Enum):
    """Which windows idle removal drops from a pair."""

    BOTH_ZERO = "both-zero"
    EITHER_ZERO = "either-zero"


class MissingBytesError(ValueError):
    """An outgoing traffic event has no byte count to aggregate."""


@dataclass(frozen=True)
class WindowGrid:
    """A fixed-width window layout: `window_count` windows of `window_ms`."""

    window_ms: int
    window_count: int

    def __post_init__(self):
        if self.window_ms <= 0:
            raise ValueError(f"window_ms must be positive: {self.window_ms}")
        # Idle removal can legitimately shrink a grid to zero windows.
        if self.window_count < 0:
            raise ValueError(f"window_count must be >= 0: {self.window_count}")

    @classmethod
    def for_duration(cls, duration_ms: int, window_ms: int = DEFAULT_WINDOW_MS) -> "WindowGrid":
        """Grid covering [0, duration_ms); a partial final window is kept."""
        if duration_ms <= 0:
            raise ValueError(f"duration_ms must be positive: {duration_ms}")
        return cls(window_ms=window_ms, window_count=math.ceil(duration_ms / window_ms))

    def index_of(self, timestamp_ms: int) -> int:
        return timestamp_ms // self.window_ms


@dataclass(frozen=True)
class SignalSeries:
    """Per-window values for one named signal (counts, byte sums, or
    normalized reals)."""

    label: str
    grid: WindowGrid
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != self.grid.window_count:
            raise ValueError(
                f"series {self.label!r} has {len(self.values)} values for "
                f"{self.grid.window_count} windows"
            )
        if any(v < 0 for v in self.values):
            raise ValueError(f"series {self.label!r} has negative values")


@dataclass(frozen=True)
class SignalPair:
    """Two signals on the same grid, ready for correlation."""

    a: SignalSeries
    b: SignalSeries

    def __post_init__(self):
        if self.a.grid != self.b.grid:
            raise ValueError(
                f"grid mismatch: {self.a.label!r} vs {self.b.label!r}"
            )


def _call_matches(call: str, selector: Selector) -> bool:
    if isinstance(selector, CallCategory):
        return category_of(call) == selector
    if isinstance(selector, str):
        return call == selector
    return call in selector


def selector_label(selector: Selector) -> str:
    if isinstance(selector, CallCategory):
        return selector.value
    if isinstance(selector, str):
        return selector
    return "+".join(sorted(selector))


def count_signal(
    trace: Trace,
    process_id: int,
    selector: Selector,
    grid: WindowGrid,
    label: str = "",
) -> SignalSeries:
    """Count matching calls of one process per window.

    Window index is floor(t / window_ms): an event exactly on a boundary
    belongs to the window it opens. A process with no matching events
    yields an all-zero series.
    """
    counts = [0] * grid.window_count
    for event in trace.events:
        if event.process_id == process_id and _call_matches(event.call, selector):
            counts[grid.index_of(event.timestamp_ms)] += 1
    return SignalSeries(label or selector_label(selector), grid, tuple(counts))


def bytes_sent_signal(
    trace: Trace, process_id: int, grid: WindowGrid, label: str = "BytesSent"
) -> SignalSeries:
    """Sum outgoing payload bytes (send/sendto) of one process per window.

    Receive-side traffic never contributes. An outgoing event without a
    byte count raises MissingBytesError, naming the event.
    """
    sums = [0] * grid.window_count
    for event in trace.events:
        if event.process_id != process_id or event.call not in SEND_CALLS:
            continue
        if event.bytes is None:
            raise MissingBytesError(
                f"{event.call} at t={event.timestamp_ms} (pid {event.process_id}) "
                f"has no byte count"
            )
        sums[grid.index_of(event.timestamp_ms)] += event.bytes
    return SignalSeries(label, grid, tuple(sums))


def normalize(series: SignalSeries) -> SignalSeries:
    """Scale a series by its maximum, mapping values into [0, 1].

    An all-zero (or empty) series is returned unchanged. Normalization is a
    reporting aid only: it is rank-preserving, so it cannot change any rank
    correlation computed from the series.
    """
    peak = max(series.values, default=0)
    if peak == 0:
        return series
    return SignalSeries(series.label, series.grid, tuple(v / peak for v in series.values))


def remove_idle(pair: SignalPair, policy: IdlePolicy = IdlePolicy.BOTH_ZERO) -> SignalPair:
    """Drop idle windows from a pair, preserving the order of the rest.

    BOTH_ZERO drops windows where both values are zero; EITHER_ZERO drops
    windows where at least one is. Both output series share one shortened
    grid; removing everything yields two empty series.
    """
    if policy is IdlePolicy.BOTH_ZERO:
        keep = [
            i
            for i, (x, y) in enumerate(zip(pair.a.values, pair.b.values))
            if x != 0 or y != 0
        ]
    else:
        keep = [
            i
            for i, (x, y) in enumerate(zip(pair.a.values, pair.b.values))
            if x != 0 and y != 0
        ]
    grid = WindowGrid(window_ms=pair.a.grid.window_ms, window_count=len(keep))
    return SignalPair(
        a=SignalSeries(pair.a.label, grid, tuple(pair.a.values[i] for i in keep)),
        b=SignalSeries(pair.b.label, grid, tuple(pair.b.values[i] for i in keep)),
    )
