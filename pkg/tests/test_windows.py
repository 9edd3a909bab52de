import random

import pytest

from botcorr import (
    CallCategory,
    IdlePolicy,
    KEYBOARD_STATE_FUNCS,
    MissingBytesError,
    SignalPair,
    SignalSeries,
    Trace,
    WindowGrid,
    bytes_sent_signal,
    count_signal,
    normalize,
    remove_idle,
)
from conftest import event


def series(values, window_ms=10_000, label="x"):
    grid = WindowGrid(window_ms=window_ms, window_count=len(values))
    return SignalSeries(label, grid, tuple(values))


class TestWindowGrid:
    def test_for_duration_rounds_up(self):
        assert WindowGrid.for_duration(20_000).window_count == 2
        assert WindowGrid.for_duration(25_000).window_count == 3  # partial kept
        assert WindowGrid.for_duration(1).window_count == 1

    def test_index_of_floor_boundary(self):
        grid = WindowGrid.for_duration(20_000)
        assert grid.index_of(9_999) == 0
        assert grid.index_of(10_000) == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            WindowGrid(window_ms=0, window_count=1)
        with pytest.raises(ValueError):
            WindowGrid(window_ms=10, window_count=-1)
        with pytest.raises(ValueError):
            WindowGrid.for_duration(0)


class TestCountSignal:
    def test_direct_bucketing(self):
        trace = Trace(
            duration_ms=20_000,
            events=(event(500, "send", nbytes=1), event(3_000, "send", nbytes=1),
                    event(12_000, "send", nbytes=1)),
        )
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert count_signal(trace, 1, "send", grid).values == (2, 1)

    def test_no_matches_all_zero(self):
        trace = Trace(duration_ms=90_000, events=(event(5, "socket"),))
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert count_signal(trace, 1, "WriteFile", grid).values == (0,) * 9

    def test_boundary_event_counts_in_opening_window(self):
        trace = Trace(duration_ms=20_000, events=(event(10_000, "WriteFile"),))
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert count_signal(trace, 1, "WriteFile", grid).values == (0, 1)

    def test_category_and_set_selectors(self):
        trace = Trace(
            duration_ms=10_000,
            events=(
                event(1, "GetAsyncKeyState"),
                event(2, "keybd_event"),
                event(3, "WriteFile"),
                event(4, "send", nbytes=9),
            ),
        )
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert count_signal(trace, 1, CallCategory.KEYBOARD_STATE, grid).values == (2,)
        assert count_signal(trace, 1, KEYBOARD_STATE_FUNCS, grid).values == (2,)
        assert count_signal(trace, 1, frozenset({"send", "WriteFile"}), grid).values == (2,)

    def test_other_processes_ignored(self):
        trace = Trace(
            duration_ms=10_000,
            events=(event(1, "WriteFile", pid=1), event(2, "WriteFile", pid=2)),
        )
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert count_signal(trace, 1, "WriteFile", grid).values == (1,)

    def test_default_labels(self):
        trace = Trace(duration_ms=10_000)
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert count_signal(trace, 1, "WriteFile", grid).label == "WriteFile"
        assert count_signal(trace, 1, CallCategory.COMM_FUNC, grid).label == "CommFunc"


class TestBytesSentSignal:
    def test_sums_within_window(self):
        trace = Trace(
            duration_ms=20_000,
            events=(event(1_000, "send", nbytes=100), event(9_000, "send", nbytes=50)),
        )
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert bytes_sent_signal(trace, 1, grid).values == (150, 0)

    def test_receive_traffic_excluded(self):
        trace = Trace(
            duration_ms=30_000,
            events=(event(1, "recv", nbytes=400), event(11_000, "recvfrom", nbytes=400)),
        )
        grid = WindowGrid.for_duration(trace.duration_ms)
        assert bytes_sent_signal(trace, 1, grid).values == (0, 0, 0)

    def test_sparse_windows(self):
        trace = Trace(
            duration_ms=900_000,
            events=(event(25_000, "send", nbytes=512), event(55_000, "sendto", nbytes=512)),
        )
        grid = WindowGrid.for_duration(trace.duration_ms)
        values = bytes_sent_signal(trace, 1, grid).values
        assert len(values) == 90
        assert values[2] == 512 and values[5] == 512
        assert sum(values) == 1024

    def test_missing_byte_count_raises(self):
        trace = Trace(duration_ms=10_000, events=(event(777, "send"),))
        grid = WindowGrid.for_duration(trace.duration_ms)
        with pytest.raises(MissingBytesError, match="t=777"):
            bytes_sent_signal(trace, 1, grid)


class TestNormalize:
    def test_divides_by_max(self):
        assert normalize(series([0, 5, 10])).values == (0.0, 0.5, 1.0)

    def test_all_zero_unchanged(self):
        s = series([0, 0, 0])
        assert normalize(s).values == (0, 0, 0)

    def test_single_window(self):
        assert normalize(series([7])).values == (1.0,)

    def test_idempotent(self):
        rng = random.Random(5)
        for _ in range(100):
            s = series([rng.randint(0, 20) for _ in range(rng.randint(1, 40))])
            once = normalize(s)
            assert normalize(once) == once
            assert all(0 <= v <= 1 for v in once.values)
            if any(s.values):
                assert max(once.values) == 1.0

    def test_preserves_orderings(self):
        rng = random.Random(6)
        for _ in range(100):
            s = series([rng.randint(0, 20) for _ in range(rng.randint(2, 40))])
            n = normalize(s)
            for i in range(len(s.values)):
                for j in range(len(s.values)):
                    assert (s.values[i] < s.values[j]) == (n.values[i] < n.values[j])


class TestRemoveIdle:
    def test_both_zero_example(self):
        pair = SignalPair(series([0, 2, 0, 3]), series([0, 0, 1, 4]))
        out = remove_idle(pair, IdlePolicy.BOTH_ZERO)
        assert out.a.values == (2, 0, 3)
        assert out.b.values == (0, 1, 4)
        assert out.a.grid.window_count == 3

    def test_either_zero_example(self):
        pair = SignalPair(series([0, 2, 0, 3]), series([0, 0, 1, 4]))
        out = remove_idle(pair, IdlePolicy.EITHER_ZERO)
        assert out.a.values == (3,)
        assert out.b.values == (4,)

    def test_total_removal(self):
        pair = SignalPair(series([0, 0]), series([0, 0]))
        out = remove_idle(pair)
        assert out.a.values == () and out.b.values == ()
        assert out.a.grid.window_count == 0

    def test_default_policy_is_both_zero(self):
        pair = SignalPair(series([0, 1]), series([1, 0]))
        assert remove_idle(pair).a.values == (0, 1)

    def test_invariants_random(self):
        rng = random.Random(7)
        for _ in range(300):
            n = rng.randint(0, 30)
            a = [rng.choice([0, 0, 0, 1, 2, 5]) for _ in range(n)]
            b = [rng.choice([0, 0, 1, 3]) for _ in range(n)]
            pair = SignalPair(series(a), series(b))
            out = remove_idle(pair, IdlePolicy.BOTH_ZERO)
            # no joint-zero survives, nothing else is dropped
            assert all(x != 0 or y != 0 for x, y in zip(out.a.values, out.b.values))
            expected = [(x, y) for x, y in zip(a, b) if x != 0 or y != 0]
            assert list(zip(out.a.values, out.b.values)) == expected

    def test_grid_mismatch_rejected(self):
        with pytest.raises(ValueError):
            SignalPair(series([1, 2]), series([1, 2, 3]))


class TestSeriesValidation:
    def test_length_must_match_grid(self):
        grid = WindowGrid(window_ms=10, window_count=3)
        with pytest.raises(ValueError):
            SignalSeries("x", grid, (1, 2))

    def test_negative_values_rejected(self):
        grid = WindowGrid(window_ms=10, window_count=1)
        with pytest.raises(ValueError):
            SignalSeries("x", grid, (-1,))


class TestConservation:
    def test_count_conservation_and_partition(self):
        rng = random.Random(8)
        calls = ["send", "WriteFile", "GetAsyncKeyState", "socket"]
        for _ in range(200):
            duration = rng.randint(1, 60_000)
            window_ms = rng.choice([1_000, 7_000, 10_000])
            events = tuple(
                event(
                    rng.randrange(duration),
                    rng.choice(calls),
                    nbytes=None,
                )
                for _ in range(rng.randint(0, 50))
            )
            events = tuple(
                e if e.call != "send"
                else event(e.timestamp_ms, "send", nbytes=rng.randint(0, 9))
                for e in events
            )
            trace = Trace(duration_ms=duration, events=events)
            grid = WindowGrid.for_duration(duration, window_ms)
            total = 0
            for call in calls:
                s = count_signal(trace, 1, call, grid)
                assert sum(s.values) == sum(1 for e in events if e.call == call)
                total += sum(s.values)
            assert total == len(events)  # every event lands in exactly one bucket
