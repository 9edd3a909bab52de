"""Seeded synthetic traces for the seven canned detection scenarios.

Each scenario models one behavioral mix of an IRC-style bot (or a benign
chat client) over a 15-minute run:

* e1   idle bot: keepalive traffic only, plus periodic bulk chatter.
* e2   commanded bot: e1 plus command/response episodes touching files.
* e3.1 monitoring bot, user types long sentences (no exfiltration).
* e3.2 monitoring bot, user types short sentences (no exfiltration).
* e4.1 exfiltrating bot, long sentences: each finished sentence is sent out.
* e4.2 exfiltrating bot, short sentences: the strongest behavioral signal.
* e5   benign chat client: human-paced messaging, no keyboard polling.

Generation is deterministic: every behavioral component draws from its own
stream seeded by (seed, component name), so e.g. the comms baseline of e3.1
is byte-identical to e1's for the same seed, and e4.x is exactly e3.x plus
exfiltration events.

The timing and size constants below are behavioral parameters of the
simulator, frozen by the regression suite; change them and the canned
verdicts change.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .trace import ApiEvent, Trace

DEFAULT_DURATION_MS = 900_000

# Connection keepalive: one inbound ping and one outbound pong of fixed size
# per tick. The period divides the default window, so every analysis window
# sees the same keepalive byte total and the baseline carries no ordering
# information of its own.
KEEPALIVE_PERIOD_MS = 5_000
KEEPALIVE_BYTES = 64

# Occasional bulk chatter the idle bot emits on its own.
BULK_GAP_MS = (150_000, 300_000)
BULK_SENDS = (2, 6)
BULK_SEND_BYTES = (100, 400)
BULK_SPACING_MS = (5, 30)

# Command/response episodes (e2 only).
COMMAND_GAP_MS = (60_000, 150_000)
COMMAND_BYTES = (20, 60)
RESPONSE_COUNT = (2, 8)
RESPONSE_BYTES = (60, 400)
RESPONSE_SPACING_MS = (20, 200)
EPISODE_FILE_OPS = (1, 3)
EPISODE_FILE_DELAY_MS = (50, 2000)

# Typing arrives in sessions: the user types for a stretch, then leaves the
# keyboard. The idle stretches, and the per-session pace drawn inside the
# profile's pause range, make per-window keyboard activity and file writes
# rise and fall together instead of saturating every window.
SESSION_TYPING_MS = (20_000, 50_000)
SESSION_BREAK_MS = (15_000, 45_000)

# Exfiltration: one outbound send shortly after each finished sentence,
# sized like the sentence itself.
EXFIL_DELAY_MS = (5, 50)

# Benign chat client (e5).
CHAT_GAP_MS = (4_000, 30_000)
CHAT_SEND_BYTES = (10, 120)
CHAT_RECV_BYTES = (10, 200)
CHAT_REPLY_DELAY_MS = (300, 2_500)
CHAT_FILE_GAP_MS = (60_000, 240_000)

BOT_PROCESS_ID = 1001
BOT_PROCESS_NAME = "spybot.exe"
CHAT_PROCESS_NAME = "chatclient.exe"


class Scenario(Enum):
    """The seven canned behavioral scenarios."""

    IDLE_BOT = "e1"
    COMMANDED_BOT = "e2"
    MONITOR_LONG = "e3.1"
    MONITOR_SHORT = "e3.2"
    EXFIL_LONG = "e4.1"
    EXFIL_SHORT = "e4.2"
    BENIGN_CHAT = "e5"

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        normalized = text.strip().lower().replace("_", ".")
        for member in cls:
            if member.value == normalized:
                return member
        raise ValueError(
            f"unknown scenario {text!r}; choose from "
            + ", ".join(m.value for m in cls)
        )

    @property
    def involves_typing(self) -> bool:
        return self in _TYPING_SCENARIOS

    @property
    def exfiltrates(self) -> bool:
        return self in (Scenario.EXFIL_LONG, Scenario.EXFIL_SHORT)


_TYPING_SCENARIOS = (
    Scenario.MONITOR_LONG,
    Scenario.MONITOR_SHORT,
    Scenario.EXFIL_LONG,
    Scenario.EXFIL_SHORT,
)


@dataclass(frozen=True)
class TypingProfile:
    """User typing rhythm, all ranges in inclusive integer bounds."""

    keys_per_sentence: tuple[int, int]
    inter_sentence_pause_ms: tuple[int, int]
    inter_key_ms: tuple[int, int] = (150, 400)
    poll_interval_ms: tuple[int, int] = (50, 150)

    def __post_init__(self):
        for name in (
            "keys_per_sentence",
            "inter_sentence_pause_ms",
            "inter_key_ms",
            "poll_interval_ms",
        ):
            lo, hi = getattr(self, name)
            if lo < 1 or lo > hi:
                raise ValueError(f"{name} must satisfy 1 <= lo <= hi, got ({lo}, {hi})")


LONG_SENTENCES = TypingProfile(
    keys_per_sentence=(60, 120), inter_sentence_pause_ms=(5_000, 20_000)
)
SHORT_SENTENCES = TypingProfile(
    keys_per_sentence=(5, 15), inter_sentence_pause_ms=(1_000, 5_000)
)


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters for one synthetic run."""

    scenario: Scenario
    seed: int
    duration_ms: int = DEFAULT_DURATION_MS
    typing: Optional[TypingProfile] = None
    process_id: int = BOT_PROCESS_ID
    process_name: Optional[str] = None

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ValueError(f"duration_ms must be positive: {self.duration_ms}")
        if self.typing is None and self.scenario.involves_typing:
            profile = (
                LONG_SENTENCES
                if self.scenario in (Scenario.MONITOR_LONG, Scenario.EXFIL_LONG)
                else SHORT_SENTENCES
            )
            object.__setattr__(self, "typing", profile)
        if self.process_name is None:
            default_name = (
                CHAT_PROCESS_NAME
                if self.scenario is Scenario.BENIGN_CHAT
                else BOT_PROCESS_NAME
            )
            object.__setattr__(self, "process_name", default_name)

    @property
    def exfiltrate(self) -> bool:
        return self.scenario.exfiltrates


def _stream(spec: ScenarioSpec, component: str) -> random.Random:
    # String seeding hashes stably (SHA-512), so streams are reproducible
    # across interpreter runs and platforms.
    return random.Random(f"{spec.seed}:{component}")


def _event(spec: ScenarioSpec, t: int, call: str, nbytes: Optional[int] = None) -> ApiEvent:
    return ApiEvent(
        timestamp_ms=t,
        process_id=spec.process_id,
        process_name=spec.process_name,
        call=call,
        bytes=nbytes,
    )


def _comms_events(spec: ScenarioSpec) -> list[ApiEvent]:
    """Connection setup, keepalive ticks, and periodic bulk chatter."""
    rng = _stream(spec, "comms")
    events = [_event(spec, rng.randint(0, 200), "socket")]

    phase = rng.randint(0, KEEPALIVE_PERIOD_MS - 1)
    for t in range(phase, spec.duration_ms, KEEPALIVE_PERIOD_MS):
        events.append(_event(spec, t, "recv", KEEPALIVE_BYTES))
        events.append(_event(spec, t, "send", KEEPALIVE_BYTES))

    t = rng.randint(*BULK_GAP_MS)
    while t < spec.duration_ms:
        at = t
        for _ in range(rng.randint(*BULK_SENDS)):
            if at >= spec.duration_ms:
                break
            events.append(_event(spec, at, "send", rng.randint(*BULK_SEND_BYTES)))
            at += rng.randint(*BULK_SPACING_MS)
        t += rng.randint(*BULK_GAP_MS)
    return events


def _command_episode_events(spec: ScenarioSpec) -> list[ApiEvent]:
    """Inbound commands with bursts of responses and a few file touches."""
    rng = _stream(spec, "commands")
    events = []
    t = rng.randint(*COMMAND_GAP_MS)
    while t < spec.duration_ms:
        events.append(_event(spec, t, "recv", rng.randint(*COMMAND_BYTES)))
        at = t
        for _ in range(rng.randint(*RESPONSE_COUNT)):
            at += rng.randint(*RESPONSE_SPACING_MS)
            if at < spec.duration_ms:
                events.append(_event(spec, at, "send", rng.randint(*RESPONSE_BYTES)))
        for _ in range(rng.randint(*EPISODE_FILE_OPS)):
            ft = t + rng.randint(*EPISODE_FILE_DELAY_MS)
            if ft < spec.duration_ms:
                call = "ReadFile" if rng.randint(0, 1) else "WriteFile"
                events.append(_event(spec, ft, call))
        t += rng.randint(*COMMAND_GAP_MS)
    return events


def _typing_events(spec: ScenarioSpec) -> list[ApiEvent]:
    """Keyboard polling during sentences, one file write per finished
    sentence, and (when exfiltrating) one outbound send per sentence.

    Sentences are typed in sessions separated by away-from-keyboard breaks;
    a session ends after the last sentence that fits in it. Exfiltration
    draws from its own stream, so the polling and file-write events are
    identical with and without it for the same seed.
    """
    profile = spec.typing
    assert profile is not None
    rng = _stream(spec, "typing")
    exfil_rng = _stream(spec, "exfil")
    events = []

    t = rng.randint(*SESSION_BREAK_MS)
    while t < spec.duration_ms:
        session_end = min(t + rng.randint(*SESSION_TYPING_MS), spec.duration_ms)
        # Per-session pace: a fresh pause ceiling inside the profile range,
        # so some sessions are rapid-fire and others are leisurely.
        pause_cap = rng.randint(*profile.inter_sentence_pause_ms)
        at = t
        while True:
            start = at + rng.randint(profile.inter_sentence_pause_ms[0], pause_cap)
            keys = rng.randint(*profile.keys_per_sentence)
            key_t = start
            for _ in range(keys):
                key_t += rng.randint(*profile.inter_key_ms)
            enter_t = key_t + rng.randint(*profile.inter_key_ms)
            if enter_t >= session_end:
                break  # this sentence would not fit; the user stops here

            poll_t = start
            while True:
                poll_t += rng.randint(*profile.poll_interval_ms)
                if poll_t >= enter_t:
                    break
                events.append(_event(spec, poll_t, "GetAsyncKeyState"))
            events.append(_event(spec, enter_t, "WriteFile"))

            if spec.exfiltrate:
                send_t = enter_t + exfil_rng.randint(*EXFIL_DELAY_MS)
                if send_t < spec.duration_ms:
                    events.append(_event(spec, send_t, "send", keys))

            at = enter_t
        t = session_end + rng.randint(*SESSION_BREAK_MS)
    return events


def _chat_events(spec: ScenarioSpec) -> list[ApiEvent]:
    """Human-paced message exchanges with occasional file reads."""
    rng = _stream(spec, "chat")
    events = [_event(spec, rng.randint(0, 200), "socket")]

    t = rng.randint(*CHAT_GAP_MS)
    while t < spec.duration_ms:
        if rng.randint(0, 1):
            events.append(_event(spec, t, "send", rng.randint(*CHAT_SEND_BYTES)))
            reply_t = t + rng.randint(*CHAT_REPLY_DELAY_MS)
            if reply_t < spec.duration_ms:
                events.append(_event(spec, reply_t, "recv", rng.randint(*CHAT_RECV_BYTES)))
        else:
            events.append(_event(spec, t, "recv", rng.randint(*CHAT_RECV_BYTES)))
            reply_t = t + rng.randint(*CHAT_REPLY_DELAY_MS)
            if reply_t < spec.duration_ms:
                events.append(_event(spec, reply_t, "send", rng.randint(*CHAT_SEND_BYTES)))
        t += rng.randint(*CHAT_GAP_MS)

    ft = rng.randint(*CHAT_FILE_GAP_MS)
    while ft < spec.duration_ms:
        events.append(_event(spec, ft, "ReadFile"))
        ft += rng.randint(*CHAT_FILE_GAP_MS)
    return events


def generate(spec: ScenarioSpec) -> Trace:
    """Generate one trace; a pure function of (scenario, seed, spec)."""
    events: list[ApiEvent] = []
    if spec.scenario is Scenario.BENIGN_CHAT:
        events += _chat_events(spec)
    else:
        events += _comms_events(spec)
        if spec.scenario is Scenario.COMMANDED_BOT:
            events += _command_episode_events(spec)
        if spec.scenario.involves_typing:
            events += _typing_events(spec)

    return Trace(
        duration_ms=spec.duration_ms,
        events=tuple(events),
        scenario=spec.scenario.value,
        seed=spec.seed,
    )


def generate_suite(
    seeds: Sequence[int], duration_ms: int = DEFAULT_DURATION_MS
) -> dict[Scenario, list[Trace]]:
    """One trace per (scenario, seed); the regression harness's workload."""
    if not seeds:
        raise ValueError("seeds must not be empty")
    return {
        scenario: [
            generate(ScenarioSpec(scenario=scenario, seed=seed, duration_ms=duration_ms))
            for seed in seeds
        ]
        for scenario in Scenario
    }
