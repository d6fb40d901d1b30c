"""Synthetic event streams: uniform noise with embedded co-occurrence patterns.

A timer walks forward. Each generated event is either noise, with a
uniformly random label at the current timer (probability ``beta``), or the
next component of an embedded pattern. With probability ``1 - alpha`` one of
the event's two boundaries, chosen by a fair coin, is erased.

Embedded components are placed so that the boundary the matcher will use
falls uniformly inside the component's window. The window is measured from
the previous component's anchor, using the same anchor rule as the matcher.
If the timer has already passed the window, a fresh occurrence is started
instead. A component whose signed boundary was erased breaks its
embedding. The next occurrence of that pattern then waits until the broken
partial's window has closed.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dsl import Pattern, Sign, format_pattern
from .engine import pattern_ids
from .errors import ConfigMismatch, EmbeddedLabelNotInAlphabet, EmptyAlphabet
from .model import DEFAULT_GRANULARITY, EventInstance, EventStream

RNG_NAME = "numpy.PCG64"
DEFAULT_ALPHABET = tuple(f"E{c}" for c in string.ascii_uppercase[:22])


@dataclass(frozen=True)
class GenConfig:
    n: int
    alphabet: tuple[str, ...] = DEFAULT_ALPHABET
    alpha: float = 1.0
    beta: float = 0.5
    mu: float = 10.0
    sigma: Optional[float] = None  # None -> mu / 4
    max_increment: int = 15
    granularity: str = DEFAULT_GRANULARITY
    seed: int = 0
    embedded: tuple[Pattern, ...] = ()
    stream_id: str = "gen"

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "embedded", tuple(self.embedded))
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.mu < 1:
            raise ValueError(f"mu must be >= 1, got {self.mu}")
        if self.sigma is not None and self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.max_increment < 1:
            raise ValueError(f"max_increment must be >= 1, got {self.max_increment}")
        if not self.alphabet:
            raise EmptyAlphabet("the alphabet is empty")
        known = set(self.alphabet)
        for p in self.embedded:
            for c in p.components:
                if c.label not in known:
                    raise EmbeddedLabelNotInAlphabet(
                        f"embedded pattern {format_pattern(p)!r} uses {c.label!r}, not in the alphabet"
                    )

    @property
    def effective_sigma(self) -> float:
        return self.mu / 4 if self.sigma is None else self.sigma

    def header(self) -> str:
        return (
            f"gen n={self.n} alphabet={','.join(self.alphabet)} alpha={self.alpha} beta={self.beta} "
            f"mu={self.mu} sigma={self.effective_sigma} max_increment={self.max_increment} "
            f"granularity={self.granularity} seed={self.seed} rng={RNG_NAME}"
        )

    def header_lines(self) -> list[str]:
        return [self.header()] + [f"embed {format_pattern(p)}" for p in self.embedded]


@dataclass
class GenerationReport:
    """Ground truth recorded while generating, keyed by pattern id."""

    started: dict[str, int] = field(default_factory=dict)
    completed: dict[str, int] = field(default_factory=dict)
    broken: dict[str, int] = field(default_factory=dict)
    noise_events: int = 0


@dataclass
class _Partial:
    next_index: int  # component to place next
    anchor: int


def _window_range(patt: Pattern, slot: _Partial, timer: int) -> Optional[tuple[int, int]]:
    """Where the next component's matching boundary may go, or None if too late."""
    w = patt.windows[slot.next_index - 1]
    lo = max(slot.anchor + w.lower, slot.anchor + 1, timer)
    hi = slot.anchor + w.upper
    return (lo, hi) if lo <= hi else None


def _anchor(sign: Sign, start: Optional[int], end: Optional[int]) -> int:
    if sign is Sign.START:
        return start  # type: ignore[return-value]
    if sign is Sign.END:
        return end  # type: ignore[return-value]
    return end if end is not None else start  # type: ignore[return-value]


def generate_with_report(config: GenConfig) -> tuple[EventStream, GenerationReport]:
    n = config.n
    rng = np.random.Generator(np.random.PCG64(config.seed))
    # Every random decision for event i is pre-drawn, so the stream depends on
    # the seed alone.
    u_noise = rng.random(n)
    u_erase = rng.random(n)
    u_side = rng.random(n)
    durations = rng.normal(config.mu, config.effective_sigma, n)
    increments = rng.integers(1, config.max_increment + 1, n)
    noise_labels = rng.integers(0, len(config.alphabet), n)
    picks = rng.random(n)
    u_place = rng.random(n)

    ids = pattern_ids(config.embedded)
    report = GenerationReport(
        started={k: 0 for k in ids}, completed={k: 0 for k in ids}, broken={k: 0 for k in ids}
    )
    slots: list[Optional[_Partial]] = [None] * len(config.embedded)
    holds = [-1] * len(config.embedded)

    timer = 0
    events: list[EventInstance] = []
    for i in range(n):
        d = max(1, int(round(float(durations[i]))))
        erase = u_erase[i] >= config.alpha
        drop_start = erase and u_side[i] < 0.5
        drop_end = erase and not drop_start

        if not config.embedded or u_noise[i] < config.beta:
            label = config.alphabet[int(noise_labels[i])]
            start, end = timer, timer + d
            report.noise_events += 1
            placed = timer
        else:
            # Continuing a live partial takes precedence over starting anew.
            live = []
            for k, slot in enumerate(slots):
                if slot is None:
                    continue
                if _window_range(config.embedded[k], slot, timer) is None:
                    slots[k] = None
                else:
                    live.append(k)
            if live:
                pi = live[int(picks[i] * len(live))]
                slot = slots[pi]
                lo, hi = _window_range(config.embedded[pi], slot, timer)
                target = lo + int(u_place[i] * (hi - lo + 1))
            else:
                pi = int(picks[i] * len(config.embedded))
                begin = max(timer, holds[pi] + 1)
                slot = _Partial(0, begin)
                report.started[ids[pi]] += 1
                target = begin
            patt = config.embedded[pi]
            key = ids[pi]
            comp = patt.components[slot.next_index]
            label = comp.label
            if comp.sign is Sign.END or (comp.sign is Sign.ANY and drop_start):
                end = target
                start = max(0, target - d)
            else:
                start, end = target, target + d
            placed = target

            broken = (comp.sign is Sign.START and drop_start) or (comp.sign is Sign.END and drop_end)
            if broken:
                report.broken[key] += 1
                if slot.next_index > 0:
                    holds[pi] = slot.anchor + patt.windows[slot.next_index - 1].upper
                slots[pi] = None
            else:
                anchor = _anchor(comp.sign, None if drop_start else start, None if drop_end else end)
                if slot.next_index + 1 == patt.size:
                    report.completed[key] += 1
                    slots[pi] = None
                else:
                    slots[pi] = _Partial(slot.next_index + 1, anchor)

        events.append(EventInstance(
            id=f"{config.stream_id}:{i}",
            label=label,
            start=None if drop_start else start,
            end=None if drop_end else end,
            stream_id=config.stream_id,
        ))
        timer = max(timer, placed) + int(increments[i])

    return EventStream(config.stream_id, tuple(events)), report


def generate(config: GenConfig) -> EventStream:
    return generate_with_report(config)[0]


def embedding_report(config: GenConfig, stream: EventStream) -> dict[str, int]:
    """Completed deliberate embeddings per pattern.

    The report is rebuilt by regenerating from ``config``; a stream that
    ``config`` did not produce raises :class:`ConfigMismatch`.
    """
    regenerated, report = generate_with_report(config)
    if regenerated.events != stream.events:
        raise ConfigMismatch("the stream was not produced by this configuration")
    return dict(report.completed)


def split_stream(stream: EventStream, labels_b: Sequence[str], ids: tuple[str, str] = ("a", "b")) -> tuple[EventStream, EventStream]:
    """Partition a stream by label into two streams (for cross co-occurrence)."""
    chosen = set(labels_b)
    a, b = [], []
    for e in stream.events:
        target = b if e.label in chosen else a
        sid = ids[1] if e.label in chosen else ids[0]
        target.append(EventInstance(f"{sid}:{e.id}", e.label, e.start, e.end, sid))
    return EventStream(ids[0], tuple(a)), EventStream(ids[1], tuple(b))
