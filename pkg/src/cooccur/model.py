"""Domain types: time windows, semi-interval event instances, boundaries, streams.

Time is an integer count of granularity units (one minute unless configured
otherwise). An instance may carry only its start or only its end; such
instances are semi-intervals and contribute a single boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import BothTimestampsMissing, DuplicateInstanceId, InvalidInstanceError, StartAfterEnd

DEFAULT_GRANULARITY = "1min"


class Kind(str, enum.Enum):
    START = "+"
    END = "-"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class TimeWindow:
    """Inclusive gap bounds ``[lower, upper]`` between consecutive components."""

    lower: int
    upper: int

    def __post_init__(self):
        if self.lower < 0 or self.upper < 0:
            raise ValueError(f"window bounds must be non-negative, got [{self.lower}, {self.upper}]")
        if self.lower > self.upper:
            raise ValueError(f"window lower bound exceeds upper bound: [{self.lower}, {self.upper}]")

    def contains(self, gap: int) -> bool:
        return self.lower <= gap <= self.upper


@dataclass(frozen=True, slots=True)
class EventInstance:
    id: str
    label: str
    start: Optional[int] = None
    end: Optional[int] = None
    stream_id: str = ""

    def __post_init__(self):
        _check_times(self.start, self.end)

    @property
    def is_complete(self) -> bool:
        return self.start is not None and self.end is not None

    @property
    def effective_start(self) -> int:
        return self.start if self.start is not None else self.end  # type: ignore[return-value]

    @property
    def effective_end(self) -> int:
        return self.end if self.end is not None else self.start  # type: ignore[return-value]

    def sort_key(self) -> tuple:
        return (self.effective_start, self.effective_end, self.label, self.id)

    def boundary_count(self) -> int:
        return 2 if self.is_complete else 1


@dataclass(frozen=True, slots=True)
class Boundary:
    """One interval boundary of an instance.

    ``instance`` points back at the owning event so matching can read the end
    time while the start boundary is being processed.
    """

    label: str
    kind: Kind
    time: int
    instance_id: str
    stream_id: str = ""
    instance: Optional[EventInstance] = field(default=None, compare=False, hash=False, repr=False)

    @property
    def symbol(self) -> str:
        return f"{self.label}{self.kind.value}"

    def __str__(self) -> str:
        return f"{self.symbol}@{self.time}"


@dataclass(frozen=True)
class EventStream:
    """An identified stream of instances, held in sorted order.

    Construction sorts the events and rejects duplicate ids.
    """

    id: str
    events: tuple[EventInstance, ...] = ()

    def __post_init__(self):
        events = tuple(sorted(self.events, key=EventInstance.sort_key))
        seen: set[str] = set()
        for e in events:
            if e.id in seen:
                raise DuplicateInstanceId(f"instance id {e.id!r} appears twice in stream {self.id!r}")
            seen.add(e.id)
        object.__setattr__(self, "events", events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def labels(self) -> list[str]:
        return sorted({e.label for e in self.events})


def _check_times(start: Optional[int], end: Optional[int]) -> None:
    if start is None and end is None:
        raise BothTimestampsMissing("an event needs a start or an end timestamp")
    for name, value in (("start", start), ("end", end)):
        if value is None:
            continue
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidInstanceError(f"{name} must be an integer, got {value!r}")
        if value < 0:
            raise InvalidInstanceError(f"{name} must be non-negative, got {value}")
    if start is not None and end is not None and start > end:
        raise StartAfterEnd(f"start {start} is after end {end}")


def validate_instance(
    label: str,
    start: Optional[int] = None,
    end: Optional[int] = None,
    id: Optional[str] = None,
    stream_id: str = "",
) -> EventInstance:
    """Build a checked :class:`EventInstance`.

    Without an explicit ``id`` one is derived from the content, so two
    identical events in one stream need explicit ids.
    """
    if not isinstance(label, str) or not label:
        raise InvalidInstanceError(f"label must be a non-empty string, got {label!r}")
    _check_times(start, end)
    if id is None:
        s = "" if start is None else start
        e = "" if end is None else end
        id = f"{stream_id}:{label}:{s}:{e}"
    return EventInstance(id=id, label=label, start=start, end=end, stream_id=stream_id)


def compare_instances(a: EventInstance, b: EventInstance) -> int:
    """Three-way comparison: -1, 0 or 1.

    Keys are (effective start, effective end) with (label, id) as tie-breaks;
    a semi-interval uses its one timestamp for both.
    """
    ka, kb = a.sort_key(), b.sort_key()
    return (ka > kb) - (ka < kb)


def instance_boundaries(e: EventInstance) -> list[Boundary]:
    out = []
    if e.start is not None:
        out.append(Boundary(e.label, Kind.START, e.start, e.id, e.stream_id, e))
    if e.end is not None:
        out.append(Boundary(e.label, Kind.END, e.end, e.id, e.stream_id, e))
    return out


def instance_from_boundaries(boundaries: Sequence[Boundary]) -> EventInstance:
    """Inverse of :func:`instance_boundaries` for the boundaries of one instance."""
    if not boundaries:
        raise InvalidInstanceError("no boundaries given")
    ids = {b.instance_id for b in boundaries}
    if len(ids) != 1:
        raise InvalidInstanceError(f"boundaries belong to several instances: {sorted(ids)}")
    first = boundaries[0]
    start = end = None
    for b in boundaries:
        if b.kind is Kind.START:
            start = b.time
        else:
            end = b.time
    return EventInstance(id=first.instance_id, label=first.label, start=start, end=end, stream_id=first.stream_id)


def make_stream(stream_id: str, events: Iterable[tuple]) -> EventStream:
    """Convenience builder from ``(label, start, end)`` tuples.

    Ids are assigned as ``<stream_id>:<position>`` in input order.
    """
    built = []
    for i, item in enumerate(events):
        label, start, end = item
        built.append(validate_instance(label, start, end, id=f"{stream_id}:{i}", stream_id=stream_id))
    return EventStream(stream_id, tuple(built))
