"""Merge event streams into one globally ordered boundary sequence."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DuplicateInstanceId
from .model import Boundary, EventInstance, EventStream, Kind, instance_boundaries


def _kind_rank(b: Boundary) -> int:
    # At equal time Ends come before Starts, so intervals close before new ones
    # open. A zero-length instance keeps its own Start ahead of its End.
    if b.kind is Kind.START:
        return 1
    inst = b.instance
    if inst is not None and inst.start == b.time:
        return 2
    return 0


def boundary_sort_key(b: Boundary) -> tuple:
    return (b.time, _kind_rank(b), b.label, b.instance_id)


@dataclass(frozen=True)
class SerializedStream:
    boundaries: tuple[Boundary, ...] = ()
    instances: Mapping[str, EventInstance] = field(default_factory=dict)
    label_counts: Mapping[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.boundaries)

    def __iter__(self):
        return iter(self.boundaries)

    @property
    def labels(self) -> list[str]:
        return sorted(self.label_counts)

    def count_instances(self, label: str) -> int:
        return self.label_counts.get(label, 0)


def serialize(streams: Iterable[EventStream]) -> SerializedStream:
    instances: dict[str, EventInstance] = {}
    boundaries: list[Boundary] = []
    for stream in streams:
        for e in stream.events:
            if e.id in instances:
                raise DuplicateInstanceId(f"instance id {e.id!r} appears in more than one input")
            instances[e.id] = e
            boundaries.extend(instance_boundaries(e))
    boundaries.sort(key=boundary_sort_key)
    counts = Counter(e.label for e in instances.values())
    return SerializedStream(tuple(boundaries), instances, dict(sorted(counts.items())))


def count_instances(s: SerializedStream, label: str) -> int:
    return s.count_instances(label)


def encode_relational(s: SerializedStream | Iterable[Boundary]) -> str:
    """Render boundaries as ``E1+ < E1- < E2+ < E2- = E3+ ...``."""
    parts: list[str] = []
    prev = None
    for b in s:
        if prev is not None:
            parts.append("=" if b.time == prev else "<")
        parts.append(b.symbol)
        prev = b.time
    return " ".join(parts)


def dump_csv(s: SerializedStream, header: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", "kind", "label", "instance_id", "stream_id"])
    for b in s.boundaries:
        writer.writerow([b.time, b.kind.value, b.label, b.instance_id, b.stream_id])
    return buf.getvalue()
