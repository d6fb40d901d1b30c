"""One-pass occurrence counting for a set of patterns.

Each pattern owns exactly one live run. Runs are indexed by the label of the
component they await (the *waits* index), so a boundary only touches runs
that could use it. Runs mid-match also sit in a deadline heap; a boundary
later than a run's deadline expires the run before any matching happens and
is then offered to the reset run like any other boundary.

This counts greedy, non-overlapping occurrences with earliest transitions.
It can report fewer occurrences than the set of all minimal occurrences.
"""

from __future__ import annotations

import csv
import heapq
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .automaton import AutomatonRun, StepOutcome, compile_pattern, occurrence_gaps, step
from .dsl import Pattern, prefix
from .model import Boundary
from .serializer import SerializedStream


@dataclass(frozen=True)
class Occurrence:
    pattern_id: str
    boundaries: tuple[Boundary, ...]
    gaps: tuple[int, ...]

    @property
    def instance_ids(self) -> tuple[str, ...]:
        return tuple(b.instance_id for b in self.boundaries)


@dataclass
class CountResult:
    counts: dict[str, int]
    boundaries_read: int = 0
    occurrences: Optional[dict[str, list[Occurrence]]] = None

    def __getitem__(self, pattern_id: str) -> int:
        return self.counts[pattern_id]


def pattern_ids(patterns: Sequence[Pattern]) -> list[str]:
    """Report keys; repeated keys get a ``#n`` suffix so every pattern is distinct."""
    ids: list[str] = []
    seen: dict[str, int] = {}
    for p in patterns:
        key = p.key
        n = seen.get(key, 0) + 1
        seen[key] = n
        ids.append(key if n == 1 else f"{key}#{n}")
    return ids


class WaitsIndex:
    """label -> run indices awaiting that label, in insertion order.

    Each list is a dict used as an ordered set, so removal is O(1).
    """

    def __init__(self):
        self._lists: dict[str, dict[int, None]] = {}

    def add(self, label: str, run_index: int) -> None:
        bucket = self._lists.get(label)
        if bucket is None:
            self._lists[label] = {run_index: None}
        else:
            bucket[run_index] = None

    def remove(self, label: str, run_index: int) -> None:
        del self._lists[label][run_index]

    def get(self, label: str):
        return self._lists.get(label, ())

    def entries(self) -> dict[str, list[int]]:
        return {k: list(v) for k, v in self._lists.items() if v}


def count_patterns(
    s: SerializedStream | Iterable[Boundary],
    patterns: Sequence[Pattern],
    record: bool = False,
) -> CountResult:
    """Count every pattern in one left-to-right pass over ``s``."""
    ids = pattern_ids(patterns)
    runs: list[AutomatonRun] = [compile_pattern(p).new_run(pid) for p, pid in zip(patterns, ids)]
    first_labels = [p.components[0].label for p in patterns]
    counts = [0] * len(runs)
    found: list[list[Occurrence]] = [[] for _ in runs]

    waits = WaitsIndex()
    for i, label in enumerate(first_labels):
        waits.add(label, i)
    heap: list[tuple[int, int, int, int]] = []
    tiebreak = 0
    reads = 0

    boundaries = s.boundaries if isinstance(s, SerializedStream) else s
    labels_of = [run.automaton.labels for run in runs]
    lists = waits._lists
    for b in boundaries:
        reads += 1
        t = b.time
        while heap and heap[0][0] < t:
            _, _, ri, epoch = heapq.heappop(heap)
            run = runs[ri]
            if run.epoch != epoch:
                continue
            waits.remove(labels_of[ri][run.x - 1], ri)
            run.reset()
            waits.add(first_labels[ri], ri)

        waiting = lists.get(b.label)
        if not waiting:
            continue
        for ri in tuple(waiting):
            run = runs[ri]
            outcome = step(run, b)
            if outcome is StepOutcome.SKIP:
                continue
            del waiting[ri]
            if outcome is StepOutcome.ADVANCE:
                waits.add(labels_of[ri][run.x - 1], ri)
                tiebreak += 1
                heapq.heappush(heap, (run.deadline, tiebreak, ri, run.epoch))
                continue
            # Accepted, or expired (unreachable while the heap expires runs
            # first): either way the run now waits for its first component.
            waits.add(first_labels[ri], ri)
            if outcome is StepOutcome.ACCEPT:
                counts[ri] += 1
                if record:
                    matched = run.last_occurrence
                    found[ri].append(Occurrence(
                        run.pattern_id,
                        tuple(mb for _, mb in matched),
                        tuple(occurrence_gaps(run.automaton.pattern, matched)),
                    ))

    return CountResult(
        counts=dict(zip(ids, counts)),
        boundaries_read=reads,
        occurrences=dict(zip(ids, found)) if record else None,
    )


def list_occurrences(s: SerializedStream, p: Pattern) -> list[Occurrence]:
    result = count_patterns(s, [p], record=True)
    return result.occurrences[pattern_ids([p])[0]]


def count_prefixes(s: SerializedStream, p: Pattern) -> list[int]:
    """Frequencies of ``prefix(p, k)`` for k = 1..N, from a single pass."""
    prefixes = [prefix(p, k).unnamed() for k in range(1, p.size + 1)]
    result = count_patterns(s, prefixes)
    return [result.counts[pid] for pid in pattern_ids(prefixes)]


def occurrences_csv(occurrences: dict[str, list[Occurrence]], header: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["pattern", "occurrence_index", "component_index", "label", "kind", "time", "instance_id"])
    for pid, occs in occurrences.items():
        for oi, occ in enumerate(occs):
            for ci, b in enumerate(occ.boundaries, start=1):
                writer.writerow([pid, oi, ci, b.label, b.kind.value, b.time, b.instance_id])
    return buf.getvalue()
