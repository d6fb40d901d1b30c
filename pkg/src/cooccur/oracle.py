"""Brute-force reference matchers used to cross-check the engine.

Nothing here touches the automaton or engine modules: sign tests, anchors
and windows are re-derived directly so that a bug in one path cannot hide
the same bug in the other.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .dsl import Pattern, Sign
from .errors import CapExceeded
from .model import Boundary, Kind
from .serializer import SerializedStream

DEFAULT_BOUNDARY_CAP = 10_000
DEFAULT_INSTANCE_CAP = 50


@dataclass
class OracleResult:
    greedy_count: int
    all_minimal_occurrences: list = field(default_factory=list)


def _fits(b: Boundary, label: str, sign: Sign) -> bool:
    if b.label != label:
        return False
    if sign is Sign.START:
        return b.kind == Kind.START
    if sign is Sign.END:
        return b.kind == Kind.END
    return True


def _reference_time(b: Boundary, sign: Sign) -> int:
    # Unsigned components measure the next gap from the instance end.
    if sign is Sign.ANY and b.instance is not None:
        e = b.instance
        return e.end if e.end is not None else e.start
    return b.time


def oracle_count(s: SerializedStream, p: Pattern, cap: Optional[int] = DEFAULT_BOUNDARY_CAP) -> int:
    """Greedy occurrence count by direct forward scans.

    Find the earliest usable first component; then for each later component
    scan forward for the earliest fitting boundary inside its window. Failing
    that, restart from the first boundary beyond the window's deadline.
    """
    bs = s.boundaries
    n = len(bs)
    if cap is not None and n > cap:
        raise CapExceeded(f"{n} boundaries exceed the oracle cap of {cap}")
    comps = p.components
    used: set[str] = set()
    count = 0
    start = 0
    while start < n:
        first = None
        for i in range(start, n):
            if _fits(bs[i], comps[0].label, comps[0].sign) and bs[i].instance_id not in used:
                first = i
                break
        if first is None:
            break
        taken = {bs[first].instance_id}
        ref = _reference_time(bs[first], comps[0].sign)
        pos = first
        failed_at = None
        for k in range(1, len(comps)):
            lo = ref + p.windows[k - 1].lower
            hi = ref + p.windows[k - 1].upper
            hit = None
            j = pos + 1
            while j < n:
                b = bs[j]
                if b.time > hi:
                    break
                if (
                    b.time >= lo
                    and _fits(b, comps[k].label, comps[k].sign)
                    and b.instance_id not in taken
                    and b.instance_id not in used
                ):
                    hit = j
                    break
                j += 1
            if hit is None:
                failed_at = j
                break
            taken.add(bs[hit].instance_id)
            ref = _reference_time(bs[hit], comps[k].sign)
            pos = hit
        if failed_at is None:
            count += 1
            used |= taken
            start = pos + 1
        else:
            start = failed_at
    return count


def enumerate_occurrences(
    s: SerializedStream, p: Pattern, cap: Optional[int] = DEFAULT_INSTANCE_CAP
) -> list[tuple[Boundary, ...]]:
    """Every binding of boundaries to components that respects order and windows.

    Bindings use distinct instances, later components come later in the
    serialized order, and each gap from the previous reference time lies in
    the window.
    """
    bs = s.boundaries
    labels = {c.label for c in p.components}
    if cap is not None:
        per_label = Counter(e.label for e in s.instances.values() if e.label in labels)
        total = sum(per_label.values())
        if total > cap:
            raise CapExceeded(f"{total} participating instances exceed the enumeration cap of {cap}")
    comps = p.components
    out: list[tuple[Boundary, ...]] = []

    def extend(k: int, pos: int, ref: int, chosen: list[Boundary], ids: set[str]) -> None:
        if k == len(comps):
            out.append(tuple(chosen))
            return
        lo = ref + p.windows[k - 1].lower
        hi = ref + p.windows[k - 1].upper
        for j in range(pos + 1, len(bs)):
            b = bs[j]
            if b.time > hi:
                break
            if b.time < lo or b.instance_id in ids or not _fits(b, comps[k].label, comps[k].sign):
                continue
            chosen.append(b)
            ids.add(b.instance_id)
            extend(k + 1, j, _reference_time(b, comps[k].sign), chosen, ids)
            ids.discard(b.instance_id)
            chosen.pop()

    for i, b in enumerate(bs):
        if _fits(b, comps[0].label, comps[0].sign):
            extend(1, i, _reference_time(b, comps[0].sign), [b], {b.instance_id})
    return out


def oracle(s: SerializedStream, p: Pattern, enumerate_cap: Optional[int] = DEFAULT_INSTANCE_CAP) -> OracleResult:
    return OracleResult(oracle_count(s, p), enumerate_occurrences(s, p, enumerate_cap))
