"""Timed finite-state automata compiled from patterns, and their step semantics.

A size-N pattern compiles to 2N states: N ordinary states that each await
one component, N-1 time states whose non-consuming edges install the next
window, and one accepting final state.

A run keeps an *anchor*, the time the pending window is measured from.
After a signed component matches, the anchor is the matched boundary's time.
After an unsigned component matches (on either of its boundaries), the
anchor is the instance's end time, or its only timestamp for a
semi-interval.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .dsl import Pattern, PatternComponent, Sign, format_pattern
from .model import Boundary, Kind, TimeWindow


class FormulaResult(enum.Enum):
    MATCH = "match"
    NO_MATCH = "no-match"
    EXPIRED = "expired"


class StepOutcome(enum.Enum):
    ADVANCE = "advance"
    SKIP = "skip"
    EXPIRED = "expired"
    ACCEPT = "accept"


@dataclass(frozen=True)
class OrdinaryState:
    index: int
    awaits: PatternComponent

    @property
    def name(self) -> str:
        return f"OS{self.index}"


@dataclass(frozen=True)
class TimeState:
    index: int
    window: TimeWindow

    @property
    def name(self) -> str:
        return f"TS{self.index}"


@dataclass(frozen=True)
class FinalState:
    index: int

    @property
    def name(self) -> str:
        return "F"


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    formula: str
    consumes: bool


@dataclass(frozen=True)
class CompiledAutomaton:
    pattern: Pattern
    ordinary_states: tuple[OrdinaryState, ...]
    time_states: tuple[TimeState, ...]
    final_state: FinalState
    edges: tuple[Edge, ...]

    def __post_init__(self):
        # Flat per-component tables for the matching hot path.
        p = self.pattern
        object.__setattr__(self, "labels", tuple(c.label for c in p.components))
        object.__setattr__(self, "kinds", tuple(_SIGN_KIND[c.sign] for c in p.components))
        object.__setattr__(self, "unsigned", tuple(c.sign is Sign.ANY for c in p.components))
        object.__setattr__(self, "lowers", (0,) + tuple(w.lower for w in p.windows))
        object.__setattr__(self, "uppers", (0,) + tuple(w.upper for w in p.windows))

    @property
    def size(self) -> int:
        return len(self.ordinary_states)

    @property
    def n_states(self) -> int:
        return len(self.ordinary_states) + len(self.time_states) + 1

    @property
    def start_state(self) -> OrdinaryState:
        return self.ordinary_states[0]

    @property
    def components(self) -> tuple[PatternComponent, ...]:
        return self.pattern.components

    @property
    def windows(self) -> tuple[TimeWindow, ...]:
        return self.pattern.windows

    def new_run(self, pattern_id: Optional[str] = None) -> "AutomatonRun":
        return AutomatonRun(self, pattern_id if pattern_id is not None else self.pattern.key)

    def to_dot(self) -> str:
        title = format_pattern(self.pattern).replace('"', r"\"")
        lines = [
            "digraph fsa_t {",
            "  rankdir=LR;",
            f'  label="{title}";',
            '  node [shape=circle];',
        ]
        for s in self.ordinary_states:
            lines.append(f'  {s.name} [label="({s.index}, {s.awaits})", style=solid];')
        for t in self.time_states:
            lines.append(
                f'  {t.name} [label="[{t.window.lower},{t.window.upper}]", style=dashed];'
            )
        lines.append(f'  F [label="({self.final_state.index}, phi)", shape=doublecircle];')
        for e in self.edges:
            style = "solid" if e.consumes else "dashed"
            label = e.formula.replace('"', r"\"")
            lines.append(f'  {e.source} -> {e.target} [label="{label}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _theta(component: PatternComponent, window: Optional[TimeWindow]) -> str:
    if component.sign is Sign.START:
        test = f"label={component.label} & kind=+"
    elif component.sign is Sign.END:
        test = f"label={component.label} & kind=-"
    else:
        test = f"label={component.label}"
    test += " & fresh(id)"
    if window is not None:
        test += f" & anchor+{window.lower} <= t <= anchor+{window.upper}"
    return test


def compile_pattern(p: Pattern) -> CompiledAutomaton:
    n = p.size
    ordinary = tuple(OrdinaryState(i, c) for i, c in enumerate(p.components))
    times = tuple(TimeState(i + 1, w) for i, w in enumerate(p.windows))
    final = FinalState(n)
    edges = []
    for i, state in enumerate(ordinary):
        window = p.windows[i - 1] if i > 0 else None
        target = times[i].name if i < n - 1 else final.name
        edges.append(Edge(state.name, target, _theta(state.awaits, window), True))
        if i < n - 1:
            w = times[i].window
            edges.append(Edge(times[i].name, ordinary[i + 1].name, f"eps: d1={w.lower}, d2={w.upper}", False))
    return CompiledAutomaton(p, ordinary, times, final, tuple(edges))


@dataclass(eq=False)
class AutomatonRun:
    """Mutable progress of one automaton through a boundary sequence.

    ``x`` is the 1-based index of the awaited component. ``retired`` holds
    instances consumed by earlier accepted occurrences; they are never bound
    again, which keeps occurrences of one pattern instance-disjoint.
    """

    automaton: CompiledAutomaton
    pattern_id: str
    x: int = 1
    anchor: Optional[int] = None
    deadline: Optional[int] = None
    bound_instances: set = field(default_factory=set)
    matched: list = field(default_factory=list)
    retired: set = field(default_factory=set)
    epoch: int = 0
    last_occurrence: Optional[list] = None

    @property
    def awaited(self) -> PatternComponent:
        return self.automaton.pattern.components[self.x - 1]

    @property
    def window(self) -> Optional[TimeWindow]:
        return self.automaton.pattern.windows[self.x - 2] if self.x > 1 else None

    def reset(self) -> None:
        self.x = 1
        self.anchor = None
        self.deadline = None
        self.bound_instances = set()
        self.matched = []
        self.epoch += 1


_SIGN_KIND = {Sign.START: Kind.START, Sign.END: Kind.END, Sign.ANY: None}


def anchor_time(component: PatternComponent, b: Boundary) -> int:
    if component.sign is not Sign.ANY:
        return b.time
    inst = b.instance
    if inst is None:
        return b.time
    return inst.end if inst.end is not None else inst.start


def _sign_ok(sign: Sign, kind: Kind) -> bool:
    if sign is Sign.ANY:
        return True
    if sign is Sign.START:
        return kind is Kind.START
    return kind is Kind.END


def eval_formula(
    run: AutomatonRun,
    b: Boundary,
    component: PatternComponent,
    window: Optional[TimeWindow],
) -> FormulaResult:
    if run.x > 1 and b.time > run.deadline:
        return FormulaResult.EXPIRED
    if b.label != component.label or not _sign_ok(component.sign, b.kind):
        return FormulaResult.NO_MATCH
    iid = b.instance_id
    if iid in run.bound_instances or iid in run.retired:
        return FormulaResult.NO_MATCH
    if window is not None and run.x > 1:
        if not (run.anchor + window.lower <= b.time <= run.anchor + window.upper):
            return FormulaResult.NO_MATCH
    return FormulaResult.MATCH


def step(run: AutomatonRun, b: Boundary) -> StepOutcome:
    """Offer one boundary to ``run``, mutating it.

    On acceptance the finished occurrence is left in ``run.last_occurrence``
    and the run starts over at its first component. On expiry the run is
    reset; re-offering the boundary is the caller's job.
    """
    # Same tests as eval_formula, unrolled on the automaton's flat tables.
    a = run.automaton
    x = run.x
    i = x - 1
    t = b.time
    if x > 1 and t > run.deadline:
        run.reset()
        return StepOutcome.EXPIRED
    if b.label != a.labels[i]:
        return StepOutcome.SKIP
    kind = a.kinds[i]
    if kind is not None and b.kind is not kind:
        return StepOutcome.SKIP
    iid = b.instance_id
    if iid in run.bound_instances or iid in run.retired:
        return StepOutcome.SKIP
    if x > 1 and t < run.anchor + a.lowers[i]:
        return StepOutcome.SKIP

    run.matched.append((x, b))
    if x == len(a.labels):
        occurrence = run.matched
        for _, mb in occurrence:
            inst = mb.instance
            # Only an instance matched on its start can show up again later.
            if mb.kind is Kind.START and (inst is None or inst.end is not None):
                run.retired.add(mb.instance_id)
        run.last_occurrence = occurrence
        run.reset()
        return StepOutcome.ACCEPT

    run.bound_instances.add(iid)
    # Passing the time state: install the next window without consuming input.
    if a.unsigned[i] and b.instance is not None:
        inst = b.instance
        run.anchor = inst.end if inst.end is not None else inst.start
    else:
        run.anchor = t
    run.deadline = run.anchor + a.uppers[x]
    run.x = x + 1
    run.epoch += 1
    return StepOutcome.ADVANCE


def occurrence_gaps(pattern: Pattern, matched: list) -> list[int]:
    """Anchor-to-match gaps of a finished occurrence, one per window."""
    gaps = []
    for (i, prev), (_, cur) in zip(matched, matched[1:]):
        gaps.append(cur.time - anchor_time(pattern.components[i - 1], prev))
    return gaps
