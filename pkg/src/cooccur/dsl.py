"""A small text language for ordered co-occurrence patterns.

Grammar::

    pattern   := [NAME ":"] component (arrow component)*
    arrow     := "-[" INT "]->" | "-[" INT "," INT "]->"
    component := LABEL ("+" | "-")?
    LABEL     := [A-Za-z_][A-Za-z0-9_]*

Tokens are whitespace-separated, so an End sign (``E1-``) never runs into an
arrow (``-[20]->``). ``-[u]->`` is shorthand for ``-[0,u]->``. Windows are
inclusive at both ends.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import OutOfRange, PatternError, PatternSyntaxError, WindowError
from .model import TimeWindow


class Sign(enum.Enum):
    START = "+"
    END = "-"
    ANY = ""


@dataclass(frozen=True)
class PatternComponent:
    label: str
    sign: Sign = Sign.ANY

    def __str__(self) -> str:
        return f"{self.label}{self.sign.value}"


@dataclass(frozen=True)
class Pattern:
    components: tuple[PatternComponent, ...]
    windows: tuple[TimeWindow, ...] = ()
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "windows", tuple(self.windows))
        if not self.components:
            raise PatternError("a pattern needs at least one component")
        if len(self.windows) != len(self.components) - 1:
            raise PatternError(
                f"{len(self.components)} components need {len(self.components) - 1} windows, "
                f"got {len(self.windows)}"
            )

    def __len__(self) -> int:
        return len(self.components)

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def key(self) -> str:
        """Identifier used in reports: the name, else the canonical text."""
        return self.name if self.name else format_pattern(self.unnamed())

    def unnamed(self) -> "Pattern":
        return Pattern(self.components, self.windows)

    def __str__(self) -> str:
        return format_pattern(self)


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_NAME_RE = re.compile(rf"\s*({_IDENT})\s*:")
_ARROW_RE = re.compile(r"-\[\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\]->")
_COMPONENT_RE = re.compile(rf"({_IDENT})([+-]?)")
_WS_RE = re.compile(r"\s+")


def _tokens(text: str, pos: int) -> Iterator[tuple[str, re.Match, int]]:
    n = len(text)
    while True:
        m = _WS_RE.match(text, pos)
        if m:
            pos = m.end()
        if pos >= n:
            return
        for kind, rx in (("arrow", _ARROW_RE), ("component", _COMPONENT_RE)):
            m = rx.match(text, pos)
            if m:
                end = m.end()
                if end < n and not text[end].isspace():
                    raise PatternSyntaxError(
                        f"unexpected {text[end]!r} (tokens must be separated by whitespace)", end + 1
                    )
                yield kind, m, pos + 1
                pos = end
                break
        else:
            raise PatternSyntaxError(f"unexpected {text[pos]!r}", pos + 1)


def _window(m: re.Match, column: int) -> TimeWindow:
    first, second = m.group(1), m.group(2)
    lo, hi = (0, int(first)) if second is None else (int(first), int(second))
    if lo < 0 or hi < 0:
        raise WindowError(f"window bounds must be non-negative, got [{lo},{hi}]", column)
    if lo > hi:
        raise WindowError(f"window lower bound {lo} exceeds upper bound {hi}", column)
    return TimeWindow(lo, hi)


def parse_pattern(text: str) -> Pattern:
    """Parse one pattern. Errors carry a 1-based column."""
    name = None
    pos = 0
    m = _NAME_RE.match(text)
    if m:
        name = m.group(1)
        pos = m.end()

    components: list[PatternComponent] = []
    windows: list[TimeWindow] = []
    expect_component = True
    last_col = pos + 1
    for kind, m, col in _tokens(text, pos):
        last_col = col
        if expect_component:
            if kind != "component":
                raise PatternSyntaxError("expected an event label", col)
            label, sign = m.group(1), m.group(2)
            components.append(PatternComponent(label, Sign(sign)))
        else:
            if kind != "arrow":
                raise PatternSyntaxError("expected an arrow like -[20]-> between components", col)
            windows.append(_window(m, col))
        expect_component = not expect_component

    if not components:
        raise PatternSyntaxError("empty pattern", last_col)
    if expect_component:
        raise PatternSyntaxError("pattern ends with an arrow", len(text.rstrip()) + 1)
    return Pattern(tuple(components), tuple(windows), name)


def format_pattern(p: Pattern) -> str:
    parts = [str(p.components[0])]
    for w, c in zip(p.windows, p.components[1:]):
        parts.append(f"-[{w.lower},{w.upper}]->")
        parts.append(str(c))
    body = " ".join(parts)
    return f"{p.name}: {body}" if p.name else body


def prefix(p: Pattern, k: int) -> Pattern:
    """First ``k`` components of ``p`` (and the ``k - 1`` windows between them)."""
    if not 1 <= k <= p.size:
        raise OutOfRange(f"prefix size {k} outside 1..{p.size}")
    return Pattern(p.components[:k], p.windows[: k - 1], p.name)


def parse_pattern_file(text: str) -> list[Pattern]:
    """Parse a pattern file: one pattern per line, ``#`` comments, blank lines ignored.

    Raises the first error with its line number attached.
    """
    patterns, errors = parse_pattern_lines(text)
    if errors:
        raise errors[0]
    return patterns


def parse_pattern_lines(text: str) -> tuple[list[Pattern], list[PatternError]]:
    """Like :func:`parse_pattern_file` but collects every error."""
    patterns: list[Pattern] = []
    errors: list[PatternError] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        try:
            patterns.append(parse_pattern(line))
        except PatternError as exc:
            errors.append(exc.at_line(lineno))
    return patterns, errors


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]
