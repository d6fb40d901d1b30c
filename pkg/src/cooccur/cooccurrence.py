"""Auto and cross co-occurrence scores and Δt-indexed co-occurrence matrices.

A score is ``count((Ei; Ej)_[0,Δt]) / count(Ei)``: the greedy occurrence
count of the two-component pattern, divided by the number of ``Ei``
instances. The score is NA (NaN) when ``Ei`` never occurs, which keeps
"never occurs" apart from "occurs but is never followed".
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dsl import Pattern, PatternComponent, Sign
from .engine import count_patterns, pattern_ids
from .errors import UnsupportedFormat
from .model import EventStream, TimeWindow
from .serializer import SerializedStream, serialize

NA = float("nan")


class Mode(str, enum.Enum):
    AUTO = "auto"
    CROSS = "cross"


def pair_pattern(ei: str, ej: str, dt: int, signs: tuple[Sign, Sign] = (Sign.ANY, Sign.ANY)) -> Pattern:
    return Pattern((PatternComponent(ei, signs[0]), PatternComponent(ej, signs[1])), (TimeWindow(0, dt),))


def auto_cooccurrence(
    s: SerializedStream, ei: str, ej: str, dt: int, signs: tuple[Sign, Sign] = (Sign.ANY, Sign.ANY)
) -> float:
    denom = s.count_instances(ei)
    if denom == 0:
        return NA
    p = pair_pattern(ei, ej, dt, signs)
    return count_patterns(s, [p]).counts[p.key] / denom


def cross_cooccurrence(
    sa: EventStream,
    sb: EventStream,
    ei: str,
    ej: str,
    dt: int,
    signs: tuple[Sign, Sign] = (Sign.ANY, Sign.ANY),
) -> float:
    return auto_cooccurrence(serialize([sa, sb]), ei, ej, dt, signs)


@dataclass(frozen=True)
class CoMatrix:
    labels_x: tuple[str, ...]
    labels_y: tuple[str, ...]
    dt: int
    cells: np.ndarray
    mode: Mode = Mode.AUTO

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def cell(self, ei: str, ej: str) -> float:
        return float(self.cells[self.labels_x.index(ei), self.labels_y.index(ej)])

    def defined(self) -> np.ndarray:
        return self.cells[~np.isnan(self.cells)]


def build_matrix(
    streams: Sequence[EventStream],
    mode: Mode | str,
    dt: int,
    labels_x: Optional[Sequence[str]] = None,
    labels_y: Optional[Sequence[str]] = None,
    signs: tuple[Sign, Sign] = (Sign.ANY, Sign.ANY),
) -> CoMatrix:
    """Fill a matrix for every (row, column) label pair in one engine pass.

    Auto mode serializes all streams together and, by default, puts the same
    labels on both axes. Cross mode takes exactly two streams, with rows
    labelled from the first and columns from the second.
    """
    mode = Mode(mode)
    if mode is Mode.CROSS:
        if len(streams) != 2:
            raise ValueError(f"cross mode needs exactly two streams, got {len(streams)}")
        if labels_x is None:
            labels_x = streams[0].labels
        if labels_y is None:
            labels_y = streams[1].labels
    else:
        if labels_x is None:
            labels_x = sorted({e.label for st in streams for e in st.events})
        if labels_y is None:
            labels_y = labels_x
    labels_x, labels_y = tuple(labels_x), tuple(labels_y)
    s = serialize(streams)
    return _fill(s, labels_x, labels_y, dt, mode, signs)


def matrix_from_serialized(
    s: SerializedStream,
    dt: int,
    labels_x: Sequence[str],
    labels_y: Sequence[str],
    mode: Mode | str = Mode.AUTO,
    signs: tuple[Sign, Sign] = (Sign.ANY, Sign.ANY),
) -> CoMatrix:
    return _fill(s, tuple(labels_x), tuple(labels_y), dt, Mode(mode), signs)


def _fill(s, labels_x, labels_y, dt, mode, signs) -> CoMatrix:
    patterns = [pair_pattern(a, b, dt, signs) for a in labels_x for b in labels_y]
    counts = count_patterns(s, patterns).counts if patterns else {}
    keys = pattern_ids(patterns)
    cells = np.full((len(labels_x), len(labels_y)), NA)
    k = 0
    for i, a in enumerate(labels_x):
        denom = s.count_instances(a)
        for j in range(len(labels_y)):
            if denom:
                cells[i, j] = counts[keys[k]] / denom
            k += 1
    return CoMatrix(labels_x, labels_y, dt, cells, mode)


def emit_matrix(m: CoMatrix, format: str) -> bytes:
    fmt = format.lower()
    if fmt == "csv":
        return _csv(m).encode()
    if fmt == "svg":
        return _svg(m).encode()
    raise UnsupportedFormat(f"unsupported matrix format {format!r} (use csv or svg)")


def _csv(m: CoMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lbl", *m.labels_y])
    for i, a in enumerate(m.labels_x):
        row = [a]
        for v in m.cells[i]:
            row.append("" if math.isnan(v) else f"{v:.6f}")
        w.writerow(row)
    return buf.getvalue()


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _svg(m: CoMatrix, cell: int = 20) -> str:
    rows, cols = m.shape
    left = 8 + 7 * max((len(x) for x in m.labels_x), default=1)
    top = 8 + 7 * max((len(y) for y in m.labels_y), default=1)
    width, height = left + cols * cell + 10, top + rows * cell + 30
    values = m.defined()
    lo = float(values.min()) if values.size else 0.0
    hi = float(values.max()) if values.size else 0.0

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">',
        '<defs><pattern id="na" width="4" height="4" patternUnits="userSpaceOnUse">'
        '<rect width="4" height="4" fill="#ffffff"/>'
        '<path d="M0,4 L4,0" stroke="#999999" stroke-width="1"/></pattern></defs>',
        f'<title>{m.mode.value} co-occurrence, dt={m.dt}</title>',
    ]
    for j, label in enumerate(m.labels_y):
        x = left + j * cell + cell // 2
        out.append(
            f'<text x="{x}" y="{top - 4}" transform="rotate(-90 {x} {top - 4})">{_esc(label)}</text>'
        )
    for i, label in enumerate(m.labels_x):
        y = top + i * cell + cell // 2 + 4
        out.append(f'<text x="{left - 4}" y="{y}" text-anchor="end">{_esc(label)}</text>')
        for j in range(cols):
            v = m.cells[i, j]
            x, yy = left + j * cell, top + i * cell
            if math.isnan(v):
                fill = "url(#na)"
                tip = "NA"
            else:
                t = (v - lo) / (hi - lo) if hi > lo else 1.0
                g = int(round(255 * (1.0 - t)))
                fill = f"#{g:02x}{g:02x}{g:02x}"
                tip = f"{v:.6f}"
            out.append(
                f'<rect x="{x}" y="{yy}" width="{cell}" height="{cell}" fill="{fill}" stroke="#cccccc">'
                f"<title>{_esc(m.labels_x[i])},{_esc(m.labels_y[j])}: {tip}</title></rect>"
            )
    out.append(
        f'<text x="{left}" y="{top + rows * cell + 20}">dt={m.dt} min={lo:.6f} max={hi:.6f}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
