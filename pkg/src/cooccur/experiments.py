"""Desk-scale synthetic experiments.

``prefix_trend`` embeds one size-6 pattern at several noise levels and counts
every prefix. ``hot_cells`` embeds three pairs and checks that each pair's
cell stands out in the matrix for its own offset.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cooccurrence import CoMatrix, matrix_from_serialized
from .datagen import GenConfig, generate_with_report
from .dsl import Pattern, parse_pattern
from .engine import count_prefixes
from .serializer import serialize

SIZE_SIX = "EA+ -[15]-> EB -[10]-> EC- -[20]-> EG -[60]-> EH -[90]-> ED"
PAIRS = ("EC -[15]-> EF", "EI -[30]-> EM", "ES -[60]-> EH")
NOISE_LEVELS = (0.2, 0.4, 0.6, 0.8, 0.95)


@dataclass
class TrendRow:
    beta: float
    prefix_counts: list[int]
    completed: int


def prefix_trend(
    n: int = 100_000,
    seed: int = 1,
    betas: Sequence[float] = NOISE_LEVELS,
    alpha: float = 0.3,
    pattern: str | Pattern = SIZE_SIX,
    **config,
) -> list[TrendRow]:
    p = parse_pattern(pattern) if isinstance(pattern, str) else pattern
    rows = []
    for beta in betas:
        cfg = GenConfig(n=n, alpha=alpha, beta=beta, seed=seed, embedded=(p,), **config)
        stream, report = generate_with_report(cfg)
        counts = count_prefixes(serialize([stream]), p)
        rows.append(TrendRow(beta, counts, report.completed[p.key]))
    return rows


@dataclass
class HotCell:
    pattern: Pattern
    dt: int
    value: float
    background_mean: float
    background_std: float
    row_max_label: str
    matrix: CoMatrix
    seconds: float = 0.0  # time to build the matrix

    @property
    def threshold(self) -> float:
        return self.background_mean + 3 * self.background_std

    @property
    def is_hot(self) -> bool:
        return self.value > self.threshold

    @property
    def row_max(self) -> bool:
        return self.row_max_label == self.pattern.components[1].label


def background(m: CoMatrix, embedded_pairs: Sequence[tuple[str, str]]) -> np.ndarray:
    """Defined cells that are not one of the embedded pairs."""
    mask = ~np.isnan(m.cells)
    for a, b in embedded_pairs:
        if a in m.labels_x and b in m.labels_y:
            mask[m.labels_x.index(a), m.labels_y.index(b)] = False
    return m.cells[mask]


def hot_cells(
    n: int = 100_000,
    seed: int = 1,
    beta: float = 0.8,
    pairs: Sequence[str] = PAIRS,
    **config,
) -> list[HotCell]:
    patterns = tuple(parse_pattern(t) for t in pairs)
    cfg = GenConfig(n=n, beta=beta, seed=seed, embedded=patterns, **config)
    stream, _ = generate_with_report(cfg)
    s = serialize([stream])
    labels = list(cfg.alphabet)
    embedded_pairs = [(p.components[0].label, p.components[1].label) for p in patterns]
    out = []
    for p, (a, b) in zip(patterns, embedded_pairs):
        dt = p.windows[0].upper
        t0 = time.perf_counter()
        m = matrix_from_serialized(s, dt, labels, labels)
        seconds = time.perf_counter() - t0
        bg = background(m, embedded_pairs)
        row = m.cells[labels.index(a)]
        out.append(HotCell(
            pattern=p,
            dt=dt,
            value=m.cell(a, b),
            background_mean=float(bg.mean()),
            background_std=float(bg.std()),
            row_max_label=labels[int(np.nanargmax(row))],
            matrix=m,
            seconds=seconds,
        ))
    return out
