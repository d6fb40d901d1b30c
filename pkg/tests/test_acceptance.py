"""Acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary. The desk-scale experiments use n = 10^5 and seed 1.
"""

import random
import time

import numpy as np
import pytest

from cooccur.automaton import compile_pattern
from cooccur.cli import main
from cooccur.cooccurrence import matrix_from_serialized
from cooccur.datagen import DEFAULT_ALPHABET, GenConfig, generate, generate_with_report
from cooccur.dsl import parse_pattern
from cooccur.engine import count_patterns, count_prefixes
from cooccur.experiments import NOISE_LEVELS, PAIRS, SIZE_SIX, hot_cells
from cooccur.model import make_stream
from cooccur.serializer import serialize

from conftest import S_EVENTS
from test_oracle import check_case, random_case

N = 100_000
SEED = 1


@pytest.fixture(scope="module")
def trend_datasets():
    """One generated stream per noise level with the size-6 pattern embedded."""
    p = parse_pattern(SIZE_SIX)
    out = {}
    for beta in NOISE_LEVELS:
        t0 = time.perf_counter()
        stream, report = generate_with_report(GenConfig(n=N, alpha=0.3, beta=beta, seed=SEED, embedded=(p,)))
        s = serialize([stream])
        counts = count_prefixes(s, p)
        out[beta] = (s, counts, report, time.perf_counter() - t0)
    return p, out


@pytest.fixture(scope="module")
def hot():
    return hot_cells(n=N, seed=SEED, beta=0.8, pairs=PAIRS)


def test_criterion_1_worked_example(criterion):
    p = parse_pattern("E2 -[20]-> E1-")
    best, count = float("inf"), None
    for _ in range(20):
        t0 = time.perf_counter()
        s = serialize([make_stream("S", S_EVENTS)])
        count = count_patterns(s, [p]).counts[p.key]
        best = min(best, time.perf_counter() - t0)
    criterion(1, "worked example counts 2 in < 1 ms", count == 2 and best < 1e-3,
              f"count={count}, {best * 1e3:.3f} ms")


def test_criterion_2_state_count_law(criterion):
    shapes = []
    for n in range(1, 11):
        a = compile_pattern(parse_pattern(" -[7]-> ".join(f"E{i}" for i in range(n))))
        shapes.append((len(a.ordinary_states), len(a.time_states), 1, a.n_states) == (n, n - 1, 1, 2 * n))
    criterion(2, "2N states (N ordinary, N-1 time, 1 final) for N = 1..10", all(shapes))


def test_criterion_3_differential(criterion):
    rng = random.Random(20240101)
    cases, failures = 1000, []
    t0 = time.perf_counter()
    for i in range(cases):
        s, p = random_case(rng)
        if not check_case(s, p):
            failures.append((i, str(p)))
    elapsed = time.perf_counter() - t0
    criterion(3, "engine = oracle and occurrences within enumeration on 1000 random cases",
              not failures and elapsed < 60, f"{len(failures)} mismatches, {elapsed:.1f} s")


def test_criterion_4_one_pass(criterion, trend_datasets):
    ok = True
    rng = random.Random(4)
    for _ in range(50):
        s, p = random_case(rng)
        _, q = random_case(rng)
        ok &= count_patterns(s, [p, q, p]).boundaries_read == len(s)
    s = trend_datasets[1][0.2][0]
    ps = [parse_pattern(t) for t in (SIZE_SIX, *PAIRS)]
    r = count_patterns(s, ps)
    ok &= r.boundaries_read == len(s)
    criterion(4, "boundary-read counter equals |boundaries|", ok, f"{r.boundaries_read} == {len(s)}")


def test_criterion_5_prefix_trend(criterion, trend_datasets):
    p, data = trend_datasets
    curves = {beta: counts for beta, (_, counts, _, _) in data.items()}
    monotone = all(all(a >= b for a, b in zip(c, c[1:])) for c in curves.values())
    dominated = all(a >= b for a, b in zip(curves[0.2], curves[0.8]))
    full_lo, full_hi = curves[0.2][-1], curves[0.95][-1]
    factor = full_lo >= 5 * full_hi and full_lo > 0
    slowest = max(sec for *_, sec in data.values())
    detail = "; ".join(f"beta={b}: {c}" for b, c in curves.items()) + f"; slowest {slowest:.1f} s"
    criterion(5, "prefix frequencies non-increasing, beta=0.2 >= beta=0.8, full 0.2 >= 5x full 0.95",
              monotone and dominated and factor and slowest < 60, detail)


def test_criterion_6_hot_cells(criterion, hot):
    ok = all(c.is_hot and c.row_max and c.seconds < 60 for c in hot)
    detail = "; ".join(
        f"{c.pattern} dt={c.dt}: {c.value:.3f} > {c.threshold:.3f}, row max {c.row_max_label}, {c.seconds:.1f} s"
        for c in hot
    )
    criterion(6, "embedded cell exceeds mean + 3 sd and is its row maximum", ok, detail)


def _range_ok(m):
    d = m.defined()
    in_range = bool(((d >= 0) & (d <= 1)).all())
    na_rows = True
    for i, label in enumerate(m.labels_x):
        row = m.cells[i]
        # NA exactly when the row label never occurs
        na_rows &= bool(np.isnan(row).all()) if label == "ZZ" else not np.isnan(row).any()
    return in_range and na_rows


def test_criterion_7_normalization(criterion, trend_datasets, hot):
    labels = list(DEFAULT_ALPHABET)
    ok, checked = True, 0
    for c in hot:
        ok &= _range_ok(c.matrix)
        checked += 1
    for s, *_ in trend_datasets[1].values():
        ok &= _range_ok(matrix_from_serialized(s, 30, labels + ["ZZ"], labels))
        checked += 1
    rng = np.random.default_rng(7)
    for k in range(6):
        cfg = GenConfig(
            n=3000, alpha=float(rng.choice([0.0, 0.3, 1.0])), beta=float(rng.uniform(0, 1)), seed=k,
            embedded=(parse_pattern(PAIRS[k % 3]),),
        )
        s = serialize([generate(cfg)])
        ok &= _range_ok(matrix_from_serialized(s, int(rng.integers(0, 80)), labels + ["ZZ"], labels))
        checked += 1
    criterion(7, "defined cells in [0,1]; absent row labels are NA", ok, f"{checked} matrices")


def test_criterion_8_generator(criterion, tmp_path):
    fractions = {}
    for alpha in (0.3, 0.6, 0.9):
        s = generate(GenConfig(n=N, alpha=alpha, beta=0.5, seed=SEED, embedded=(parse_pattern(SIZE_SIX),)))
        fractions[alpha] = sum(e.is_complete for e in s) / len(s)
    close = all(abs(f - a) <= 0.02 for a, f in fractions.items())
    emb = tmp_path / "six.txt"
    emb.write_text(SIZE_SIX + "\n")
    files = []
    for run in ("a", "b"):
        out, rep = tmp_path / f"{run}.jsonl", tmp_path / f"{run}.json"
        code = main(["gen", "--n", str(N), "--alphabet-size", "22", "--alpha", "0.3", "--beta", "0.2",
                     "--seed", str(SEED), "--embed", str(emb), "--out", str(out), "--report", str(rep)])
        files.append((code, out.read_bytes(), rep.read_bytes()))
    identical = files[0] == files[1] and files[0][0] == 0
    detail = ", ".join(f"alpha={a}: {f:.4f}" for a, f in fractions.items())
    criterion(8, "complete fraction within 0.02 of alpha; same seed gives identical files and reports",
              close and identical, detail + f", identical={identical}")


def test_criterion_9_throughput(criterion):
    s = serialize([generate(GenConfig(n=500_000, alpha=1.0, beta=0.5, seed=9))])
    patterns = [parse_pattern(t) for t in (
        "EA",
        "EB+ -[10]-> EC",
        "EC -[15]-> EF",
        "EI -[30]-> EM",
        "ES -[60]-> EH",
        SIZE_SIX,
        "ED- -[5]-> EE+",
        "EF -[20]-> EG -[20]-> EH",
        "EJ -[40]-> EJ",
        "EK+ -[3,30]-> EL- -[50]-> EM",
    )]
    t0 = time.perf_counter()
    r = count_patterns(s, patterns)
    elapsed = time.perf_counter() - t0
    rate = r.boundaries_read / elapsed
    criterion(9, ">= 1e5 boundaries/s counting 10 patterns over 1e6 boundaries",
              len(s) == 1_000_000 and rate >= 1e5, f"{rate:,.0f} boundaries/s")
