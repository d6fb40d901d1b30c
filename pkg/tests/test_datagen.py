import pytest

from cooccur.datagen import (
    DEFAULT_ALPHABET,
    GenConfig,
    embedding_report,
    generate,
    generate_with_report,
    split_stream,
)
from cooccur.dsl import parse_pattern
from cooccur.engine import count_patterns
from cooccur.errors import ConfigMismatch, EmbeddedLabelNotInAlphabet, EmptyAlphabet
from cooccur.io import dumps_jsonl
from cooccur.serializer import serialize

PAIR = parse_pattern("EC -[15]-> EF")


def test_sizes_and_ids():
    s = generate(GenConfig(n=500, seed=3))
    assert len(s) == 500
    assert {e.id for e in s} == {f"gen:{i}" for i in range(500)}
    assert {e.label for e in s} <= set(DEFAULT_ALPHABET)


def test_empty():
    assert len(generate(GenConfig(n=0))) == 0


def test_alpha_one_is_all_complete():
    assert all(e.is_complete for e in generate(GenConfig(n=300, alpha=1.0)))


def test_alpha_zero_is_all_semi():
    assert not any(e.is_complete for e in generate(GenConfig(n=300, alpha=0.0)))


def test_same_seed_same_bytes():
    cfg = GenConfig(n=2000, alpha=0.3, beta=0.5, seed=5, embedded=(PAIR,))
    a, ra = generate_with_report(cfg)
    b, rb = generate_with_report(cfg)
    assert dumps_jsonl([a], cfg.header_lines()) == dumps_jsonl([b], cfg.header_lines())
    assert ra == rb
    assert generate(GenConfig(n=2000, seed=6)).events != generate(GenConfig(n=2000, seed=5)).events


def test_header():
    cfg = GenConfig(n=10, seed=4, embedded=(PAIR,))
    lines = cfg.header_lines()
    assert lines[0].startswith("gen n=10 ")
    assert "seed=4" in lines[0] and "rng=numpy.PCG64" in lines[0] and "sigma=2.5" in lines[0]
    assert lines[1] == "embed EC -[0,15]-> EF"


def test_beta_one_is_all_noise():
    _, report = generate_with_report(GenConfig(n=300, beta=1.0, embedded=(PAIR,)))
    assert report.noise_events == 300
    assert report.started[PAIR.key] == 0


def test_embeddings_are_found():
    cfg = GenConfig(n=5000, beta=0.3, seed=2, embedded=(PAIR,))
    stream, report = generate_with_report(cfg)
    assert report.completed[PAIR.key] > 0
    found = count_patterns(serialize([stream]), [PAIR]).counts[PAIR.key]
    # the greedy matcher finds at least the deliberate embeddings with complete intervals
    assert found >= 0.9 * report.completed[PAIR.key]


def test_embedding_report():
    cfg = GenConfig(n=1000, seed=1, embedded=(PAIR,))
    stream = generate(cfg)
    assert embedding_report(cfg, stream) == generate_with_report(cfg)[1].completed
    with pytest.raises(ConfigMismatch):
        embedding_report(GenConfig(n=1000, seed=2, embedded=(PAIR,)), stream)


@pytest.mark.parametrize("kwargs,exc", [
    ({"alphabet": ()}, EmptyAlphabet),
    ({"embedded": (parse_pattern("ZZ"),)}, EmbeddedLabelNotInAlphabet),
    ({"alpha": 1.5}, ValueError),
    ({"beta": -0.1}, ValueError),
    ({"n": -1}, ValueError),
    ({"mu": 0}, ValueError),
    ({"max_increment": 0}, ValueError),
])
def test_invalid_config(kwargs, exc):
    with pytest.raises(exc):
        GenConfig(**{"n": 10, **kwargs})


def test_split_stream():
    s = generate(GenConfig(n=400, seed=1))
    a, b = split_stream(s, ["EA", "EB"])
    assert len(a) + len(b) == 400
    assert {e.label for e in b} <= {"EA", "EB"}
    assert not {e.label for e in a} & {"EA", "EB"}
    serialize([a, b])  # ids stay unique across the parts
