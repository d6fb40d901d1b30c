import pytest
from hypothesis import given, strategies as st

from cooccur.dsl import (
    Pattern,
    PatternComponent,
    Sign,
    format_pattern,
    parse_pattern,
    parse_pattern_file,
    parse_pattern_lines,
    prefix,
)
from cooccur.errors import OutOfRange, PatternError, PatternSyntaxError, WindowError
from cooccur.model import TimeWindow

SIZE_SIX = "EA+ -[15]-> EB -[10]-> EC- -[20]-> EG -[60]-> EH -[90]-> ED"


def test_pair_pattern():
    p = parse_pattern("E2 -[20]-> E1-")
    assert p.components == (PatternComponent("E2", Sign.ANY), PatternComponent("E1", Sign.END))
    assert p.windows == (TimeWindow(0, 20),)
    assert p.name is None


def test_size_six():
    p = parse_pattern(SIZE_SIX)
    assert p.size == 6
    assert [w.upper for w in p.windows] == [15, 10, 20, 60, 90]
    assert [c.sign for c in p.components] == [Sign.START, Sign.ANY, Sign.END, Sign.ANY, Sign.ANY, Sign.ANY]


def test_explicit_lower_bound_and_name():
    p = parse_pattern("rho: A+ -[5,10]-> B")
    assert p.name == "rho"
    assert p.key == "rho"
    assert p.windows == (TimeWindow(5, 10),)


def test_single_component():
    p = parse_pattern("E1")
    assert p.size == 1 and p.windows == ()


def test_key_without_name_is_canonical_text():
    assert parse_pattern("A  -[3]->   B+").key == "A -[0,3]-> B+"


@pytest.mark.parametrize("text,column", [
    ("E2 -[20]->", 11),
    ("E2 E1", 4),
    ("-[3]-> A", 1),
    ("A -[x]-> B", 3),
    ("A- -[3]->B", 10),
    ("", 1),
])
def test_syntax_errors_carry_a_column(text, column):
    with pytest.raises(PatternSyntaxError) as info:
        parse_pattern(text)
    assert info.value.column == column


def test_window_errors():
    with pytest.raises(WindowError):
        parse_pattern("A -[9,3]-> B")
    with pytest.raises(WindowError):
        parse_pattern("A -[-1,3]-> B")


def test_prefix():
    p = parse_pattern("x: " + SIZE_SIX)
    q = prefix(p, 3)
    assert format_pattern(q) == "x: EA+ -[0,15]-> EB -[0,10]-> EC-"
    assert prefix(p, 6) == p
    with pytest.raises(OutOfRange):
        prefix(p, 0)
    with pytest.raises(OutOfRange):
        prefix(p, 7)


def test_pattern_needs_matching_window_count():
    with pytest.raises(PatternError):
        Pattern((PatternComponent("A"),), (TimeWindow(0, 1),))
    with pytest.raises(PatternError):
        Pattern(())


def test_pattern_file():
    text = "# comment\nrho1: E2 -[20]-> E1-\n\nE1 -[3]-> E2  # trailing\n"
    ps = parse_pattern_file(text)
    assert [p.key for p in ps] == ["rho1", "E1 -[0,3]-> E2"]


def test_pattern_file_errors_carry_lines():
    ps, errors = parse_pattern_lines("A -[3]-> B\nA -[3]->\nC D\n")
    assert len(ps) == 1
    assert [e.line for e in errors] == [2, 3]
    assert str(errors[0]).startswith("line 2, column")
    with pytest.raises(PatternError, match="line 2"):
        parse_pattern_file("A\nA B\n")


labels = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,5}", fullmatch=True)
windows = st.tuples(st.integers(0, 500), st.integers(0, 500)).map(lambda t: TimeWindow(min(t), max(t)))


@st.composite
def patterns(draw):
    n = draw(st.integers(1, 6))
    comps = tuple(PatternComponent(draw(labels), draw(st.sampled_from(list(Sign)))) for _ in range(n))
    ws = tuple(draw(windows) for _ in range(n - 1))
    name = draw(st.none() | labels)
    return Pattern(comps, ws, name)


@given(patterns())
def test_format_parse_round_trip(p):
    text = format_pattern(p)
    assert parse_pattern(text) == p
    assert format_pattern(parse_pattern(text)) == text


@given(patterns(), st.integers(1, 6))
def test_prefix_is_a_prefix(p, k):
    k = min(k, p.size)
    q = prefix(p, k)
    assert q.components == p.components[:k]
    assert q.windows == p.windows[: k - 1]
