import pytest

from cooccur.model import make_stream
from cooccur.serializer import serialize

# Stream S: eleven instances, five of them semi-intervals (four with only
# an end, one with only a start).
S_EVENTS = [
    ("E1", 1, 5),
    ("E2", 8, 11),
    ("E3", 11, 18),
    ("E3", None, 22),
    ("E1", None, 30),
    ("E5", 35, 40),
    ("E6", 42, None),
    ("E2", 53, 57),
    ("E1", None, 60),
    ("E4", None, 71),
    ("E1", 73, 76),
]

S_JSONL = "\n".join(
    "{" + ", ".join(
        [f'"type": "{lbl}"'] + ([f'"start": {s}'] if s is not None else []) + ([f'"end": {e}'] if e is not None else [])
    ) + "}"
    for lbl, s, e in S_EVENTS
) + "\n"


@pytest.fixture
def stream_s():
    return make_stream("S", S_EVENTS)


@pytest.fixture
def serialized_s(stream_s):
    return serialize([stream_s])


@pytest.fixture
def s_file(tmp_path):
    path = tmp_path / "s.jsonl"
    path.write_text(S_JSONL)
    return path


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
