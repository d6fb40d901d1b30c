"""Reading and writing event-stream files.

JSON Lines, one instance per line::

    {"type": "E1", "start": 1, "end": 5}

``start``/``end`` are integers or absent. ``id`` defaults to ``<file>:<line>``
and ``stream`` to the file stem. Lines starting with ``#`` are comments. CSV
files use the header ``type,start,end[,id,stream]`` with empty cells for
missing timestamps.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, TextIO

from .errors import InvalidInstanceError, StreamFormatError
from .model import EventInstance, EventStream, validate_instance


def _coerce_time(value, where: str):
    if value is None or value == "":
        return None
    if isinstance(value, bool):
        raise StreamFormatError(f"{where}: timestamp must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise StreamFormatError(f"{where}: timestamp must be an integer, got {value!r}")


def _build(record: dict, where: str, default_id: str, default_stream: str) -> EventInstance:
    label = record.get("type")
    if not isinstance(label, str) or not label:
        raise StreamFormatError(f"{where}: missing or empty 'type'")
    start = _coerce_time(record.get("start"), where)
    end = _coerce_time(record.get("end"), where)
    iid = record.get("id") or default_id
    stream = record.get("stream") or default_stream
    try:
        return validate_instance(label, start, end, id=str(iid), stream_id=str(stream))
    except InvalidInstanceError as exc:
        raise StreamFormatError(f"{where}: {exc}") from exc


def _group(instances: Iterable[EventInstance]) -> list[EventStream]:
    by_stream: dict[str, list[EventInstance]] = {}
    for e in instances:
        by_stream.setdefault(e.stream_id, []).append(e)
    return [EventStream(sid, tuple(evs)) for sid, evs in by_stream.items()]


def read_jsonl(fh: TextIO, name: str = "stdin", stream: str | None = None) -> list[EventStream]:
    default_stream = stream if stream is not None else name
    out = []
    for lineno, line in enumerate(fh, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        where = f"{name}:{lineno}"
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StreamFormatError(f"{where}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise StreamFormatError(f"{where}: expected a JSON object")
        out.append(_build(record, where, where, default_stream))
    return _group(out)


def read_csv(fh: TextIO, name: str = "stdin", stream: str | None = None) -> list[EventStream]:
    default_stream = stream if stream is not None else name
    lines = (ln for ln in fh if not ln.startswith("#"))
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return []
    missing = {"type", "start", "end"} - set(reader.fieldnames)
    if missing:
        raise StreamFormatError(f"{name}: CSV header lacks {sorted(missing)}")
    out = []
    for row in reader:
        where = f"{name}:{reader.line_num}"
        out.append(_build(row, where, where, default_stream))
    return _group(out)


def load_streams(path: str | Path) -> list[EventStream]:
    """Load every stream in a ``.jsonl`` or ``.csv`` file (grouped by ``stream``)."""
    path = Path(path)
    with path.open(newline="") as fh:
        if path.suffix.lower() == ".csv":
            return read_csv(fh, name=path.name, stream=path.stem)
        return read_jsonl(fh, name=path.name, stream=path.stem)


def instance_record(e: EventInstance, with_stream: bool = True) -> dict:
    record: dict = {"type": e.label}
    if e.start is not None:
        record["start"] = e.start
    if e.end is not None:
        record["end"] = e.end
    record["id"] = e.id
    if with_stream and e.stream_id:
        record["stream"] = e.stream_id
    return record


def write_jsonl(fh: TextIO, streams: Iterable[EventStream], header: Iterable[str] = ()) -> None:
    for line in header:
        fh.write(f"# {line}\n")
    for s in streams:
        for e in s.events:
            fh.write(json.dumps(instance_record(e), separators=(",", ":")) + "\n")


def write_csv(fh: TextIO, streams: Iterable[EventStream]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["type", "start", "end", "id", "stream"])
    for s in streams:
        for e in s.events:
            writer.writerow([
                e.label,
                "" if e.start is None else e.start,
                "" if e.end is None else e.end,
                e.id,
                e.stream_id,
            ])


def dumps_jsonl(streams: Iterable[EventStream], header: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    write_jsonl(buf, streams, header)
    return buf.getvalue()
