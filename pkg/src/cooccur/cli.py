"""``cooccur`` command line.

Every output carries a run manifest (subcommand, resolved flags, input
digests, seed, version) as ``#`` header lines, a JSON key, or an XML comment,
so a rerun can be checked against it. Exit codes: 0 success, 1 input or data
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .automaton import compile_pattern
from .cooccurrence import Mode, build_matrix, emit_matrix
from .datagen import DEFAULT_ALPHABET, GenConfig, generate_with_report, split_stream
from .dsl import Pattern, Sign, parse_pattern, parse_pattern_lines, prefix
from .engine import count_patterns, occurrences_csv, pattern_ids
from .errors import CooccurError, PatternError
from .experiments import NOISE_LEVELS, PAIRS, SIZE_SIX, hot_cells, prefix_trend
from .io import dumps_jsonl, load_streams
from .model import EventStream
from .oracle import oracle
from .serializer import dump_csv, encode_relational, serialize

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    flags: dict
    inputs: dict[str, str] = field(default_factory=dict)
    seed: Optional[int] = None
    version: str = __version__

    def lines(self) -> list[str]:
        out = [
            f"manifest subcommand={self.subcommand} version={self.version} seed={self.seed}",
            "flags " + json.dumps(self.flags, sort_keys=True, separators=(",", ":"), default=_json_default),
        ]
        out += [f"input {name} sha256={digest}" for name, digest in self.inputs.items()]
        return out

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "flags": json.loads(json.dumps(self.flags, default=_json_default)),
            "inputs": self.inputs,
            "seed": self.seed,
            "version": self.version,
        }


def _json_default(o):
    if isinstance(o, Sign):
        return o.name.lower()
    return str(o)


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# Where outputs go does not affect their content, so it stays out of the manifest.
_NOT_RECORDED = {"func", "command", "out", "report", "occurrences", "dump_dot"}


def _manifest(args, inputs: Sequence[str] = (), seed=None) -> RunManifest:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_RECORDED}
    digests = {str(p): sha256_file(p) for p in inputs}
    return RunManifest(args.command, flags, digests, seed)


def _header_text(lines: Sequence[str]) -> str:
    return "".join(f"# {line}\n" for line in lines)


def _emit(text: str | bytes, out: Optional[str]) -> None:
    if out is None or out == "-":
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(text)
        return
    mode = "wb" if isinstance(text, bytes) else "w"
    with open(out, mode, **({} if mode == "wb" else {"newline": ""})) as fh:
        fh.write(text)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc


def _load_all(paths: Sequence[str]):
    streams = []
    for p in paths:
        try:
            streams.extend(load_streams(p))
        except OSError as exc:
            raise DataError(f"{p}: {exc.strerror or exc}") from exc
    return streams


def _load_patterns(path: str) -> list[Pattern]:
    patterns, errors = parse_pattern_lines(_read_text(path))
    if errors:
        raise DataError("\n".join(f"{path}: {e}" for e in errors))
    return patterns


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("the list is empty")
    return values


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


_SIGN_NAMES = {"+": Sign.START, "-": Sign.END, "any": Sign.ANY, "": Sign.ANY}


def _signs(text: str) -> tuple[Sign, Sign]:
    parts = [x.strip().lower() for x in text.split(",")]
    if len(parts) != 2 or any(x not in _SIGN_NAMES for x in parts):
        raise argparse.ArgumentTypeError(f"expected two of +,-,any separated by a comma, got {text!r}")
    return _SIGN_NAMES[parts[0]], _SIGN_NAMES[parts[1]]


# gen


def _embedded(items: Sequence[str]) -> tuple[list[Pattern], list[str]]:
    """Each ``--embed`` is a pattern file if such a file exists, else pattern text."""
    patterns, files = [], []
    for item in items:
        if Path(item).is_file():
            patterns.extend(_load_patterns(item))
            files.append(item)
        else:
            try:
                patterns.append(parse_pattern(item))
            except PatternError as exc:
                raise UsageError(f"--embed {item!r}: {exc}") from exc
    return patterns, files


def cmd_gen(args) -> int:
    if args.alphabet:
        alphabet = tuple(args.alphabet)
    else:
        if args.alphabet_size < 1:
            raise UsageError("--alphabet-size must be >= 1")
        if args.alphabet_size <= len(DEFAULT_ALPHABET):
            alphabet = DEFAULT_ALPHABET[: args.alphabet_size]
        else:
            alphabet = tuple(f"E{i}" for i in range(args.alphabet_size))
    patterns, files = _embedded(args.embed)
    try:
        config = GenConfig(
            n=args.n,
            alphabet=alphabet,
            alpha=args.alpha,
            beta=args.beta,
            mu=args.mu,
            sigma=args.sigma,
            max_increment=args.max_increment,
            seed=args.seed,
            embedded=tuple(patterns),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.split_labels and (args.out is None or args.out == "-"):
        raise UsageError("--split-labels needs --out")

    stream, report = generate_with_report(config)
    manifest = _manifest(args, files, seed=args.seed)
    header = manifest.lines() + config.header_lines()
    if args.split_labels:
        out = Path(args.out)
        a, b = split_stream(stream, args.split_labels)
        for part, tag in ((a, "a"), (b, "b")):
            path = out.with_name(f"{out.stem}_{tag}{out.suffix}")
            _emit(dumps_jsonl([part], header + [f"part {tag}"]), str(path))
    else:
        _emit(dumps_jsonl([stream], header), args.out)
    if args.report:
        doc = {
            "manifest": manifest.as_dict(),
            "config": config.header(),
            "started": report.started,
            "completed": report.completed,
            "broken": report.broken,
            "noise_events": report.noise_events,
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.report)
    return EXIT_OK


# count


def cmd_count(args) -> int:
    patterns = _load_patterns(args.patterns)
    streams = _load_all(args.streams)
    s = serialize(streams)
    base_ids = pattern_ids(patterns)
    rows: list[tuple[str, int, str]] = []  # (pattern id, size, key into counts)
    if args.prefixes:
        run_patterns = []
        for p, pid in zip(patterns, base_ids):
            for k in range(1, p.size + 1):
                run_patterns.append(prefix(p, k).unnamed())
                rows.append((pid, k, ""))
        keys = pattern_ids(run_patterns)
        rows = [(pid, k, key) for (pid, k, _), key in zip(rows, keys)]
    else:
        run_patterns = list(patterns)
        rows = [(pid, p.size, pid) for p, pid in zip(patterns, base_ids)]
    result = count_patterns(s, run_patterns, record=bool(args.occurrences))

    manifest = _manifest(args, [args.patterns, *args.streams])
    lines = [_header_text(manifest.lines()), "pattern,size,frequency\n"]
    for pid, size, key in rows:
        lines.append(f"{_csv_field(pid)},{size},{result.counts[key]}\n")
    _emit("".join(lines), args.out)
    if args.occurrences:
        # Occurrences of the full patterns only, under their own ids.
        sizes = dict(zip(base_ids, (p.size for p in patterns)))
        full = {pid: result.occurrences[key] for pid, size, key in rows if size == sizes[pid]}
        _emit(occurrences_csv(full, manifest.lines()), args.occurrences)
    return EXIT_OK


def _csv_field(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


# matrix


def cmd_matrix(args) -> int:
    mode = Mode(args.mode)
    if mode is Mode.CROSS and len(args.streams) != 2:
        raise UsageError(f"cross mode needs exactly two stream files, got {len(args.streams)}")
    formats = [f.lower() for f in args.format]
    for f in formats:
        if f not in ("csv", "svg"):
            raise UsageError(f"unsupported format {f!r} (use csv or svg)")
    if mode is Mode.CROSS:
        # One stream per file; a file's streams are merged under its name.
        groups = []
        for path in args.streams:
            parts = _load_all([path])
            groups.append(EventStream(Path(path).stem, tuple(e for st in parts for e in st.events)))
        streams = groups
    else:
        streams = _load_all(args.streams)
    manifest = _manifest(args, args.streams)
    written = []
    for dt in args.dt:
        m = build_matrix(streams, mode, dt, args.labels, args.labels_y, args.signs)
        for f in formats:
            body = emit_matrix(m, f)
            if f == "csv":
                data = _header_text(manifest.lines() + [f"dt={dt} mode={mode.value}"]).encode() + body
            else:
                comment = "\n".join(manifest.lines()).replace("--", "- -")
                data = f"<!-- {comment} -->\n".encode() + body
            path = f"{args.out}_dt{dt}.{f}"
            _emit(data, path)
            written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


# check


def cmd_check(args) -> int:
    text = _read_text(args.patterns)
    patterns, errors = parse_pattern_lines(text)
    for e in errors:
        print(f"{args.patterns}: {e}", file=sys.stderr)
    if args.dump_dot:
        Path(args.dump_dot).mkdir(parents=True, exist_ok=True)
    for p, pid in zip(patterns, pattern_ids(patterns)):
        a = compile_pattern(p)
        print(f"OK {pid} size={a.size} states={a.n_states}")
        if args.dump_dot:
            name = "".join(c if c.isalnum() or c in "_-" else "_" for c in pid)
            (Path(args.dump_dot) / f"{name}.dot").write_text(a.to_dot())
    return EXIT_DATA if errors else EXIT_OK


# serialize


def cmd_serialize(args) -> int:
    s = serialize(_load_all(args.streams))
    if args.format == "relational":
        _emit(encode_relational(s) + "\n", args.out)
    else:
        manifest = _manifest(args, args.streams)
        _emit(dump_csv(s, manifest.lines()), args.out)
    return EXIT_OK


# oracle (debugging aid)


def cmd_oracle(args) -> int:
    patterns = _load_patterns(args.patterns)
    s = serialize(_load_all(args.streams))
    engine = count_patterns(s, patterns).counts
    print("pattern,engine,oracle,minimal_occurrences")
    for p, pid in zip(patterns, pattern_ids(patterns)):
        r = oracle(s, p, enumerate_cap=None if args.no_cap else 50)
        print(f"{_csv_field(pid)},{engine[pid]},{r.greedy_count},{len(r.all_minimal_occurrences)}")
    return EXIT_OK


# experiment


def cmd_experiment(args) -> int:
    manifest = _manifest(args, seed=args.seed)
    lines = [_header_text(manifest.lines())]
    if args.which == "trend":
        rows = prefix_trend(n=args.n, seed=args.seed, betas=args.betas, alpha=args.alpha, pattern=args.pattern)
        lines.append("beta,size,frequency,completed\n")
        for r in rows:
            for k, freq in enumerate(r.prefix_counts, start=1):
                lines.append(f"{r.beta},{k},{freq},{r.completed}\n")
    else:
        cells = hot_cells(n=args.n, seed=args.seed, beta=args.beta, pairs=args.pairs)
        lines.append("pattern,dt,value,background_mean,background_std,threshold,row_max,hot\n")
        for c in cells:
            lines.append(
                f"{_csv_field(str(c.pattern))},{c.dt},{c.value:.6f},{c.background_mean:.6f},"
                f"{c.background_std:.6f},{c.threshold:.6f},{int(c.row_max)},{int(c.is_hot)}\n"
            )
    _emit("".join(lines), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cooccur", description="Temporal co-occurrence of semi-interval events.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{gen,count,matrix,check,serialize,experiment}")
    sub.required = True

    g = sub.add_parser("gen", help="generate a synthetic event stream")
    g.add_argument("--n", type=int, required=True, help="number of event instances")
    g.add_argument("--alphabet-size", type=int, default=len(DEFAULT_ALPHABET))
    g.add_argument("--alphabet", type=_str_list, help="comma-separated labels (overrides --alphabet-size)")
    g.add_argument("--alpha", type=float, default=1.0, help="probability an instance is complete")
    g.add_argument("--beta", type=float, default=0.5, help="probability an instance is noise")
    g.add_argument("--mu", type=float, default=10.0, help="mean duration")
    g.add_argument("--sigma", type=float, default=None, help="duration std dev (default mu/4)")
    g.add_argument("--max-increment", type=int, default=15)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--embed", action="append", default=[], help="pattern file or pattern text; repeatable")
    g.add_argument("--out", help="output JSONL file (default stdout)")
    g.add_argument("--split-labels", type=_str_list, help="labels written to a second stream file")
    g.add_argument("--report", help="write the embedding report as JSON")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("count", help="count pattern occurrences")
    c.add_argument("streams", nargs="+")
    c.add_argument("--patterns", required=True, help="pattern file")
    c.add_argument("--prefixes", action="store_true", help="one row per prefix size")
    c.add_argument("--out", help="CSV output (default stdout)")
    c.add_argument("--occurrences", help="also write every matched occurrence as CSV")
    c.set_defaults(func=cmd_count)

    m = sub.add_parser("matrix", help="build co-occurrence matrices")
    m.add_argument("streams", nargs="+")
    m.add_argument("--mode", choices=[x.value for x in Mode], default="auto")
    m.add_argument("--dt", type=_int_list, required=True, help="comma-separated offsets")
    m.add_argument("--labels", type=_str_list, help="row labels (and column labels in auto mode)")
    m.add_argument("--labels-y", type=_str_list, help="column labels")
    m.add_argument("--out", required=True, help="output prefix; files are <prefix>_dt<dt>.<format>")
    m.add_argument("--format", type=_str_list, default=["csv", "svg"])
    m.add_argument("--signs", type=_signs, default=(Sign.ANY, Sign.ANY), help="e.g. any,any or +,-")
    m.set_defaults(func=cmd_matrix)

    k = sub.add_parser("check", help="validate a pattern file")
    k.add_argument("patterns")
    k.add_argument("--dump-dot", metavar="DIR", help="write one DOT file per pattern")
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("serialize", help="dump the merged boundary sequence")
    s.add_argument("streams", nargs="+")
    s.add_argument("--format", choices=["csv", "relational"], default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_serialize)

    o = sub.add_parser("oracle")
    o.add_argument("streams", nargs="+")
    o.add_argument("--patterns", required=True)
    o.add_argument("--no-cap", action="store_true")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", help="run a desk-scale synthetic experiment")
    e.add_argument("which", choices=["trend", "hotcells"])
    e.add_argument("--n", type=int, default=100_000)
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--alpha", type=float, default=0.3, help="trend only")
    e.add_argument("--betas", type=lambda t: [float(x) for x in t.split(",")], default=list(NOISE_LEVELS))
    e.add_argument("--pattern", default=SIZE_SIX, help="trend only")
    e.add_argument("--beta", type=float, default=0.8, help="hotcells only")
    e.add_argument("--pairs", action="append", default=None, help="hotcells only; repeatable")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "pairs", "unset") is None:
        args.pairs = list(PAIRS)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cooccur {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, CooccurError) as exc:
        print(f"cooccur {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
