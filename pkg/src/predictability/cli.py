"""Command-line interface: ``analyze``, ``predict``, ``simulate``, ``oracle``.

Exit codes: 0 success, 1 bad input or engine mismatch, 2 usage error,
3 no individual passed the length filter (``analyze`` only).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import entropy
from .core import encode_labels
from .ingest import LogFormatError, bin_events, format_event_log, parse_event_log, partner_sequence
from .markov import fit, format_model_dump
from .pipeline import (
    INDIVIDUAL_COLUMNS,
    RunConfig,
    analyze_population,
    individual_row,
    predict_population,
    prediction_columns,
    prediction_row,
)
from .synth import gen_event_log, stay_matrix, transition_matrix

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_EMPTY = 3


class CommandError(Exception):
    pass


def _config(args) -> RunConfig:
    return RunConfig(
        bin_width=args.bin_width,
        gap_cap=args.gap_cap,
        min_sequence_length=args.min_length,
        window=args.window,
        ks=tuple(args.top_k),
        seed=args.seed,
        bridge=not getattr(args, "no_bridge", False),
    )


def _load_stream(path: str, bin_width: int):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            log = parse_event_log(fh, bin_width)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}") from exc
    except LogFormatError as exc:
        raise CommandError(f"{path}: {exc}") from exc
    return bin_events(log)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(files: dict, args, primary: str):
    """Write ``files`` (name -> text) under ``--out``, or print ``primary``."""
    if args.out is None:
        sys.stdout.write(files[primary])
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def _report_files(report, args) -> tuple[dict, str]:
    body = report.as_dict()
    name = report.command
    if args.format == "json":
        return {f"{name}.json": _json_text(body)}, f"{name}.json"
    excluded = _csv_text(("ego", "reason"), [(r["ego"], r["reason"]) for r in body["excluded"]])
    if name == "analyze":
        files = {
            "analyze.csv": _csv_text(INDIVIDUAL_COLUMNS, [individual_row(r) for r in body["individuals"]]),
            "analyze_histograms.csv": _csv_text(
                ("rate", "start", "end", "count"),
                [(rate, b["start"], b["end"], b["count"])
                 for rate, bins in body["histograms"].items() for b in bins],
            ),
            "analyze_excluded.csv": excluded,
        }
        return files, "analyze.csv"
    ks = report.config.ks
    files = {
        "predict.csv": _csv_text(prediction_columns(ks), [prediction_row(r, ks) for r in body["individuals"]]),
        "predict_windows.csv": _csv_text(
            ("ego", "window_index", "events_evaluated") + tuple(f"top{k}_hits" for k in ks),
            [(r["ego"], w["window_index"], w["events_evaluated"], *(w[f"top{k}_hits"] for k in ks))
             for r in body["individuals"] for w in r["windows"]],
        ),
        "predict_excluded.csv": excluded,
    }
    return files, "predict.csv"


def cmd_analyze(args) -> int:
    config = _config(args)
    stream = _load_stream(args.events, config.bin_width)
    report = analyze_population(stream, config, workers=args.workers)
    files, primary = _report_files(report, args)
    _emit(files, args, primary)
    if not report.individuals:
        print("no individual passed the minimum sequence length filter", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_predict(args) -> int:
    config = _config(args)
    stream = _load_stream(args.events, config.bin_width)
    report = predict_population(stream, config, workers=args.workers)
    files, primary = _report_files(report, args)
    if args.dump_models:
        if args.out is None:
            raise CommandError("--dump-models requires --out")
        for ego in stream.egos:
            seq = partner_sequence(stream, ego)
            if seq.n >= 2:
                files[f"models/{ego}.csv"] = format_model_dump(fit(seq))
        (Path(args.out) / "models").mkdir(parents=True, exist_ok=True)
    _emit(files, args, primary)
    return EXIT_OK


def _parse_matrix(spec: str):
    path = Path(spec)
    text = path.read_text() if path.is_file() else spec
    try:
        return transition_matrix(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise CommandError(f"invalid transition matrix: {exc}") from exc


def cmd_simulate(args) -> int:
    if args.matrix is not None:
        P = _parse_matrix(args.matrix)
    else:
        try:
            P = transition_matrix(stay_matrix(args.stay, args.states))
        except ValueError as exc:
            raise CommandError(f"invalid transition matrix: {exc}") from exc
    location_P = None
    if args.location_stay is not None:
        location_P = stay_matrix(args.location_stay, args.location_states)
    if args.population < 0 or args.bins < 0:
        raise CommandError("population and bins must be non-negative")
    log = gen_event_log(
        args.population, P, span=args.bins * args.bin_width, bin_width=args.bin_width,
        seed=args.seed, location_P=location_P,
    )
    text = format_event_log(log)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def oracle_table(seq, fast=entropy.match_lengths, naive=entropy.match_lengths_naive) -> list[tuple]:
    """Rows ``(i, fast, naive, status)`` comparing two match-length engines."""
    a, b = fast(seq).tolist(), naive(seq).tolist()
    return [(i, x, y, "ok" if x == y else "MISMATCH") for i, (x, y) in enumerate(zip(a, b), start=1)]


def cmd_oracle(args) -> int:
    try:
        tokens = Path(args.sequence).read_text(encoding="utf-8").split()
    except OSError as exc:
        raise CommandError(f"cannot read {args.sequence}: {exc}") from exc
    if not tokens:
        raise CommandError(f"{args.sequence} contains no symbols")
    seq = encode_labels(tokens)[1]
    rows = oracle_table(seq)
    sys.stdout.write(_csv_text(("i", "fast", "naive", "status"), rows))
    if any(r[3] != "ok" for r in rows):
        print("match-length engines disagree", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _shared(parser):
    parser.add_argument("--bin-width", type=int, default=300, help="seconds per time bin (default 300)")
    parser.add_argument("--gap-cap", type=int, default=288, help="cap on inter-event gaps, in bins (default 288)")
    parser.add_argument("--min-length", type=int, default=50, help="minimum partner sequence length (default 50)")
    parser.add_argument("--window", type=int, default=604800, help="evaluation window in seconds (default one week)")
    parser.add_argument("--top-k", type=int, nargs="+", default=[1, 5], help="k values for top-k accuracy")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1, help="worker processes for per-individual work")
    parser.add_argument("--out", help="output directory (files) or file (simulate); default stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="predictability", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="entropy rates per individual and population summaries")
    p.add_argument("events", help="event CSV (time,ego,alter,location)")
    _shared(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("predict", help="rolling top-k Markov prediction per individual")
    p.add_argument("events")
    _shared(p)
    p.add_argument("--no-bridge", action="store_true", help="do not count transitions across window boundaries")
    p.add_argument("--dump-models", action="store_true", help="write each ego's fitted chain as an edge list")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="write a synthetic event log")
    _shared(p)
    p.add_argument("--population", type=int, default=1)
    p.add_argument("--bins", type=int, default=20 * 2016, help="bins per individual")
    p.add_argument("--stay", type=float, default=0.9, help="stay probability of the default chain")
    p.add_argument("--states", type=int, default=2, help="states of the default chain")
    p.add_argument("--matrix", help="JSON transition matrix, inline or a file path")
    p.add_argument("--location-stay", type=float, help="also emit locations from a stay chain")
    p.add_argument("--location-states", type=int, default=3)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="compare fast and naive match lengths on a symbol file")
    p.add_argument("sequence", help="file of whitespace-separated symbols")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
