"""Command-line front end.

Subcommands::

    check            evaluate one formula against a trace file
    bench            run the benchmark sweep, CSV on stdout
    compress-report  ground-bitmap compression ratios, CSV on stdout
    gen              write a generated random trace to a file

``check`` exits 0 when the property is satisfied at position 0, 1 when it is
violated, and 2 on usage or parse errors.  The LTLBIT_SEED environment
variable supplies the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import List, Optional

from .bench import (BenchConfig, DEFAULT_SEED, compression_report,
                    generator_id, run_bench, write_csv)
from .corpus import corpus
from .evaluator import evaluate
from .formulas import FormulaSyntaxError, depth, parse, render, size
from .oracle import UnboundAtomError
from .traces import (TraceFormatError, TraceGenSpec, build_ground_bitmaps,
                     generate_random_trace, load_trace, slice_trace,
                     write_trace)

EXIT_SATISFIED = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2

BACKEND_CHOICES = ("raw", "rle64", "roaring")


def _default_seed() -> int:
    raw = os.environ.get("LTLBIT_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(
            f"ltlbit: LTLBIT_SEED must be an integer, got {raw!r}"
        )


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints: {text!r}")


def _str_list(text: str) -> List[str]:
    return [part for part in text.split(",") if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlbit",
        description="Offline LTL evaluation over bitmap backends.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="evaluate a formula against a trace")
    check.add_argument("--trace", required=True, help="trace file path")
    check.add_argument("--format", choices=("csv", "bitlines"), default="csv")
    group = check.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula", help="formula text")
    group.add_argument("--formula-id", help="built-in corpus id (e.g. D08)")
    check.add_argument("--backend", choices=BACKEND_CHOICES, default="raw")
    check.add_argument("--positions", action="store_true",
                       help="print the per-position satisfaction bitmap")
    check.add_argument("--slice-key", default=None,
                       help="slice by this key column / variable prefix and "
                            "require the formula on every slice")
    check.add_argument("--include-ingest", action="store_true",
                       help="time ground-bitmap construction as well")

    bench = sub.add_parser("bench", help="benchmark sweep, CSV on stdout")
    bench.add_argument("--length", type=_int_list, default=[1_000_000],
                       help="comma-separated trace lengths")
    bench.add_argument("--backend", type=_str_list, default=["raw"],
                       help="comma-separated backends (raw,rle64,roaring)")
    bench.add_argument("--formula-id", type=_str_list, default=None,
                       help="comma-separated corpus ids (default: all 57)")
    bench.add_argument("--formula", default=None,
                       help="ad-hoc formula text benchmarked as id 'USER'")
    bench.add_argument("--vars", type=int, default=10)
    bench.add_argument("--repeat", type=int, default=1,
                       help="emit each random tuple this many times")
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--reps", type=int, default=5,
                       help="timed repetitions per cell after one warm-up")
    bench.add_argument("--include-ingest", action="store_true")
    bench.add_argument("--jobs", type=int, default=1,
                       help="worker threads over independent cells")

    report = sub.add_parser("compress-report",
                            help="compression ratios, CSV on stdout")
    report.add_argument("--length", type=_int_list, default=[1_000_000])
    report.add_argument("--repeat", type=_int_list, default=[1, 32, 64])
    report.add_argument("--backend", type=_str_list,
                        default=["raw", "rle64", "roaring"])
    report.add_argument("--vars", type=int, default=10)
    report.add_argument("--seed", type=int, default=None)

    gen = sub.add_parser("gen", help="write a generated trace to a file")
    gen.add_argument("--length", type=int, required=True)
    gen.add_argument("--vars", type=int, default=10)
    gen.add_argument("--repeat", type=int, default=1)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True)
    gen.add_argument("--format", choices=("csv", "bitlines"), default="csv")
    return parser


def cmd_check(args) -> int:
    try:
        formula = (parse(args.formula) if args.formula is not None
                   else corpus().get(args.formula_id).formula)
    except FormulaSyntaxError as exc:
        print(f"ltlbit: formula parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"ltlbit: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    try:
        trace = _load_for_check(args)
    except (TraceFormatError, OSError, KeyError) as exc:
        print(f"ltlbit: cannot load trace: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.slice_key is not None:
            parts = slice_trace(trace, args.slice_key)
            overall = True
            start = time.perf_counter()
            lines = []
            for label in sorted(parts, key=str):
                sub = parts[label]
                env = build_ground_bitmaps(sub, args.backend)
                sub_verdict = evaluate(formula, env).verdict
                overall = overall and sub_verdict
                lines.append(f"slice {label}: "
                             f"{'true' if sub_verdict else 'false'} "
                             f"({len(sub)} events)")
            elapsed = time.perf_counter() - start
            result_bitmap = None
            verdict = overall
        else:
            start = time.perf_counter()
            env = build_ground_bitmaps(trace, args.backend)
            build_done = time.perf_counter()
            result = evaluate(formula, env)
            elapsed = time.perf_counter() - (
                start if args.include_ingest else build_done
            )
            lines = []
            result_bitmap = result.bitmap
            verdict = result.verdict
    except UnboundAtomError as exc:
        print(f"ltlbit: {exc}", file=sys.stderr)
        return EXIT_USAGE

    print(f"verdict: {'true' if verdict else 'false'}")
    print(f"formula: {render(formula)} (size {size(formula)}, "
          f"depth {depth(formula)})")
    print(f"events: {len(trace)}, backend: {args.backend}, "
          f"eval-ms: {elapsed * 1e3:.3f}")
    for line in lines:
        print(line)
    if args.positions and result_bitmap is not None:
        print(f"positions: {result_bitmap.to01()}")
    return EXIT_SATISFIED if verdict else EXIT_VIOLATED


def _load_for_check(args):
    if args.slice_key is not None and args.format == "csv":
        try:
            return load_trace(args.trace, args.format,
                              key_column=args.slice_key)
        except TraceFormatError as exc:
            if "not in header" not in str(exc):
                raise
    return load_trace(args.trace, args.format)


def cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    extra = {}
    formula_ids = args.formula_id
    if args.formula is not None:
        try:
            extra["USER"] = parse(args.formula)
        except FormulaSyntaxError as exc:
            print(f"ltlbit: formula parse error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        formula_ids = (formula_ids or []) + ["USER"]
    config = BenchConfig(
        lengths=args.length, backends=args.backend, formula_ids=formula_ids,
        num_vars=args.vars, repeat=args.repeat, seed=seed, reps=args.reps,
        include_ingest=args.include_ingest, jobs=args.jobs,
        extra_formulas=extra,
    )
    print(f"# generator: {generator_id()}, seed: {seed}", file=sys.stderr)
    write_csv(run_bench(config), sys.stdout)
    return 0


def cmd_compress_report(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rows = compression_report(args.length, args.repeat, args.backend,
                              seed=seed, num_vars=args.vars)
    write_csv(rows, sys.stdout)
    return 0


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        spec = TraceGenSpec(length=args.length, num_vars=args.vars,
                            repeat=args.repeat, seed=seed)
    except ValueError as exc:
        print(f"ltlbit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_trace(generate_random_trace(spec), args.out, args.format)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "check": cmd_check,
        "bench": cmd_bench,
        "compress-report": cmd_compress_report,
        "gen": cmd_gen,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
