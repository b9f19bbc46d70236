"""Command line interface: ``learnmotifs {discover,synth,compare,gradcheck}``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 gradient check
failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import gradcheck
from .errors import ConfigError, DataError, MotifError
from .harness import RunSpec, compare_table, generate_synthetic, run
from .series_io import _atomic_write, write_series

log = logging.getLogger("learnmotifs")

EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_GRADCHECK = 3


def _add_discover(sub):
    p = sub.add_parser("discover", help="learn motifs and/or run the brute-force baseline")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["plain", "csv"], default="plain")
    p.add_argument("--column", type=int)
    p.add_argument("--delimiter")
    p.add_argument("--length", type=int, required=True, help="motif length L")
    p.add_argument("--stride", type=int, help="window step (default L // 2)")
    p.add_argument("--motifs", type=int, required=True, help="number of motifs K")
    thr = p.add_mutually_exclusive_group(required=True)
    thr.add_argument("--threshold", type=float, help="explicit squared-distance threshold T")
    thr.add_argument("--percentile", type=float,
                     help="T as this percentile (in percent) of pairwise squared distances")
    p.add_argument("--sample-budget", type=int, default=2_000_000)
    p.add_argument("--alpha", type=float, action="append",
                   help="smoothness value; repeat for a grid (default 1 2 3)")
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", action="append", choices=["learn", "brute"],
                   help="repeatable; default both")
    p.add_argument("--trace", action="store_true", help="record per-iteration objective traces")
    p.add_argument("--output", required=True)
    p.add_argument("--output-format", choices=["json", "csv"], default="json")
    p.add_argument("--workers", type=int, default=1, help="processes for restarts")
    p.add_argument("--record-timing", action="store_true",
                   help="include wall-clock seconds (reports are then not reproducible)")


def _add_synth(sub):
    p = sub.add_parser("synth", help="write a random walk with implanted patterns")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--pattern-length", type=int, required=True)
    p.add_argument("--occurrences", type=int, required=True)
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--offsets-output", help="also write the implant offsets, one per line")


def _add_compare(sub):
    p = sub.add_parser("compare", help="tabulate LM vs BFM totals from JSON reports")
    p.add_argument("reports", nargs="*")
    p.add_argument("--output", help="CSV file (default stdout)")


def _add_gradcheck(sub):
    p = sub.add_parser("gradcheck", help="finite-difference check of the analytic gradients")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="learnmotifs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_discover(sub)
    _add_synth(sub)
    _add_compare(sub)
    _add_gradcheck(sub)
    return parser


def _discover(args):
    spec = RunSpec(
        input=args.input,
        format=args.format,
        column=args.column,
        delimiter=args.delimiter,
        length=args.length,
        stride=args.stride,
        motifs=args.motifs,
        threshold=args.threshold,
        percentile=args.percentile,
        sample_budget=args.sample_budget,
        alphas=tuple(args.alpha) if args.alpha else (1.0, 2.0, 3.0),
        eta=args.eta,
        iters=args.iters,
        restarts=args.restarts,
        seed=args.seed,
        methods=tuple(args.method) if args.method else ("brute", "learn"),
        trace=args.trace,
        output=args.output,
        output_format=args.output_format,
        record_timing=args.record_timing,
    )
    report = run(spec, workers=args.workers)
    for m in report.methods:
        log.info("%s: total frequency %d %s", m.name, m.total_frequency, m.flags or "")
    return 0


def _synth(args):
    series = generate_synthetic(
        args.length, args.pattern_length, args.occurrences, args.noise_sd, args.seed,
        amplitude=args.amplitude,
    )
    write_series(series, args.output)
    if args.offsets_output:
        _atomic_write(args.offsets_output, "".join(f"{o}\n" for o in series.metadata["offsets"]))
    return 0


def _compare(args):
    missing = [r for r in args.reports if not Path(r).is_file()]
    if missing:
        raise FileNotFoundError(f"no such report: {missing[0]}")
    table = compare_table(args.reports)
    if args.output:
        _atomic_write(args.output, table)
    else:
        sys.stdout.write(table)
    return 0


def _gradcheck(args):
    results = gradcheck.run_suite(args.instances, args.seed)
    failed = [r for r in results if not r.passed]
    for name in ("frequency", "violation", "objective"):
        rs = [r for r in results if r.name == name]
        if not rs:
            continue
        print(f"{name:10s} max rel err {max(r.max_rel for r in rs):.3e}  "
              f"max abs err (small) {max(r.max_abs_small for r in rs):.3e}")
    if failed:
        print(f"FAIL: {len(failed)} of {len(results)} checks", file=sys.stderr)
        return EXIT_GRADCHECK
    print(f"OK: {len(results)} checks")
    return 0


COMMANDS = {"discover": _discover, "synth": _synth, "compare": _compare, "gradcheck": _gradcheck}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; report them as configuration errors
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, DataError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MotifError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
