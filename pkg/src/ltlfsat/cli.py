"""Command-line front end.

Exit codes: 10 = satisfiable, 20 = unsatisfiable, 0 = non-verdict success,
1 = usage or input error, 2 = resource abort.
"""

from __future__ import annotations

import argparse
import sys

from . import bench as benchmod
from . import cdlsc
from .errors import ResourceAbort
from .formula import FiniteTrace, ParseError, atoms, parse, to_nnf, to_tnf
from .semantics import brute_force_sat, evaluate
from .transition import bfs_depth, build_full_system, export_dot, naive_check

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ABORT = 2


def _add_formula_args(sub):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("-f", "--file", help="read the formula from FILE")
    group.add_argument("--formula", help="formula given inline")


def _load_formula(args):
    if args.file is not None:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = args.formula
    return parse(text)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ltlfsat",
        description="Satisfiability checking for linear temporal logic over finite traces",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    check = subs.add_parser("check", help="decide satisfiability of a formula")
    _add_formula_args(check)
    check.add_argument("--raw-tnf", action="store_true",
                       help="treat the input as already tail-marked; Tail allowed")
    check.add_argument("--oracle", choices=("cdlsc", "naive", "brute"), default="cdlsc")
    check.add_argument("--max-frames", type=int, default=None)
    check.add_argument("--timeout", type=float, default=None)
    check.add_argument("--brute-bound", type=int, default=8,
                       help="trace-length bound for the brute oracle")
    check.add_argument("--out", help="write the witness trace to FILE")
    check.add_argument("--dump-cnf", help="dump one clause file per solver query into DIR")

    oracle = subs.add_parser("oracle", help="run all engines and compare verdicts")
    _add_formula_args(oracle)
    oracle.add_argument("--raw-tnf", action="store_true")
    oracle.add_argument("--timeout", type=float, default=None)

    verify = subs.add_parser("verify", help="check a trace file against a formula")
    _add_formula_args(verify)
    verify.add_argument("-t", "--trace", required=True, help="trace file to check")
    verify.add_argument("--raw-tnf", action="store_true",
                        help="evaluate the formula as given; Tail allowed")

    gen = subs.add_parser("gen", help="generate a benchmark corpus")
    _add_gen_args(gen)
    gen.add_argument("--out", required=True, help="output directory")

    bench = subs.add_parser("bench", help="run a benchmark suite")
    _add_gen_args(bench)
    bench.add_argument("--oracle", choices=("cdlsc", "naive", "brute"), default="cdlsc")
    bench.add_argument("--cross-check", choices=("cdlsc", "naive", "brute"), default=None,
                       help="also run this engine and flag verdict disagreements")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--timeout", type=float, default=None,
                       help="per-instance timeout in seconds")
    bench.add_argument("--max-frames", type=int, default=None)
    bench.add_argument("--state-limit", type=int, default=1 << 20)
    bench.add_argument("--brute-bound", type=int, default=8)
    bench.add_argument("--out", help="write the report CSV to FILE")

    dump = subs.add_parser("dump-ts", help="write the transition system as a graph")
    _add_formula_args(dump)
    dump.add_argument("--raw-tnf", action="store_true")
    dump.add_argument("--state-limit", type=int, default=1 << 16)
    dump.add_argument("--out", help="write the graph text to FILE (default stdout)")

    return parser


def _add_gen_args(sub):
    sub.add_argument("--family", choices=("random", "pattern", "conjunction"),
                     required=True)
    sub.add_argument("--count", type=int, default=20)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--vars", type=int, default=3)
    sub.add_argument("--length-min", type=int, default=5)
    sub.add_argument("--length-max", type=int, default=12)
    sub.add_argument("--temporal-prob", type=float, default=0.5)
    sub.add_argument("--pattern", choices=benchmod.PATTERN_NAMES, default="response")
    sub.add_argument("--k-min", type=int, default=3)
    sub.add_argument("--k-max", type=int, default=8)
    sub.add_argument("--alphabet-size", type=int, default=6)


def _spec_from_args(args):
    return benchmod.BenchSpec(
        family=args.family,
        count=args.count,
        seed=args.seed,
        vars=args.vars,
        length_min=args.length_min,
        length_max=args.length_max,
        temporal_prob=args.temporal_prob,
        pattern=args.pattern,
        k_min=args.k_min,
        k_max=args.k_max,
        alphabet_size=args.alphabet_size,
    )


def _print_stats(stats):
    print(
        f"stats: states_expanded={stats.states_expanded} sat_calls={stats.sat_calls}"
        f" frames={stats.frames} elapsed={stats.elapsed:.3f}s"
    )


def _emit_witness(witness, out):
    text = witness.to_text()
    print("witness:")
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_check(args):
    original = _load_formula(args)
    if args.oracle == "cdlsc":
        verdict = cdlsc.check(
            original,
            raw_tnf=args.raw_tnf,
            max_frames=args.max_frames,
            timeout=args.timeout,
            dump_dir=args.dump_cnf,
        )
        sat = verdict.sat
        witness = verdict.witness
        print(f"verdict: {'sat' if sat else 'unsat'}")
        if sat:
            _emit_witness(witness, args.out)
        else:
            print(f"invariant_level: {verdict.invariant_level}")
        _print_stats(verdict.stats)
    elif args.oracle == "naive":
        f = original if args.raw_tnf else to_tnf(to_nnf(original))
        result = naive_check(f, timeout=args.timeout)
        sat = result.sat
        print(f"verdict: {'sat' if sat else 'unsat'}")
        if sat:
            witness = result.witness_with_tail if args.raw_tnf else result.witness
            _emit_witness(witness, args.out)
        print(f"stats: states_expanded={result.states_expanded} sat_calls={result.sat_calls}")
    else:
        witness = brute_force_sat(original, args.brute_bound, timeout=args.timeout)
        sat = witness is not None
        print(f"verdict: {'sat' if sat else f'unsat up to length {args.brute_bound}'}")
        if sat:
            _emit_witness(witness, args.out)
    return EXIT_SAT if sat else EXIT_UNSAT


def _cmd_oracle(args):
    original = _load_formula(args)
    verdicts = {}
    verdict = cdlsc.check(original, raw_tnf=args.raw_tnf, timeout=args.timeout)
    verdicts["cdlsc"] = verdict.sat
    f = original if args.raw_tnf else to_tnf(to_nnf(original))
    result = naive_check(f, timeout=args.timeout)
    verdicts["naive"] = result.sat
    if len(atoms(original)) <= 4:
        full = build_full_system(f, exhaustive=True, timeout=args.timeout)
        bound = full.state_count + 1
        # fall back to a shortest-path bound when plain enumeration to the
        # state count would blow the trace budget
        if (1 << len(atoms(original))) ** bound > 1 << 24:
            bound = max(bfs_depth(full) + 2, 8)
        witness = brute_force_sat(original, bound, timeout=args.timeout)
        verdicts["brute"] = witness is not None
    for name, sat in verdicts.items():
        print(f"{name}: {'sat' if sat else 'unsat'}")
    if len(set(verdicts.values())) > 1:
        print("DISAGREEMENT between engines", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_SAT if verdicts["cdlsc"] else EXIT_UNSAT


def _cmd_verify(args):
    original = _load_formula(args)
    with open(args.trace, "r", encoding="utf-8") as fh:
        text = fh.read()
    trace = FiniteTrace.from_text(text)
    alphabet = trace.alphabet | atoms(original)
    trace = FiniteTrace(trace.positions, alphabet)
    if evaluate(trace, original):
        print("trace satisfies the formula")
        return EXIT_OK
    print("trace does NOT satisfy the formula", file=sys.stderr)
    return EXIT_USAGE


def _cmd_gen(args):
    spec = _spec_from_args(args)
    manifest = benchmod.write_corpus(spec, args.out)
    print(f"wrote {len(manifest['formulas'])} formulas to {args.out}")
    return EXIT_OK


def _cmd_bench(args):
    spec = _spec_from_args(args)
    limits = benchmod.Limits(
        timeout=args.timeout,
        max_frames=args.max_frames,
        state_limit=args.state_limit,
        brute_bound=args.brute_bound,
    )
    report = benchmod.run_suite(spec, solver=args.oracle, limits=limits, jobs=args.jobs)
    csv_text = benchmod.render_csv(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    totals = report.totals()
    print(
        f"total: {totals['instances']} instances, {totals['sat']} sat,"
        f" {totals['unsat']} unsat, {totals['aborted']} aborted,"
        f" {totals['elapsed_ms']:.1f} ms"
    )
    unverified = [r.id for r in report.rows if r.verdict == "sat" and not r.verified]
    if unverified:
        print(f"UNVERIFIED witnesses: {unverified}", file=sys.stderr)
        return EXIT_USAGE
    if args.cross_check and args.cross_check != args.oracle:
        other = benchmod.run_suite(spec, solver=args.cross_check, limits=limits,
                                   jobs=args.jobs)
        mismatched = benchmod.compare_reports(report, other)
        if mismatched:
            print(f"DISAGREEMENT on instances: {mismatched}", file=sys.stderr)
            return EXIT_USAGE
        print(f"cross-check against {args.cross_check}: verdicts agree")
    return EXIT_OK


def _cmd_dump_ts(args):
    original = _load_formula(args)
    f = original if args.raw_tnf else to_tnf(to_nnf(original))
    ts = build_full_system(f, state_limit=args.state_limit, exhaustive=True)
    text = export_dot(ts)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {ts.state_count} states to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
    "dump-ts": _cmd_dump_ts,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ResourceAbort as abort:
        print(f"aborted: {abort}", file=sys.stderr)
        return EXIT_ABORT
    except (ParseError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
