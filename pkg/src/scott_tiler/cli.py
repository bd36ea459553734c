"""Command-line entry point: ``scott-tiler analyze|order|witness|grid``."""

from __future__ import annotations

import argparse
import json
import sys

from .arrangement import ArrangementError, NoCompleteTiles, scan_threads
from .coloring import GrowthError, NonConvexUnfixable
from .report import (
    ACCEPTANCE_FAMILIES,
    AnalysisOptions,
    algebra_checks,
    error_object,
    run_analysis,
    signature_grid,
    write_atomic,
)
from .tiling import TilingError
from .trigroup import (
    INFINITE,
    BallTooLarge,
    ConsistencyFailure,
    InvalidIndex,
    NonHyperbolicSignature,
    NoWitnessFound,
    UncoveredSignature,
    WordSyntaxError,
    build_generators,
    classify_signature,
    element_order,
    evaluate_word,
    lemma25_search,
    word,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_FATAL = 0, 1, 2, 3

USAGE_ERRORS = (InvalidIndex, NonHyperbolicSignature, UncoveredSignature, WordSyntaxError, ValueError)
FATAL_ERRORS = (ConsistencyFailure, NonConvexUnfixable, GrowthError, ArrangementError, TilingError, BallTooLarge)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _seed(text: str):
    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'auto' or a tile index") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scott-tiler", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def signature(p):
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--r", type=int, required=True)

    a = sub.add_parser("analyze", help="run every check on one signature")
    signature(a)
    defaults = AnalysisOptions()
    a.add_argument("--radius", type=float, default=defaults.radius)
    a.add_argument("--max-wordlen", type=int, default=defaults.max_wordlen)
    a.add_argument("--method", choices=("orbit", "wordlength"), default=defaults.method)
    a.add_argument("--growth", choices=("symmetric", "disk"), default=defaults.growth)
    a.add_argument("--growth-steps", type=int, default=defaults.growth_steps)
    a.add_argument("--json", metavar="PATH")
    a.add_argument("--svg", metavar="PATH")
    a.add_argument("--tol-point", type=float, default=defaults.tol_point)
    a.add_argument("--tol-matrix", type=float, default=defaults.tol_matrix)
    a.add_argument("--seed-tile", type=_seed, default="auto")

    o = sub.add_parser("order", help="order of a word (or INFINITE) and its trace")
    signature(o)
    o.add_argument("--word", required=True)

    w = sub.add_parser("witness", help="search for an infinite-order witness from two finite-order words")
    signature(w)
    w.add_argument("--a", required=True)
    w.add_argument("--b", required=True)

    g = sub.add_parser("grid", help="algebra checks on every signature, full analysis on the standard families")
    g.add_argument("--max-index", type=int, default=9)
    g.add_argument("--json", metavar="PATH")
    g.add_argument("--skip-analyze", action="store_true")
    return parser


def _fail(exc: BaseException, code: int, as_json: str | None) -> int:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    if as_json:
        write_atomic(as_json, json.dumps(error_object(exc, code), indent=2, sort_keys=True))
    return code


def _analyze(args) -> int:
    opts = AnalysisOptions(
        radius=args.radius,
        max_wordlen=args.max_wordlen,
        tol_point=args.tol_point,
        tol_matrix=args.tol_matrix,
        seed_tile=args.seed_tile,
        method=args.method,
        growth=args.growth,
        growth_steps=args.growth_steps,
    )
    result = run_analysis(args.p, args.q, args.r, opts)
    report = result.report
    if args.json:
        write_atomic(args.json, report.to_json())
    if args.svg:
        from .render import render_svg

        colors = result.coloring.colors
        if result.tiling is not result.arrangement:
            colors = result.tiling.transfer(colors, result.arrangement.family.angles)
        render_svg(result.arrangement, colors, path=args.svg)
    failed = [k for k, v in report.checks.items() if not v]
    sig = report.signature
    print(
        f"Δ({sig['p']},{sig['q']},{sig['r']}) {sig['case_label']}: {report.family['num_lines']} lines, "
        f"census {report.census['observed']}, colors {report.coloring['colors_used']}/{report.coloring['bound']}, "
        f"generations {report.growth['generations']}"
    )
    for note in report.warnings:
        print(f"warning: {note}", file=sys.stderr)
    if failed:
        print("failed: " + ", ".join(failed))
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def _order(args) -> int:
    G = build_generators(classify_signature(args.p, args.q, args.r))
    g = evaluate_word(G, word(args.word))
    order = element_order(G, g)
    print(order if order == INFINITE else int(order))
    print(f"trace {g.trace:.12g}")
    return EXIT_OK


def _witness(args) -> int:
    G = build_generators(classify_signature(args.p, args.q, args.r))
    try:
        w = lemma25_search(G, word(args.a), word(args.b))
    except NoWitnessFound as exc:
        print(f"NoWitnessFound: {exc}")
        return EXIT_CHECK_FAILED
    print(w)
    print(f"trace {evaluate_word(G, w).trace:.12g}")
    return EXIT_OK


def _grid(args) -> int:
    rows = [algebra_checks(*s) for s in signature_grid(args.max_index)]
    algebra_ok = all(r["infinite_order"] and r["relations_ok"] and r["oracle_ok"] for r in rows)
    print(f"algebra grid: {len(rows)} signatures, {'all pass' if algebra_ok else 'FAILURES'}")
    analyses = []
    if not args.skip_analyze:
        for sig in ACCEPTANCE_FAMILIES:
            rep = run_analysis(*sig).report
            analyses.append(rep.to_dict())
            print(f"Δ{sig}: {'pass' if rep.ok else 'FAIL ' + str([k for k, v in rep.checks.items() if not v])}")
    ok = algebra_ok and all(
        all(a["checks"].values()) and not any(w.startswith("NotStabilized") for w in a["warnings"]) for a in analyses
    )
    if args.json:
        write_atomic(args.json, json.dumps({"schema_version": 1, "algebra": rows, "analyses": analyses, "ok": ok}, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {"analyze": _analyze, "order": _order, "witness": _witness, "grid": _grid}


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    as_json = getattr(args, "json", None)
    try:
        scan_threads()
        return COMMANDS[args.command](args)
    except NoCompleteTiles as exc:
        return _fail(exc, EXIT_CHECK_FAILED, as_json)
    except FATAL_ERRORS as exc:
        return _fail(exc, EXIT_FATAL, as_json)
    except USAGE_ERRORS as exc:
        return _fail(exc, EXIT_USAGE, as_json)


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
