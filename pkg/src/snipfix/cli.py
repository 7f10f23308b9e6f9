"""Command-line interface: ``snipfix check|fix|report|diff``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .corpus import (
    build_report,
    diff_report,
    load_inputs,
    load_report,
    read_results,
    run_corpus,
    safe_filename,
    write_results,
)
from .pipeline import REPAIR_STAGES, STAGES, PipelineConfig
from .source import UsageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ALL_FAILED = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _stages(value: str) -> frozenset[str]:
    names = frozenset(s.strip() for s in value.split(",") if s.strip())
    unknown = names - set(REPAIR_STAGES)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown stage(s) {', '.join(sorted(unknown))}; choose from {', '.join(REPAIR_STAGES)}"
        )
    return names


def _positive_float(value: str) -> float:
    number = float(value)
    if number <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return number


def _positive_int(value: str) -> int:
    number = int(value)
    if number <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snipfix", description="Detect and repair errors in Node.js code snippets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def corpus_options(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help=".js file or directory, .jsonl file, or markdown with --extract")
        p.add_argument("--extract", action="store_true", help="read fenced JavaScript blocks from markdown files")
        p.add_argument("--timeout-secs", type=_positive_float, default=60.0, help="per-snippet time limit")
        p.add_argument("--max-compiles", type=_positive_int, default=500, help="line-deletion compile budget")
        p.add_argument("--parallel", type=_positive_int, default=1, metavar="N", help="concurrent workers")
        p.add_argument("--in-process", action="store_true", help="run without worker processes")
        p.add_argument("--json", action="store_true", help="print the report as JSON")
        p.add_argument("--out-dir", type=Path, help="write results.jsonl, report.json (and fixed files)")
        p.add_argument("--top", type=_positive_int, default=10, help="histogram rows per stage")

    check_p = sub.add_parser("check", help="report diagnostics without changing anything")
    corpus_options(check_p)
    fix_p = sub.add_parser("fix", help="run the repair pipeline")
    corpus_options(fix_p)
    fix_p.add_argument("--stages", type=_stages, default=frozenset(REPAIR_STAGES),
                       help="comma-separated repair stages to enable (default: all)")

    report_p = sub.add_parser("report", help="aggregate a results.jsonl file")
    report_p.add_argument("results", type=Path)
    report_p.add_argument("--json", action="store_true")
    report_p.add_argument("--top", type=_positive_int, default=10)

    diff_p = sub.add_parser("diff", help="compare two report.json files")
    diff_p.add_argument("before", type=Path)
    diff_p.add_argument("after", type=Path)
    diff_p.add_argument("--before-stage", choices=STAGES, default="deletion")
    diff_p.add_argument("--after-stage", choices=STAGES, default="deletion")
    diff_p.add_argument("--json", action="store_true")
    return parser


def _run_corpus_command(args) -> int:
    stages = frozenset() if args.command == "check" else args.stages
    config = PipelineConfig(timeout_secs=args.timeout_secs, max_compiles=args.max_compiles, stages=stages)
    records, failures = load_inputs(args.input, extract=args.extract)
    if failures and not records:
        for failure in failures:
            print(f"snipfix: {failure.source}: {failure.reason}", file=sys.stderr)
        return EXIT_ALL_FAILED
    report, results = run_corpus(
        records, config, args.parallel, isolate=not args.in_process, failures=failures,
        progress=lambda r: logging.getLogger("snipfix").info("%s: %d -> %d", r.snippet_id,
                                                             len(r.snapshots[0].diagnostics),
                                                             len(r.final_diagnostics)),
    )
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        write_results(results, args.out_dir / "results.jsonl")
        (args.out_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    if args.command == "fix":
        _write_fixed(results, args.out_dir)
    if args.command == "check" and not args.json:
        for result in results:
            for diag in result.snapshots[0].diagnostics:
                print(f"{result.snippet_id}:{diag.line}: TS{diag.code} {diag.message}")
        if results:
            print()
    print(report.to_json() if args.json else report.render(args.top))
    return EXIT_OK


def _write_fixed(results, out_dir: Optional[Path]) -> None:
    for result in results:
        if not result.changed:
            continue
        if out_dir is not None:
            (out_dir / safe_filename(result.snippet_id)).write_text(result.final_text, encoding="utf-8")
        elif result.origin.kind == "file" and result.origin.detail:
            source = Path(result.origin.detail)
            source.with_name(source.stem + ".fixed.js").write_text(result.final_text, encoding="utf-8")
        else:
            print(f"// ---- {result.snippet_id}")
            print(result.final_text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.command in ("check", "fix"):
            return _run_corpus_command(args)
        if args.command == "report":
            report = build_report(read_results(args.results))
            print(report.to_json() if args.json else report.render(args.top))
            return EXIT_OK
        delta = diff_report(load_report(args.before), load_report(args.after), args.before_stage, args.after_stage)
        print(json.dumps(delta.to_dict(), indent=2, sort_keys=True) if args.json else delta.render())
        return EXIT_OK
    except (UsageError, ValueError, OSError) as exc:
        print(f"snipfix: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
