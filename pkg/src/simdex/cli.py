"""Command-line entry point: ``simdex compare`` and ``simdex fixtures``."""

from __future__ import annotations

import argparse
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .config import CONFIG_ENV, build_config, env_config
from .docmodel import DocumentParseError, load_document
from .index import compare
from .render import RenderFormat, render_many

EXIT_OK, EXIT_ERROR, EXIT_THRESHOLD = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 too; keep the message format ours
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"simdex: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simdex", description="Similarity index for documents with formulas.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cmp_ = sub.add_parser("compare", help="compare two documents")
    cmp_.add_argument("a", help="document A (the one whose content is denominated)")
    cmp_.add_argument("b", help="document B (the reference)")
    cmp_.add_argument("--variant", type=int, choices=(1, 2, 3), default=None)
    cmp_.add_argument("--mode", choices=("strict", "alpha"), default=None)
    cmp_.add_argument("--min-run", type=int, default=None, metavar="N")
    cmp_.add_argument("--weight-ratio", type=float, default=None, metavar="R")
    cmp_.add_argument("--stop-terms", metavar="FILE")
    cmp_.add_argument("--exclude-zones", metavar="FILE")
    cmp_.add_argument("--normalization", metavar="FILE", help="extra 'pattern => replacement' rules")
    cmp_.add_argument("--format", choices=[f.value for f in RenderFormat], default=None)
    cmp_.add_argument("--json", action="store_true", help="shorthand for --format json")
    cmp_.add_argument("--direction", choices=("a-b", "b-a", "both"), default=None)
    cmp_.add_argument("--threshold", type=float, default=None, metavar="PCT",
                      help="exit 3 when any reported index exceeds PCT")
    cmp_.add_argument("--out", metavar="PATH")

    fix = sub.add_parser("fixtures", help="run the built-in fixture corpus")
    fix.add_argument("--filter", metavar="SUBSTR")
    fix.add_argument("-v", "--verbose", action="store_true")
    return parser


def _setting(args, settings: dict, name: str, default=None, cast=str):
    value = getattr(args, name)
    if value is not None:
        return value
    if name in settings:
        return cast(settings[name])
    return default


def cmd_compare(args) -> int:
    try:
        settings = env_config()
    except (OSError, ValueError) as exc:
        print(f"simdex: cannot read {CONFIG_ENV}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        variant = _setting(args, settings, "variant", 3, int)
        direction = _setting(args, settings, "direction", "both")
        threshold = _setting(args, settings, "threshold", None, float)
        fmt = "json" if args.json else _setting(args, settings, "format", "json")
        if args.json and args.format not in (None, "json"):
            raise ValueError("--json conflicts with --format " + args.format)
        if variant not in (1, 2, 3) or direction not in ("a-b", "b-a", "both"):
            raise ValueError("bad variant or direction in configuration")
        RenderFormat(fmt)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            config = build_config(
                min_run=_setting(args, settings, "min_run", None, int),
                weight_ratio=_setting(args, settings, "weight_ratio", None, float),
                mode=_setting(args, settings, "mode"),
                stop_terms=_setting(args, settings, "stop_terms"),
                exclude_zones=_setting(args, settings, "exclude_zones"),
                normalization=_setting(args, settings, "normalization"))
        for w in caught:
            print(f"simdex: warning: {w.message}", file=sys.stderr)
    except (OSError, ValueError) as exc:
        print(f"simdex: {exc}", file=sys.stderr)
        return EXIT_ERROR

    try:
        docs = {}
        for key, path in (("a", args.a), ("b", args.b)):
            text = Path(path).read_text(encoding="utf-8")
            docs[key] = load_document(text, config, doc_id=path)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"simdex: cannot read input: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except DocumentParseError as exc:
        print(f"simdex: {path}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    pairs = {"a-b": [("a", "b")], "b-a": [("b", "a")],
             "both": [("a", "b"), ("b", "a")]}[direction]
    with ThreadPoolExecutor(max_workers=len(pairs)) as pool:
        futures = [pool.submit(compare, docs[x], docs[y], variant, config) for x, y in pairs]
        reports = [f.result() for f in futures]

    payload = render_many(reports, fmt)
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    if threshold is not None and any(r.index > threshold for r in reports):
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_fixtures(args) -> int:
    from .fixtures import build_cases, select
    cases = select(build_cases(), args.filter)
    if not cases:
        print(f"no cases matched filter {args.filter!r}")
        return EXIT_OK
    failed = 0
    for case in cases:
        ok, observed = case.evaluate()
        failed += not ok
        line = f"{'PASS' if ok else 'FAIL'}  {case.id:<32} [{case.provenance}] " \
               f"expected={case.expected!r} observed={observed!r}"
        if case.note and (args.verbose or not ok):
            line += f"  ({case.note})"
        print(line)
    print(f"{len(cases) - failed}/{len(cases)} cases passed")
    return EXIT_OK if failed == 0 else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compare":
        return cmd_compare(args)
    return cmd_fixtures(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
