"""Command-line entry point: `deob <file>` and `deob corpus <dir>`."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import metrics as M
from .codegen import print_script
from .driver import DEFAULT_ORDER, PASSES, PipelineConfig, deobfuscate
from .frontend import ParseError, load
from .nodes import RecursionLimitError
from .passes.rename import ANIMALS, ConfigError, load_dictionary

EXIT_OK, EXIT_SYSTEM, EXIT_PARSE, EXIT_ITERATION_LIMIT = 0, 1, 2, 3


def _passes(text: str):
    names = tuple(p.strip() for p in text.split(",") if p.strip())
    unknown = [p for p in names if p not in PASSES]
    if not names or unknown:
        raise argparse.ArgumentTypeError(
            f"expected a comma-separated subset of {','.join(DEFAULT_ORDER)}")
    return names


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _common(p: argparse.ArgumentParser):
    p.add_argument("--rename", action="store_true", help="rename bindings to dictionary words")
    p.add_argument("--dictionary", type=Path, help="rename dictionary: one identifier per line")
    p.add_argument("--passes", type=_passes, default=DEFAULT_ORDER,
                   help=f"passes to run, in order (default {','.join(DEFAULT_ORDER)})")
    p.add_argument("--max-iter", type=_positive, default=None,
                   help="iteration budget (default $DEOB_MAX_ITER or 50)")


def build_parser(prog="deob", corpus=False) -> argparse.ArgumentParser:
    if corpus:
        p = argparse.ArgumentParser(prog=f"{prog} corpus",
                                    description="Deobfuscate and measure a directory of .js files.")
        p.add_argument("dir", type=Path)
        p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
        p.add_argument("--report-file", type=Path, help="write the JSON report here")
        p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    else:
        p = argparse.ArgumentParser(
            prog=prog, description="Statically deobfuscate a JavaScript file.",
            epilog=f"Use '{prog} corpus <dir>' for batch runs.")
        p.add_argument("file", type=Path)
        p.add_argument("-o", "--output", type=Path, help="output file (default stdout)")
        p.add_argument("--report", choices=["json"], help="emit a run report to stderr")
        p.add_argument("--report-file", type=Path, help="write the report here instead")
    _common(p)
    return p


def _config(args) -> PipelineConfig:
    max_iter = args.max_iter
    if max_iter is None:
        env = os.environ.get("DEOB_MAX_ITER")
        max_iter = _positive(env) if env else 50
    words = load_dictionary(args.dictionary) if args.dictionary else ANIMALS
    return PipelineConfig(enabled_passes=args.passes, rename=args.rename,
                          max_iterations=max_iter, dictionary=words)


def run_file(args) -> int:
    cfg = _config(args)
    try:
        data = args.file.read_bytes()
    except OSError as err:
        print(f"deob: {args.file}: {err.strerror}", file=sys.stderr)
        return EXIT_SYSTEM
    try:
        script = load(data, str(args.file))
    except ParseError as err:
        for d in err.diagnostics:
            print(f"{args.file}:{d.line}:{d.column}: {d.severity}: {d.message}", file=sys.stderr)
        return EXIT_PARSE
    try:
        out, report = deobfuscate(script, cfg)
    except RecursionLimitError as err:
        print(f"deob: {args.file}: {err}", file=sys.stderr)
        return EXIT_SYSTEM
    text = print_script(out)
    if args.output:
        args.output.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if args.report or args.report_file:
        payload = {"file": str(args.file), **report.to_json(),
                   "before": M.measure(script).to_json(), "after": M.measure(out).to_json()}
        blob = json.dumps(payload, indent=2)
        if args.report_file:
            args.report_file.write_text(blob + "\n", encoding="utf-8")
        else:
            print(blob, file=sys.stderr)
    if not report.reached_fixed_point:
        print(f"deob: {args.file}: no fixed point after {report.iterations} iterations",
              file=sys.stderr)
        return EXIT_ITERATION_LIMIT
    return EXIT_OK


def run_corpus_cmd(args) -> int:
    from .corpus import run_corpus
    if not args.dir.is_dir():
        print(f"deob: {args.dir}: not a directory", file=sys.stderr)
        return EXIT_SYSTEM
    report = run_corpus(args.dir, _config(args), jobs=args.jobs)
    data = report.to_json()
    if args.report_file:
        args.report_file.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(report.table())
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    corpus = bool(argv) and argv[0] == "corpus" and not Path("corpus").is_file()
    parser = build_parser(corpus=corpus)
    args = parser.parse_args(argv[1:] if corpus else argv)
    try:
        return run_corpus_cmd(args) if corpus else run_file(args)
    except ConfigError as err:
        print(f"deob: {err}", file=sys.stderr)
        return EXIT_SYSTEM


if __name__ == "__main__":
    sys.exit(main())
