"""Command-line interface: ``jsdeob {deob,detect,annotate,obfuscate,corpus}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .detect.detector import Backend, DetectionFailed, detect
from .detect.llm import LlmClientConfig
from .fixtures.corpus import generate_corpus
from .fixtures.obfuscator import LEVELS, ObfuscationConfig, UnsupportedInput, obfuscate_source
from .fixtures.seeds import seed_programs
from .frontend.annotate import AnnotateError, annotate
from .frontend.lexer import ParseError
from .frontend.parser import parse
from .pipeline import PipelineOptions, deobfuscate
from .sandbox.interpreter import Budget

log = logging.getLogger("jsdeob")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _add_detector_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--detector", default="heuristic", metavar="{heuristic|llm|sidecar:<path>}",
                   help="prelude detector backend (default: heuristic)")
    p.add_argument("--llm-endpoint", default=LlmClientConfig.endpoint,
                   help="model endpoint URL, or mock:<file.json> for canned replies")
    p.add_argument("--llm-model", default=LlmClientConfig.model)
    p.add_argument("--llm-key-env", default=LlmClientConfig.api_key_env,
                   help="name of the environment variable holding the API key")
    p.add_argument("--llm-timeout", type=float, default=LlmClientConfig.timeout_secs)
    p.add_argument("--llm-retries", type=int, default=LlmClientConfig.max_retries)
    p.add_argument("--llm-concurrency", type=int, default=LlmClientConfig.max_concurrency)


def _backend(args: argparse.Namespace) -> Backend:
    try:
        llm = LlmClientConfig(args.llm_endpoint, args.llm_model, args.llm_key_env, args.llm_timeout,
                              args.llm_retries, args.llm_concurrency)
        return Backend.parse(args.detector, llm)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _output_path(input_path: str, out_dir: str | None) -> Path:
    src = Path(input_path)
    name = (src.name[:-3] if src.name.endswith(".js") else src.name) + ".deob.js"
    return Path(out_dir) / name if out_dir else src.with_name(name)


def _deob_one(task: tuple[str, str | None, PipelineOptions]) -> dict:
    path, out_dir, options = task
    source = _read(path)
    result = deobfuscate(source, options, input_name=path)
    out = _output_path(path, out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(result.output, encoding="utf-8")
    return result.report.to_json()


def cmd_deob(args: argparse.Namespace) -> int:
    if args.timeout_secs <= 0 or args.max_steps <= 0 or args.jobs < 1:
        raise UsageError("--timeout-secs, --max-steps and --jobs must be positive")
    options = PipelineOptions(
        backend=_backend(args),
        budget=Budget(max_steps=args.max_steps, wall_timeout_secs=args.timeout_secs),
        keep_prelude=args.keep_prelude,
        dot_rewrite=not args.no_dot_rewrite,
        report_path=args.report,
    )
    for path in args.inputs:
        if not Path(path).is_file():
            raise UsageError(f"no such input file: {path}")
    tasks = [(p, args.out_dir, options) for p in args.inputs]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_deob_one, tasks))
    else:
        reports = [_deob_one(t) for t in tasks]
    reports.sort(key=lambda r: r["input"])
    lines = "".join(json.dumps(r) + "\n" for r in reports)
    if args.report and args.report != "-":
        Path(args.report).write_text(lines, encoding="utf-8")
    else:
        sys.stdout.write(lines)
    ok = sum(r["success"] for r in reports)
    log.info("%d/%d files deobfuscated", ok, len(reports))
    return EXIT_OK if ok == len(reports) else EXIT_FAIL


def cmd_detect(args: argparse.Namespace) -> int:
    source = _read(args.input)
    try:
        program = parse(source)
    except ParseError as exc:
        print(f"{args.input}: parse error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        roles = detect(program, _backend(args))
    except DetectionFailed as exc:
        print(f"{args.input}: no prelude detected ({exc.reason}): {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps({**roles.to_sidecar(), "source": roles.source}))
    return EXIT_OK


def cmd_annotate(args: argparse.Namespace) -> int:
    try:
        sys.stdout.write(annotate(parse(_read(args.input))).text)
    except (ParseError, AnnotateError) as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _config(args: argparse.Namespace) -> ObfuscationConfig:
    base = ObfuscationConfig.preset(args.level, args.seed)
    overrides = {}
    for name in ("offset", "wrapper_depth", "alias_count", "encoding"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.no_rotate:
        overrides["rotate"] = False
    if args.object_wrapper:
        overrides["object_wrapper"] = True
    try:
        return ObfuscationConfig(**{**base.__dict__, **overrides})
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_obfuscate(args: argparse.Namespace) -> int:
    try:
        result = obfuscate_source(_read(args.input), _config(args))
    except UnsupportedInput as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.output:
        Path(args.output).write_text(result.text, encoding="utf-8")
        truth = args.truth or str(Path(args.output).with_suffix("")) + ".truth.json"
        Path(truth).write_text(json.dumps(result.truth.to_json(), indent=1, ensure_ascii=False) + "\n",
                               encoding="utf-8")
    else:
        sys.stdout.write(result.text)
        if args.truth:
            Path(args.truth).write_text(json.dumps(result.truth.to_json(), indent=1, ensure_ascii=False) + "\n",
                                        encoding="utf-8")
    return EXIT_OK


def cmd_corpus(args: argparse.Namespace) -> int:
    seeds = [(Path(p).name.removesuffix(".js"), _read(p)) for p in args.seeds]
    if args.generate:
        seeds += seed_programs(args.generate, args.seed)
    if not seeds:
        raise UsageError("give seed files and/or --generate N")
    levels = tuple(args.levels.split(",")) if args.levels else LEVELS
    for level in levels:
        if level not in LEVELS:
            raise UsageError(f"unknown level {level!r}")
    manifest = generate_corpus(seeds, args.out_dir, levels, args.seed)
    failed = [m for m in manifest if m["status"] != "ok"]
    print(f"wrote {len(manifest) - len(failed)} file pairs to {args.out_dir} ({len(failed)} failures)")
    return EXIT_OK if not failed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jsdeob", description="Recover obfuscated string literals in JavaScript.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deob", help="deobfuscate files")
    p.add_argument("inputs", nargs="+")
    _add_detector_args(p)
    p.add_argument("--timeout-secs", type=float, default=60.0, help="per-file wall-clock limit")
    p.add_argument("--max-steps", type=int, default=Budget.max_steps, help="sandbox step budget")
    p.add_argument("--keep-prelude", action="store_true", help="keep the prelude statements in the output")
    p.add_argument("--no-dot-rewrite", action="store_true", help="leave e['name'] member accesses alone")
    p.add_argument("--report", help="write newline-delimited JSON reports here (default: stdout)")
    p.add_argument("--out-dir", help="directory for <name>.deob.js (default: beside the input)")
    p.add_argument("--jobs", type=int, default=1, help="files processed in parallel")
    p.set_defaults(func=cmd_deob)

    p = sub.add_parser("detect", help="print the detected prelude roles as JSON")
    p.add_argument("input")
    _add_detector_args(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("annotate", help="print the statement-numbered form used for detection")
    p.add_argument("input")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("obfuscate", help="obfuscate one file with the built-in fixture obfuscator")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--truth", help="truth sidecar path (default: <output>.truth.json)")
    p.add_argument("--level", choices=LEVELS, default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--offset", type=int)
    p.add_argument("--no-rotate", action="store_true")
    p.add_argument("--wrapper-depth", type=int)
    p.add_argument("--alias-count", type=int)
    p.add_argument("--object-wrapper", action="store_true")
    p.add_argument("--encoding", choices=("none", "base64"))
    p.set_defaults(func=cmd_obfuscate)

    p = sub.add_parser("corpus", help="generate an obfuscated corpus with truth sidecars")
    p.add_argument("seeds", nargs="*", help="seed .js files")
    p.add_argument("--generate", type=int, default=0, metavar="N", help="also generate N random seed programs")
    p.add_argument("--levels", help=f"comma-separated subset of {','.join(LEVELS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"jsdeob: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
