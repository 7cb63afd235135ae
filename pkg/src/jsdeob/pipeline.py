"""The per-file pipeline: parse, detect, load the prelude, rewrite, print."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .deprop.transform import PassOptions, RewriteReport, run_pass
from .detect.detector import Backend, DetectionFailed, detect
from .detect.llm import LlmClient
from .detect.roles import PreludeRoles
from .frontend.lexer import ParseError
from .frontend.nodes import Node
from .frontend.parser import parse
from .frontend.printer import print_program
from .sandbox.context import load
from .sandbox.errors import SandboxError, WallTimeout
from .sandbox.interpreter import Budget

log = logging.getLogger(__name__)

FAILURE_REASONS = ("parse", "detection", "validation", "sandbox_budget", "purity", "timeout")


@dataclass(frozen=True)
class PipelineOptions:
    backend: Backend = field(default_factory=lambda: Backend("heuristic"))
    budget: Budget = field(default_factory=Budget)
    keep_prelude: bool = False
    dot_rewrite: bool = True
    report_path: str | None = None


@dataclass
class Report:
    input: str
    success: bool
    detection_source: str | None
    literals_recovered: int
    duration_ms: float
    failure_reason: str | None = None

    def to_json(self) -> dict:
        out = {
            "input": self.input,
            "success": self.success,
            "detection_source": self.detection_source,
            "literals_recovered": self.literals_recovered,
            "duration_ms": round(self.duration_ms, 3),
        }
        if self.failure_reason is not None:
            out["failure_reason"] = self.failure_reason
        return out


@dataclass
class DeobResult:
    output: str  # the deobfuscated text, or the input unchanged on failure
    report: Report
    roles: PreludeRoles | None = None
    rewrite: RewriteReport | None = None
    program: Node | None = None


def deobfuscate(
    source: str,
    options: PipelineOptions | None = None,
    input_name: str = "<string>",
    client: LlmClient | None = None,
) -> DeobResult:
    """Run the whole pipeline on one file's text; failures pass the input through."""
    options = options or PipelineOptions()
    start = time.monotonic()
    deadline = start + options.budget.wall_timeout_secs
    roles: PreludeRoles | None = None

    def fail(reason: str, detail: object) -> DeobResult:
        log.info("%s: %s failure: %s", input_name, reason, detail)
        report = Report(input_name, False, roles.source if roles else None, 0,
                        (time.monotonic() - start) * 1000.0, reason)
        return DeobResult(source, report, roles)

    try:
        program = parse(source)
    except (ParseError, RecursionError) as exc:
        return fail("parse", exc)

    try:
        roles = detect(program, options.backend, client=client)
    except DetectionFailed as exc:
        return fail(exc.reason, exc)

    prelude = [program.children[i] for i in roles.ids]
    remaining = deadline - time.monotonic()
    if remaining <= 0:
        return fail("timeout", "deadline passed before sandbox load")
    budget = Budget(options.budget.max_steps, options.budget.max_heap_cells, remaining)
    try:
        ctx = load(prelude, budget)
    except WallTimeout as exc:
        return fail("timeout", exc)
    except (SandboxError, RecursionError) as exc:
        return fail("sandbox_budget", exc)

    pass_options = PassOptions(keep_prelude=options.keep_prelude, dot_rewrite=options.dot_rewrite,
                               deadline=deadline)
    out, rewrite = run_pass(program, list(roles.ids), ctx, pass_options)
    if rewrite.failure_reason is not None:
        return fail(rewrite.failure_reason, "rewrite aborted")
    text = print_program(out)
    report = Report(input_name, True, roles.source, rewrite.literals_recovered, (time.monotonic() - start) * 1000.0)
    return DeobResult(text, report, roles, rewrite, out)
