"""The rewrite pass: solve each function, replace constant call sites with literals."""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field

from ..analysis.census import AssignmentCensus, census
from ..analysis.cfg import BasicBlock, build_cfg
from ..analysis.scopes import Binding, ScopeInfo, resolve_scopes
from ..analysis.solver import IterationBudgetExceeded, worklist_solve
from ..frontend.lexer import RESERVED_WORDS
from ..frontend.nodes import Node, SourceSpan, literal_for, rebuild, walk
from ..sandbox.context import SandboxContext
from ..sandbox.errors import PurityViolation
from ..sandbox.values import NULL, UNDEFINED
from .evaluate import DEFAULT_DEPTH_CAP, Evaluator
from .lattice import UNKNOWN, AbstractValue, Const, join_states, states_leq
from .table import GlobalTable, build_global_table, parent_map

_IDENTIFIER = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*\Z")
_IMPURE_KINDS = frozenset({"Assign", "Update", "New"})


@dataclass
class PassOptions:
    keep_prelude: bool = False
    dot_rewrite: bool = True
    depth_cap: int = DEFAULT_DEPTH_CAP
    check_purity: bool = True
    check_monotone: bool = False
    deadline: float | None = None  # time.monotonic() value after which the pass gives up


class PassTimeout(Exception):
    pass


@dataclass
class RewriteReport:
    literals_recovered: int = 0
    sites_rewritten: list[SourceSpan] = field(default_factory=list)
    recovered: list[tuple[SourceSpan, str]] = field(default_factory=list)
    prelude_removed: bool = False
    duration_ms: float = 0.0
    failure_reason: str | None = None
    functions_analyzed: int = 0
    functions_over_budget: int = 0
    max_visit_ratio: float = 0.0

    def to_json(self) -> dict:
        out = {
            "literals_recovered": self.literals_recovered,
            "sites_rewritten": [s.to_json() for s in self.sites_rewritten],
            "prelude_removed": self.prelude_removed,
            "duration_ms": self.duration_ms,
        }
        if self.failure_reason is not None:
            out["failure_reason"] = self.failure_reason
        return out


def is_valid_identifier(name: str) -> bool:
    return bool(_IDENTIFIER.match(name)) and name not in RESERVED_WORDS


def member_to_dot(program: Node) -> Node:
    """Rewrite ``e['name']`` to ``e.name`` when ``name`` is a non-reserved identifier."""

    def fn(node: Node) -> Node | None:
        if node.kind == "Member" and node.computed:
            prop = node.children[1]
            if prop.kind == "StringLit" and is_valid_identifier(prop.value):
                obj = rebuild(node.children[0], fn)
                return Node("Member", [obj, Node("Identifier", name=prop.value, span=prop.span)],
                            span=node.span, computed=False)
        return None

    return rebuild(program, fn)


def _functions_outside(statements: list[Node]) -> list[Node]:
    out = []
    for s in statements:
        for n in walk(s):
            if n.kind in ("FunctionDecl", "FunctionExpr"):
                out.append(n)
    return out


def _tracked_bindings(fn: Node, info: ScopeInfo, counts: AssignmentCensus) -> set[Binding]:
    """Bindings owned by ``fn`` whose writes all happen inside ``fn``."""
    out = set()
    for scope in info.scopes:
        if scope.function is not fn:
            continue
        for b in scope.bindings.values():
            if b.kind != "self" and not counts.written_outside(b):
                out.add(b)
    return out


def _entry_state(fn: Node, tracked: set[Binding], table: GlobalTable) -> dict:
    state: dict = {}
    for b in tracked:
        tv = table.get(b)
        if tv is not None:
            state[b] = tv
        elif b.kind in ("param", "function"):
            state[b] = UNKNOWN
        elif b.kind == "var":
            state[b] = Const(UNDEFINED)
    return state


class _Pass:
    def __init__(self, program: Node, prelude_ids: list[int], ctx: SandboxContext | None,
                 options: PassOptions, report: RewriteReport):
        self.program = program
        self.options = options
        self.report = report
        self.ctx = ctx
        self.prelude = [program.children[i] for i in prelude_ids]
        self.prelude_set = set(map(id, self.prelude))
        self.info = resolve_scopes(program)
        self.counts = census(program, self.info)
        self.parents = parent_map(program)
        wrapper_stmt = program.children[prelude_ids[1]] if len(prelude_ids) > 1 else None
        names = [b.name for b in self.info.declared_name(wrapper_stmt)] if wrapper_stmt is not None else []
        self.table = build_global_table(program, self.info, self.counts, names, self.parents)
        self.values: dict[Node, AbstractValue] = {}

    def analyze(self, fn: Node, statements: list[Node] | None = None) -> None:
        tracked = _tracked_bindings(fn, self.info, self.counts)
        ev = Evaluator(self.info, self.table, self.ctx, tracked,
                       depth_cap=self.options.depth_cap, check_purity=self.options.check_purity)
        cfg = build_cfg(fn, statements)

        deadline = self.options.deadline

        def transfer(block: BasicBlock, state_in: dict) -> dict:
            if deadline is not None and time.monotonic() > deadline:
                raise PassTimeout
            state = dict(state_in)
            for kind, node in block.items:
                if kind in ("expr", "test"):
                    ev.eval(node, state)
                elif kind == "decl":
                    v = ev.eval(node.children[1], state)
                    ev.assign(self.info.refs.get(node.children[0]), v, state)
                elif kind == "catch":
                    b = self.info.refs.get(node)
                    if b in tracked:
                        state[b] = UNKNOWN
            return state

        self.report.functions_analyzed += 1
        try:
            sol = worklist_solve(cfg, transfer, join_states, _entry_state(fn, tracked, self.table),
                                 leq=states_leq if self.options.check_monotone else None)
        except IterationBudgetExceeded:
            self.report.functions_over_budget += 1
            return
        self.report.max_visit_ratio = max(self.report.max_visit_ratio, sol.visits / max(len(cfg), 1))
        # Replay every reached block once from its fixed-point input to record call values.
        ev.recorder = self.values
        for bid, state_in in sol.inputs.items():
            transfer(cfg.blocks[bid], state_in)
        ev.recorder = None

    def run(self) -> Node:
        body = [s for s in self.program.children if id(s) not in self.prelude_set]
        self.analyze(self.program, body)
        for fn in _functions_outside(body):
            self.analyze(fn)
        return self.rewrite(body)

    def rewritable(self, node: Node) -> bool:
        for n in walk(node):
            if n.kind in _IMPURE_KINDS or (n.kind == "Unary" and n.op == "delete"):
                return False
            if n.kind == "Call" and not isinstance(self.values.get(n), Const):
                return False
        return True

    def rewrite(self, body: list[Node]) -> Node:
        report = self.report

        def fn(node: Node) -> Node | None:
            if node.kind != "Call":
                return None
            v = self.values.get(node)
            if not isinstance(v, Const) or not self.rewritable(node):
                return None
            value = v.value
            lit = Node("NullLit") if value is NULL else literal_for(value)
            if lit is None:
                return None
            lit.span = node.span
            report.sites_rewritten.append(node.span)
            if isinstance(value, str):
                report.literals_recovered += 1
                report.recovered.append((node.span, value))
            return lit

        kept = body if not self.options.keep_prelude else list(self.program.children)
        new_children = []
        for s in kept:
            if id(s) in self.prelude_set:
                new_children.append(s)
            else:
                new_children.append(rebuild(s, fn))
        report.prelude_removed = not self.options.keep_prelude
        out = Node("Program", new_children, span=self.program.span)
        if self.options.dot_rewrite:
            out = member_to_dot(out)
        return out


def run_pass(
    program: Node,
    prelude_ids: list[int],
    ctx: SandboxContext | None,
    options: PassOptions | None = None,
) -> tuple[Node, RewriteReport]:
    """Run the augmented constant propagation over ``program``.

    ``prelude_ids`` are the top-level statement indices of the string array,
    calls wrapper and rotate statements, in that order.  On a purity
    violation the original program is returned with ``failure_reason``
    set to ``"purity"``; past ``options.deadline`` it is ``"timeout"``.
    """
    options = options or PassOptions()
    report = RewriteReport()
    start = time.perf_counter()
    try:
        out = _Pass(program, prelude_ids, ctx, options, report).run()
    except PurityViolation:
        report = RewriteReport(failure_reason="purity")
        out = program
    except PassTimeout:
        report = RewriteReport(failure_reason="timeout")
        out = program
    report.duration_ms = (time.perf_counter() - start) * 1000.0
    return out, report
