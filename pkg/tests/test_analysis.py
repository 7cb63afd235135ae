from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jsdeob.analysis import (
    IterationBudgetExceeded,
    MonotonicityViolation,
    build_cfg,
    census,
    resolve_scopes,
    worklist_solve,
)
from jsdeob.deprop import UNINIT, UNKNOWN, Const, Evaluator, GlobalTable, join, join_states, leq
from jsdeob.fixtures import seed_program
from jsdeob.frontend import parse
from jsdeob.frontend.nodes import walk

from helpers import hello_prelude


def _idents(program, name):
    return [n for n in walk(program) if n.kind == "Identifier" and n.name == name]


def _binding(info, name, kind=None):
    found = [b for b in info.bindings if b.name == name and (kind is None or b.kind == kind)]
    assert len(found) == 1, found
    return found[0]


def _function(program, name):
    return next(n for n in walk(program) if n.kind in ("FunctionDecl", "FunctionExpr") and n.name == name)


# -- scopes -----------------------------------------------------------------


def test_shadowed_var_is_distinct_binding():
    p = parse("var a; function f(){ var a; a = 1; } a = 2;")
    info = resolve_scopes(p)
    bs = [b for b in info.bindings if b.name == "a"]
    assert len(bs) == 2 and bs[0].binding_id != bs[1].binding_id
    inner_write, outer_write = [i for i in _idents(p, "a") if i in info.refs][-2:]
    assert info.refs[inner_write] is not info.refs[outer_write]


def test_top_level_alias_visible_in_function():
    p = parse("var x = getString; function foo(){ return x(438); }")
    info = resolve_scopes(p)
    decl_x, use_x = _idents(p, "x")
    assert info.refs[use_x] is info.refs[decl_x]
    assert info.refs[_idents(p, "getString")[0]] is None  # free


def test_wrapper_params_bind_in_body_only():
    p = parse("function x(a, b){ return getString(a - 1); } a;")
    info = resolve_scopes(p)
    uses = _idents(p, "a")
    assert info.refs[uses[1]].kind == "param"
    assert info.refs[uses[-1]] is None


def test_var_hoisting():
    p = parse("function f(){ y = 1; if (c) { var y; } }")
    info = resolve_scopes(p)
    y = _idents(p, "y")[0]
    assert info.refs[y].kind == "var" and info.refs[y].function is _function(p, "f")


def test_catch_param_scoped_to_handler():
    p = parse("var e = 1; try { g(); } catch (e) { h(e); } k(e);")
    info = resolve_scopes(p)
    ids = _idents(p, "e")
    assert info.refs[ids[2]].kind == "catch"
    assert info.refs[ids[3]].kind == "var"


def test_named_function_expression_self_binding():
    p = parse("var g = function h(n){ return h; }; h;")
    info = resolve_scopes(p)
    inner, outer = _idents(p, "h")
    assert info.refs[inner].kind == "self"
    assert info.refs[outer] is None


# -- census -----------------------------------------------------------------


def test_census_alias_single_write():
    p = parse("var x = getString; x(1);")
    info = resolve_scopes(p)
    c = census(p, info)
    b = _binding(info, "x")
    assert c.count(b) == 1
    assert c.single_rhs(b).name == "getString"


def test_census_two_writes_no_rhs():
    p = parse("x = 1; x = 2; var x;")
    info = resolve_scopes(p)
    c = census(p, info)
    b = _binding(info, "x")
    assert c.count(b) == 2 and c.single_rhs(b) is None


def test_census_self_redefinition_excluded():
    p = parse(hello_prelude())
    info = resolve_scopes(p)
    c = census(p, info)
    array_name = p.children[0].name
    b = info.function_scopes[p].bindings[array_name]
    assert c.count(b) >= 2
    assert c.single_rhs(b) is None
    assert c.written_outside(b)


def test_census_function_declaration_counts_once():
    p = parse("function f(){} f();")
    info = resolve_scopes(p)
    b = _binding(info, "f")
    assert census(p, info).count(b) == 1


def test_census_compound_and_update_writes():
    p = parse("var n = 0; n += 2; n++;")
    info = resolve_scopes(p)
    c = census(p, info)
    assert c.count(_binding(info, "n")) == 3


def _brute_counts(program, info):
    counts: dict = {}

    def bump(b):
        if b is not None:
            counts[b] = counts.get(b, 0) + 1

    def go(node, fn):
        k = node.kind
        if k in ("FunctionDecl", "FunctionExpr") and node is not fn:
            if k == "FunctionDecl":
                bump(info.function_scopes[fn].lookup(node.name))
            go(node, node)
            return
        if k == "VarDeclarator" and len(node.children) > 1:
            bump(info.refs.get(node.children[0]))
        if k in ("Assign", "Update") and node.children[0].kind == "Identifier":
            bump(info.refs.get(node.children[0]))
        for c in node.kids():
            go(c, fn)

    go(program, program)
    return counts


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_census_matches_brute_force(seed):
    p = parse(seed_program(seed))
    info = resolve_scopes(p)
    c = census(p, info)
    brute = _brute_counts(p, info)
    for b in info.bindings:
        assert c.count(b) == brute.get(b, 0), b


# -- cfg --------------------------------------------------------------------


def test_straight_line_is_one_block():
    p = parse("a(); b(); c();")
    cfg = build_cfg(p)
    assert len(cfg) == 1
    (blk,) = cfg.blocks.values()
    assert [n.children[0].name for _, n in blk.items] == ["a", "b", "c"]


def test_while_shape():
    p = parse("while (x) { y; }")
    cfg = build_cfg(p)
    assert len(cfg) == 4
    cond = next(b for b in cfg.blocks.values() if b.items and b.items[0][0] == "test")
    body = next(b for b in cfg.blocks.values() if b.items and b.items[0][0] == "expr")
    assert cfg.entry != cond.block_id and cfg.exit not in (cond.block_id, body.block_id)
    assert body.succs == [cond.block_id] and cfg.has_back_edge(body.block_id, cond.block_id)
    assert set(cond.succs) == {body.block_id, cfg.exit}


def test_fetch_loop_try_edges():
    p = parse("while (!![]) { try { a(); b(); } catch (e) { c(); } }")
    cfg = build_cfg(p)
    cond = next(b for b in cfg.blocks.values() if b.items and b.items[0][0] == "test")
    assert cond.items[0][1].kind == "Unary"
    catch = next(b for b in cfg.blocks.values() if b.items and b.items[0][0] == "catch")
    try_blocks = [b for b in cfg.blocks.values()
                  if b.items and b.items[0][0] == "expr" and b.items[0][1].children[0].name in "ab"]
    assert len(try_blocks) == 2
    assert all(catch.block_id in b.succs for b in try_blocks)


def test_cfg_every_block_reachable():
    p = parse(seed_program(7))
    for fn in [p] + [n for n in walk(p) if n.kind in ("FunctionDecl", "FunctionExpr")]:
        cfg = build_cfg(fn)
        reach = set(cfg.reverse_postorder())
        assert set(cfg.blocks) <= reach | {cfg.exit}


# -- solver -----------------------------------------------------------------


def _transfer_for(fn, program, log=None):
    info = resolve_scopes(program)
    tracked = {b for s in info.scopes if s.function is fn for b in s.bindings.values()}
    ev = Evaluator(info, GlobalTable(), None, tracked)

    def transfer(block, state_in):
        state = dict(state_in)
        for kind, node in block.items:
            if kind == "decl":
                ev.assign(info.refs[node.children[0]], ev.eval(node.children[1], state), state)
            elif kind in ("expr", "test"):
                ev.eval(node, state)
            if log is not None:
                log.append((node, dict(state)))
        return state

    entry = {b: UNKNOWN for b in tracked if b.kind == "param"}
    return info, transfer, entry


def test_identity_single_block():
    p = parse("a(); b();")
    cfg = build_cfg(p)
    init = {"k": Const(1.0)}
    sol = worklist_solve(cfg, lambda blk, s: s, join_states, init)
    assert sol.inputs[cfg.entry] == init and sol.outputs[cfg.entry] == init


def test_constant_then_unknown_after_add():
    p = parse("function f(c){ var a = 100; var b = 200; var d = a + b; d = a + c; }")
    fn = _function(p, "f")
    log = []
    info, transfer, entry = _transfer_for(fn, p, log)
    worklist_solve(build_cfg(fn), transfer, join_states, entry)
    d = _binding(info, "d")
    after = [state.get(d) for _, state in log]
    assert after[2] == Const(300.0)
    assert after[3] is UNKNOWN


def test_diamond_join_is_unknown():
    p = parse("function f(t){ var v; if (t) { v = 1; } else { v = 2; } g(v); }")
    fn = _function(p, "f")
    info, transfer, entry = _transfer_for(fn, p)
    cfg = build_cfg(fn)
    sol = worklist_solve(cfg, transfer, join_states, entry)
    v = _binding(info, "v")
    merge = next(b for b in cfg.blocks.values() if b.items and b.items[0][1].kind == "Call")
    assert sol.inputs[merge.block_id][v] is UNKNOWN


def test_diamond_same_constant_survives():
    p = parse("function f(t){ var v; if (t) { v = 1; } else { v = 1; } g(v); }")
    fn = _function(p, "f")
    info, transfer, entry = _transfer_for(fn, p)
    cfg = build_cfg(fn)
    sol = worklist_solve(cfg, transfer, join_states, entry)
    merge = next(b for b in cfg.blocks.values() if b.items and b.items[0][1].kind == "Call")
    assert sol.inputs[merge.block_id][_binding(info, "v")] == Const(1.0)


def test_unreached_blocks_absent():
    p = parse("function f(){ return 1; g(); }")
    fn = _function(p, "f")
    cfg = build_cfg(fn)
    sol = worklist_solve(cfg, lambda b, s: s, join_states, {})
    assert len(sol.inputs) <= len(cfg)


def test_budget_exceeded_on_non_monotone_transfer():
    p = parse("while (x) { y(); }")
    cfg = build_cfg(p)
    counter = iter(range(10**6))

    def bad(block, state):
        return {"n": Const(float(next(counter)))}

    with pytest.raises(IterationBudgetExceeded):
        worklist_solve(cfg, bad, lambda a, b: b, {})


def test_monotonicity_check():
    p = parse("while (x) { y(); }")
    cfg = build_cfg(p)
    counter = iter(range(10**6))

    def bad(block, state):
        return {"n": Const(float(next(counter)))}

    with pytest.raises(MonotonicityViolation):
        worklist_solve(cfg, bad, lambda a, b: b, {}, leq=lambda a, b: all(leq(v, b.get(k, UNINIT)) for k, v in a.items()))


# -- lattice ----------------------------------------------------------------

values = st.one_of(
    st.just(UNINIT),
    st.just(UNKNOWN),
    st.builds(Const, st.one_of(st.integers(-3, 3).map(float), st.sampled_from(["a", "b", ""]), st.booleans(),
                               st.just(float("nan")))),
)


@given(values, values)
def test_join_commutative(a, b):
    assert join(a, b) == join(b, a)


@given(values, values, values)
def test_join_associative(a, b, c):
    assert join(join(a, b), c) == join(a, join(b, c))


@given(values)
def test_join_idempotent(a):
    assert join(a, a) == a


@given(values, values)
def test_join_is_upper_bound(a, b):
    j = join(a, b)
    assert leq(a, j) and leq(b, j)


def test_const_same_value():
    assert Const(float("nan")) == Const(float("nan"))
    assert Const(0.0) != Const(-0.0)
    assert Const(1.0) != Const("1")
    assert Const(True) != Const(1.0)
