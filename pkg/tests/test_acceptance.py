"""End-to-end acceptance checks; each test carries one criterion marker.

The terminal summary prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import re
import statistics
import time

import pytest

from jsdeob.analysis import resolve_scopes
from jsdeob.cli import main
from jsdeob.deprop import UNINIT, UNKNOWN, Const, Inlinable, PassOptions, PreludeRef, eval_abstract, join, run_pass
from jsdeob.deprop.inline import IBinary, IConst, IMember, IUnary, to_ast
from jsdeob.detect import PreludeRoles, build_prompt, heuristic_detect, prompt_digest, validate_dependencies
from jsdeob.fixtures import prompt_example
from jsdeob.frontend import annotate, parse, print_program
from jsdeob.pipeline import deobfuscate
from jsdeob.sandbox import call, eval_pure, load, run_program, same_value

from helpers import canonical, hello_prelude, rewrite_snippet

PAPER_REPLY = '{"StringArrayTemplate": 4, "StringArrayRotateFunctionTemplate": 1, "StringArrayCallsWrapperTemplate": 3}'


# 1 -------------------------------------------------------------------------


@pytest.mark.criterion(1, "golden three-call example end to end")
def test_golden_golden(tmp_path, golden_source, capsys):
    src = tmp_path / "golden.js"
    src.write_text(golden_source, encoding="utf-8")
    t0 = time.perf_counter()
    code = main(["deob", str(src), "--detector=heuristic"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    out = (tmp_path / "golden.deob.js").read_text(encoding="utf-8")
    report = json.loads(capsys.readouterr().out)
    assert "console.log('Hello World!');" in out
    program = parse(out)
    names = {s.name for s in program.children if s.kind == "FunctionDecl"}
    assert names == {"hi"}
    assert not any(s.kind == "ExprStmt" and s.children[0].kind == "Call"
                   and s.children[0].children[0].kind == "FunctionExpr" for s in program.children)
    assert report["literals_recovered"] == 2 and report["success"]
    assert elapsed < 1.0


# 2 -------------------------------------------------------------------------

REWRITE_EXAMPLES = {
    "direct call": ("var x = getString(438);", 'var x = "Hello World!";'),
    "variable alias": ("var x = getString;\nvar y = x(438);", 'var x = getString;\nvar y = "Hello World!";'),
    "wrapper function": (
        "function x(a, b) {\n  return getString(a - 1);\n}\nvar y = x(439, 101);",
        'function x(a, b) {\n  return getString(a - 1);\n}\nvar y = "Hello World!";',
    ),
    "object wrapper": (
        'var o = {\n  "k1": function (f, x) {\n    return f(x);\n  },\n  "k2": function (a, b) {\n    return a + b;\n  }\n};\n'
        "var f = getString;\nvar y = o.k1(f, o.k2(437, 1));",
        'var o = {\n  "k1": function (f, x) {\n    return f(x);\n  },\n  "k2": function (a, b) {\n    return a + b;\n  }\n};\n'
        'var f = getString;\nvar y = "Hello World!";',
    ),
    "object wrapper in a function": (
        "var o = {\n  'k1': function (f, x) {\n    return f(x);\n  },\n  'k2': function (a, b) {\n    return a + b;\n  }\n};\n"
        "function foo() {\n  var f = getString;\n  var y = o.k1(f, o.k2(437, 1));\n}",
        "var o = {\n  'k1': function (f, x) {\n    return f(x);\n  },\n  'k2': function (a, b) {\n    return a + b;\n  }\n};\n"
        "function foo() {\n  var f = getString;\n  var y = 'Hello World!';\n}",
    ),
}


@pytest.mark.criterion(2, "indirection rewrite examples and the object wrapper")
def test_table_i():
    ctx = load(parse(hello_prelude()).children)
    assert call(ctx, "getString", [438]) == "Hello World!"
    failures = []
    for name, (before, after) in REWRITE_EXAMPLES.items():
        out, report = rewrite_snippet(before + "\n", dot_rewrite=False)
        if print_program(out) != canonical(after) or report.literals_recovered != 1:
            failures.append((name, print_program(out)))
    assert not failures


# 3 -------------------------------------------------------------------------


@pytest.mark.criterion(3, "round-trip corpus: success >= 99%, exact recoveries, median <= 1 s")
def test_round_trip_corpus(corpus, tmp_path, capsys):
    assert len(corpus) == 800
    report_path = tmp_path / "reports.ndjson"
    main(["deob", *[str(f.path) for f in corpus], "--detector=heuristic", "--out-dir", str(tmp_path / "out"),
          "--report", str(report_path), "--jobs", "4"])
    reports = {r["input"]: r for r in map(json.loads, report_path.read_text().splitlines())}
    assert len(reports) == len(corpus)

    successes = exact = 0
    durations = []
    mismatched = []
    for f in corpus:
        r = reports[str(f.path)]
        durations.append(r["duration_ms"])
        assert r.get("failure_reason") != "timeout"
        if not r["success"]:
            continue
        successes += 1
        result = deobfuscate(f.path.read_text(encoding="utf-8"))
        recovered = [{"span": span.to_json(), "string": s} for span, s in result.rewrite.recovered]
        recovered.sort(key=lambda x: x["span"]["byte_start"])
        expected = f.obf.truth.expected_recoveries
        if recovered == expected and r["literals_recovered"] == len(expected):
            exact += 1
        else:
            mismatched.append(f.path.name)
    rate = successes / len(corpus)
    median = statistics.median(durations)
    with capsys.disabled():
        print(f"\n  corpus: {successes}/{len(corpus)} succeeded ({rate:.2%}), exact recoveries on {exact}, "
              f"median {median:.1f} ms, max {max(durations):.1f} ms, "
              f"mean literals {statistics.mean(len(f.obf.truth.expected_recoveries) for f in corpus):.1f}")
    assert rate >= 0.99
    assert not mismatched, mismatched[:10]
    assert median <= 1000.0


# 4 -------------------------------------------------------------------------


def _variants(text: str) -> dict[str, str]:
    out = {
        "!false": text.replace("while (!![])", "while (!false)", 1),
        "!!true": text.replace("while (!![])", "while (!!true)", 1),
        "for loop": text.replace("while (!![])", "for (; !false; )", 1),
    }
    m = re.search(r"  (\w+) = function \(\) \{\n    return (\w+);", text)
    out["table alias"] = (text[:m.start()] + f"  var _alias = {m.group(2)};\n  {m.group(1)} = function () {{\n"
                          f"    return _alias;" + text[m.end():])
    combined = out["for loop"]
    m = re.search(r"  (\w+) = function \(\) \{\n    return (\w+);", combined)
    out["all"] = (combined[:m.start()] + f"  var _alias = {m.group(2)};\n  {m.group(1)} = function () {{\n"
                  f"    return _alias;" + combined[m.end():])
    return out


@pytest.mark.criterion(4, "detection robustness to slight template changes")
def test_slight_changes(corpus):
    files = corpus[::16][:50]
    assert len(files) == 50
    total = ok = 0
    for f in files:
        truth = PreludeRoles.from_sidecar(f.obf.truth.roles)
        expected = [r["string"] for r in f.obf.truth.expected_recoveries]
        for name, text in _variants(f.obf.text).items():
            assert text != f.obf.text, name
            total += 1
            program = parse(text)
            result = deobfuscate(text)
            if (heuristic_detect(program).ids == truth.ids and result.report.success
                    and [s for _, s in result.rewrite.recovered] == expected):
                ok += 1
    assert total == 250 and ok == total


# 5 -------------------------------------------------------------------------


@pytest.mark.criterion(5, "validator accepts truth and rejects all other permutations (600 verdicts)")
def test_validator_discrimination(corpus):
    files = corpus[::8][:100]
    assert len(files) == 100
    correct = total = 0
    for f in files:
        truth = PreludeRoles.from_sidecar(f.obf.truth.roles).ids
        info = resolve_scopes(f.obf.program)
        for perm in itertools.permutations(truth):
            accepted = validate_dependencies(f.obf.program, PreludeRoles(*perm), info) == []
            total += 1
            correct += accepted == (perm == truth)
    assert (correct, total) == (600, 600)


# 6 -------------------------------------------------------------------------

_UNARY = ["-", "+", "!", "~", "typeof"]
_BINARY = ["+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "===", "!==", "&", "|", "^", "<<", ">>", ">>>"]
_LEAF_NUMBERS = [0.0, 1.0, 2.0, 3.5, 7.0, 10.0, 255.0, 438.0, 1e21, 2**31, 2**32 + 5, 0.1,
                 math.nan, math.inf, -0.0]
_LEAF_STRINGS = ["", "a", "1", "12px", "0x1f", " 7 ", "Hello World!", "NaN", "-0", "1e3", "abc"]


def _random_inline(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.55:
            return IConst(rng.choice(_LEAF_NUMBERS) if rng.random() < 0.7 else float(rng.randint(0, 2**20)))
        return IConst(rng.choice(_LEAF_STRINGS))
    r = rng.random()
    if r < 0.2:
        return IUnary(rng.choice(_UNARY), _random_inline(rng, depth - 1))
    if r < 0.3:
        obj = IConst(rng.choice(_LEAF_STRINGS[1:]))
        key = IConst(rng.choice(["length", "0", "1", "5"]))
        return IMember(obj, key)
    return IBinary(rng.choice(_BINARY), _random_inline(rng, depth - 1), _random_inline(rng, depth - 1))


@pytest.mark.criterion(6, "folding oracle: eval_abstract equals eval_pure on 1000 closed expressions")
def test_folding_oracle():
    rng = random.Random(20240601)
    nan_cases = mismatches = 0
    for _ in range(1000):
        expr = to_ast(_random_inline(rng, 4))
        abstract = eval_abstract(expr)
        concrete = eval_pure(expr)
        if not (isinstance(abstract, Const) and same_value(abstract.value, concrete)):
            mismatches += 1
        elif isinstance(concrete, float) and math.isnan(concrete):
            nan_cases += 1
    assert mismatches == 0
    assert nan_cases > 0


# 7 -------------------------------------------------------------------------


@pytest.mark.criterion(7, "semantics preservation: seed, obfuscated and deobfuscated traces agree")
def test_semantics_preservation(corpus):
    bad = []
    for f in corpus:
        seed = run_program(parse(f.seed_source).children)
        obf = run_program(f.obf.program.children)
        result = deobfuscate(f.obf.text)
        deob = run_program(parse(result.output).children)
        if not (seed.error is None and seed.trace and seed.trace == obf.trace == deob.trace
                and obf.error is None and deob.error is None):
            bad.append(f.path.name)
    assert not bad, bad[:10]


# 8 -------------------------------------------------------------------------


def _random_value(rng: random.Random):
    r = rng.random()
    if r < 0.15:
        return UNINIT
    if r < 0.3:
        return UNKNOWN
    if r < 0.4:
        return PreludeRef(rng.choice(["getString", "_0x4c0c"]))
    if r < 0.45:
        return Inlinable(IConst(rng.choice(["a", "b"])))
    return Const(rng.choice([1.0, 2.0, -0.0, 0.0, math.nan, "a", "b", "", True, False]))


@pytest.mark.criterion(8, "lattice laws on 10,000 samples; solver within 8 x |blocks| on corpus functions")
def test_lattice_and_solver(corpus):
    rng = random.Random(7)
    for _ in range(10_000):
        a, b, c = _random_value(rng), _random_value(rng), _random_value(rng)
        assert join(a, b) == join(b, a)
        assert join(join(a, b), c) == join(a, join(b, c))
        assert join(a, a) == a
    functions = 0
    worst = 0.0
    for f in corpus:
        program = f.obf.program
        ctx = load(program.children[:3])
        _, report = run_pass(program, [0, 2, 1], ctx, PassOptions(check_monotone=True))
        assert report.failure_reason is None
        assert report.functions_over_budget == 0
        functions += report.functions_analyzed
        worst = max(worst, report.max_visit_ratio)
    assert functions > len(corpus) and worst <= 8.0


# 9 -------------------------------------------------------------------------


@pytest.mark.criterion(9, "LLM path through the mock transport, with heuristic fallback")
def test_llm_mock_path(tmp_path, golden_source, capsys):
    program, text, _ = prompt_example()
    example = tmp_path / "example.js"
    example.write_text(text, encoding="utf-8")
    digest = prompt_digest(build_prompt(annotate(parse(text))))
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"responses": {digest: "```json\n" + PAPER_REPLY + "\n```"}}))
    assert main(["detect", str(example), "--detector=llm", f"--llm-endpoint=mock:{good}"]) == 0
    roles = json.loads(capsys.readouterr().out)
    assert roles == {"string_array": 4, "calls_wrapper": 3, "rotate": 1, "source": "llm"}

    golden = tmp_path / "golden.js"
    golden.write_text(golden_source, encoding="utf-8")
    garbage = tmp_path / "garbage.json"
    garbage.write_text(json.dumps({"default": "I am not sure which functions those are."}))
    assert main(["detect", str(golden), "--detector=llm", f"--llm-endpoint=mock:{garbage}"]) == 0
    fallback = json.loads(capsys.readouterr().out)
    expected = heuristic_detect(parse(golden_source))
    assert fallback == {**expected.to_sidecar(), "source": "heuristic"}

    report_path = tmp_path / "r.ndjson"
    assert main(["deob", str(golden), "--detector=llm", f"--llm-endpoint=mock:{garbage}",
                 "--report", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["detection_source"] == "heuristic" and report["literals_recovered"] == 2

    assert main(["deob", str(example), "--detector=llm", f"--llm-endpoint=mock:{good}",
                 "--report", str(report_path)]) == 0
    assert json.loads(report_path.read_text())["detection_source"] == "llm"
