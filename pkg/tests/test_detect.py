from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jsdeob.detect import (
    Backend,
    DetectionFailed,
    LlmClient,
    LlmClientConfig,
    MissingSlot,
    MockTransport,
    NotFound,
    ParseFailure,
    PreludeRoles,
    build_prompt,
    default_bundle,
    detect,
    heuristic_detect,
    parse_detection,
    prompt_digest,
    render_template,
    validate_dependencies,
)
from jsdeob.fixtures import LEVELS, ObfuscationConfig, obfuscate_source, prompt_example, seed_program
from jsdeob.frontend import annotate, parse, print_program
from jsdeob.pipeline import deobfuscate

FIG1_ROLES = (0, 2, 1)  # string array, calls wrapper, rotate
PAPER_REPLY = '{"StringArrayTemplate": 4, "StringArrayRotateFunctionTemplate": 1, "StringArrayCallsWrapperTemplate": 3}'


# -- reply parsing ----------------------------------------------------------


def test_parse_paper_reply():
    roles = parse_detection(PAPER_REPLY)
    assert roles.ids == (4, 3, 1) and roles.source == "llm"


def test_parse_fenced_reply_with_prose():
    text = "Sure, here you go:\n```json\n" + PAPER_REPLY + "\n```\nLet me know if you need more."
    assert parse_detection(text).ids == (4, 3, 1)


def test_parse_single_quoted_reply():
    text = "{'StringArrayTemplate': 4, 'StringArrayRotateFunctionTemplate': 1, 'StringArrayCallsWrapperTemplate': 3}"
    assert parse_detection(text).ids == (4, 3, 1)


@pytest.mark.parametrize("text, reason", [
    ('{"StringArrayTemplate": 2, "StringArrayRotateFunctionTemplate": 2, "StringArrayCallsWrapperTemplate": 3}',
     "duplicate"),
    ('{"StringArrayTemplate": 2, "StringArrayRotateFunctionTemplate": 1}', "missing_key"),
    ('{"StringArrayTemplate": "x", "StringArrayRotateFunctionTemplate": 1, "StringArrayCallsWrapperTemplate": 3}',
     "non_integer"),
    ('{"StringArrayTemplate": 1.5, "StringArrayRotateFunctionTemplate": 1, "StringArrayCallsWrapperTemplate": 3}',
     "non_integer"),
    ("I could not find them.", "malformed"),
    ("{not json at all", "malformed"),
])
def test_parse_failures(text, reason):
    with pytest.raises(ParseFailure) as err:
        parse_detection(text)
    assert err.value.reason == reason


@given(st.permutations(range(6)).map(lambda p: p[:3]), st.sampled_from(["llm", "heuristic", "sidecar"]))
def test_render_parse_identity(ids, source):
    roles = PreludeRoles(*ids, source=source)
    assert parse_detection(roles.render()).ids == roles.ids


def test_roles_reject_duplicates():
    with pytest.raises(ValueError):
        PreludeRoles(1, 1, 2)


# -- prompt -----------------------------------------------------------------


def test_prompt_deterministic_and_structured(golden_source):
    ann = annotate(parse(golden_source))
    a, b = build_prompt(ann), build_prompt(ann)
    assert a == b
    assert a.rstrip().endswith("Output:")
    inside = a.split("<investigation_java_script>")[1].split("</investigation_java_script>")[0]
    assert ann.text.strip() in inside
    assert "{{" not in a


def test_prompt_worked_example_matches_layout():
    program, text, roles = prompt_example()
    assert roles == {"string_array": 4, "calls_wrapper": 3, "rotate": 1}
    assert len(program.children) == 5
    bundle = default_bundle()
    assert bundle.slots["worked_example"] == annotate(program).text
    assert parse_detection(bundle.slots["worked_example_output"]).ids == (4, 3, 1)
    prompt = build_prompt("// <0>\nx();\n// </0>\n")
    assert annotate(program).text in prompt
    assert "StringArrayTemplate" in prompt and "StringArrayCallsWrapperTemplate" in prompt
    assert "StringArrayRotateFunctionTemplate" in prompt


def test_prompt_empty_input():
    with pytest.raises(MissingSlot):
        build_prompt("")


def test_render_template_missing_slot():
    with pytest.raises(MissingSlot):
        render_template("a {{x}} b {{y}}", {"x": "1"})
    with pytest.raises(MissingSlot):
        render_template("{{x}}{{x}}", {"x": "1"})
    assert render_template("a {{x}} b", {"x": "{{y}}"}) == "a {{y}} b"


# -- validation -------------------------------------------------------------


def test_golden_truth_validates(golden_source):
    assert validate_dependencies(parse(golden_source), PreludeRoles(*FIG1_ROLES)) == []


def test_golden_wrong_array_role(golden_source):
    violations = validate_dependencies(parse(golden_source), PreludeRoles(3, 2, 1))
    assert "calls-wrapper does not reference string-array" in [v.message for v in violations]


def _permutation_verdicts(program, truth):
    out = []
    for perm in itertools.permutations(truth):
        out.append((perm == tuple(truth), validate_dependencies(program, PreludeRoles(*perm)) == []))
    return out


@pytest.mark.parametrize("level", LEVELS)
def test_only_identity_permutation_validates(level):
    for seed in range(10):
        ob = obfuscate_source(seed_program(seed), ObfuscationConfig.preset(level, seed))
        truth = PreludeRoles.from_sidecar(ob.truth.roles).ids
        for is_identity, ok in _permutation_verdicts(ob.program, truth):
            assert ok == is_identity


def test_outside_reference_rejected(golden_source):
    src = golden_source.replace("return _0x1398fd;", "return helper(_0x1398fd);")
    violations = validate_dependencies(parse(src + "\nfunction helper(x){ return x; }\n"), PreludeRoles(*FIG1_ROLES))
    assert any(v.check == "c" for v in violations)


def test_allowed_global_not_flagged(golden_source):
    # parseInt is used by the rotate statement and must not count as an outside reference.
    assert "parseInt" in golden_source
    assert validate_dependencies(parse(golden_source), PreludeRoles(*FIG1_ROLES)) == []


# -- heuristic --------------------------------------------------------------


def test_heuristic_golden(golden_source):
    roles = heuristic_detect(parse(golden_source))
    assert roles.ids == FIG1_ROLES and roles.source == "heuristic"


VARIANTS = [
    ("while (!![])", "while (!false)"),
    ("while (!![])", "while (!!true)"),
    ("while (!![])", "while (true)"),
    ("while (!![])", "for (; !false; )"),
]


@pytest.mark.parametrize("old, new", VARIANTS)
def test_heuristic_minor_changes(golden_source, old, new):
    src = golden_source.replace(old, new)
    assert src != golden_source
    assert heuristic_detect(parse(src)).ids == FIG1_ROLES
    result = deobfuscate(src)
    assert result.report.success and result.report.literals_recovered == 2


def test_heuristic_array_alias(golden_source):
    src = golden_source.replace("_0x432d = function () {\n    return _0x1398fd;",
                              "var _alias = _0x1398fd;\n_0x432d = function () {\n    return _alias;")
    assert "_alias" in src
    assert heuristic_detect(parse(src)).ids == FIG1_ROLES
    assert deobfuscate(src).report.literals_recovered == 2


def test_heuristic_not_found_without_string_array():
    with pytest.raises(NotFound):
        heuristic_detect(parse("function f(){ return [1, 2, 3]; } f();"))


def test_heuristic_ambiguous_is_not_found(golden_source):
    program = parse(golden_source)
    dup = print_program(type(program)("Program", program.children[:1]))
    with pytest.raises(NotFound):
        heuristic_detect(parse(golden_source + "\n" + dup.replace("_0x432d", "_0xdup")))


@pytest.mark.parametrize("level", LEVELS)
def test_heuristic_matches_truth(level):
    for seed in range(15):
        ob = obfuscate_source(seed_program(seed), ObfuscationConfig.preset(level, seed))
        assert heuristic_detect(ob.program).ids == PreludeRoles.from_sidecar(ob.truth.roles).ids


# -- orchestration ------------------------------------------------------------


def _mock_client(default=None, responses=None):
    return LlmClient(LlmClientConfig(endpoint="mock:", max_retries=0), MockTransport(responses or {}, default))


def test_detect_sidecar(tmp_path, golden_source):
    path = tmp_path / "roles.json"
    path.write_text(json.dumps(PreludeRoles(*FIG1_ROLES).to_sidecar()))
    roles = detect(parse(golden_source), Backend.parse(f"sidecar:{path}"))
    assert roles.ids == FIG1_ROLES and roles.source == "sidecar"


def test_detect_llm_paper_reply():
    program, _, _ = prompt_example()
    roles = detect(program, Backend.parse("llm"), client=_mock_client(PAPER_REPLY))
    assert roles.ids == (4, 3, 1) and roles.source == "llm"


def test_detect_llm_keyed_by_prompt_digest():
    program, _, _ = prompt_example()
    digest = prompt_digest(build_prompt(annotate(program)))
    client = _mock_client(None, {digest: PAPER_REPLY})
    assert detect(program, Backend.parse("llm"), client=client).source == "llm"


def test_detect_llm_garbage_falls_back(golden_source):
    program = parse(golden_source)
    roles = detect(program, Backend.parse("llm"), client=_mock_client("no idea, sorry"))
    assert roles.source == "heuristic" and roles.ids == heuristic_detect(program).ids


def test_detect_llm_invalid_roles_fall_back(golden_source):
    reply = PreludeRoles(2, 0, 1).render()
    roles = detect(parse(golden_source), Backend.parse("llm"), client=_mock_client(reply))
    assert roles.source == "heuristic" and roles.ids == FIG1_ROLES


def test_detect_fails_when_nothing_found():
    with pytest.raises(DetectionFailed) as err:
        detect(parse("console.log('hi');"), Backend.parse("heuristic"))
    assert err.value.reason == "detection"


def test_detect_reports_validation_failure(tmp_path):
    program = parse("function a(){ return ['x']; }\nfunction b(){ return 1; }\nc();\n")
    path = tmp_path / "roles.json"
    path.write_text(json.dumps({"string_array": 0, "calls_wrapper": 1, "rotate": 2}))
    with pytest.raises(DetectionFailed) as err:
        detect(program, Backend.parse(f"sidecar:{path}"))
    assert err.value.reason == "validation"


def test_backend_parse_rejects_unknown():
    with pytest.raises(ValueError):
        Backend.parse("magic")


def test_over_long_prompt_is_rejected(golden_source):
    client = LlmClient(LlmClientConfig(endpoint="mock:", max_retries=0, max_prompt_chars=100), MockTransport({}, PAPER_REPLY))
    roles = detect(parse(golden_source), Backend.parse("llm"), client=client)
    assert roles.source == "heuristic"


def test_llm_config_validation():
    with pytest.raises(ValueError):
        LlmClientConfig(timeout_secs=0)
    with pytest.raises(ValueError):
        LlmClientConfig(max_retries=-1)
