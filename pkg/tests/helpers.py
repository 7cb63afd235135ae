from __future__ import annotations

import re

from jsdeob.fixtures import ObfuscationConfig, obfuscate_source
from jsdeob.frontend import parse, print_program, print_statement


def hello_prelude(fetch_name: str = "getString", index: int = 438, rng_seed: int = 5) -> str:
    """Prelude text (array, rotate, fetch) where ``fetch_name(index)`` is 'Hello World!'."""
    probe = obfuscate_source("x('Hello World!');\n", ObfuscationConfig(offset=0, rng_seed=rng_seed))
    position = probe.truth.table_post_rotation.index("Hello World!")
    ob = obfuscate_source("x('Hello World!');\n", ObfuscationConfig(offset=index - position, rng_seed=rng_seed))
    fetch = ob.program.children[2].name
    text = "".join(print_statement(s) for s in ob.program.children[:3])
    return re.sub(rf"\b{re.escape(fetch)}\b", fetch_name, text)


def canonical(source: str) -> str:
    """Printed form of ``source``; equal strings mean equal programs modulo layout and quoting."""
    return print_program(parse(source))


def squash(text: str) -> str:
    return re.sub(r"\s+", "", text)


def rewrite_snippet(snippet: str, **options):
    """Run the rewrite pass over ``snippet`` preceded by the getString prelude."""
    from jsdeob.deprop import PassOptions, run_pass
    from jsdeob.sandbox import load

    program = parse(hello_prelude() + snippet)
    ctx = load(program.children[:3])
    return run_pass(program, [0, 2, 1], ctx, PassOptions(**options))


# Closed expressions over numbers and strings, as source text.
def closed_expressions():
    from hypothesis import strategies as st

    numbers = st.one_of(
        st.integers(min_value=0, max_value=2**40).map(str),
        st.integers(min_value=0, max_value=0xFFFFFF).map(hex),
        st.floats(min_value=0, max_value=1e6, allow_nan=False).map(repr),
        st.sampled_from(["0", "1", "0.5", "1e21", "NaN", "Infinity", "undefined"]),
    )
    strings = st.text(alphabet="ab01 .-x%", max_size=5).map(lambda s: "'" + s + "'")
    leaves = st.one_of(numbers, strings, st.sampled_from(["true", "false", "null"]))
    unary = st.sampled_from(["-", "+", "!", "~", "typeof "])
    binary = st.sampled_from(["+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "===", "!==",
                              "&", "|", "^", "<<", ">>", ">>>", "&&", "||"])

    def extend(inner):
        return st.one_of(
            st.tuples(unary, inner).map(lambda t: f"{t[0]}({t[1]})"),
            st.tuples(inner, binary, inner).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
            st.tuples(inner, inner, inner).map(lambda t: f"({t[0]}) ? ({t[1]}) : ({t[2]})"),
        )

    return st.recursive(leaves, extend, max_leaves=8)
