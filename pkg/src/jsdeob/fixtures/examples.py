"""Small named fixtures: the Hello-World layouts used by the prompt and tests."""

from __future__ import annotations

from ..frontend.nodes import Node
from ..frontend.parser import parse
from ..frontend.printer import print_program
from .obfuscator import ObfuscationConfig, Obfuscated, obfuscate_source

HELLO_WORLD = "function hi() {\n  console.log('Hello World!');\n}\nhi();\n"


def simple_hello(offset: int = 437, rng_seed: int = 3) -> Obfuscated:
    """Hello World with a plain fetch function at ``offset`` and a rotated table."""
    return obfuscate_source(HELLO_WORLD, ObfuscationConfig(offset=offset, rotate=True, rng_seed=rng_seed))


def prompt_example(rng_seed: int = 11) -> tuple[Node, str, dict[str, int]]:
    """A five-statement program laid out as alias, rotate, call, fetch, array.

    Returns the program, its printed text and the roles by statement index
    (string array 4, rotate 1, calls wrapper 3).
    """
    ob = obfuscate_source("console.log('Hello, world!');\n", ObfuscationConfig(alias_count=0, rng_seed=rng_seed))
    array_stmt, rotate_stmt, fetch_stmt, call_stmt = ob.program.children
    alias = "_0x42f9c1"
    fetch_name = fetch_stmt.name
    alias_stmt = parse(f"var {alias} = {fetch_name};\n").children[0]
    # Route the call through the alias, as the worked example does.
    text = print_program(Node("Program", [alias_stmt, rotate_stmt, call_stmt, fetch_stmt, array_stmt]))
    text = text.replace(f"console[{fetch_name}(", f"console[{alias}(").replace(f"]({fetch_name}(", f"]({alias}(")
    program = parse(text)
    return program, text, {"string_array": 4, "calls_wrapper": 3, "rotate": 1}
