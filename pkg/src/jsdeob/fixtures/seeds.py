"""Random seed programs for corpus generation.

Programs only use features the sandbox supports and print through
``console.log`` so traces can be compared.  Functions always have more
than one statement, which keeps them out of the inliner's reach: the only
calls the deobfuscator can resolve are the ones the obfuscator inserted.
"""

from __future__ import annotations

import random

# Includes awkward cases: quotes, escapes, non-ASCII, reserved words,
# digit-leading text (parseInt-able), an empty string and identifier-like keys.
WORDS = (
    "alpha", "beta", "gamma", "delta", "Hello World!", "log", "status", "ready", "done",
    "error", "warning: low disk", "it's", 'say "hi"', "back\\slash", "line\nbreak", "tab\there",
    "naïve café", "日本語", "emoji \U0001F600", "for", "class", "x-y", "42 apples", "007",
    "", " ", "%", "%41", "a+b", "user@example.com", "/path/to/file", "null", "undefined",
    "true", "NaN", "length", "push", "0x1f", "1e3", "CamelCase", "snake_case",
)


def _js_string(s: str) -> str:
    out = []
    for ch in s:
        if ch in "\\'":
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    return "'" + "".join(out) + "'"


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def s(self) -> str:
        return _js_string(self.rng.choice(WORDS))

    def n(self, hi: int = 20) -> int:
        return self.rng.randint(0, hi)

    def item(self, i: int) -> str:
        kind = self.rng.randrange(10)
        s, n = self.s, self.n
        if kind == 0:
            return (f"function greet{i}(a, b) {{\n  var r = a + {s()} + b;\n  console.log({s()}, r);\n"
                    f"  return r;\n}}\nconsole.log(greet{i}({s()}, {n()}));\n")
        if kind == 1:
            return (f"var arr{i} = [{s()}, {s()}, {s()}];\n"
                    f"for (var i{i} = 0; i{i} < arr{i}.length; i{i}++) {{\n  console.log(arr{i}[i{i}] + {s()});\n}}\n")
        if kind == 2:
            return (f"var obj{i} = {{first: {s()}, 'second': {n()}, third: {{inner: {s()}}}}};\n"
                    f"console.log(obj{i}.first, obj{i}['second'], obj{i}.third.inner);\n")
        if kind == 3:
            return (f"var v{i} = {n()};\nif (v{i} > {n()}) {{\n  console.log({s()});\n}} else {{\n"
                    f"  console.log({s()}, v{i});\n}}\n")
        if kind == 4:
            return (f"var c{i} = 0;\nwhile (c{i} < {2 + n(4)}) {{\n  c{i}++;\n  if (c{i} % 2) {{\n    continue;\n  }}\n"
                    f"  console.log({s()} + c{i});\n}}\n")
        if kind == 5:
            return (f"try {{\n  console.log({s()});\n  throw {s()};\n}} catch (e{i}) {{\n"
                    f"  console.log({s()}, e{i});\n}}\n")
        if kind == 6:
            return (f"var s{i} = {s()};\nconsole.log(s{i}.length, s{i}.charAt(0), s{i}.indexOf({s()}), "
                    f"s{i}.slice(1, 3));\n")
        if kind == 7:
            return (f"var f{i} = function (x) {{\n  var y = x + {s()};\n  return y;\n}};\n"
                    f"console.log(f{i}({s()}), {n()} > {n()} ? {s()} : {s()});\n")
        if kind == 8:
            return (f"var parts{i} = [];\nparts{i}.push({s()});\nparts{i}.push({s()});\n"
                    f"console.log(parts{i}.join({s()}), parts{i}.length);\n")
        return (f"function count{i}(limit) {{\n  var out = '';\n  do {{\n    out = out + {s()};\n"
                f"    limit = limit - 1;\n  }} while (limit > 0);\n  return out;\n}}\n"
                f"console.log(count{i}({n(3) + 1}), typeof {s()} === 'string' && {s()});\n")


def seed_program(seed: int, items: tuple[int, int] = (2, 6)) -> str:
    """A deterministic random program for ``seed``."""
    rng = random.Random(seed)
    gen = _Gen(rng)
    return "".join(gen.item(i) for i in range(rng.randint(*items)))


def seed_programs(count: int, base_seed: int = 0) -> list[tuple[str, str]]:
    """``count`` named seed programs: ``[(name, source), ...]``."""
    return [(f"seed{i:04d}", seed_program(base_seed * 1_000_003 + i)) for i in range(count)]
