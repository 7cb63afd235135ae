"""A miniature string obfuscator in the style of Obfuscator.IO, with ground truth.

Output layout: string-array function, rotate IIFE, fetch function, then
any chained wrappers, aliases and the object wrapper, then the program
with every string literal replaced by a recovery expression.
"""

from __future__ import annotations

import base64
import math
import random
import re
from dataclasses import asdict, dataclass, field
from string import Template

from ..frontend.lexer import ParseError
from ..frontend.nodes import Node, SourceSpan, rebuild, walk
from ..frontend.parser import parse, parse_expression
from ..frontend.printer import print_program

LEVELS = ("default", "low", "medium", "high")

# Custom base64 alphabet (lowercase first), as used by Obfuscator.IO's decoder.
B64_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+/"
_STD_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/"
_TO_CUSTOM = str.maketrans(_STD_ALPHABET, B64_ALPHABET)


class UnsupportedInput(ValueError):
    pass


@dataclass(frozen=True)
class ObfuscationConfig:
    offset: int | None = None  # None: 400 plus a seeded random amount
    rotate: bool = True
    wrapper_depth: int = 0
    alias_count: int = 0
    object_wrapper: bool = False
    encoding: str = "none"  # none | base64
    rng_seed: int = 0
    level: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.wrapper_depth <= 3:
            raise ValueError("wrapper_depth must be in 0..3")
        if not 0 <= self.alias_count <= 3:
            raise ValueError("alias_count must be in 0..3")
        if self.encoding not in ("none", "base64"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.offset is not None and self.offset < 0:
            raise ValueError("offset must be non-negative")

    @classmethod
    def preset(cls, level: str, rng_seed: int = 0) -> ObfuscationConfig:
        if level == "default":
            return cls(rng_seed=rng_seed, level=level)
        if level == "low":
            return cls(wrapper_depth=1, alias_count=1, rng_seed=rng_seed, level=level)
        if level == "medium":
            return cls(wrapper_depth=2, alias_count=1, object_wrapper=True, rng_seed=rng_seed, level=level)
        if level == "high":
            return cls(wrapper_depth=3, alias_count=2, object_wrapper=True, encoding="base64",
                       rng_seed=rng_seed, level=level)
        raise ValueError(f"unknown level {level!r}; expected one of {', '.join(LEVELS)}")


@dataclass
class GroundTruth:
    roles: dict[str, int]
    original_strings: list[str]
    table_pre_rotation: list[str]
    table_post_rotation: list[str]
    rotation_count: int
    offset: int
    expected_recoveries: list[dict] = field(default_factory=list)  # {"span": {...}, "string": s}
    encoding: str = "none"

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> GroundTruth:
        return cls(**data)

    def recoveries(self) -> list[tuple[SourceSpan, str]]:
        return [(SourceSpan.from_json(r["span"]), r["string"]) for r in self.expected_recoveries]


@dataclass
class Obfuscated:
    program: Node
    text: str
    truth: GroundTruth


# -- templates ---------------------------------------------------------------

_ARRAY = Template("""\
function $A() {
  var $t = [$entries];
  $A = function () {
    return $t;
  };
  return $A();
}
""")

_FETCH = Template("""\
function $W($i, $k) {
  var $t = $A();
  return $W = function ($i, $k) {
    $i = $i - $off;
    var $v = $t[$i];
    return $v;
  }, $W($i, $k);
}
""")

_FETCH_B64 = Template("""\
function $W($i, $k) {
  var $t = $A();
  return $W = function ($i, $k) {
    $i = $i - $off;
    var $s = $t[$i];
    var $al = '$alphabet';
    var $hx = '0123456789abcdef';
    var $o = '', $bc = 0, $bs = 0, $b, $x = 0, $p = '';
    for (; $b = $s.charAt($x++);) {
      $b = $al.indexOf($b);
      if (~$b) {
        $bs = $bc % 4 ? $bs * 64 + $b : $b;
        if ($bc++ % 4) $o += String.fromCharCode(255 & $bs >> (-2 * $bc & 6));
      }
    }
    for (var $j = 0; $j < $o.length; $j++) {
      var $c = $o.charCodeAt($j);
      $p += '%' + $hx.charAt($c >> 4) + $hx.charAt($c & 15);
    }
    return decodeURIComponent($p);
  }, $W($i, $k);
}
""")

_ROTATE = Template("""\
(function ($a, $tg) {
  var $arr = $a();
  while (!![]) {
    try {
      var $v = $expr;
      if ($v === $tg) break;
      else $arr['push']($arr['shift']());
    } catch ($e) {
      $arr['push']($arr['shift']());
    }
  }
}($A, $target));
""")


# -- helpers -----------------------------------------------------------------

def js_parse_int(s: object) -> float:
    """Independent parseInt for decimal strings (used to simulate the checksum)."""
    if not isinstance(s, str):
        return math.nan
    m = re.match(r"[\s﻿\xa0]*([+-]?)(\d+)", s)
    if not m:
        return math.nan
    v = float(int(m.group(2)))
    return -v if m.group(1) == "-" else v


def b64_encode(s: str) -> str:
    return base64.b64encode(s.encode("utf-8")).decode("ascii").rstrip("=").translate(_TO_CUSTOM)


def b64_decode(s: str) -> str:
    std = s.translate(str.maketrans(B64_ALPHABET, _STD_ALPHABET))
    return base64.b64decode(std + "=" * (-len(std) % 4)).decode("utf-8")


def _hex(n: int) -> str:
    return f"-0x{-n:x}" if n < 0 else f"0x{n:x}"


def _quote(s: str) -> str:
    out = []
    for ch in s:
        if ch in "\\'":
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ord(ch) < 0x20 or ord(ch) in (0x2028, 0x2029):
            out.append(f"\\x{ord(ch):02x}" if ord(ch) < 0x100 else f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "'" + "".join(out) + "'"


def _statements(text: str) -> list[Node]:
    return parse(text).children


def _sum_expr(rng: random.Random, value: int) -> str:
    """An arithmetic spelling of ``value`` in the style of ``0x7*-0x11ff9 + ...``."""
    a = rng.randint(2, 0x1f)
    b = rng.randint(0x100, 0x1ffff) * rng.choice((1, -1))
    c = value - a * b
    return f"{_hex(a)} * {_hex(b)} + {_hex(c)}" if c >= 0 else f"{_hex(a)} * {_hex(b)} - {_hex(-c)}"


def _rotate_left(table: list[str], k: int) -> list[str]:
    if not table:
        return list(table)
    k %= len(table)
    return table[k:] + table[:k]


class _Names:
    def __init__(self, rng: random.Random, taken: set[str]):
        self.rng = rng
        self.taken = set(taken)

    def __call__(self) -> str:
        while True:
            name = "_0x" + format(self.rng.randrange(0x1000, 0xfffff), "x")
            if name not in self.taken:
                self.taken.add(name)
                return name

    def key(self) -> str:
        letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        while True:
            k = "".join(self.rng.choice(letters) for _ in range(5))
            if k not in self.taken:
                self.taken.add(k)
                return k


# -- checksum ----------------------------------------------------------------

@dataclass
class _Checksum:
    indices: list[int]  # positions in the post-rotation table
    divisors: list[int]
    signs: list[int]
    product: bool  # last two terms multiplied instead of added

    def value(self, table: list[str], offset: int) -> float:
        terms = []
        for idx, c, s in zip(self.indices, self.divisors, self.signs):
            entry = table[idx] if 0 <= idx < len(table) else None
            terms.append(s * js_parse_int(entry) / c)
        if self.product:
            return sum(terms[:-2]) + terms[-2] * terms[-1]
        return sum(terms)

    def render(self, fetch: str, offset: int) -> str:
        parts = []
        for idx, c, s in zip(self.indices, self.divisors, self.signs):
            term = f"parseInt({fetch}({_hex(idx + offset)})) / {_hex(c)}"
            parts.append(("-" if s < 0 else "") + term)
        if self.product:
            head = " + ".join(parts[:-2])
            tail = f"({parts[-2]}) * ({parts[-1]})"
            return f"{head} + {tail}" if head else tail
        return " + ".join(parts)


# -- the obfuscator ----------------------------------------------------------

def _collect_strings(program: Node) -> list[str]:
    """String literal values and dotted property names in source order (object keys excluded)."""
    keys = {id(p.children[0]) for p in walk(program) if p.kind == "Property"}
    out = []
    for n in walk(program):
        if n.kind == "StringLit" and id(n) not in keys:
            out.append(n.value)
        elif n.kind == "Member" and not n.computed:
            out.append(n.children[1].name)
    return out


def _identifiers(program: Node) -> set[str]:
    return {n.name for n in walk(program) if n.name and n.kind in ("Identifier", "FunctionDecl", "FunctionExpr")}


def obfuscate(program: Node, config: ObfuscationConfig) -> Obfuscated:
    """Obfuscate every string literal of ``program``; deterministic in ``config``."""
    for n in walk(program):
        if n.kind in ("This", "New"):
            raise UnsupportedInput(f"{n.kind} is not supported by the fixture obfuscator")
    rng = random.Random(config.rng_seed)
    names = _Names(rng, _identifiers(program))
    originals: list[str] = []
    for s in _collect_strings(program):
        if s not in originals:
            originals.append(s)

    drawn = 400 + rng.randrange(200)  # drawn either way so layouts do not depend on the offset
    offset = config.offset if config.offset is not None else drawn
    A, W = names(), names()

    for _attempt in range(200):
        n_decoys = rng.randint(8, 14)
        divisors = [rng.randint(1, 12) for _ in range(n_decoys)]
        quotients = [rng.randint(1, 99999) for _ in range(n_decoys)]
        decoys = []
        for c, m in zip(divisors, quotients):
            suffix = "".join(rng.choice("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ") for _ in range(rng.randint(4, 7)))
            decoys.append(f"{c * m}{suffix}")
        if len(set(decoys)) != n_decoys or set(decoys) & set(originals):
            continue
        post = originals + decoys
        rng.shuffle(post)
        n = len(post)
        k = rng.randrange(1, n) if config.rotate else 0
        pre = post[-k:] + post[:-k] if k else list(post)
        n_terms = rng.randint(4, min(6, n_decoys))
        chosen = rng.sample(range(n_decoys), n_terms)
        checksum = _Checksum(
            indices=[post.index(decoys[j]) for j in chosen],
            divisors=[divisors[j] for j in chosen],
            signs=[rng.choice((1, -1)) for _ in chosen],
            product=rng.random() < 0.5,
        )
        target = checksum.value(post, offset)
        if not target.is_integer():
            continue
        if all(checksum.value(_rotate_left(pre, r), offset) != target for r in range(k)):
            break
    else:  # pragma: no cover - astronomically unlikely
        raise UnsupportedInput("could not build a converging checksum")
    target_int = int(target)

    encode = b64_encode if config.encoding == "base64" else (lambda s: s)
    entries = ", ".join(_quote(encode(s)) for s in pre)
    v = {name: names() for name in ("t", "i", "k", "v", "s", "al", "hx", "o", "bc", "bs", "b", "x", "p", "j", "c")}
    array_stmt = _statements(_ARRAY.substitute(A=A, t=v["t"], entries=entries))[0]
    fetch_template = _FETCH_B64 if config.encoding == "base64" else _FETCH
    fetch_stmt = _statements(fetch_template.substitute(
        A=A, W=W, off=_hex(offset), alphabet=B64_ALPHABET, **{k: v[k] for k in v}))[0]
    rv = {name: names() for name in ("a", "tg", "arr", "v", "e")}
    rotate_stmt = _statements(_ROTATE.substitute(
        A=A, target=_sum_expr(rng, target_int), expr=checksum.render(W, offset), **rv))[0]

    # Chained wrappers: each takes the index at some parameter position and
    # forwards ``index - K`` to the previous level.
    extra: list[Node] = []
    callee, callee_arity, callee_pos, shift = W, 2, 0, 0
    for level in range(config.wrapper_depth):
        name = names()
        arity = rng.randint(2, 4)
        pos = 0 if (config.object_wrapper and level == config.wrapper_depth - 1) else rng.randrange(arity)
        params = [names() for _ in range(arity)]
        K = rng.randint(-0x300, 0x300)
        args = []
        others = [p for i, p in enumerate(params) if i != pos]
        for i in range(callee_arity):
            if i == callee_pos:
                args.append(f"{params[pos]} - {_hex(K)}" if K >= 0 else f"{params[pos]} - -{_hex(-K)}")
            else:
                args.append(rng.choice(others) if others else _hex(rng.randrange(0x400)))
        extra += _statements(f"function {name}({', '.join(params)}) {{\n  return {callee}({', '.join(args)});\n}}\n")
        callee, callee_arity, callee_pos, shift = name, arity, pos, shift + K
    for _ in range(config.alias_count):
        alias = names()
        extra += _statements(f"var {alias} = {callee};\n")
        callee = alias
    obj = keys = None
    if config.object_wrapper:
        obj = names()
        keys = {"call": names.key(), "add": names.key(), "sub": names.key()}
        f, x, a, b = names(), names(), names(), names()
        extra += _statements(
            f"var {obj} = {{\n"
            f"  '{keys['call']}': function ({f}, {x}) {{\n    return {f}({x});\n  }},\n"
            f"  '{keys['add']}': function ({a}, {b}) {{\n    return {a} + {b};\n  }},\n"
            f"  '{keys['sub']}': function ({a}, {b}) {{\n    return {a} - {b};\n  }}\n"
            f"}};\n")

    sites: list[tuple[Node, str]] = []

    def recovery(s: str, local: str | None) -> Node:
        index = post.index(s) + offset + shift
        fn = local or callee
        if obj is not None and rng.random() < 0.5:
            d = rng.randint(1, 0x200)
            if rng.random() < 0.5:
                inner = f"{obj}['{keys['add']}']({_hex(index - d)}, {_hex(d)})"
            else:
                inner = f"{obj}['{keys['sub']}']({_hex(index + d)}, {_hex(d)})"
            text = f"{obj}['{keys['call']}']({fn}, {inner})"
        elif callee == W:
            text = f"{fn}({_hex(index)})"
        else:
            args = [_hex(rng.randrange(0x400)) for _ in range(callee_arity)]
            args[callee_pos] = _hex(index)
            text = f"{fn}({', '.join(args)})"
        node = parse_expression(text)
        sites.append((node, s))
        return node

    def transform(node: Node, local: str | None) -> Node:
        def fn(n: Node) -> Node | None:
            if n.kind == "StringLit":
                return recovery(n.value, local)
            if n.kind == "Member" and not n.computed:
                obj_node = transform(n.children[0], local)
                return Node("Member", [obj_node, recovery(n.children[1].name, local)], computed=True)
            if n.kind == "Property":
                return Node("Property", [n.children[0], transform(n.children[1], local)])
            if n.kind in ("FunctionDecl", "FunctionExpr"):
                return _function(n)
            return None

        return rebuild(node, fn)

    def _function(fn_node: Node) -> Node:
        body = fn_node.children[-1]
        has_sites = any(
            c.kind == "StringLit" or (c.kind == "Member" and not c.computed)
            for c in walk(body)
        )
        local = names() if (config.alias_count and has_sites) else None
        new_body = transform(body, local)
        stmts = list(new_body.children)
        if local is not None:
            stmts = _statements(f"var {local} = {callee};\n") + stmts
        return Node(fn_node.kind, [*fn_node.children[:-1], Node("Block", stmts)], name=fn_node.name)

    body = [transform(s, None) for s in program.children]
    out = Node("Program", [array_stmt, rotate_stmt, fetch_stmt, *extra, *body])
    text = print_program(out)

    # Locate each recovery site in the printed text by pre-order position.
    order = {id(node): i for i, node in enumerate(walk(out))}
    reparsed = list(walk(parse(text)))
    recoveries = []
    for node, s in sites:
        span = reparsed[order[id(node)]].span
        recoveries.append({"span": span.to_json(), "string": s})
    recoveries.sort(key=lambda r: r["span"]["byte_start"])

    truth = GroundTruth(
        roles={"string_array": 0, "calls_wrapper": 2, "rotate": 1},
        original_strings=originals,
        table_pre_rotation=pre,
        table_post_rotation=post,
        rotation_count=k,
        offset=offset,
        expected_recoveries=recoveries,
        encoding=config.encoding,
    )
    return Obfuscated(parse(text), text, truth)


def obfuscate_source(source: str, config: ObfuscationConfig) -> Obfuscated:
    try:
        program = parse(source)
    except ParseError as exc:
        raise UnsupportedInput(f"seed does not parse: {exc}") from exc
    return obfuscate(program, config)
