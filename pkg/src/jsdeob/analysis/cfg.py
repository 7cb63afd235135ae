"""Per-function control-flow graphs.

Blocks hold a list of evaluation items in execution order:

``("expr", e)``   evaluate expression ``e`` (expression statements, returns, throws)
``("decl", d)``   a VarDeclarator with an initializer
``("test", e)``   branch condition; the block ends with a two-way branch
``("catch", p)``  entry to a catch handler binding parameter ``p``

Nested function bodies are not part of the graph; each gets its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend.nodes import Node


@dataclass(eq=False)
class BasicBlock:
    block_id: int
    items: list[tuple[str, Node]] = field(default_factory=list)
    succs: list[int] = field(default_factory=list)
    preds: list[int] = field(default_factory=list)


@dataclass
class Cfg:
    function: Node
    blocks: dict[int, BasicBlock]
    entry: int
    exit: int

    def __len__(self) -> int:
        return len(self.blocks)

    def reverse_postorder(self) -> list[int]:
        seen: set[int] = set()
        order: list[int] = []
        stack: list[tuple[int, int]] = [(self.entry, 0)]
        seen.add(self.entry)
        while stack:
            bid, i = stack.pop()
            succs = self.blocks[bid].succs
            if i < len(succs):
                stack.append((bid, i + 1))
                nxt = succs[i]
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, 0))
            else:
                order.append(bid)
        order.reverse()
        return order

    def has_back_edge(self, src: int, dst: int) -> bool:
        rpo = {b: i for i, b in enumerate(self.reverse_postorder())}
        return dst in self.blocks[src].succs and rpo[dst] <= rpo[src]


class _Builder:
    def __init__(self, function: Node):
        self.function = function
        self.blocks: dict[int, BasicBlock] = {}
        self.entry = self.new()
        self.exit = self.new()
        self.cur = self.entry
        self.loops: list[tuple[int, int]] = []  # (continue target, break target)
        self.handlers: list[int] = []  # innermost active catch/finally head

    def new(self) -> int:
        bid = len(self.blocks)
        self.blocks[bid] = BasicBlock(bid)
        return bid

    def edge(self, a: int, b: int) -> None:
        if b not in self.blocks[a].succs:
            self.blocks[a].succs.append(b)
            self.blocks[b].preds.append(a)

    def add(self, kind: str, node: Node) -> None:
        if self.handlers:
            # Inside a try: each item is its own block so the handler sees
            # the state after every step.
            if self.blocks[self.cur].items:
                nxt = self.new()
                self.edge(self.cur, nxt)
                self.cur = nxt
            self.blocks[self.cur].items.append((kind, node))
            self.edge(self.cur, self.handlers[-1])
            nxt = self.new()
            self.edge(self.cur, nxt)
            self.cur = nxt
        else:
            self.blocks[self.cur].items.append((kind, node))

    def jump(self, target: int) -> None:
        self.edge(self.cur, target)
        self.cur = self.new()  # unreachable continuation

    def branch(self, test: Node) -> tuple[int, int]:
        self.add("test", test)
        t, f = self.new(), self.new()
        self.edge(self.cur, t)
        self.edge(self.cur, f)
        return t, f

    def stmts(self, stmts: list[Node]) -> None:
        for s in stmts:
            self.stmt(s)

    def stmt(self, s: Node) -> None:
        k = s.kind
        if k in ("FunctionDecl", "Empty"):
            return
        if k == "ExprStmt":
            self.add("expr", s.children[0])
        elif k == "VarDecl":
            for d in s.children:
                if len(d.children) > 1:
                    self.add("decl", d)
        elif k == "Return":
            if s.children:
                self.add("expr", s.children[0])
            self.jump(self.exit)
        elif k == "Throw":
            self.add("expr", s.children[0])
            self.jump(self.handlers[-1] if self.handlers else self.exit)
        elif k == "Block":
            self.stmts(s.children)
        elif k == "If":
            t, f = self.branch(s.children[0])
            join = self.new()
            self.cur = t
            self.stmt(s.children[1])
            self.edge(self.cur, join)
            self.cur = f
            if len(s.children) > 2:
                self.stmt(s.children[2])
            self.edge(self.cur, join)
            self.cur = join
        elif k == "While":
            self.loop(s.children[0], None, s.children[1], test_first=True)
        elif k == "DoWhile":
            self.loop(s.children[1], None, s.children[0], test_first=False)
        elif k == "For":
            init, test, update, body = s.children
            if init is not None:
                if init.kind == "VarDecl":
                    self.stmt(init)
                else:
                    self.add("expr", init)
            self.loop(test, update, body, test_first=True)
        elif k == "Break":
            self.jump(self.loops[-1][1])
        elif k == "Continue":
            self.jump(self.loops[-1][0])
        elif k == "TryCatch":
            self.try_catch(s)
        else:
            raise ValueError(f"unexpected statement {k}")

    def loop(self, test: Node | None, update: Node | None, body: Node, test_first: bool) -> None:
        head = self.new()
        after = self.new()
        self.edge(self.cur, head)
        if test_first:
            self.cur = head
            if test is not None:
                t, f = self.branch(test)
                self.edge(f, after)
                self.cur = t
            cont = self.new() if update is not None else head
            self.loops.append((cont, after))
            self.stmt(body)
            self.loops.pop()
            if update is not None:
                self.edge(self.cur, cont)
                self.cur = cont
                self.add("expr", update)
            self.edge(self.cur, head)
        else:
            cond = self.new()
            self.cur = head
            self.loops.append((cond, after))
            self.stmt(body)
            self.loops.pop()
            self.edge(self.cur, cond)
            self.cur = cond
            t, f = self.branch(test)
            self.edge(t, head)
            self.edge(f, after)
        self.cur = after

    def try_catch(self, s: Node) -> None:
        block, param, handler = s.children[:3]
        finalizer = s.children[3] if len(s.children) > 3 else None
        fin_head = self.new() if finalizer is not None else None
        catch_head = self.new() if handler is not None else None
        after = self.new()
        first_try = len(self.blocks)
        if catch_head is not None:
            self.edge(self.cur, catch_head)
        if fin_head is not None:
            self.edge(self.cur, fin_head)
        self.handlers.append(catch_head if catch_head is not None else fin_head)
        self.stmt(block)
        self.handlers.pop()
        self.edge(self.cur, fin_head if fin_head is not None else after)
        if catch_head is not None:
            self.cur = catch_head
            if fin_head is not None:
                self.handlers.append(fin_head)
            self.add("catch", param)
            self.stmt(handler)
            if fin_head is not None:
                self.handlers.pop()
            self.edge(self.cur, fin_head if fin_head is not None else after)
        if finalizer is not None:
            # The finalizer may run after any step of the try or catch.
            for bid in range(first_try, len(self.blocks)):
                if bid != fin_head:
                    self.edge(bid, fin_head)
            self.cur = fin_head
            self.stmt(finalizer)
            self.edge(self.cur, after)
            self.edge(self.cur, self.exit)
        self.cur = after

    def drop_empty(self) -> None:
        """Splice out empty pass-through blocks."""
        changed = True
        while changed:
            changed = False
            for bid in list(self.blocks):
                blk = self.blocks[bid]
                if bid in (self.entry, self.exit) or blk.items or len(blk.succs) != 1:
                    continue
                target = blk.succs[0]
                if target == bid:
                    continue
                tblk = self.blocks[target]
                tblk.preds.remove(bid)
                for p in blk.preds:
                    pblk = self.blocks[p]
                    pblk.succs = [target if x == bid else x for x in pblk.succs]
                    pblk.succs = list(dict.fromkeys(pblk.succs))
                    if p not in tblk.preds:
                        tblk.preds.append(p)
                del self.blocks[bid]
                changed = True

    def finish(self) -> Cfg:
        self.edge(self.cur, self.exit)
        self.drop_empty()
        cfg = Cfg(self.function, self.blocks, self.entry, self.exit)
        reachable = set(cfg.reverse_postorder())
        reachable.add(self.exit)
        blocks = {}
        for bid, blk in self.blocks.items():
            if bid in reachable:
                blk.preds = [p for p in blk.preds if p in reachable]
                blocks[bid] = blk
        cfg.blocks = blocks
        # An empty exit reached by plain fall-through from one block is that block.
        exit_blk = blocks[cfg.exit]
        if not exit_blk.items and len(exit_blk.preds) == 1:
            p = exit_blk.preds[0]
            if blocks[p].succs == [cfg.exit]:
                blocks[p].succs = []
                del blocks[cfg.exit]
                cfg.exit = p
        return cfg


def build_cfg(function: Node, statements: list[Node] | None = None) -> Cfg:
    """Build the CFG of a function node or of the Program's top level.

    ``statements`` overrides the statement list (used to skip prelude code).
    """
    b = _Builder(function)
    if statements is None:
        statements = function.children if function.kind == "Program" else function.body.children
    b.stmts(statements)
    return b.finish()
