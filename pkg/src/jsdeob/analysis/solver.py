"""Generic forward worklist solver over a :class:`Cfg`."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Generic, TypeVar

from .cfg import BasicBlock, Cfg

S = TypeVar("S")


class IterationBudgetExceeded(RuntimeError):
    pass


class MonotonicityViolation(RuntimeError):
    pass


@dataclass
class Solution(Generic[S]):
    inputs: dict[int, S]
    outputs: dict[int, S]
    visits: int


def worklist_solve(
    cfg: Cfg,
    transfer: Callable[[BasicBlock, S], S],
    join: Callable[[S, S], S],
    initial: S,
    budget: int | None = None,
    leq: Callable[[S, S], bool] | None = None,
) -> Solution[S]:
    """Compute the forward fixed point of ``transfer`` from ``initial`` at the entry.

    Blocks are processed in reverse postorder priority.  Unreached blocks have
    no entry in the result.  ``budget`` bounds block visits (default
    ``8 * len(cfg)``).  When ``leq`` is given every new output is checked to
    lie above the previous one.
    """
    if budget is None:
        budget = 8 * len(cfg)
    order = {bid: i for i, bid in enumerate(cfg.reverse_postorder())}
    inputs: dict[int, S] = {cfg.entry: initial}
    outputs: dict[int, S] = {}
    heap = [(order[cfg.entry], cfg.entry)]
    queued = {cfg.entry}
    visits = 0
    while heap:
        _, bid = heapq.heappop(heap)
        queued.discard(bid)
        visits += 1
        if visits > budget:
            raise IterationBudgetExceeded(f"more than {budget} block visits")
        block = cfg.blocks[bid]
        out = transfer(block, inputs[bid])
        old = outputs.get(bid)
        if old is not None:
            if leq is not None and not leq(old, out):
                raise MonotonicityViolation(f"block {bid} moved down the lattice")
            if old == out:
                continue
        outputs[bid] = out
        for succ in block.succs:
            prev = inputs.get(succ)
            new = out if prev is None else join(prev, out)
            if prev is None or new != prev:
                inputs[succ] = new
                if succ not in queued:
                    queued.add(succ)
                    heapq.heappush(heap, (order[succ], succ))
    return Solution(inputs, outputs, visits)
