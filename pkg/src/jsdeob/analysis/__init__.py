"""Scopes, write census, control-flow graphs and the worklist solver."""

from .census import AssignmentCensus, census
from .cfg import BasicBlock, Cfg, build_cfg
from .scopes import Binding, Scope, ScopeInfo, resolve_scopes
from .solver import IterationBudgetExceeded, MonotonicityViolation, Solution, worklist_solve

__all__ = [
    "AssignmentCensus",
    "BasicBlock",
    "Binding",
    "Cfg",
    "IterationBudgetExceeded",
    "MonotonicityViolation",
    "Scope",
    "ScopeInfo",
    "Solution",
    "build_cfg",
    "census",
    "resolve_scopes",
    "worklist_solve",
]
