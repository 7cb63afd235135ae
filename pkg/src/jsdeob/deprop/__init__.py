"""Augmented constant propagation and literal rewriting."""

from __future__ import annotations

from .evaluate import DEFAULT_DEPTH_CAP, Evaluator, eval_abstract
from .inline import IArrow, IBinary, ICall, IConst, IMember, IObject, IParam, IRef, IUnary, to_ast, to_inline
from .lattice import UNINIT, UNKNOWN, Const, Inlinable, PreludeRef, join, join_states, leq, states_leq
from .table import GlobalTable, build_global_table
from .transform import PassOptions, PassTimeout, RewriteReport, is_valid_identifier, member_to_dot, run_pass
