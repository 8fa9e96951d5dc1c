"""q-terms, canonical forms and decision procedures for finite-valued logics.

Submodules: term, semantics, hnf, canon, logics, corpus, algebra, power, cli.
"""
from .canon import NormalForm, decide_valid, export_dot, full_normalize
from .hnf import hnf_normalize
from .logics import LogicSpec, builtin, decide, resolve_logic, translate
from .semantics import equiv, models
from .term import App, Const, ParseError, Permutation, Q, Term, Var, parse, to_str

__version__ = "0.1.0"

__all__ = [
    "App", "Const", "LogicSpec", "NormalForm", "ParseError", "Permutation", "Q", "Term", "Var",
    "builtin", "decide", "decide_valid", "equiv", "export_dot", "full_normalize",
    "hnf_normalize", "models", "parse", "resolve_logic", "to_str", "translate",
]
