"""Finite tabular logics and their translation into nCL.

Truth values of an n-valued logic are identified with e_1..e_n, the i-th
smallest value becoming e_i, so the top value is e_n. Truth tables are
stored row-major with the first argument varying slowest.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .canon import decide_valid
from .semantics import _blocks, _check_vars, _dtype, _joint_vars, _select, models
from .term import _IDENT, _RESERVED, Const, Q, Term, Var, check_dimension, parse, substitute, to_str

__all__ = [
    "LogicSpec", "SynthesizedConnective", "TranslationError", "LogicFileError",
    "BUILTIN_FAMILIES", "builtin", "resolve_logic", "synthesize_hnf", "synthesized",
    "translate", "matrix_table", "matrix_value", "matrix_countermodel",
    "matrix_models", "decide", "ConservativityRow", "check_conservativity",
    "REFERENCE_FORMS", "reference_forms", "parse_logic", "load_logic", "dump_logic",
]


class TranslationError(ValueError):
    pass


class LogicFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class LogicSpec:
    """A logical matrix (n, e_designated) with tabulated connectives.

    ``connectives`` maps a name to ``(arity, table)``; tables hold e-indices.
    """

    name: str
    n: int
    designated: int
    connectives: Mapping[str, tuple[int, tuple[int, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        check_dimension(self.n)
        if not 1 <= self.designated <= self.n:
            raise ValueError(f"designated value {self.designated} outside 1..{self.n}")
        clean = {}
        for name, (arity, table) in dict(self.connectives).items():
            if not _IDENT.fullmatch(name) or _RESERVED.fullmatch(name):
                raise ValueError(f"invalid connective name {name!r}")
            if arity < 1:
                raise ValueError(f"connective {name!r}: arity must be >= 1")
            table = tuple(int(v) for v in table)
            if len(table) != self.n ** arity:
                raise ValueError(
                    f"connective {name!r}: table has {len(table)} entries, expected {self.n ** arity}")
            if any(not 1 <= v <= self.n for v in table):
                raise ValueError(f"connective {name!r}: table entries must lie in 1..{self.n}")
            clean[name] = (arity, table)
        object.__setattr__(self, "connectives", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.name, self.n, self.designated, tuple(self.connectives.items())))

    @property
    def signature(self) -> dict[str, int]:
        return {name: arity for name, (arity, _) in self.connectives.items()}

    def arity(self, name: str) -> int:
        return self.connectives[name][0]

    def table(self, name: str) -> tuple[int, ...]:
        return self.connectives[name][1]

    def parse(self, text: str) -> Term:
        return parse(text, self.n, self.signature)


@dataclass(frozen=True)
class SynthesizedConnective:
    name: str
    arity: int
    hnf: Term

    def __str__(self):
        return f"{self.name}° = {to_str(self.hnf)}"


# --------------------------------------------------------------------------
# built-in logics

BUILTIN_FAMILIES = ("cl", "lukasiewicz", "godel", "post")


def _tabulate(n: int, arity: int, fn) -> tuple[int, ...]:
    values = [Fraction(i, n - 1) for i in range(n)]
    index = {v: i + 1 for i, v in enumerate(values)}
    return tuple(index[fn(*args)] for args in itertools.product(values, repeat=arity))


def builtin(family: str, n: int) -> LogicSpec:
    """CL (n=2), Łukasiewicz, Gödel or Post logic with n truth values.

    Tables are computed from the arithmetic definitions over 0, 1/(n-1), .., 1.
    """
    family = family.lower()
    check_dimension(n)
    if family == "cl":
        if n != 2:
            raise ValueError("classical logic is 2-valued")
        conns = {"and": (2, (1, 1, 1, 2)), "or": (2, (1, 2, 2, 2)), "not": (1, (2, 1))}
        return LogicSpec("CL", 2, 2, conns)
    step = Fraction(1, n - 1)
    conns = {
        "and": (2, _tabulate(n, 2, min)),
        "or": (2, _tabulate(n, 2, max)),
    }
    if family == "lukasiewicz":
        conns["not"] = (1, _tabulate(n, 1, lambda a: 1 - a))
        conns["imp"] = (2, _tabulate(n, 2, lambda a, b: min(Fraction(1), 1 - a + b)))
        name = f"L{n}"
    elif family == "godel":
        conns["not"] = (1, _tabulate(n, 1, lambda a: Fraction(1) if a == 0 else Fraction(0)))
        conns["imp"] = (2, _tabulate(n, 2, lambda a, b: Fraction(1) if a <= b else b))
        name = f"G{n}"
    elif family == "post":
        conns["not"] = (1, _tabulate(n, 1, lambda a: a - step if a != 0 else Fraction(1)))
        name = f"P{n}"
    else:
        raise ValueError(f"unknown logic family {family!r}; expected one of {BUILTIN_FAMILIES}")
    return LogicSpec(name, n, n, conns)


def resolve_logic(spec: str) -> LogicSpec:
    """``builtin:NAME:N`` or a path to a logic file."""
    if spec.startswith("builtin:"):
        parts = spec.split(":")
        if len(parts) != 3 or not parts[2].isdigit():
            raise ValueError(f"expected builtin:NAME:N, got {spec!r}")
        return builtin(parts[1], int(parts[2]))
    return load_logic(spec)


# Hand-simplified translations of the built-in connectives, used as a
# cross-check of synthesis (x1, x2 stand for the first and second argument).
REFERENCE_FORMS: dict[tuple[str, int], dict[str, str]] = {
    ("cl", 2): {
        "or": "q(x1, x2, e2)",
        "and": "q(x1, e1, x2)",
        "not": "q(x1, e2, e1)",
    },
    ("godel", 3): {
        "or": "q(x1, x2, q(x2, e2, e2, e3), e3)",
        "and": "q(x1, e1, q(x2, e1, e2, e2), x2)",
        "not": "q(x1, e3, e1, e1)",
        "imp": "q(x1, e3, q(x2, e1, e3, e3), x2)",
    },
    ("lukasiewicz", 3): {
        "or": "q(x1, x2, q(x2, e2, e2, e3), e3)",
        "and": "q(x1, e1, q(x2, e1, e2, e2), x2)",
        "not": "q(x1, e3, e2, e1)",
        "imp": "q(x1, e3, q(x2, e2, e3, e3), x2)",
    },
    ("post", 3): {
        "or": "q(x1, x2, q(x2, e2, e2, e3), e3)",
        "and": "q(x1, e1, q(x2, e1, e2, e2), x2)",
        "not": "q(x1, e3, e1, e2)",
    },
}


def reference_forms(family: str, n: int) -> dict[str, Term]:
    return {name: parse(text, n) for name, text in REFERENCE_FORMS[(family.lower(), n)].items()}


# --------------------------------------------------------------------------
# synthesis and translation

def synthesize_hnf(table: Sequence[int], k: int, n: int, name: str = "f") -> SynthesizedConnective:
    """The canonical hnf over x1..xk computing ``table``, by recursion on the first argument."""
    check_dimension(n)
    table = tuple(int(v) for v in table)
    if k < 0 or len(table) != n ** k:
        raise ValueError(f"table of length {len(table)} does not fit arity {k} with n={n}")
    if any(not 1 <= v <= n for v in table):
        raise ValueError(f"table entries must lie in 1..{n}")

    def build(lo: int, arity: int, var: int) -> Term:
        if arity == 0:
            return Const(table[lo])
        block = n ** (arity - 1)
        return Q(Var(var), [build(lo + i * block, arity - 1, var + 1) for i in range(n)])

    return SynthesizedConnective(name, k, build(0, k, 1))


_synth_cache: dict[tuple, Term] = {}


def synthesized(L: LogicSpec) -> dict[str, Term]:
    """Synthesized hnf for every connective of ``L``."""
    out = {}
    for name, (arity, table) in L.connectives.items():
        key = (L.n, arity, table)
        t = _synth_cache.get(key)
        if t is None:
            t = _synth_cache[key] = synthesize_hnf(table, arity, L.n, name).hnf
        out[name] = t
    return out


def translate(phi: Term, L: LogicSpec) -> Term:
    """Translate a formula of ``L`` into a pure q-term of dimension ``L.n``."""
    forms = synthesized(L)
    memo: dict[Term, Term] = {}

    def go(u):
        r = memo.get(u)
        if r is not None:
            return r
        if isinstance(u, Var):
            r = u
        elif isinstance(u, Const):
            if u.index > L.n:
                raise TranslationError(f"constant e{u.index} out of range for n={L.n}")
            r = u
        elif isinstance(u, Q):
            if u.n != L.n:
                raise TranslationError(f"q node of dimension {u.n} in a logic with n={L.n}")
            r = Q(go(u.head), [go(a) for a in u.args])
        else:
            if u.name not in forms:
                raise TranslationError(f"unknown connective {u.name!r} for logic {L.name}")
            if len(u.args) != L.arity(u.name):
                raise TranslationError(
                    f"connective {u.name!r} has arity {L.arity(u.name)}, got {len(u.args)} arguments")
            r = substitute(forms[u.name], {i: go(a) for i, a in enumerate(u.args, 1)})
        memo[u] = r
        return r

    return go(phi)


# --------------------------------------------------------------------------
# direct matrix semantics (independent of translation)

def _matrix_block(terms, L: LogicSpec, leaves, width):
    n = L.n
    arrays = {name: np.asarray(table, dtype=_dtype(n)).reshape((n,) * arity)
              for name, (arity, table) in L.connectives.items()}
    memo: dict[Term, np.ndarray] = {}

    def go(u):
        v = memo.get(u)
        if v is not None:
            return v
        if isinstance(u, Const):
            v = np.full(width, u.index, dtype=_dtype(n))
        elif isinstance(u, Var):
            v = leaves[u.index]
        elif isinstance(u, Q):
            v = _select(go(u.head), [go(a) for a in u.args])
        else:
            if u.name not in arrays or len(u.args) != L.arity(u.name):
                raise TranslationError(f"connective {u.name!r} not declared with this arity in {L.name}")
            v = arrays[u.name][tuple(go(a) - 1 for a in u.args)]
        memo[u] = v
        return v

    for t in terms:
        stack = [(t, False)]
        while stack:
            u, done = stack.pop()
            if u in memo:
                continue
            kids = () if isinstance(u, (Var, Const)) else ((u.head,) + u.args if isinstance(u, Q) else u.args)
            if done or not kids:
                go(u)
            else:
                stack.append((u, True))
                stack.extend((c, False) for c in kids)
    return [memo[t] for t in terms]


def matrix_table(phi: Term, L: LogicSpec, var_indices: Sequence[int] | None = None) -> np.ndarray:
    """Values of ``phi`` in the matrix of ``L`` on every environment over ``var_indices``."""
    if var_indices is None:
        var_indices = _joint_vars([phi])
    _check_vars(len(var_indices))
    return np.concatenate([_matrix_block([phi], L, lv, w)[0] for lv, w in _blocks(var_indices, L.n)])


def matrix_value(phi: Term, L: LogicSpec, rho: Mapping[int, int]) -> int:
    leaves = {k: np.array([v], dtype=_dtype(L.n)) for k, v in rho.items()}
    missing = set(_joint_vars([phi])) - set(leaves)
    if missing:
        raise KeyError(f"unbound variable x{min(missing)}")
    return int(_matrix_block([phi], L, leaves, 1)[0][0])


def matrix_countermodel(L: LogicSpec, premises: Sequence[Term], phi: Term) -> dict[int, int] | None:
    terms = list(premises) + [phi]
    var_indices = _joint_vars(terms)
    _check_vars(len(var_indices))
    d = L.designated
    for leaves, width in _blocks(var_indices, L.n):
        vals = _matrix_block(terms, L, leaves, width)
        ok = np.ones(width, dtype=bool)
        for v in vals[:-1]:
            ok &= v == d
        bad = np.flatnonzero(ok & (vals[-1] != d))
        if bad.size:
            j = int(bad[0])
            return {var: int(leaves[var][j]) for var in var_indices}
    return None


def matrix_models(L: LogicSpec, premises: Sequence[Term], phi: Term) -> bool:
    """Brute-force consequence in the matrix of ``L``, without translating."""
    return matrix_countermodel(L, premises, phi) is None


def decide(L: LogicSpec, premises: Iterable[Term], phi: Term) -> bool:
    """``premises ⊨_L phi`` via translation into nCL.

    With no premises validity is decided by rewriting (hnf, then full
    normal form, then comparison with the designated constant). With
    premises the translated judgement goes to the brute-force oracle.
    """
    premises = list(premises)
    phi_t = translate(phi, L)
    if not premises:
        return decide_valid(phi_t, L.n, L.designated)
    return models([translate(p, L) for p in premises], phi_t, L.n, L.designated)


@dataclass(frozen=True)
class ConservativityRow:
    premises: tuple[Term, ...]
    formula: Term
    direct: bool
    translated: bool

    @property
    def agree(self) -> bool:
        return self.direct == self.translated


def check_conservativity(L: LogicSpec, corpus: Iterable) -> list[ConservativityRow]:
    """Compare matrix consequence in ``L`` with :func:`decide` on each item.

    Items are formulas or ``(premises, formula)`` pairs. Rows whose
    ``agree`` is False are disagreements (none are expected).
    """
    rows = []
    for item in corpus:
        if isinstance(item, Term):
            prem, phi = (), item
        else:
            prem, phi = tuple(item[0]), item[1]
        rows.append(ConservativityRow(prem, phi, matrix_models(L, prem, phi), decide(L, prem, phi)))
    return rows


# --------------------------------------------------------------------------
# logic files

def parse_logic(text: str) -> LogicSpec:
    name = n = designated = None
    conns: dict[str, tuple[int, tuple[int, ...]]] = {}
    pending: tuple[str, int, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, *rest = line.split()
        try:
            if word == "logic":
                if len(rest) != 1:
                    raise LogicFileError("expected 'logic <name>'", lineno)
                name = rest[0]
            elif word == "n":
                n = int(rest[0]) if len(rest) == 1 else None
                if n is None:
                    raise LogicFileError("expected 'n <int>'", lineno)
            elif word == "designated":
                if len(rest) != 1:
                    raise LogicFileError("exactly one designated value is supported", lineno)
                designated = int(rest[0])
            elif word == "connective":
                if pending is not None:
                    raise LogicFileError(f"connective {pending[0]!r} has no table", lineno)
                if len(rest) != 2:
                    raise LogicFileError("expected 'connective <name> <arity>'", lineno)
                pending = (rest[0], int(rest[1]), lineno)
            elif word == "table":
                if pending is None:
                    raise LogicFileError("table without a preceding connective", lineno)
                if pending[0] in conns:
                    raise LogicFileError(f"connective {pending[0]!r} defined twice", lineno)
                conns[pending[0]] = (pending[1], tuple(int(v) for v in rest))
                pending = None
            else:
                raise LogicFileError(f"unknown directive {word!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, LogicFileError):
                raise
            raise LogicFileError(str(exc), lineno) from None
    if pending is not None:
        raise LogicFileError(f"connective {pending[0]!r} has no table", pending[2])
    if name is None or n is None or designated is None:
        raise LogicFileError("missing one of the 'logic', 'n', 'designated' lines")
    try:
        return LogicSpec(name, n, designated, conns)
    except ValueError as exc:
        raise LogicFileError(str(exc)) from None


def load_logic(path: str) -> LogicSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_logic(fh.read())


def dump_logic(L: LogicSpec) -> str:
    lines = [f"logic {L.name}", f"n {L.n}", f"designated {L.designated}"]
    for name, (arity, table) in L.connectives.items():
        lines.append(f"connective {name} {arity}")
        lines.append("table " + " ".join(map(str, table)))
    return "\n".join(lines) + "\n"
