"""Evaluation in the generating algebra **n** and brute-force oracles.

An environment maps variable indices to values ``1..n`` (value ``i`` stands
for ``e_i``). The oracles enumerate every environment over the variables
involved, so they are correctness references, not decision procedures.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .term import Const, Q, Term, Var, _children, check_dimension, variables

__all__ = [
    "MAX_ORACLE_VARS", "OracleLimitError", "MatrixJudgement", "evaluate",
    "truth_table", "environments", "models", "equiv", "countermodel",
]

MAX_ORACLE_VARS = 12
_BLOCK = 1 << 18


class OracleLimitError(ValueError):
    """Raised when an oracle would enumerate more variables than allowed."""


@dataclass(frozen=True)
class MatrixJudgement:
    """``premises ⊨ conclusion`` in the matrix (n, e_designated)."""

    premises: tuple[Term, ...]
    conclusion: Term
    designated: int

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))


def evaluate(t: Term, rho: Mapping[int, int], n: int) -> int:
    """Value of ``t`` in **n** under ``rho``."""
    check_dimension(n)
    memo: dict[Term, int] = {}

    def go(u):
        v = memo.get(u)
        if v is not None:
            return v
        if isinstance(u, Const):
            if u.index > n:
                raise ValueError(f"constant e{u.index} out of range for n={n}")
            v = u.index
        elif isinstance(u, Var):
            try:
                v = rho[u.index]
            except KeyError:
                raise KeyError(f"unbound variable x{u.index}") from None
            if not 1 <= v <= n:
                raise ValueError(f"environment value {v} for x{u.index} outside 1..{n}")
        elif isinstance(u, Q):
            if u.n != n:
                raise ValueError(f"q node of dimension {u.n} in a dimension-{n} term")
            v = go(u.args[go(u.head) - 1])
        else:
            raise ValueError(f"cannot evaluate connective {u.name!r}; translate first")
        memo[u] = v
        return v

    return go(t)


def _check_vars(k: int):
    if k > MAX_ORACLE_VARS:
        raise OracleLimitError(
            f"oracle enumeration over {k} variables exceeds the cap of {MAX_ORACLE_VARS}")


def environments(var_indices: Sequence[int], n: int) -> Iterable[dict[int, int]]:
    """All environments over ``var_indices``, first variable varying slowest."""
    _check_vars(len(var_indices))
    for values in itertools.product(range(1, n + 1), repeat=len(var_indices)):
        yield dict(zip(var_indices, values))


def _dtype(n: int):
    return np.int8 if n < 128 else np.int32


def _select(head: np.ndarray, branches) -> np.ndarray:
    """Entry-wise ``branches[head - 1]``."""
    if len(branches) <= 32:  # np.choose takes at most 32 choices
        return np.choose(head - 1, branches)
    return np.stack(branches)[head - 1, np.arange(head.shape[0])]


def _blocks(var_indices: Sequence[int], n: int):
    """Yield leaf-value arrays covering all environments, in order.

    Leading variables are fixed per block and the trailing ones vary inside
    it, so memory stays bounded for large ``n**k``.
    """
    k = len(var_indices)
    inner = 0
    while inner < k and n ** (inner + 1) <= _BLOCK:
        inner += 1
    outer = k - inner
    grid = np.indices((n,) * inner, dtype=_dtype(n)).reshape(inner, n ** inner) + 1
    width = grid.shape[1]
    for head in itertools.product(range(1, n + 1), repeat=outer):
        leaves = {}
        for var, value in zip(var_indices[:outer], head):
            leaves[var] = np.full(width, value, dtype=_dtype(n))
        for j, var in enumerate(var_indices[outer:]):
            leaves[var] = grid[j]
        yield leaves, width


def _table_block(terms, leaves, width, n):
    memo: dict[Term, np.ndarray] = {}

    def go(u):
        v = memo.get(u)
        if v is not None:
            return v
        if isinstance(u, Const):
            if u.index > n:
                raise ValueError(f"constant e{u.index} out of range for n={n}")
            v = np.full(width, u.index, dtype=_dtype(n))
        elif isinstance(u, Var):
            v = leaves[u.index]
        elif isinstance(u, Q):
            if u.n != n:
                raise ValueError(f"q node of dimension {u.n} in a dimension-{n} term")
            v = _select(go(u.head), [go(a) for a in u.args])
        else:
            raise ValueError(f"cannot evaluate connective {u.name!r}; translate first")
        memo[u] = v
        return v

    # iterative post-order so deep terms do not exhaust the Python stack
    for t in terms:
        stack = [(t, False)]
        while stack:
            u, done = stack.pop()
            if u in memo:
                continue
            if done or isinstance(u, (Var, Const)):
                go(u)
            else:
                stack.append((u, True))
                stack.extend((c, False) for c in _children(u))
    return [memo[t] for t in terms]


def truth_table(t: Term, n: int, var_indices: Sequence[int] | None = None) -> np.ndarray:
    """Values of ``t`` on every environment over ``var_indices``.

    Entries are ordered row-major with the first variable varying slowest.
    """
    check_dimension(n)
    if var_indices is None:
        var_indices = variables(t)
    _check_vars(len(var_indices))
    parts = [_table_block([t], leaves, w, n)[0] for leaves, w in _blocks(var_indices, n)]
    return np.concatenate(parts)


def _joint_vars(terms) -> tuple[int, ...]:
    return tuple(sorted(set().union(*(variables(t) for t in terms))))


def countermodel(premises: Sequence[Term], conclusion: Term, n: int,
                 designated: int) -> dict[int, int] | None:
    """An environment designating every premise but not the conclusion."""
    check_dimension(n)
    if not 1 <= designated <= n:
        raise ValueError(f"designated value {designated} outside 1..{n}")
    terms = list(premises) + [conclusion]
    var_indices = _joint_vars(terms)
    _check_vars(len(var_indices))
    for leaves, width in _blocks(var_indices, n):
        values = _table_block(terms, leaves, width, n)
        ok = np.ones(width, dtype=bool)
        for v in values[:-1]:
            ok &= v == designated
        bad = np.flatnonzero(ok & (values[-1] != designated))
        if bad.size:
            j = int(bad[0])
            return {var: int(leaves[var][j]) for var in var_indices}
    return None


def models(premises: Sequence[Term] | MatrixJudgement, conclusion: Term | None = None,
           n: int | None = None, designated: int | None = None) -> bool:
    """Brute-force consequence ``premises ⊨ conclusion`` in (n, e_designated).

    Also accepts ``models(judgement, n)``. ``designated`` defaults to ``n``;
    with no premises this is validity.
    """
    if isinstance(premises, MatrixJudgement):
        j, n = premises, conclusion
        premises, conclusion, designated = j.premises, j.conclusion, j.designated
    if n is None or conclusion is None:
        raise TypeError("models needs a conclusion and a dimension")
    if designated is None:
        designated = n
    return countermodel(premises, conclusion, n, designated) is None


def equiv(t: Term, u: Term, n: int) -> bool:
    """Logical equivalence: ``t`` and ``u`` agree on every environment."""
    check_dimension(n)
    var_indices = _joint_vars([t, u])
    _check_vars(len(var_indices))
    for leaves, width in _blocks(var_indices, n):
        a, b = _table_block([t, u], leaves, width, n)
        if not np.array_equal(a, b):
            return False
    return True
