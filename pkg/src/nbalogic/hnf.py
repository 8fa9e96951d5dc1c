"""Head normal forms: the rules h0/h1 and the structural normalizer ``qH``.

    (h0)  q(e_i, x_1, ..., x_n)            ->  x_i
    (h1)  q(q(x, y_1..y_n), z_1, ..., z_n)  ->  q(x, q(y_1, z̄), ..., q(y_n, z̄))
"""
from __future__ import annotations

from typing import Iterator, Sequence

from .term import App, Const, Q, Term, Var, _children, positions, replace_at, subterm_at

__all__ = [
    "StepBudgetExceeded", "contract_hnf", "step_hnf", "hnf_reducts", "qH",
    "hnf_normalize", "hnf_normalize_by_steps",
]


class StepBudgetExceeded(RuntimeError):
    pass


def contract_hnf(u: Term) -> Term | None:
    """Contract ``u`` at its root by h0 or h1, or None if it is not a redex."""
    if not isinstance(u, Q):
        return None
    head = u.head
    if isinstance(head, Const):
        if head.index > u.n:
            raise ValueError(f"constant e{head.index} out of range for n={u.n}")
        return u.args[head.index - 1]
    if isinstance(head, Q):
        if head.n != u.n:
            raise ValueError("mixed dimensions in q nodes")
        return Q(head.head, [Q(y, u.args) for y in head.args])
    if isinstance(head, App):
        raise ValueError("hnf rewriting needs an App-free term")
    return None


def step_hnf(t: Term) -> Term | None:
    """One leftmost-innermost h0/h1 step; None iff ``t`` is an hnf."""
    # post-order, left to right: the first redex met has no redex below it
    stack: list[tuple[tuple[int, ...], Term, bool]] = [((), t, False)]
    seen_clean: set[Term] = set()
    while stack:
        pos, u, expanded = stack.pop()
        if u in seen_clean:
            continue
        if not expanded:
            stack.append((pos, u, True))
            kids = _children(u)
            for k in range(len(kids) - 1, -1, -1):
                stack.append((pos + (k,), kids[k], False))
            continue
        if isinstance(u, App):
            raise ValueError("hnf rewriting needs an App-free term")
        r = contract_hnf(u)
        if r is not None:
            return replace_at(t, pos, r)
        seen_clean.add(u)
    return None


def hnf_reducts(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Every one-step h-reduct of ``t``, with the position rewritten."""
    for pos in positions(t):
        r = contract_hnf(subterm_at(t, pos))
        if r is not None:
            yield pos, replace_at(t, pos, r)


def qH(head: Term, args: Sequence[Term], _memo: dict | None = None) -> Term:
    """The hnf of ``q(head, args)`` for hnf inputs, by recursion on ``head``."""
    args = tuple(args)
    memo = {} if _memo is None else _memo

    def go(h):
        key = (h, args)
        r = memo.get(key)
        if r is not None:
            return r
        if isinstance(h, Const):
            r = args[h.index - 1]
        elif isinstance(h, Var):
            r = Q(h, args)
        elif isinstance(h, Q) and isinstance(h.head, Var):
            r = Q(h.head, [go(u) for u in h.args])
        else:
            raise ValueError(f"qH needs an hnf head, got {h!r}")
        memo[key] = r
        return r

    return go(head)


def hnf_normalize(t: Term) -> Term:
    """The unique h-normal form of ``t`` (a single structural pass)."""
    memo: dict[Term, Term] = {}
    qmemo: dict = {}

    def go(u):
        r = memo.get(u)
        if r is not None:
            return r
        if isinstance(u, (Var, Const)):
            r = u
        elif isinstance(u, Q):
            r = qH(go(u.head), [go(a) for a in u.args], qmemo)
        else:
            raise ValueError("hnf rewriting needs an App-free term")
        memo[u] = r
        return r

    return go(t)


def hnf_normalize_by_steps(t: Term, budget: int = 100_000) -> tuple[Term, int]:
    """Normalize with the generic rewriting engine, counting steps."""
    steps = 0
    while True:
        nxt = step_hnf(t)
        if nxt is None:
            return t, steps
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(f"no h-normal form within {budget} steps")
        t = nxt
