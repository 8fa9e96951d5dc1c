"""Canonical forms of hnfs: the rules r2-r7, the LPO certificate, DOT export.

Heads of hnfs are variables, ordered by index. On an hnf ``q(x, y_1..y_n)``:

    r2     q(x, y, ..., y)                      -> y
    r3     q(x, e1, ..., en)                    -> x
    r4^i   y_i = x                              -> y_i := e_i
    r5^i   y_i = q(x, z_1..z_n)                 -> y_i := z_i
    r6^i   y_i = q(x', z_1..z_n), x' < x        -> q(x', q(x, ȳ[i:=z_1]), ..., q(x, ȳ[i:=z_n]))
    r7^i   y_i = x', x' < x                     -> q(x', q(x, ȳ[i:=e_1]), ..., q(x, ȳ[i:=e_n]))

Normal forms are ordered, reduced decision diagrams, and two hnfs are
logically equivalent iff their normal forms are identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .hnf import StepBudgetExceeded, hnf_normalize
from .term import Const, Q, Term, Var, _children, is_app_free, is_hnf, positions, replace_at, subterm_at, to_str

__all__ = [
    "NormalForm", "Step", "NotHnfError", "root_redexes", "contract_full",
    "step_full", "full_reducts", "full_normalize", "full_normalize_by_steps",
    "lpo_less", "certify_decreasing", "is_reduced_ordered", "decide_valid",
    "export_dot",
]


class NotHnfError(ValueError):
    pass


@dataclass(frozen=True)
class NormalForm:
    """An ordered, reduced hnf; ``n`` is kept when known (needed by DOT export)."""

    term: Term
    n: int | None = field(default=None, compare=False)

    def __str__(self):
        return to_str(self.term)


@dataclass(frozen=True)
class Step:
    rule: str
    redex: Term
    contractum: Term
    position: tuple[int, ...] | None = None


def _require_hnf(t: Term):
    if not is_hnf(t) or not is_app_free(t):
        raise NotHnfError(f"expected an hnf, got {to_str(t)}")


def root_redexes(s: Term) -> Iterator[tuple[str, Term]]:
    """All (rule, contractum) pairs for rules matching at the root of ``s``.

    Yielded in the fixed priority r2, r3, r4, r5, r6, r7, lowest i first.
    """
    if not isinstance(s, Q) or not isinstance(s.head, Var):
        return
    x, ys, n = s.head, s.args, s.n
    if all(y is ys[0] for y in ys):
        yield "r2", ys[0]
    if all(isinstance(y, Const) and y.index == i for i, y in enumerate(ys, 1)):
        yield "r3", x

    def put(i, new):
        return ys[:i - 1] + (new,) + ys[i:]

    for i, y in enumerate(ys, 1):
        if y is x:
            yield f"r4^{i}", Q(x, put(i, Const(i)))
    for i, y in enumerate(ys, 1):
        if isinstance(y, Q) and y.head is x:
            yield f"r5^{i}", Q(x, put(i, y.args[i - 1]))
    for i, y in enumerate(ys, 1):
        if isinstance(y, Q) and isinstance(y.head, Var) and y.head.index < x.index:
            yield f"r6^{i}", Q(y.head, [Q(x, put(i, z)) for z in y.args])
    for i, y in enumerate(ys, 1):
        if isinstance(y, Var) and y.index < x.index:
            yield f"r7^{i}", Q(y, [Q(x, put(i, Const(k))) for k in range(1, n + 1)])


def contract_full(s: Term) -> tuple[str, Term] | None:
    return next(root_redexes(s), None)


def step_full(t: Term, position: Sequence[int] = ()) -> Term | None:
    """Rewrite ``t`` at ``position`` by the highest-priority matching rule."""
    _require_hnf(t)
    hit = contract_full(subterm_at(t, position))
    if hit is None:
        return None
    return replace_at(t, tuple(position), hit[1])


def full_reducts(t: Term) -> Iterator[Step]:
    """Every one-step full reduct of ``t``: all positions, all matching rules."""
    _require_hnf(t)
    for pos in positions(t):
        sub = subterm_at(t, pos)
        for rule, c in root_redexes(sub):
            yield Step(rule, t, replace_at(t, pos, c), pos)


def full_normalize(t: Term, n: int | None = None, trace: list | None = None) -> NormalForm:
    """The unique full normal form of the hnf ``t``.

    If ``trace`` is a list, arguments are normalized first, then root rules
    are applied in priority order until none matches, and each contraction
    is appended to it as a :class:`Step` (redex, contractum); shared
    subterms are normalized and traced once.

    Without a trace the same normal form is built directly by memoized
    cofactoring (irreducible hnfs are exactly the reduced ordered diagrams,
    and those are unique per function). This avoids the blow-up of the
    rule-by-rule strategy on larger n.
    """
    _require_hnf(t)
    if n is None and isinstance(t, Q):
        n = t.n
    if trace is None:
        return NormalForm(_apply_normalize(t), n)
    memo: dict[Term, Term] = {}

    def norm(u):
        r = memo.get(u)
        if r is not None:
            return r
        if not isinstance(u, Q):
            r = u
        else:
            s = Q(u.head, [norm(a) for a in u.args])
            while True:
                hit = contract_full(s)
                if hit is None:
                    break
                rule, c = hit
                if trace is not None:
                    trace.append(Step(rule, s, c))
                if not isinstance(c, Q):
                    s = c
                    break
                s = Q(c.head, [norm(a) for a in c.args])
            r = s
        memo[u] = r
        memo[r] = r
        return r

    return NormalForm(norm(t), n)


def _top(u: Term) -> float:
    if isinstance(u, Var):
        return u.index
    if isinstance(u, Q):
        return u.head.index
    return float("inf")


def _cofactor(u: Term, v: int, k: int) -> Term:
    """``u`` with x_v fixed to e_k; ``u`` is ordered with top variable >= v."""
    if _top(u) != v:
        return u
    return Const(k) if isinstance(u, Var) else u.args[k - 1]


def _mk(v: int, kids: list[Term]) -> Term:
    if all(c is kids[0] for c in kids):
        return kids[0]
    if all(isinstance(c, Const) and c.index == i for i, c in enumerate(kids, 1)):
        return Var(v)
    return Q(Var(v), kids)


def _apply_normalize(t: Term) -> Term:
    memo: dict[Term, Term] = {}
    combos: dict[tuple, Term] = {}

    def select(x: int, ys: tuple) -> Term:
        # reduced ordered form of q(x_x, ys) with every y already reduced ordered
        key = (x, ys)
        r = combos.get(key)
        if r is not None:
            return r
        top = min(x, min(_top(y) for y in ys))
        n = len(ys)
        if top == x:
            kids = [_cofactor(ys[k - 1], x, k) for k in range(1, n + 1)]
        else:
            kids = [select(x, tuple(_cofactor(y, top, k) for y in ys)) for k in range(1, n + 1)]
        r = combos[key] = _mk(top, kids)
        return r

    def norm(u):
        r = memo.get(u)
        if r is None:
            r = u if not isinstance(u, Q) else select(u.head.index, tuple(norm(a) for a in u.args))
            memo[u] = r
        return r

    return norm(t)


def _first_redex(t: Term):
    for pos in positions(t):
        hit = contract_full(subterm_at(t, pos))
        if hit is not None:
            return pos, hit
    return None


def full_normalize_by_steps(t: Term, budget: int = 100_000) -> tuple[NormalForm, list[Step]]:
    """Reference normalizer: leftmost-outermost whole-term steps.

    Returns the normal form and the whole-term trace; exponential in the
    worst case, meant for tests on small terms.
    """
    _require_hnf(t)
    steps: list[Step] = []
    while True:
        found = _first_redex(t)
        if found is None:
            return NormalForm(t, t.n if isinstance(t, Q) else None), steps
        pos, (rule, c) = found
        nxt = replace_at(t, pos, c)
        steps.append(Step(rule, t, nxt, pos))
        if len(steps) > budget:
            raise StepBudgetExceeded(f"no full normal form within {budget} steps")
        t = nxt


# --------------------------------------------------------------------------
# lexicographic path ordering

def lpo_less(t: Term, u: Term, _memo: dict | None = None) -> bool:
    """``t <_lpo u``: constants below variables, variables by index,
    and the subterm (s1) and lexicographic (s2) clauses for q."""
    memo = {} if _memo is None else _memo

    def less(a, b):
        key = (a, b)
        r = memo.get(key)
        if r is not None:
            return r
        if isinstance(b, Q):
            kids_b = _children(b)
            r = any(a is c or less(a, c) for c in kids_b)
            if not r and isinstance(a, Q) and len(_children(a)) == len(kids_b):
                kids_a = _children(a)
                for i, (ca, cb) in enumerate(zip(kids_a, kids_b)):
                    if ca is not cb:
                        r = less(ca, cb) and all(less(cj, b) for cj in kids_a[i + 1:])
                        break
        elif isinstance(b, Var):
            r = isinstance(a, Const) or (isinstance(a, Var) and a.index < b.index)
        else:
            r = False
        memo[key] = r
        return r

    return less(t, u)


def certify_decreasing(trace: Iterable) -> bool:
    """True iff every (before, after) pair strictly decreases in the LPO.

    Accepts :class:`Step` records or plain ``(term, rewritten)`` pairs.
    """
    memo: dict = {}
    for item in trace:
        if isinstance(item, Step):
            before, after = item.redex, item.contractum
        else:
            before, after = item
        if not lpo_less(after, before, memo):
            return False
    return True


# --------------------------------------------------------------------------
# shape of normal forms, decision procedure, DOT

def is_reduced_ordered(t: Term) -> bool:
    """Structural normal-form test, without rewriting.

    Checks hnf-ness, no ``q(x, y..y)``, no ``q(x, e1..en)``, and that every
    variable below a head is strictly larger than the head.
    """
    if not is_hnf(t) or not is_app_free(t):
        return False
    inf = float("inf")
    memo: dict[Term, float] = {}
    ok = True

    def minvar(u):
        nonlocal ok
        m = memo.get(u)
        if m is not None:
            return m
        if isinstance(u, Var):
            m = u.index
        elif isinstance(u, Const):
            m = inf
        else:
            ys = u.args
            below = min(minvar(y) for y in ys)
            if below <= u.head.index:
                ok = False
            if all(y is ys[0] for y in ys):
                ok = False
            if all(isinstance(y, Const) and y.index == i for i, y in enumerate(ys, 1)):
                ok = False
            m = min(u.head.index, below)
        memo[u] = m
        return m

    minvar(t)
    return ok


def decide_valid(phi: Term, n: int, designated: int | None = None) -> bool:
    """Validity in (n, e_n) by rewriting: hnf, then full normal form, then compare with e_n.

    Another designated value e_d works the same way, since canonical forms
    are unique: ``phi`` is valid in (n, e_d) iff its normal form is e_d.
    """
    d = n if designated is None else designated
    if not 1 <= d <= n:
        raise ValueError(f"designated value {d} outside 1..{n}")
    nf = full_normalize(hnf_normalize(phi), n)
    return nf.term is Const(d)


def export_dot(nf: NormalForm | Term, n: int | None = None) -> str:
    """DOT digraph of a normal form as a shared multi-valued decision diagram.

    Nodes are numbered in first-visit preorder. A bare variable leaf is drawn
    as a decision node whose i-th edge goes to terminal e_i.
    """
    if isinstance(nf, NormalForm):
        t, n = nf.term, n or nf.n
    else:
        t = nf
    if n is None and isinstance(t, Q):
        n = t.n
    ids: dict[Term, int] = {}
    nodes: list[str] = []
    edges: dict[int, list[str]] = {}

    def visit(u):
        if u in ids:
            return ids[u]
        k = ids[u] = len(ids)
        if isinstance(u, Const):
            nodes.append(f'  n{k} [label="e{u.index}", shape=box];')
            return k
        nodes.append(f'  n{k} [label="x{u.head.index if isinstance(u, Q) else u.index}"];')
        if isinstance(u, Q):
            kids = u.args
        else:
            if n is None:
                raise ValueError("dimension needed to draw a bare variable")
            kids = [Const(i) for i in range(1, n + 1)]
        out = [visit(c) for c in kids]
        edges[k] = [f'  n{k} -> n{c} [label="{i}"];' for i, c in enumerate(out, 1)]
        return k

    visit(t)
    lines = [e for k in sorted(edges) for e in edges[k]]
    return "\n".join(["digraph G {", "  node [shape=circle];", *nodes, *lines, "}"]) + "\n"
