"""Terms of the pure type (q, e1, ..., en), plus named connective applications.

Terms are hash-consed: two structurally equal terms are the same object, so
``==`` is identity and terms can be used as dictionary keys at O(1) cost.
Subterms are shared freely; every function in this module treats a term as a
DAG and memoizes on node identity where that matters.

Grammar (whitespace-insensitive)::

    term := 'e' INT | 'x' INT | 'q(' term (',' term){n} ')'
          | IDENT '(' term (',' term)* ')'
"""
from __future__ import annotations

import re
import threading
import weakref
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Term", "Var", "Const", "Q", "App", "Permutation", "ParseError",
    "check_dimension", "parse", "to_str", "substitute", "apply_permutation",
    "is_hnf", "variables", "is_app_free", "size", "positions", "subterm_at",
    "replace_at",
]

_table: "weakref.WeakValueDictionary[tuple, Term]" = weakref.WeakValueDictionary()
_lock = threading.Lock()


def check_dimension(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    return n


class Term:
    """Base class of all term nodes. Instances are interned and immutable."""

    __slots__ = ("__weakref__",)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __delattr__(self, name):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __str__(self) -> str:
        return to_str(self)


def _intern(cls, key, fields):
    with _lock:
        hit = _table.get(key)
        if hit is not None:
            return hit
        obj = object.__new__(cls)
        for name, value in fields:
            object.__setattr__(obj, name, value)
        _table[key] = obj
        return obj


def _check_index(i, what):
    if not isinstance(i, int) or isinstance(i, bool) or i < 1:
        raise ValueError(f"{what} index must be a positive integer, got {i!r}")


class Var(Term):
    """The variable ``x<index>``; variables are ordered by index."""

    __slots__ = ("index",)

    def __new__(cls, index: int):
        _check_index(index, "variable")
        return _intern(cls, ("x", index), [("index", index)])

    def __reduce__(self):
        return (Var, (self.index,))

    def __repr__(self):
        return f"Var({self.index})"


class Const(Term):
    """The constant ``e<index>``."""

    __slots__ = ("index",)

    def __new__(cls, index: int):
        _check_index(index, "constant")
        return _intern(cls, ("e", index), [("index", index)])

    def __reduce__(self):
        return (Const, (self.index,))

    def __repr__(self):
        return f"Const({self.index})"


class Q(Term):
    """``q(head, args[0], ..., args[n-1])``; the dimension is ``len(args)``."""

    __slots__ = ("head", "args")

    def __new__(cls, head: Term, args: Iterable[Term]):
        args = tuple(args)
        if not isinstance(head, Term) or not all(isinstance(a, Term) for a in args):
            raise TypeError("q arguments must be terms")
        if len(args) < 2:
            raise ValueError("q needs at least 2 branch arguments")
        return _intern(cls, ("q", head, args), [("head", head), ("args", args)])

    @property
    def n(self) -> int:
        return len(self.args)

    def __reduce__(self):
        return (Q, (self.head, self.args))

    def __repr__(self):
        return f"Q({self.head!r}, {list(self.args)!r})"


class App(Term):
    """Application of a named source-logic connective."""

    __slots__ = ("name", "args")

    def __new__(cls, name: str, args: Iterable[Term]):
        args = tuple(args)
        if not _IDENT.fullmatch(name) or _RESERVED.fullmatch(name):
            raise ValueError(f"invalid connective name {name!r}")
        if not all(isinstance(a, Term) for a in args):
            raise TypeError("connective arguments must be terms")
        return _intern(cls, ("app", name, args), [("name", name), ("args", args)])

    def __reduce__(self):
        return (App, (self.name, self.args))

    def __repr__(self):
        return f"App({self.name!r}, {list(self.args)!r})"


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1..n}; ``images[i-1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def all(cls, n: int) -> list["Permutation"]:
        from itertools import permutations
        return [cls(p) for p in permutations(range(1, n + 1))]

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: apply ``other`` first."""
        if other.n != self.n:
            raise ValueError("permutations of different degree")
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))


# --------------------------------------------------------------------------
# parsing and printing

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = re.compile(r"[ex][0-9]+|q")
_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([(),])|(\S))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace only
            break
        start = m.start(m.lastindex)
        if m.group(3) is not None:
            raise ParseError(f"unexpected character {m.group(3)!r}", start)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


def parse(text: str, n: int, signature: Mapping[str, int] | None = None) -> Term:
    """Parse ``text`` into a term of dimension ``n``.

    ``signature`` maps connective names to arities; without it only pure
    q-terms are accepted.
    """
    check_dimension(n)
    signature = signature or {}
    tokens = _tokenize(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        got, at = tokens[pos]
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got or 'end of input'!r}", at)
        pos += 1

    def term() -> Term:
        nonlocal pos
        tok, at = tokens[pos]
        if not tok or not _IDENT.fullmatch(tok):
            raise ParseError(f"expected a term, got {tok or 'end of input'!r}", at)
        pos += 1
        m = re.fullmatch(r"([ex])([0-9]+)", tok)
        if m:
            digits = m.group(2)
            if digits.startswith("0"):
                raise ParseError(f"index must be a decimal integer >= 1 in {tok!r}", at)
            i = int(digits)
            if m.group(1) == "x":
                return Var(i)
            if i > n:
                raise ParseError(f"constant e{i} out of range 1..{n}", at)
            return Const(i)
        if tokens[pos][0] != "(":
            raise ParseError(f"expected '(' after {tok!r}", tokens[pos][1])
        pos += 1
        args = [term()]
        while tokens[pos][0] == ",":
            pos += 1
            args.append(term())
        expect(")")
        if tok == "q":
            if len(args) != n + 1:
                raise ParseError(f"q takes {n + 1} arguments for n={n}, got {len(args)}", at)
            return Q(args[0], args[1:])
        if tok not in signature:
            raise ParseError(f"unknown connective {tok!r}", at)
        if signature[tok] != len(args):
            raise ParseError(
                f"connective {tok!r} has arity {signature[tok]}, got {len(args)} arguments", at)
        return App(tok, args)

    result = term()
    if tokens[pos][0]:
        raise ParseError(f"unexpected trailing input {tokens[pos][0]!r}", tokens[pos][1])
    return result


def to_str(t: Term) -> str:
    """Canonical text of ``t`` (single space after each comma)."""
    memo: dict[Term, str] = {}

    def go(u):
        s = memo.get(u)
        if s is not None:
            return s
        if isinstance(u, Var):
            s = f"x{u.index}"
        elif isinstance(u, Const):
            s = f"e{u.index}"
        elif isinstance(u, Q):
            s = "q(" + ", ".join(go(a) for a in (u.head,) + u.args) + ")"
        else:
            s = u.name + "(" + ", ".join(go(a) for a in u.args) + ")"
        memo[u] = s
        return s

    return go(t)


# --------------------------------------------------------------------------
# structural operations

def _rebuild(u: Term, kids: Sequence[Term]) -> Term:
    if isinstance(u, Q):
        return Q(kids[0], kids[1:])
    return App(u.name, kids)


def _children(u: Term) -> tuple[Term, ...]:
    if isinstance(u, Q):
        return (u.head,) + u.args
    if isinstance(u, App):
        return u.args
    return ()


def substitute(t: Term, binding: Mapping[int, Term]) -> Term:
    """Simultaneously replace each ``x_i`` with ``binding[i]``."""
    if not binding:
        return t
    memo: dict[Term, Term] = {}

    def go(u):
        r = memo.get(u)
        if r is None:
            if isinstance(u, Var):
                r = binding.get(u.index, u)
            elif isinstance(u, Const):
                r = u
            else:
                r = _rebuild(u, [go(c) for c in _children(u)])
            memo[u] = r
        return r

    return go(t)


def apply_permutation(t: Term, sigma: Permutation) -> Term:
    """``t^σ = q(t, e_σ(1), ..., e_σ(n))``."""
    if not is_app_free(t):
        raise ValueError("apply_permutation needs an App-free term")
    return Q(t, [Const(sigma(i)) for i in range(1, sigma.n + 1)])


def _all_nodes(t: Term) -> list[Term]:
    seen: set[Term] = set()
    out = []
    stack = [t]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        out.append(u)
        stack.extend(_children(u))
    return out


def is_app_free(t: Term) -> bool:
    return not any(isinstance(u, App) for u in _all_nodes(t))


def is_hnf(t: Term) -> bool:
    """True iff every q node has a variable head."""
    return all(isinstance(u.head, Var) for u in _all_nodes(t) if isinstance(u, Q))


def variables(t: Term) -> tuple[int, ...]:
    """Indices of the variables occurring in ``t``, increasing."""
    return tuple(sorted(u.index for u in _all_nodes(t) if isinstance(u, Var)))


def size(t: Term) -> int:
    """Number of q nodes of the tree unfolding of ``t`` (leaves count 0)."""
    memo: dict[Term, int] = {}

    def go(u):
        s = memo.get(u)
        if s is None:
            kids = _children(u)
            s = (1 if kids else 0) + sum(go(c) for c in kids)
            memo[u] = s
        return s

    return go(t)


def positions(t: Term):
    """Yield all tree positions of ``t``, outermost-leftmost first.

    A position is a tuple of child indices; for q nodes index 0 is the head
    and ``i`` is the i-th branch.
    """
    stack = [((), t)]
    while stack:
        pos, u = stack.pop()
        yield pos
        kids = _children(u)
        for k in range(len(kids) - 1, -1, -1):
            stack.append((pos + (k,), kids[k]))


def subterm_at(t: Term, pos: Sequence[int]) -> Term:
    for k in pos:
        t = _children(t)[k]
    return t


def replace_at(t: Term, pos: Sequence[int], new: Term) -> Term:
    if not pos:
        return new
    kids = list(_children(t))
    kids[pos[0]] = replace_at(kids[pos[0]], pos[1:], new)
    return _rebuild(t, kids)
