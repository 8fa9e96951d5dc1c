"""Seeded random generators for terms, hnfs and source-logic formulas.

Depth counts nodes on the longest root-to-leaf path, so a bare variable
has depth 1.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterator, Mapping

from .term import App, Const, Q, Term, Var

__all__ = ["random_term", "random_hnf", "random_formula", "all_formulas"]


def _leaf(rng: random.Random, n: int, nvars: int, p_const: float) -> Term:
    if rng.random() < p_const:
        return Const(rng.randint(1, n))
    return Var(rng.randint(1, nvars))


def random_term(rng: random.Random, n: int, nvars: int, depth: int, p_leaf: float = 0.3,
                p_const: float = 0.3) -> Term:
    """An arbitrary pure q-term; heads may be constants or q-terms."""
    if depth <= 1 or rng.random() < p_leaf:
        return _leaf(rng, n, nvars, p_const)
    return Q(random_term(rng, n, nvars, depth - 1, p_leaf, p_const),
             [random_term(rng, n, nvars, depth - 1, p_leaf, p_const) for _ in range(n)])


def random_hnf(rng: random.Random, n: int, nvars: int, depth: int, p_leaf: float = 0.3,
               p_const: float = 0.4) -> Term:
    """A random hnf: every q head is a variable."""
    if depth <= 1 or rng.random() < p_leaf:
        return _leaf(rng, n, nvars, p_const)
    return Q(Var(rng.randint(1, nvars)),
             [random_hnf(rng, n, nvars, depth - 1, p_leaf, p_const) for _ in range(n)])


def random_formula(rng: random.Random, signature: Mapping[str, int], nvars: int, depth: int,
                   p_leaf: float = 0.25) -> Term:
    """A random formula over the connectives in ``signature`` and x1..x_nvars."""
    names = sorted(signature)
    if depth <= 1 or rng.random() < p_leaf:
        return Var(rng.randint(1, nvars))
    name = rng.choice(names)
    return App(name, [random_formula(rng, signature, nvars, depth - 1, p_leaf)
                      for _ in range(signature[name])])


def all_formulas(signature: Mapping[str, int], nvars: int, depth: int) -> Iterator[Term]:
    """Every formula of depth at most ``depth``, shallowest first, without repeats."""
    layers: list[list[Term]] = [[Var(i) for i in range(1, nvars + 1)]]
    yield from layers[0]
    seen = set(layers[0])
    for _ in range(depth - 1):
        pool = [t for layer in layers for t in layer]
        new = []
        for name in sorted(signature):
            for args in itertools.product(pool, repeat=signature[name]):
                t = App(name, args)
                if t not in seen:
                    seen.add(t)
                    new.append(t)
        layers.append(new)
        yield from new
