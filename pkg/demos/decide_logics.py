"""Deciding finite-valued logics by translation into q-terms.

Each connective is replaced by a synthesized q-term, the translation is
brought to head normal form and then to its canonical form; a formula is
valid exactly when that canonical form is the top constant.

    python3 demos/decide_logics.py
"""
import random

from nbalogic.canon import full_normalize
from nbalogic.corpus import random_formula
from nbalogic.hnf import hnf_normalize
from nbalogic.logics import builtin, decide, matrix_countermodel, matrix_models, synthesized, translate
from nbalogic.term import to_str


def show_connectives(family, n):
    L = builtin(family, n)
    print(f"{L.name}:")
    for name, t in synthesized(L).items():
        nf = full_normalize(hnf_normalize(t), n)
        print(f"  {name:4} -> {to_str(nf.term)}")


def walk_through(family, n, text):
    L = builtin(family, n)
    phi = L.parse(text)
    t = translate(phi, L)
    h = hnf_normalize(t)
    nf = full_normalize(h, n)
    verdict = "valid" if decide(L, [], phi) else "not valid"
    print(f"{L.name} {text}: canonical form {nf}, {verdict}")
    cm = matrix_countermodel(L, [], phi)
    if cm:
        print("   countermodel", ", ".join(f"x{k}=e{v}" for k, v in sorted(cm.items())))


def agreement(family, n, count=200, seed=0):
    L = builtin(family, n)
    rng = random.Random(seed)
    same = valid = 0
    for _ in range(count):
        phi = random_formula(rng, L.signature, 4, 5)
        d = decide(L, [], phi)
        same += d == matrix_models(L, [], phi)
        valid += d
    print(f"{L.name}: {same}/{count} agree with the truth tables ({valid} valid)")


if __name__ == "__main__":
    for fam, n in [("cl", 2), ("lukasiewicz", 3), ("godel", 3), ("post", 3)]:
        show_connectives(fam, n)
    print()
    walk_through("cl", 2, "or(x1, not(x1))")
    walk_through("godel", 3, "or(x1, not(x1))")
    walk_through("lukasiewicz", 3, "or(x1, not(x1))")
    walk_through("lukasiewicz", 3, "imp(and(x1, imp(x1, x2)), x2)")
    walk_through("godel", 4, "imp(and(x1, imp(x1, x2)), x2)")
    print()
    for fam, n in [("cl", 2), ("lukasiewicz", 4), ("godel", 4), ("post", 3)]:
        agreement(fam, n)
