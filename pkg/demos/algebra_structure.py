"""Finite Boolean-like algebras: centrality, coordinates and powers.

    python3 demos/algebra_structure.py
"""
import os

from nbalogic import algebra as alg
from nbalogic import power as pw

A = alg.power_algebra(3, 2)
print(A, "axioms:", alg.check_axioms(A) or "all hold")
print("central elements:", len(alg.central_elements(A)), "of", A.size)
B = alg.coordinate_boolean_algebra(A)
print("B_A:", [A.label(b) for b in B.members], "atoms:", [A.label(a) for a in B.atoms()])
for a in (A.labels.index("(e1,e2)"), A.labels.index("(e3,e1)")):
    print(f"  coordinates of {A.label(a)}:", [A.label(c) for c in alg.coordinates(A, a)])
r = alg.representation_iso(A)
print(f"representation: |A|={r.size}, central vectors over B_A={r.central_vectors}, ok={r.ok}")

S = alg.subalgebra(alg.power_algebra(2, 3), [A.size % 8])
print(f"\nsubalgebra of 2^3 with {S.size} elements:", pw.foster_check(alg.generating_algebra(2), S))

print("\nsemirings with |E| = 2:")
for R in (pw.boolean_algebra_semiring(2), pw.zmod(4), pw.chain_lattice(3), pw.zmod(6)):
    C = pw.complemented_core(R)
    rows = pw.cross_validate_centrality(R, 2)
    core = pw.compare_core_power(2, R)
    print(f"  {R.name:4} C(R)={[R.label(c) for c in C.members]}, "
          f"central vectors {sum(r.by_identities for r in rows)}/{len(rows)}, "
          f"|E[R]|={core.size}, E[R]=E[C(R)]: {core.ok}")

bad = alg.load_algebra(os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "not_nba.alg"))
print("\nnot an nBA:", [str(f) for f in alg.nba_failures(bad)])
