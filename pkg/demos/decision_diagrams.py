"""Canonical forms as ordered multi-valued decision diagrams.

Prints a rewrite trace with its path-ordering certificate and writes the
DOT file of the all-different function on two 3-valued variables.

    python3 demos/decision_diagrams.py [out.dot]
"""
import sys

from nbalogic.canon import certify_decreasing, export_dot, full_normalize, is_reduced_ordered
from nbalogic.hnf import hnf_normalize
from nbalogic.semantics import equiv
from nbalogic.term import parse, to_str

# not(x2 = x1) for n = 3, written with the larger variable on top
t = parse("q(x2, q(x1, e1, e2, e2), q(x1, e2, e1, e2), q(x1, e2, e2, e1))", 3)
trace = []
nf = full_normalize(hnf_normalize(t), 3, trace)
print("input        ", to_str(t))
for step in trace:
    print(f"  {step.rule:5} {to_str(step.redex)}\n        -> {to_str(step.contractum)}")
print("normal form  ", nf)
print("equivalent   ", equiv(t, nf.term, 3))
print("ordered      ", is_reduced_ordered(nf.term))
print("LPO decreasing", certify_decreasing(trace))

dot = export_dot(nf)
if len(sys.argv) > 1:
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        fh.write(dot)
    print("wrote", sys.argv[1])
else:
    print(dot)
