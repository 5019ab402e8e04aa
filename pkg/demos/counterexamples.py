"""Three lattice operations that fail to be continuous, reproduced exactly.

Run with ``python3 demos/counterexamples.py``.
"""
from qlattice import demo_biorth_discontinuity, demo_join_discontinuity, demo_schroeder

sch = demo_schroeder(10)
print("s(span(e_0 + e_n))(e_0) for n = 1..10:", sorted({str(v) for _, v in sch.values}))
print("at the limit {0}:", sch.limit_value)
print(sch.conclusion)

join = demo_join_discontinuity(12, K=12)
print("\ndim meet(P, Q_n) for n = 0..12:", [d for _, d in join.meets])
print(join.note)

bio = demo_biorth_discontinuity(20)
print("\nC_n^perp-perp is the line through x for n = 1..20:", all(ok for _, ok in bio.lines))
print(bio.note)
