"""Walk through the certificate coding of a closed subspace.

Run with ``python3 demos/certificates.py``.
"""
import itertools
from fractions import Fraction

from qlattice import Subspace, Vector, certificate_valid, encode, semidecide_not_member
from qlattice.hilbert import distance_sq

e0, e1, e2 = (Vector.basis(i) for i in range(3))
L = Subspace.span(e0 + e1, e2)

# a certificate (c, r) claims that L keeps distance more than r from c
c = Vector({0: Fraction(3, 5), 1: Fraction(-4, 5)})
print("d(c, L)^2 =", distance_sq(c, L.family()))
for r in (Fraction(1, 2), Fraction(9, 10), Fraction(99, 100)):
    print(f"  r = {r}: valid = {certificate_valid(L, c, r)}")

# the code of L is the stream of every valid candidate, in dovetail order
print("\nfirst certificates of L:")
certs = [cert for cert in itertools.islice(encode(L).stream(), 200) if cert is not None]
for cert in certs[:6]:
    print("  c =", dict(cert.c.items()), " r =", cert.r)
print(f"  ... {len(certs)} among the first 200 slots")

# membership can only be refuted, never confirmed
for name, x in (("e0 - e1", e0 - e1), ("e0 + e1", e0 + e1)):
    sd = semidecide_not_member(encode(L), x)
    print(f"\n{name} not in L: first confirmation within 2000 fuel ->", sd.first_confirmation(2000))
