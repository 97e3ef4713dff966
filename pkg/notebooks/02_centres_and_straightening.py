"""
Hyperbolic centres and the straightening map
============================================

Locate centres in both families, then send the two smallest reflection
centres to the anti-polynomial side and compare with the real centres of
the anti-polynomial family.
"""
from sdlab import schwarz as S
from sdlab import straightening as ST
from sdlab import tricorn as T

# centres of period 2 and 3 in the reflection family
a2 = S.find_center(2, 0.1).real
a3 = S.find_center(3, 0.2).real
print(a2, a3)

# matching centres for the anti-polynomials
c2 = T.find_center(2, -0.9)
c3 = T.find_center(3, -1.7)
print(c2, c3)

# straightening sends each reflection centre to an anti-polynomial centre
for a in (a2, a3):
    res = ST.chi_center(a)
    print(f"a={a.real:.10f}  ->  c={res.c.real:.10f}")

# and the combinatorics agree up to depth 6
print(ST.verify_straightening(a3, c3, 6)["passed"])

# fixed-point indices at the real period-3 parabolic points
exp = ST.index_experiment()
print(exp["iota_S"], exp["iota_T"], exp["separation"])
