"""
Reflection dynamics and angle coding
====================================

Walk through the reflection map on a small example: the critical orbit at
the period-3 centre, the itinerary of an angle, and the conjugacy between
the reflection-group map on the circle and angle tripling with reversal.
"""
from fractions import Fraction

import numpy as np

from sdlab import coding as ac
from sdlab import schwarz as S
from sdlab import triangle as tg

# the critical value is infinity; at a = 3/16 it returns to 0 after three steps
print(S.orbit(3 / 16, 0j, 3))

# a rational angle under the anti-doubling map and its symbolic itinerary
theta = Fraction(3, 7)
it = ac.itinerary_of_rational(theta)
print(theta, "->", it)

# the same itinerary read on the circle side and mapped back
print(ac.rational_from_itinerary(it))

# numerically, the conjugacy intertwines the circle map with anti-doubling
ts = np.linspace(0.01, 0.99, 7)
for t in ts:
    lhs = ac.E_numeric(tg.rho_circle(t))
    rhs = (-2 * ac.E_numeric(t)) % 1.0
    print(f"{t:.3f}  {lhs:.12f}  {rhs:.12f}")

# how many angles of each exact period (no period-2 cycles for anti-doubling)
print({n: len(ac.periodic_angles(n)) for n in range(1, 7)})
