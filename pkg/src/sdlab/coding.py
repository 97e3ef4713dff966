"""Exact symbolic coding of circle angles under anti-doubling and the triangle reflection map.

Both circle maps are orientation-reversing double covers with fixed points
0, 1/3 and 2/3, and both have a branch of their inverse into each of the
three arcs between those points. An angle is therefore coded by the
sequence of arcs its orbit visits, and the circle homeomorphism conjugating
the two maps is the identity on codes. All rational work uses
``fractions.Fraction``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import HitsFixedPoint, InadmissibleWord, InvalidInput, NoRealization
from .triangle import ARCS, SIDE_CENTERS, is_admissible

FIXED = (Fraction(0), Fraction(1, 3), Fraction(2, 3))
THIRD = Fraction(1, 3)
# the unique interior preimage of each vertex lies in the opposite arc
OPPOSITE_VERTEX = {1: Fraction(2, 3), 2: Fraction(0), 3: Fraction(1, 3)}


def angle(p, q=None) -> Fraction:
    """Reduce to a Fraction in [0, 1)."""
    x = Fraction(p) if q is None else Fraction(p, q)
    return x - math.floor(x)


def parse_angle(s: str) -> Fraction:
    try:
        return angle(Fraction(s.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"cannot parse angle {s!r}") from exc


def format_angle(x: Fraction) -> str:
    x = angle(x)
    return f"{x.numerator}/{x.denominator}"


def m2_map(theta) -> Fraction:
    return angle(-2 * Fraction(theta))


def m2_preimages(theta) -> tuple[Fraction, Fraction]:
    c = angle(-Fraction(theta) / 2)
    return c, angle(c + Fraction(1, 2))


def arc_of(theta: Fraction):
    """Arc index 1..3, or None on a fixed point."""
    t = angle(theta)
    if t in FIXED:
        return None
    if t < THIRD:
        return 1
    if t < 2 * THIRD:
        return 2
    return 3


def in_arc(theta: Fraction, s: int) -> bool:
    lo, hi = (Fraction(0), THIRD) if s == 1 else (THIRD, 2 * THIRD) if s == 2 else (2 * THIRD, Fraction(1))
    return lo < theta < hi


def m2_branch(theta, s: int) -> Fraction:
    """The preimage of theta under anti-doubling lying in arc s."""
    for c in m2_preimages(theta):
        if in_arc(c, s):
            return c
    raise NoRealization(f"no preimage of {theta} in arc {s}")


def period_and_preperiod(theta) -> tuple[int, int]:
    seen = {}
    x = angle(theta)
    i = 0
    while x not in seen:
        seen[x] = i
        x = m2_map(x)
        i += 1
    return i - seen[x], seen[x]


def angle_period(theta) -> int:
    """Exact period of a periodic angle (0 for strictly preperiodic)."""
    per, pre = period_and_preperiod(theta)
    return per if pre == 0 else 0


def periodic_angles(n: int) -> list[Fraction]:
    """All angles of exact period n under anti-doubling, sorted."""
    q = abs((-2) ** n - 1)
    return sorted(x for x in (Fraction(k, q) for k in range(q)) if angle_period(x) == n)


# ---------------------------------------------------------------------------
# itineraries


@dataclass(frozen=True)
class Itinerary:
    """Eventually periodic arc code, or a finite code ending on a vertex.

    Exactly one of ``period`` (non-empty) and ``vertex`` is set.
    """

    pre: tuple = ()
    period: tuple = ()
    vertex: Fraction | None = None

    def __post_init__(self):
        pre = tuple(int(s) for s in self.pre)
        per = tuple(int(s) for s in self.period)
        if any(s not in (1, 2, 3) for s in pre + per):
            raise InadmissibleWord("symbols must be 1, 2 or 3")
        if (len(per) == 0) == (self.vertex is None):
            raise InadmissibleWord("need exactly one of a period word or a terminal vertex")
        if self.vertex is not None:
            v = angle(self.vertex)
            if v not in FIXED:
                raise InadmissibleWord(f"{v} is not a vertex")
            object.__setattr__(self, "vertex", v)
            if pre and OPPOSITE_VERTEX[pre[-1]] != v:
                raise InadmissibleWord(f"arc {pre[-1]} has no interior preimage of {v}")
        else:
            per = _primitive(per)
            # absorb a preperiod tail that already follows the cycle
            while pre and pre[-1] == per[-1]:
                pre = pre[:-1]
                per = per[-1:] + per[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "period", per)
        if not self.admissible:
            raise InadmissibleWord(f"itinerary {self} repeats a symbol")

    @property
    def admissible(self) -> bool:
        w = self.pre + self.period
        if not is_admissible(w):
            return False
        if self.period and len(self.period) > 0:
            return self.period[-1] != self.period[0]
        return True

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None and not self.pre

    def symbols(self, n: int) -> tuple:
        """First n symbols (vertex-terminated codes stop early)."""
        out = list(self.pre[:n])
        if self.period:
            k = 0
            while len(out) < n:
                out.append(self.period[k % len(self.period)])
                k += 1
        return tuple(out)

    def shift(self) -> "Itinerary":
        if self.pre:
            return Itinerary(self.pre[1:], self.period, self.vertex)
        if self.period:
            return Itinerary((), self.period[1:] + self.period[:1])
        return self

    def prepend(self, s: int) -> "Itinerary":
        return Itinerary((s,) + self.pre, self.period, self.vertex)

    def __str__(self):
        pre = "".join(map(str, self.pre))
        if self.vertex is not None:
            return f"{pre}|@{format_angle(self.vertex)}"
        return f"{pre}|{''.join(map(str, self.period))}"


def _primitive(per: tuple) -> tuple:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per[:d] * (n // d) == per:
            return per[:d]
    return per


def parse_itinerary(s: str) -> Itinerary:
    s = s.strip()
    if "|" not in s:
        raise InvalidInput(f"itinerary {s!r} needs the form 'pre|period'")
    pre, tail = s.split("|", 1)
    try:
        pre_t = tuple(int(c) for c in pre)
        if tail.startswith("@"):
            return Itinerary(pre_t, (), parse_angle(tail[1:]))
        return Itinerary(pre_t, tuple(int(c) for c in tail))
    except ValueError as exc:
        raise InvalidInput(f"bad itinerary {s!r}") from exc


def itinerary_of_rational(theta, allow_vertex: bool = False) -> Itinerary:
    x = angle(theta)
    seen = {}
    syms = []
    i = 0
    while x not in seen:
        s = arc_of(x)
        if s is None:
            if allow_vertex:
                return Itinerary(tuple(syms), (), x)
            raise HitsFixedPoint(theta, i)
        seen[x] = i
        syms.append(s)
        x = m2_map(x)
        i += 1
    k = seen[x]
    return Itinerary(tuple(syms[:k]), tuple(syms[k:]))


def _periodic_point(per: tuple) -> Fraction:
    # float backward iteration fixes the branch offsets, then solve exactly
    x = 0.5
    offsets = [Fraction(0)] * len(per)
    for _ in range(60 // len(per) + 3):
        for i in reversed(range(len(per))):
            s = per[i]
            lo, hi = ARCS[s]
            c0 = (-x / 2) % 1.0
            c = c0 if lo < c0 < hi else (c0 + 0.5) % 1.0
            offsets[i] = Fraction(round(2 * (c + x / 2)), 2)
            x = c
    coef, const = Fraction(1), Fraction(0)
    # x_i = -x_{i+1}/2 + n_i; compose from the last symbol inwards
    for i in reversed(range(len(per))):
        coef, const = -coef / 2, -const / 2 + offsets[i]
    x0 = const / (1 - coef)
    cand = angle(x0)
    if _check_period(cand, per):
        return cand
    # rounding picked a wrong offset near an arc end; exhaust small cases exactly
    if len(per) <= 16:
        for ks in product((0, 1, 2), repeat=len(per)):
            coef, const = Fraction(1), Fraction(0)
            for i in reversed(range(len(per))):
                coef, const = -coef / 2, -const / 2 + Fraction(ks[i], 2)
            cand = angle(const / (1 - coef))
            if _check_period(cand, per):
                return cand
    raise NoRealization(f"no angle has periodic itinerary {per}")


def _check_period(x: Fraction, per: tuple) -> bool:
    y = x
    for s in per:
        if arc_of(y) != s:
            return False
        y = m2_map(y)
    return y == x


def rational_from_itinerary(it: Itinerary) -> Fraction:
    if it.vertex is not None:
        x = it.vertex
    else:
        x = _periodic_point(it.period)
    for s in reversed(it.pre):
        x = m2_branch(x, s)
    return x


# ---------------------------------------------------------------------------
# the reflection-map side


@dataclass(frozen=True)
class RhoAngle:
    itinerary: Itinerary
    numeric: float = field(compare=False)
    precision: float = field(compare=False)

    def __str__(self):
        return str(self.itinerary)


def _reflect_unit(j: int, z: complex) -> complex:
    c = SIDE_CENTERS[j]
    w = c + 3.0 / (z - c).conjugate()
    return w / abs(w)


def _turns(z: complex) -> float:
    return (math.atan2(z.imag, z.real) / (2 * math.pi)) % 1.0


def rho_angle_position(it: Itinerary, depth: int) -> tuple[float, float]:
    """Nested-arc enclosure of the reflection-map angle with the given code.

    Returns (midpoint, radius) of the arc of angles whose first ``depth``
    symbols agree with ``it``. Codes ending on a vertex are located exactly
    once the depth reaches the vertex.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if it.vertex is not None and depth > len(it.pre):
        z = complex(math.cos(2 * math.pi * it.vertex), math.sin(2 * math.pi * it.vertex))
        for s in reversed(it.pre):
            z = _reflect_unit(s, z)
        return _turns(z), 0.0
    syms = it.symbols(depth)
    lo, hi = ARCS[syms[-1]]
    ends = [complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t)) for t in (lo, hi)]
    for s in reversed(syms[:-1]):
        ends = [_reflect_unit(s, z) for z in ends]
    ts = [_turns(z) for z in ends]
    first = syms[0]
    if first == 1:
        ts = [t - 1 if t > 2 / 3 else t for t in ts]
    elif first == 3:
        ts = [t + 1 if t < 1 / 3 else t for t in ts]
    a, b = min(ts), max(ts)
    return ((a + b) / 2) % 1.0, (b - a) / 2


def E_of(x: RhoAngle) -> Fraction:
    return rational_from_itinerary(x.itinerary)


def E_inverse(theta, depth: int = 40, allow_vertex: bool = False) -> RhoAngle:
    t = angle(theta)
    it = itinerary_of_rational(t, allow_vertex=allow_vertex or t in FIXED)
    num, rad = rho_angle_position(it, depth)
    return RhoAngle(it, num, rad)


def rho_angle(it: Itinerary, depth: int = 40) -> RhoAngle:
    num, rad = rho_angle_position(it, depth)
    return RhoAngle(it, num, rad)


def _float_branch(theta: float, s: int) -> float:
    lo, hi = ARCS[s]
    mid = (lo + hi) / 2
    cands = [(-theta / 2) % 1.0, (-theta / 2 + 0.5) % 1.0]
    # rounding can push a preimage just outside its arc, so take the nearer one
    return min(cands, key=lambda c: min(abs(c - mid), 1 - abs(c - mid)))


def E_numeric(t: float, depth: int = 40) -> float:
    """Floating-point image of a circle angle under the conjugacy to anti-doubling.

    Reads the first ``depth`` arc symbols of the reflection-map orbit of t and
    pulls the corresponding arc back under anti-doubling, so the answer is
    accurate to roughly 2**-depth away from vertex preimages.
    """
    from .triangle import _angle, side_reflection

    syms = []
    x = t % 1.0
    for _ in range(depth):
        if x in (0.0, 1 / 3, 2 / 3):
            break
        s = 1 if x < 1 / 3 else 2 if x < 2 / 3 else 3
        syms.append(s)
        w = side_reflection(s, complex(math.cos(2 * math.pi * x), math.sin(2 * math.pi * x)))
        x = _angle(w / abs(w))
    if len(syms) < depth:
        # the orbit landed on a vertex, which the conjugacy fixes
        theta = x
    else:
        lo, hi = ARCS[syms[-1]]
        theta = (lo + hi) / 2
        syms = syms[:-1]
    for s in reversed(syms):
        theta = _float_branch(theta, s)
    return theta % 1.0
