"""Orbit portraits and laminations for anti-doubling and the triangle reflection map.

Angles for the anti-doubling map are exact ``Fraction`` values. Angles for
the reflection map are ``Itinerary`` codes; their cyclic order is read from
nested-arc enclosures, tightened until the comparison is decided.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .coding import (
    FIXED,
    Itinerary,
    E_inverse,
    angle,
    format_angle,
    m2_map,
    m2_preimages,
    period_and_preperiod,
    periodic_angles,
    rational_from_itinerary,
    rho_angle_position,
)
from .errors import HitsFixedPoint, InadmissibleWord, NoPortrait

M2 = "m2"
RHO = "rho"
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# cyclic order


@lru_cache(maxsize=200_000)
def rho_position(it: Itinerary) -> float:
    """Position in turns of a reflection-map angle, to about 1e-13."""
    d = max(48, 4 * (len(it.pre) + len(it.period)))
    for _ in range(6):
        mid, rad = rho_angle_position(it, d)
        if rad < 1e-13:
            return mid
        d *= 2
    return mid


def position(x, kind: str):
    return x if kind == M2 else rho_position(x)


@lru_cache(maxsize=200_000)
def _measure_rho(it: Itinerary) -> Fraction:
    return rational_from_itinerary(it)


def measure(x, kind: str) -> Fraction:
    """Coordinate in which arc lengths are compared.

    Euclidean length on the reflection side is not respected by the
    conjugacy, so lengths there are read through it. Cyclic order is the
    same in both coordinates.
    """
    return x if kind == M2 else _measure_rho(x)


def image(x, kind: str):
    return m2_map(x) if kind == M2 else x.shift()


def _ccw(a, b):
    """Counter-clockwise length from a to b in [0, 1)."""
    d = b - a
    return d - int(d) if d >= 0 else d - int(d) + 1


def in_open_arc(x, a, b) -> bool:
    """Whether x lies strictly inside the counter-clockwise arc from a to b."""
    if x == a or x == b:
        return False
    return _ccw(a, x) < _ccw(a, b)


def leaves_cross(l1, l2, kind: str = M2) -> bool:
    a, b = (position(x, kind) for x in l1)
    c, d = (position(x, kind) for x in l2)
    if len({a, b, c, d}) < 4:
        return False
    return in_open_arc(c, a, b) != in_open_arc(d, a, b)


def sets_linked(A, B, kind: str = M2) -> bool:
    """Two finite angle sets are linked when their convex hulls in the disk meet."""
    pa = sorted(position(x, kind) for x in A)
    pb = [position(x, kind) for x in B]
    if set(pa) & set(pb):
        return True
    # unlinked iff all of B lies in a single gap of A
    gap_of = set()
    for y in pb:
        for i, a in enumerate(pa):
            nxt = pa[(i + 1) % len(pa)]
            if len(pa) == 1 or in_open_arc(y, a, nxt):
                gap_of.add(i)
                break
    return len(gap_of) > 1


def cyclic_sorted(xs, kind: str) -> tuple:
    return tuple(sorted(xs, key=lambda x: position(x, kind)))


def fmt(x) -> str:
    return format_angle(x) if isinstance(x, Fraction) else str(x)


# ---------------------------------------------------------------------------
# portraits


@dataclass(frozen=True)
class OrbitPortrait:
    classes: tuple
    map_kind: str = M2

    def __post_init__(self):
        cl = tuple(cyclic_sorted(frozenset(A), self.map_kind) for A in self.classes)
        object.__setattr__(self, "classes", cl)

    @property
    def period(self) -> int:
        return len(self.classes)

    @property
    def angles(self) -> list:
        return [x for A in self.classes for x in A]

    def to_json(self) -> dict:
        return {"map": self.map_kind, "classes": [[fmt(x) for x in A] for A in self.classes]}


def _angle_period(x, kind: str):
    """(period, preperiod) of an angle under the given map."""
    if kind == M2:
        return period_and_preperiod(x)
    return (len(x.period), len(x.pre)) if x.period else (0, len(x.pre))


def validate_fop(p: OrbitPortrait) -> list[str]:
    """Empty list when the portrait satisfies the formal axioms, else named violations."""
    kind = p.map_kind
    out = []
    if not p.classes:
        return ["empty: no classes"]
    n = len(p.classes)
    for j, A in enumerate(p.classes):
        if len(A) < 2:
            out.append(f"nontrivial: class {j} has fewer than two angles")
        if len(set(A)) != len(A):
            out.append(f"finite set: class {j} repeats an angle")
        for x in A:
            per, pre = _angle_period(x, kind)
            if per == 0 or pre:
                out.append(f"periodic: angle {fmt(x)} is not periodic")
    if out:
        return out
    for j, A in enumerate(p.classes):
        nxt = p.classes[(j + 1) % n]
        img = [image(x, kind) for x in A]
        if set(img) != set(nxt) or len(set(img)) != len(A):
            out.append(f"bijection: class {j} does not map onto class {(j + 1) % n}")
            continue
        if len(A) >= 3:
            pos = [position(y, kind) for y in img]
            ascents = sum(1 for i in range(len(pos)) if pos[(i + 1) % len(pos)] > pos[i])
            if ascents != 1:
                out.append(f"order reversal: class {j} is not mapped with reversed cyclic order")
        pa = sorted(measure(x, kind) for x in A)
        gaps = [_ccw(pa[i], pa[(i + 1) % len(pa)]) for i in range(len(pa))]
        if max(gaps) <= 0.5:
            out.append(f"half circle: class {j} is not contained in an arc shorter than 1/2")
    for i in range(n):
        for j in range(i + 1, n):
            if sets_linked(p.classes[i], p.classes[j], kind):
                out.append(f"unlinked: classes {i} and {j} are linked")
    if out:
        return out
    pers = {_angle_period(x, kind)[0] for x in p.angles}
    if n % 2 == 0:
        if len(pers) != 1:
            out.append("period structure: even orbit period needs a common angle period")
    else:
        size = len(p.classes[0])
        per_list = sorted(_angle_period(x, kind)[0] for x in p.classes[0])
        ok = (size == 2 and per_list in ([n, n], [2 * n, 2 * n])) or (size == 3 and per_list == [n, 2 * n, 2 * n])
        if not ok:
            out.append(f"period structure: odd orbit period {n} with class periods {per_list}")
    if not out:
        arcs = sorted(_complementary_arcs(p), key=lambda t: t[0])
        if len(arcs) > 1 and arcs[0][0] == arcs[1][0] and arcs[0][1:] != arcs[1][1:]:
            out.append("characteristic arc: shortest complementary arc is not unique")
    return out


def generate_portrait_from_pair(tminus, tplus, map_kind: str = M2) -> OrbitPortrait:
    """Forward orbit of the leaf {t-, t+}, with classes sharing an angle merged."""
    if tminus == tplus:
        raise NoPortrait("angles must differ")
    for x in (tminus, tplus):
        per, pre = _angle_period(x, map_kind)
        if per == 0 or pre:
            raise NoPortrait(f"angle {fmt(x)} is not periodic")
    cur = frozenset((tminus, tplus))
    orbit = []
    while cur not in orbit:
        orbit.append(cur)
        cur = frozenset(image(x, map_kind) for x in cur)
    # merge classes that share angles until the partition stabilises
    classes = [set(A) for A in orbit]
    merged = True
    while merged:
        merged = False
        for i in range(len(classes)):
            for j in range(i + 1, len(classes)):
                if classes[i] & classes[j]:
                    classes[i] |= classes.pop(j)
                    merged = True
                    break
            if merged:
                break
    # order classes along the orbit starting from the one holding t-
    first = next(A for A in classes if tminus in A)
    ordered = [frozenset(first)]
    while True:
        img = frozenset(image(x, map_kind) for x in ordered[-1])
        nxt = next((frozenset(A) for A in classes if img & A), None)
        if nxt is None or nxt == ordered[0]:
            break
        if nxt in ordered:
            raise NoPortrait("class orbit does not close up")
        ordered.append(nxt)
    p = OrbitPortrait(tuple(ordered), map_kind)
    bad = validate_fop(p)
    if bad:
        raise NoPortrait("; ".join(bad))
    return p


def orbit_portraits(lam: "Lamination") -> list[OrbitPortrait]:
    """Group the periodic co-landing classes of a lamination into orbit portraits.

    A class belongs to a portrait when its image under the map is again a
    class; the portraits are the resulting cycles of classes.
    """
    kind = lam.map_kind
    classes = [frozenset(A) for A in lam.classes]
    index = {x: i for i, A in enumerate(classes) for x in A}
    succ = {}
    for i, A in enumerate(classes):
        imgs = {index.get(image(x, kind)) for x in A}
        if len(imgs) == 1 and None not in imgs:
            succ[i] = imgs.pop()
    seen = set()
    out = []
    for i in sorted(succ):
        if i in seen:
            continue
        cyc = [i]
        j = succ.get(i)
        while j is not None and j not in cyc:
            cyc.append(j)
            j = succ.get(j)
        if j == i:
            seen.update(cyc)
            out.append(OrbitPortrait(tuple(classes[k] for k in cyc), kind))
    return out


def _complementary_arcs(p: OrbitPortrait) -> list:
    out = []
    for A in p.classes:
        pos = [measure(x, p.map_kind) for x in A]
        for i in range(len(A)):
            j = (i + 1) % len(A)
            out.append((_ccw(pos[i], pos[j]), A[i], A[j]))
    return out


def characteristic_arc(p: OrbitPortrait) -> tuple:
    """Endpoints (t-, t+) of the shortest complementary arc, t+ lying counter-clockwise of t- by less than 1/2."""
    arcs = sorted(_complementary_arcs(p), key=lambda t: t[0])
    return arcs[0][1], arcs[0][2]


def characteristic_arc_bruteforce(p: OrbitPortrait) -> tuple:
    """Shortest arc between two angles of one class with no angle of that class inside."""
    best = None
    for A in p.classes:
        for a in A:
            for b in A:
                if a == b:
                    continue
                pa, pb = measure(a, p.map_kind), measure(b, p.map_kind)
                if any(in_open_arc(measure(x, p.map_kind), pa, pb) for x in A):
                    continue
                length = _ccw(pa, pb)
                if best is None or length < best[0]:
                    best = (length, a, b)
    return best[1], best[2]


def push_forward_E(p: OrbitPortrait) -> OrbitPortrait:
    if p.map_kind != M2:
        raise ValueError("push_forward_E takes an anti-doubling portrait")
    return OrbitPortrait(tuple(frozenset(E_inverse(x).itinerary for x in A) for A in p.classes), RHO)


def pull_back_E(p: OrbitPortrait) -> OrbitPortrait:
    if p.map_kind != RHO:
        raise ValueError("pull_back_E takes a reflection-map portrait")
    return OrbitPortrait(tuple(frozenset(rational_from_itinerary(x) for x in A) for A in p.classes), M2)


# ---------------------------------------------------------------------------
# laminations


def _leaf(a, b, kind):
    return tuple(sorted((a, b), key=lambda x: position(x, kind)))


@dataclass
class Lamination:
    leaves: set
    classes: list = field(default_factory=list)
    map_kind: str = M2
    levels: list = field(default_factory=list)
    resolution: dict = field(default_factory=dict)

    @classmethod
    def from_classes(cls, classes, kind: str = M2) -> "Lamination":
        leaves = set()
        cl = []
        for A in classes:
            s = cyclic_sorted(A, kind)
            cl.append(frozenset(s))
            if len(s) == 2:
                leaves.add(_leaf(s[0], s[1], kind))
            elif len(s) > 2:
                for i in range(len(s)):
                    leaves.add(_leaf(s[i], s[(i + 1) % len(s)], kind))
        return cls(leaves, cl, kind)

    @classmethod
    def from_leaves(cls, leaves, kind: str = M2) -> "Lamination":
        # classes are connected components of the endpoint graph
        parent = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                x = parent[x]
            return x

        for a, b in leaves:
            parent[find(a)] = find(b)
        comps = {}
        for x in list(parent):
            comps.setdefault(find(x), set()).add(x)
        return cls(set(leaves), [frozenset(v) for v in comps.values()], kind)

    def crossings(self) -> list:
        ls = sorted(self.leaves, key=lambda l: tuple(position(x, self.map_kind) for x in l))
        out = []
        for i in range(len(ls)):
            for j in range(i + 1, len(ls)):
                if leaves_cross(ls[i], ls[j], self.map_kind):
                    out.append((ls[i], ls[j]))
        return out

    def is_unlinked(self) -> bool:
        return not self.crossings()

    def to_json(self) -> dict:
        key = lambda l: tuple(position(x, self.map_kind) for x in l)
        return {
            "map": self.map_kind,
            "leaves": [[fmt(a), fmt(b)] for a, b in sorted(self.leaves, key=key)],
            "classes": sorted(([fmt(x) for x in cyclic_sorted(A, self.map_kind)] for A in self.classes)),
            "resolution": self.resolution,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def preimages(x, kind: str) -> list:
    if kind == M2:
        return list(m2_preimages(x))
    out = []
    for s in (1, 2, 3):
        try:
            out.append(x.prepend(s))
        except InadmissibleWord:
            pass
    if x.vertex is not None and not x.pre:
        out.append(x)  # a vertex is its own second preimage
    return out


def _critical_gap_arcs(majors, kind):
    """The two circle arcs that join endpoints of different majors (boundary of the critical gap)."""
    (a, b), (c, d) = [tuple(position(x, kind) for x in M) for M in majors]
    pts = sorted([a, b, c, d])
    owner = {a: 0, b: 0, c: 1, d: 1}
    return [(pts[i], pts[(i + 1) % 4]) for i in range(4) if owner[pts[i]] != owner[pts[(i + 1) % 4]]]


def _in_closed_arc(x, arc) -> bool:
    return x == arc[0] or x == arc[1] or in_open_arc(x, *arc)


def _inside_critical_gap(leaf, majors, gap_arcs, kind) -> bool:
    if leaf in majors:
        return False
    x, y = (position(t, kind) for t in leaf)
    for i, A in enumerate(gap_arcs):
        for j, B in enumerate(gap_arcs):
            if i != j and _in_closed_arc(x, A) and _in_closed_arc(y, B):
                if not (_in_closed_arc(x, B) and _in_closed_arc(y, B)) and not (_in_closed_arc(x, A) and _in_closed_arc(y, A)):
                    return True
    return False


def _pull_leaf(leaf, majors, kind, gap_arcs):
    a, b = leaf
    pa, pb = preimages(a, kind), preimages(b, kind)
    options = []
    for pairing in ((0, 1), (1, 0)):
        cand = [_leaf(pa[0], pb[pairing[0]], kind), _leaf(pa[1], pb[pairing[1]], kind)]
        if any(leaves_cross(c, M, kind) for c in cand for M in majors):
            continue
        if any(_inside_critical_gap(c, majors, gap_arcs, kind) for c in cand):
            continue
        options.append(cand)
    if len(options) != 1:
        raise NoPortrait(f"leaf {fmt(a)}-{fmt(b)} has {len(options)} admissible pullbacks")
    return options[0]


def majors_of(tminus, tplus, kind: str) -> list:
    pa, pb = preimages(tminus, kind), preimages(tplus, kind)
    a0, a1 = pa
    opts = [[_leaf(a0, pb[0], kind), _leaf(a1, pb[1], kind)], [_leaf(a0, pb[1], kind), _leaf(a1, pb[0], kind)]]

    def short(l):
        x, y = (measure(t, kind) for t in l)
        d = _ccw(x, y)
        return min(d, 1 - d)

    # the majors are the longer pair: they cut off the two short preimage arcs
    return max(opts, key=lambda o: min(short(l) for l in o))


def pullback_lamination(tminus, tplus, map_kind: str = M2, depth: int = 6) -> Lamination:
    """Leaves whose depth-th image is the characteristic leaf, for all depths up to ``depth``."""
    kind = map_kind
    root = _leaf(tminus, tplus, kind)
    majors = majors_of(tminus, tplus, kind)
    gap_arcs = _critical_gap_arcs(majors, kind)
    levels = [{root}]
    for _ in range(depth):
        nxt = set()
        for leaf in levels[-1]:
            if leaf == root:
                nxt.update(majors)
            else:
                nxt.update(_pull_leaf(leaf, majors, kind, gap_arcs))
        levels.append(nxt)
    lam = Lamination.from_leaves(set().union(*levels), kind)
    lam.levels = levels
    bad = lam.crossings()
    if bad:
        a, b = bad[0]
        raise NoPortrait(f"pullback leaves cross: {a} and {b}")
    return lam


def is_misiurewicz_type(lam: Lamination) -> bool:
    kind = lam.map_kind
    classes = [A for A in lam.classes if len(A) >= 2]
    if not classes:
        return False
    hits = []
    for A in classes:
        img = [image(x, kind) for x in A]
        if len(set(img)) * 2 == len(A) and all(img.count(y) == 2 for y in set(img)):
            hits.append(A)
    if len(hits) != 1:
        return False
    return all(_angle_period(x, kind)[1] > 0 for x in hits[0])


# ---------------------------------------------------------------------------
# parameter-plane models


def characteristic_pairs(max_period: int) -> list[tuple[Fraction, Fraction]]:
    """Characteristic pairs of valid anti-doubling portraits with both angles in [1/3, 2/3]."""
    lo, hi = FIXED[1], FIXED[2]
    found = set()
    for n in range(1, max_period + 1):
        pool = [x for x in periodic_angles(n) if lo <= x <= hi]
        for i, a in enumerate(pool):
            for b in pool[i + 1:]:
                try:
                    p = generate_portrait_from_pair(a, b, M2)
                except NoPortrait:
                    continue
                if characteristic_arc(p) == (a, b):
                    found.add((a, b))
    return sorted(found)


def parameter_lamination(max_period: int = 6, which: str = "L_model") -> Lamination:
    pairs = characteristic_pairs(max_period)
    if which == "L_model":
        lam = Lamination.from_classes([set(p) for p in pairs], M2)
    elif which == "CS_model":
        rho_pairs = [(E_inverse(a).itinerary, E_inverse(b).itinerary) for a, b in pairs]
        lam = Lamination.from_classes([set(p) for p in rho_pairs], RHO)
    else:
        raise ValueError(f"unknown model {which!r}")
    return lam


def model_isomorphism_check(depth: int = 6, transport=None) -> dict:
    """Check that the reflection-side model matches the anti-doubling model leaf by leaf.

    ``transport`` maps an itinerary to an anti-doubling angle; it defaults to
    the exact conjugacy and can be replaced to run a negative control.
    """
    transport = transport or rational_from_itinerary
    L = parameter_lamination(depth, "L_model")
    C = parameter_lamination(depth, "CS_model")
    mapped = set()
    failures = []
    for a, b in C.leaves:
        try:
            mapped.add(tuple(sorted((transport(a), transport(b)))))
        except (HitsFixedPoint, ValueError) as exc:
            failures.append(f"transport failed on {a}, {b}: {exc}")
    bijective = mapped == {tuple(sorted(l)) for l in L.leaves} and len(mapped) == len(C.leaves)
    if not bijective:
        failures.append("leaf sets do not correspond")
    ends_rho = sorted({x for l in C.leaves for x in l}, key=rho_position)
    seq = [transport(x) for x in ends_rho]
    order_ok = all(_ccw(seq[0], seq[i]) < _ccw(seq[0], seq[i + 1]) for i in range(1, len(seq) - 1)) if len(seq) > 2 else True
    if not order_ok:
        failures.append("cyclic order not preserved")
    crossings = len(L.crossings()) + len(C.crossings())
    if crossings:
        failures.append(f"{crossings} crossing pairs")
    per_period = {}
    for a, b in L.leaves:
        per_period[period_and_preperiod(a)[0]] = per_period.get(period_and_preperiod(a)[0], 0) + 1
    return {
        "depth": depth,
        "leaves": len(L.leaves),
        "bijective": bijective,
        "order_preserved": order_ok,
        "crossings": crossings,
        "leaves_per_angle_period": dict(sorted(per_period.items())),
        "passed": not failures,
        "failures": failures,
    }


def angle_leaf_json(leaf) -> list:
    return [fmt(x) for x in leaf]


__all__ = [
    "OrbitPortrait",
    "Lamination",
    "validate_fop",
    "generate_portrait_from_pair",
    "characteristic_arc",
    "characteristic_arc_bruteforce",
    "push_forward_E",
    "pull_back_E",
    "pullback_lamination",
    "is_misiurewicz_type",
    "parameter_lamination",
    "model_isomorphism_check",
    "angle",
]
