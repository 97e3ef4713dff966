"""Matching centres of the reflection family with centres of the real basilica limb.

A centre is matched through its characteristic ray pair: the two rays that
land together at the dynamical root and cut off the critical value. Pairs
on the reflection side are itineraries, and the conjugacy to anti-doubling
turns them into rational angles whose parameter rays lead to the matching
anti-polynomial centre.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import schwarz as S
from . import tricorn as T
from .coding import FIXED, E_inverse, periodic_angles, rational_from_itinerary
from .errors import AmbiguousRoot, NoConvergence, SeedFailed, SingularPoint, VerificationFailed, NoImage
from .portraits import M2, RHO, measure, pullback_lamination
from .sphere import INF

CLUSTER = 1e-4


@dataclass
class GeometricallyFiniteDescriptor:
    kind: str
    period: int
    characteristic_angles: tuple
    lamination_prefix: object = None
    preperiod: int = 0


@dataclass
class StraighteningResult:
    a: complex
    c: complex
    verified_depth: int
    residuals: dict = field(default_factory=dict)
    characteristic_angles_S: tuple = ()
    characteristic_angles_T: tuple = ()

    def to_json(self) -> dict:
        return {
            "a": [self.a.real, self.a.imag],
            "c": [self.c.real, self.c.imag],
            "characteristic_angles_S": [str(x) for x in self.characteristic_angles_S],
            "characteristic_angles_T": [f"{x.numerator}/{x.denominator}" for x in self.characteristic_angles_T],
            "verified_depth": self.verified_depth,
            "residuals": self.residuals,
        }


def winding_number(poly, p: complex) -> int:
    z = np.asarray(poly, dtype=complex) - p
    z = np.append(z, z[0])
    d = np.angle(z[1:] / z[:-1])
    return int(round(float(np.sum(d)) / (2 * math.pi)))


def limb_angles(period: int) -> list[Fraction]:
    """Periodic angles in [1/3, 2/3] whose period divides twice the given period."""
    k2 = 2 * period
    out = set()
    for n in range(1, k2 + 1):
        if k2 % n == 0:
            out.update(x for x in periodic_angles(n) if FIXED[1] <= x <= FIXED[2])
    return sorted(out)


def _ccw(a, b):
    d = (b - a) % 1
    return d


def _order_pair(x, y, pos):
    """Order a pair so the counter-clockwise arc from the first to the second is the short one."""
    px, py = pos(x), pos(y)
    return (x, y) if _ccw(px, py) <= 0.5 else (y, x)


def _pick(pairs, pos):
    """Among separating pairs, the one with the shortest arc."""
    if not pairs:
        raise AmbiguousRoot("no co-landing pair separates the critical point from the critical value")
    scored = sorted(pairs, key=lambda pr: min(_ccw(pos(pr[0]), pos(pr[1])), _ccw(pos(pr[1]), pos(pr[0]))))
    best = scored[0]
    if len(scored) > 1:
        l0 = min(_ccw(pos(best[0]), pos(best[1])), _ccw(pos(best[1]), pos(best[0])))
        l1 = min(_ccw(pos(scored[1][0]), pos(scored[1][1])), _ccw(pos(scored[1][1]), pos(scored[1][0])))
        if abs(l0 - l1) < 1e-12:
            raise AmbiguousRoot("two separating pairs have the same arc length")
    return _order_pair(best[0], best[1], pos)


# ---------------------------------------------------------------------------
# characteristic pairs


def characteristic_angles_schwarz(a, period: int | None = None):
    """Characteristic pair (as itineraries) of a centre of the reflection family."""
    m = S.SchwarzMap.at(a)
    k = period or S.critical_cycle(m, 64)
    if not k:
        raise SeedFailed(f"a={a} is not a centre")
    frame = S._frame(m)
    rays = {}
    for th in limb_angles(k):
        it = E_inverse(th).itinerary
        rays[it] = S.land_ray(m, it, 1e-8, 4000, frame)
    keys = list(rays)
    ends = [rays[i].landing_estimate for i in keys]
    groups = T.cluster_points(ends, CLUSTER)
    cands = []
    for g in groups:
        if len(g) < 2:
            continue
        z = ends[g[0]]
        if not _fixed_by(lambda w: S.orbit(m, w, k)[-1], z):
            continue
        for i in g:
            for j in g:
                if i < j:
                    loop = rays[keys[i]].polyline + list(reversed(rays[keys[j]].polyline))
                    if winding_number(loop, 0j) != 0:
                        cands.append((keys[i], keys[j]))
    return _pick(cands, lambda it: measure(it, RHO))


def _fixed_by(fk, z, tol=1e-5) -> bool:
    try:
        return abs(fk(z) - z) < tol
    except SingularPoint:
        return True  # the singular boundary points are fixed


def characteristic_angles_tricorn(c, period: int | None = None):
    """Characteristic pair (rational angles) of a centre of the anti-polynomial family."""
    c = complex(c)
    k = period or _tricorn_period(c)
    angles = limb_angles(k)
    rays = [T.land_dynamical_ray(c, th, 1e-9) for th in angles]
    ends = [r.landing_estimate for r in rays]
    groups = T.cluster_points(ends, CLUSTER)
    cands = []
    for g in groups:
        if len(g) < 2:
            continue
        if not _fixed_by(lambda w: T.orbit(c, w, k)[-1], ends[g[0]]):
            continue
        for i in g:
            for j in g:
                if i < j:
                    # close the loop far out, where the rays are almost radial
                    loop = rays[i].points + list(reversed(rays[j].points))
                    if winding_number(loop, 0j) != winding_number(loop, c):
                        cands.append((angles[i], angles[j]))
    return _pick(cands, float)


def _tricorn_period(c: complex, max_period: int = 64) -> int:
    z = 0j
    for n in range(1, max_period + 1):
        z = z.conjugate() ** 2 + c
        if abs(z) < 1e-9:
            return n
    raise SeedFailed(f"c={c} is not a centre")


# ---------------------------------------------------------------------------
# the correspondence


def chi_center(a, period: int | None = None) -> StraighteningResult:
    a = complex(a)
    m = S.SchwarzMap.at(a)
    k = period or S.critical_cycle(m, 64)
    if not k:
        raise SeedFailed(f"a={a} is not a centre")
    pair_s = characteristic_angles_schwarz(a, k)
    pair_t = tuple(rational_from_itinerary(x) for x in pair_s)
    if k == 1 or pair_t == (FIXED[1], FIXED[2]) and k == 2:
        seeds = [complex(-1.0)]
    else:
        ends = [T.trace_parameter_ray(t).landing_estimate for t in pair_t]
        mid = sum(ends) / 2
        seeds = [mid, ends[0], ends[1], complex(mid.real, 0.0)]
    c = None
    for seed in seeds:
        try:
            cand = T.find_center(k, seed)
        except NoConvergence:
            continue
        if _tricorn_period(cand) == k:
            c = cand
            break
    if c is None:
        raise SeedFailed(f"no period-{k} centre found from the parameter rays at {pair_t}")
    got = characteristic_angles_tricorn(c, k)
    if set(got) != set(pair_t):
        raise VerificationFailed(f"centre {c} has characteristic angles {got}, expected {pair_t}")
    res = {"schwarz": float(abs(_schwarz_residual(a, k))), "tricorn": float(abs(_tricorn_residual(c, k)))}
    return StraighteningResult(a, c, 0, res, pair_s, pair_t)


def _schwarz_residual(a, k):
    m = S.SchwarzMap.at(a)
    z = S.orbit(m, INF, k - 1)[-1]
    return z


def _tricorn_residual(c, k):
    return T.orbit(c, 0j, k)[-1]


def schwarz_centers(period: int, seeds=None) -> list[complex]:
    """Centres of the given period found from a seed scan, deduplicated."""
    if seeds is None:
        xs = np.linspace(-0.08, 0.25, 34)
        seeds = [complex(x, 0) for x in xs] + [complex(x, y) for x in np.linspace(-0.05, 0.25, 7) for y in (-0.15, -0.07, 0.07, 0.15)]
    found = []
    for s in seeds:
        try:
            a = S.find_center(period, s)
        except (NoConvergence, ValueError, ArithmeticError):
            continue
        try:
            if S.critical_cycle(S.SchwarzMap.at(a), period) != period:
                continue
        except (NoImage, SingularPoint, ValueError):
            continue
        if all(abs(a - b) > 1e-7 for b in found):
            found.append(a)
    return sorted(found, key=lambda z: (z.real, z.imag))


def chi_inverse_center(c, period: int | None = None) -> complex:
    """Reflection-family centre whose characteristic pair corresponds to that of c."""
    c = complex(c)
    k = period or _tricorn_period(c)
    target = set(characteristic_angles_tricorn(c, k))
    if k == 2:
        cands = [0j]
    else:
        cands = schwarz_centers(k)
    for a in cands:
        try:
            pair = characteristic_angles_schwarz(a, k)
        except AmbiguousRoot:
            continue
        if {rational_from_itinerary(x) for x in pair} == target:
            return a
    raise SeedFailed(f"no period-{k} centre matches the characteristic angles {sorted(target)}")


def verify_straightening(a, c, depth: int = 6) -> dict:
    """Compare the two pullback laminations leaf by leaf through the conjugacy."""
    pair_s = characteristic_angles_schwarz(a)
    pair_t = characteristic_angles_tricorn(c)
    mismatches = []
    if {rational_from_itinerary(x) for x in pair_s} != set(pair_t):
        mismatches.append("characteristic pairs do not correspond")
        return {"passed": False, "depth": 0, "mismatches": mismatches}
    ls = pullback_lamination(pair_s[0], pair_s[1], RHO, depth)
    lt = pullback_lamination(pair_t[0], pair_t[1], M2, depth)
    verified = 0
    for d in range(depth + 1):
        ms = {tuple(sorted(rational_from_itinerary(x) for x in leaf)) for leaf in ls.levels[d]}
        mt = {tuple(sorted(leaf)) for leaf in lt.levels[d]}
        if ms != mt:
            mismatches.append(f"level {d}: {len(ms ^ mt)} leaves differ")
            break
        verified = d
    return {"passed": not mismatches, "depth": verified, "mismatches": mismatches, "leaves": len(lt.leaves)}


# ---------------------------------------------------------------------------
# index experiment


def _real_component_boundary(find_boundary, centre: float, k: int, step: float, span: float):
    """Both real boundary points of the period-k component around a real centre."""
    out = []
    for sgn in (1, -1):
        inside = centre + sgn * step
        outside = centre + sgn * span
        out.append(find_boundary(k, (inside, outside)))
    return out


def index_experiment(period: int = 3) -> dict:
    """Fixed-point indices at the real parabolic boundary points of the period-3 components.

    Each real boundary point is labelled by the sign of the real derivative
    of the k-th iterate there: +1 is a saddle-node on the root arc, where the
    two characteristic rays land at the parabolic point and the critical
    Ecalle height vanishes by symmetry; -1 is a flip, which is the cusp where
    the two conjugate co-root arcs meet. Roots are paired with roots.
    """
    k = period
    a0 = S.find_center(k, 0.19)
    c0 = T.find_center(k, -1.75)
    s_pts = []
    for sgn in (1, -1):
        a, x, d = S.find_real_parabolic_boundary(k, (a0.real + sgn * 2e-5, a0.real + sgn * 5e-3))
        idx = S.parabolic_index(S.SchwarzMap.at(a), complex(x), k)
        s_pts.append({"parameter": a, "cycle_point": x, "derivative": d, "index": [idx.real, idx.imag], "arc": "root" if d > 0 else "cusp"})
    t_pts = []
    for sgn in (1, -1):
        cc, x, d = T.find_real_parabolic_boundary(k, (c0.real + sgn * 1e-3, c0.real + sgn * 0.1))
        idx = T.parabolic_index(cc, complex(x), k)
        t_pts.append({"parameter": cc, "cycle_point": x, "derivative": d, "index": [idx.real, idx.imag], "arc": "root" if d > 0 else "cusp"})
    # angle data on the anti-polynomial side: the characteristic parameter rays approach the root
    pair_t = characteristic_angles_tricorn(c0, k)
    ray_end = np.mean([T.trace_parameter_ray(t).landing_estimate for t in pair_t])
    nearest = min(t_pts, key=lambda p: abs(p["parameter"] - ray_end))
    for p in t_pts:
        p["approached_by_characteristic_rays"] = p is nearest
    rs = next(p for p in s_pts if p["arc"] == "root")
    rt = next(p for p in t_pts if p["arc"] == "root")
    if not rt["approached_by_characteristic_rays"]:
        raise VerificationFailed("root labelling disagrees with the parameter-ray data")
    return {
        "period": k,
        "schwarz": s_pts,
        "tricorn": t_pts,
        "characteristic_angles_T": [f"{t.numerator}/{t.denominator}" for t in pair_t],
        "iota_S": rs["index"][0],
        "iota_T": rt["index"][0],
        "separation": abs(rs["index"][0] - rt["index"][0]),
        "max_imag": max(abs(p["index"][1]) for p in s_pts + t_pts),
    }
