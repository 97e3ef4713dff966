"""Dynamics of the circle-and-cardioid reflection family.

For a centre ``a`` the map is the cardioid reflection on the closed
cardioid and reflection in the circumscribing circle outside the open disk.
Points of the open droplet have no image; reaching the droplet is escape.

Symbols: 2 for a point outside the closed disk, 1 or 3 for a point of the
cardioid, according to which preimage sheet of the droplet it belongs to.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import antiholo as ah
from . import cardioid as cd
from .antiholo import CycleRecord, WirtingerValue
from .cardioid import DropletGeometry, Region
from .coding import Itinerary
from .config import DEFAULT, Tolerances
from .errors import (
    BranchAmbiguity,
    CriticalPoint,
    LinearizationDiverged,
    NoConvergence,
    NoImage,
    NonEscaping,
    NotOddAttracting,
    SingularPoint,
)
from .sphere import INF, as_point

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SchwarzMap:
    a: complex
    geometry: DropletGeometry
    tol: Tolerances = field(default=DEFAULT, compare=False)

    @classmethod
    def at(cls, a, tol: Tolerances = DEFAULT) -> "SchwarzMap":
        a = complex(a)
        return cls(a, cd.circumcircle(a, tol), tol)


def _as_map(m, tol=DEFAULT) -> SchwarzMap:
    return m if isinstance(m, SchwarzMap) else SchwarzMap.at(m, tol)


@dataclass
class EscapeRecord:
    escapes: bool
    rank: int
    address: tuple
    terminal: object
    singular: bool = False


# ---------------------------------------------------------------------------
# the map


def in_cardioid(w: complex, tol: float = 1e-12) -> bool:
    return cd.phi_inverse(w, tol) is not None


def F_apply(m, w):
    m = _as_map(m)
    g = m.geometry
    w = as_point(w)
    if w is INF:
        return g.a
    region = cd.droplet_contains(g, w, m.tol)
    if region is Region.SINGULAR:
        raise SingularPoint(f"{w} is a singular point of the droplet")
    if region is Region.INTERIOR:
        raise NoImage(f"{w} lies in the open droplet")
    if in_cardioid(w, m.tol.boundary):
        return cd.schwarz_sigma(w, m.tol.boundary)
    return cd.circle_reflect(g, w)


def F_step_derivative(m: SchwarzMap, w: complex) -> tuple[object, complex]:
    """Image and anti-holomorphic derivative at a finite point."""
    g = m.geometry
    if in_cardioid(w, m.tol.boundary):
        if w == 0:
            raise CriticalPoint("0 is the critical point")
        return cd.schwarz_sigma(w), cd.sigma_wirtinger(w)
    if abs(w - g.a) < g.r - m.tol.boundary * max(1, g.r):
        raise NoImage(f"{w} lies in the open droplet")
    return cd.circle_reflect(g, w), cd.circle_reflect_wirtinger(g, w)


def orbit(m, w, n: int) -> list:
    m = _as_map(m)
    out = [as_point(w)]
    for _ in range(n):
        out.append(F_apply(m, out[-1]))
    return out


def step_function(m: SchwarzMap):
    return lambda z: F_step_derivative(m, z)


def iterate_with_derivative(m: SchwarzMap, z: complex, n: int) -> tuple[complex, WirtingerValue]:
    if z is INF:
        raise CriticalPoint("orbit passes through infinity")
    return ah.iterate_with_derivative(step_function(m), z, n)


def F_array(m: SchwarzMap, w: np.ndarray) -> np.ndarray:
    """Vectorised map on finite points; NaN marks points with no image."""
    g = m.geometry
    w = np.asarray(w, dtype=complex)
    s = np.sqrt(1 - 4 * w)
    r1, r2 = 1 + s, 1 - s
    lam = np.where(np.abs(r1) <= np.abs(r2), r1, r2)
    heart = np.abs(lam) <= 1 + m.tol.boundary
    with np.errstate(divide="ignore", invalid="ignore"):
        lb = np.conj(lam)
        sig = (2 * lb - 1) / (4 * lb * lb)
        d = np.conj(w - g.a)
        ref = g.a + g.r * g.r / d
    outside = np.abs(w - g.a) >= g.r * (1 - 1e-13)
    out = np.where(heart, sig, np.where(outside, ref, np.nan + 0j))
    return out


# ---------------------------------------------------------------------------
# symbols and escape


def sector_symbol(geom: DropletGeometry, w: complex) -> int:
    """Symbol of a cardioid point from the argument of its uniformising preimage."""
    lam = cd.phi_inverse(w)
    t = (cmath.phase(lam) / TWO_PI) % 1.0 if lam else 0.0
    return 1 if 0 < t < geom.t_alpha else 3


def sheet_symbol(geom: DropletGeometry, w: complex) -> int:
    """Symbol of a cardioid point from the labelled sheet its image lies on.

    Exact on every rank-one tile and on a collar of the cardioid boundary;
    elsewhere it is a continuous extension of the same labelling.
    """
    lam = cd.phi_inverse(w)
    if lam is None or lam == 0:
        return sector_symbol(geom, w)
    mu = 1 / lam.conjugate()
    z = cd.phi(mu)
    roots = cd.labelled_roots(geom, z)
    return 1 if abs(mu - roots[1]) <= abs(mu - roots[3]) else 3


def symbol_of(m: SchwarzMap, w, prev: int | None = None) -> int:
    if w is INF or abs(w - m.geometry.a) > m.geometry.r:
        return 2
    # a sheet maps into the complement of itself, so symbols 1 and 3 alternate
    if prev in (1, 3):
        return 4 - prev
    return sheet_symbol(m.geometry, w)


def classify_point(m, w, max_iter: int = 500) -> EscapeRecord:
    m = _as_map(m)
    z = as_point(w)
    address = []
    prev = None
    for n in range(max_iter + 1):
        if z is not INF:
            region = cd.droplet_contains(m.geometry, z, m.tol)
            if region in (Region.INTERIOR, Region.BOUNDARY_REGULAR):
                return EscapeRecord(True, n, tuple(address), z)
            if region is Region.SINGULAR:
                return EscapeRecord(False, n, tuple(address), z, singular=True)
        if n == max_iter:
            break
        prev = symbol_of(m, z, prev)
        address.append(prev)
        z = F_apply(m, z)
    return EscapeRecord(False, max_iter, tuple(address), z)


def depth(a, max_iter: int = 500, tol: Tolerances = DEFAULT) -> int:
    rec = classify_point(SchwarzMap.at(a, tol), INF, max_iter)
    if not rec.escapes:
        raise NonEscaping(f"critical value of a={a} did not escape in {max_iter} steps")
    return rec.rank


# ---------------------------------------------------------------------------
# inverse branches


def sigma_preimage(mu: complex):
    if mu == 0:
        return INF
    return cd.phi(1 / mu.conjugate())


def inverse_branches(m, z) -> list[tuple[object, int | None]]:
    m = _as_map(m)
    g = m.geometry
    z = as_point(z)
    if z is INF:
        return [(0j, None)]
    out = []
    if abs(z - g.a) <= g.r * (1 + 1e-13):
        out.append((cd.circle_reflect(g, z), 2))
    roots = cd.labelled_roots(g, z)
    for lab, mu in roots.items():
        if abs(mu) >= 1 - 1e-13:
            out.append((sigma_preimage(mu), lab))
    return out


def _lift_candidates(m: SchwarzMap, z, sym: int) -> list:
    if sym == 2:
        return [cd.circle_reflect(m.geometry, z)]
    if z is INF:
        return [0j]
    r1, r2 = cd.phi_roots(z)
    return [sigma_preimage(r1), sigma_preimage(r2)]


def _dist(p, q) -> float:
    if p is INF or q is INF:
        return math.inf if p is not q else 0.0
    return abs(p - q)


def lift_path(m: SchwarzMap, path: list, sym: int, anchor, max_refine: int = 12) -> list:
    """Lift a polyline through the inverse branch ``sym`` by continuation from ``anchor``.

    ``anchor`` is the known image of ``path[0]`` under the branch. Segments
    whose lift would jump between sheets are subdivided.
    """
    out = [anchor]
    prev = anchor
    stack = list(reversed(path[1:]))
    src_prev = path[0]
    refinements = 0
    while stack:
        z = stack.pop()
        cands = _lift_candidates(m, z, sym)
        if len(cands) == 1:
            out.append(cands[0])
            prev, src_prev = cands[0], z
            continue
        d0, d1 = _dist(cands[0], prev), _dist(cands[1], prev)
        if _dist(cands[0], cands[1]) < 1e-12:
            raise BranchAmbiguity(f"preimages of {z} coincide")
        near, far = (d0, d1) if d0 <= d1 else (d1, d0)
        if near > 0.5 * far and refinements < max_refine * len(path):
            refinements += 1
            stack.append(z)
            stack.append((z + src_prev) / 2)
            continue
        pick = cands[0] if d0 <= d1 else cands[1]
        out.append(pick)
        prev, src_prev = pick, z
    return out


# ---------------------------------------------------------------------------
# dynamical rays by pullback of tiles


@dataclass
class RayTrace:
    itinerary: Itinerary
    pieces: list
    tile_points: list
    landing_estimate: object
    cauchy_gap: float

    @property
    def polyline(self) -> list:
        pts = []
        for p in self.pieces:
            pts.extend(p if not pts else p[1:])
        return pts


class _RayFrame:
    """Basepoint and the three rank-one connector paths for one parameter."""

    def __init__(self, m: SchwarzMap, samples: int = 24):
        self.m = m
        g = m.geometry
        th = g.theta_alpha
        psi_b = th + math.pi
        psi = {1: TWO_PI + th / 2, 3: math.pi + th / 2}
        self.base = cd.droplet_chart(g, psi_b, 0.5)
        fr = np.linspace(0.5, 0.0, samples)
        to_base = {}
        to_base[2] = [cd.droplet_chart(g, psi_b, f) for f in np.linspace(0.5, 1.0, samples)]
        for j in (1, 3):
            sweep = [cd.droplet_chart(g, p, 0.5) for p in np.linspace(psi_b, psi[j], samples)]
            down = [cd.droplet_chart(g, psi[j], f) for f in fr[1:]]
            to_base[j] = sweep + down
        self.connector = {}
        for j in (1, 2, 3):
            L = to_base[j]
            if j == 2:
                lifted = [cd.circle_reflect(g, z) for z in L]
            else:
                lifted = [sigma_preimage(cd.labelled_roots(g, z)[j]) for z in L]
            # out along L to the shared edge, back along its preimage
            self.connector[j] = L + list(reversed(lifted))[1:]
        # vertex rays: paths inside the tile ending at the singular points
        far = np.linspace(0.5, 0.02, samples)
        self.vertex_path = {
            0: [cd.droplet_chart(g, p, 0.5) for p in np.linspace(psi_b, TWO_PI, samples)]
            + [cd.CUSP + f * (cd.droplet_chart(g, TWO_PI, 0.5) - cd.CUSP) / 0.5 for f in far] + [cd.CUSP],
            1: [cd.droplet_chart(g, p, 0.5) for p in np.linspace(psi_b, th + TWO_PI * (1 - 1e-6), samples * 2)]
            + [g.alpha],
            2: [cd.droplet_chart(g, p, 0.5) for p in np.linspace(psi_b, th + TWO_PI * 1e-6, samples * 2)]
            + [g.alpha],
        }

    def vertex_key(self, v) -> int:
        return {0: 0}.get(v, 1 if v * 3 == 1 else 2)


def _frame(m: SchwarzMap) -> _RayFrame:
    return _RayFrame(m)


def trace_dynamical_ray(m, it: Itinerary, depth: int = 60, frame: _RayFrame | None = None) -> RayTrace:
    """Tile-by-tile pullback of the ray with the given code.

    The k-th piece joins the representative of the rank-k tile to that of
    the rank-(k+1) tile along the ray; successive tile representatives
    converge to the landing point.
    """
    m = _as_map(m)
    fr = frame or _frame(m)
    if it.period:
        per = it.period
        p = len(per)
        cyc = [[fr.connector[per[i]]] for i in range(p)]
        for k in range(1, depth):
            new = []
            for i in range(p):
                src = cyc[(i + 1) % p][k - 1]
                anchor = cyc[i][k - 1][-1]
                new.append(lift_path(m, src, per[i], anchor))
            for i in range(p):
                cyc[i].append(new[i])
        pieces = cyc[0]
    else:
        pieces = [fr.vertex_path[fr.vertex_key(it.vertex)]]
    for s in reversed(it.pre):
        head = fr.connector[s]
        lifted = []
        anchor = head[-1]
        for piece in pieces[: max(depth - 1, 0)] if it.period else pieces:
            lp = lift_path(m, piece, s, anchor)
            lifted.append(lp)
            anchor = lp[-1]
        pieces = [head] + lifted
    tiles = [pc[-1] for pc in pieces]
    gap = _dist(tiles[-1], tiles[-2]) if len(tiles) > 1 else math.inf
    if it.vertex is not None:
        gap = 0.0
    return RayTrace(it, pieces, tiles, tiles[-1], gap)


def land_ray(m, it: Itinerary, gap: float = 1e-7, max_depth: int = 2000, frame=None) -> RayTrace:
    """Trace with growing depth until the Cauchy gap falls below ``gap``."""
    m = _as_map(m)
    fr = frame or _frame(m)
    depth = 8 * max(len(it.period), 1) + len(it.pre)
    while True:
        tr = trace_dynamical_ray(m, it, depth, fr)
        if tr.cauchy_gap < gap or depth >= max_depth:
            return tr
        depth = min(max_depth, depth * 2)


# ---------------------------------------------------------------------------
# cycles, multipliers, indices


def critical_cycle(m: SchwarzMap, max_period: int = 64):
    """Period of the superattracting cycle through 0 and infinity, if any."""
    z = INF
    for n in range(1, max_period + 1):
        try:
            z = F_apply(m, z)
        except (NoImage, SingularPoint):
            return None
        if z is not INF and abs(z) < 1e-12:
            return n + 1
    return None


def find_cycles(m, period: int, grid=None) -> list[CycleRecord]:
    m = _as_map(m)
    g = m.geometry
    found: list[CycleRecord] = []
    cp = critical_cycle(m, period)
    if cp == period:
        pts = orbit(m, 0j, period - 1)
        found.append(CycleRecord(pts, period, WirtingerValue(0j, period % 2), "superattracting"))
    if grid is None:
        xs = np.linspace(g.a.real - 1.5 * g.r, g.a.real + 1.5 * g.r, 25)
        ys = np.linspace(g.a.imag - 1.5 * g.r, g.a.imag + 1.5 * g.r, 25)
        grid = [complex(x, y) for x in xs for y in ys]
    n = ah.holo_period(period)
    for seed in grid:
        try:
            z = ah.newton_fixed(step_function(m), complex(seed), n)
        except (NoImage, CriticalPoint, SingularPoint, ZeroDivisionError, OverflowError):
            continue
        if z is None:
            continue
        try:
            pts = orbit(m, z, period)
        except (NoImage, SingularPoint):
            continue
        if any(p is INF for p in pts):
            continue
        # the droplet boundary is fixed pointwise; those points escape
        if cd.droplet_contains(g, z, m.tol) is not Region.OUTSIDE:
            continue
        # Newton creeps towards the parabolic-like singular points; not cycles
        if any(min(abs(q - g.alpha), abs(q - cd.CUSP)) < 1e-5 for q in pts):
            continue
        if abs(pts[-1] - z) > m.tol.cycle * max(1.0, abs(z)):
            continue
        if any(abs(pts[d] - z) < 1e-7 * max(1.0, abs(z)) for d in range(1, period) if period % d == 0):
            continue
        cyc = pts[:-1]
        if any(min(abs(c - q) for q in rec.points if q is not INF) < 1e-7 for rec in found for c in cyc[:1]):
            continue
        mult = multiplier(m, cyc)
        found.append(CycleRecord(cyc, period, mult, ah.classify_multiplier(mult, m.tol.neutral_band)))
    return found


def multiplier(m, cycle) -> WirtingerValue:
    m = _as_map(m)
    pts = cycle.points if isinstance(cycle, CycleRecord) else list(cycle)
    k = len(pts)
    if any(p is INF or p == 0 for p in pts):
        return WirtingerValue(0j, k % 2)
    _, d = iterate_with_derivative(m, pts[0], k)
    if k % 2:
        return WirtingerValue(d.value if d.conjugations else 0j, 1)
    return WirtingerValue(d.value, 0)


def multiplier_fd(m, z: complex, k: int, h: float = 1e-6) -> complex:
    """Finite-difference derivative of the k-th iterate (anti-holomorphic part for odd k)."""
    m = _as_map(m)
    f = lambda w: orbit(m, w, k)[-1]
    if k % 2:
        return (f(z + h) - f(z - h)) / (2 * h)
    return (f(z + h) - f(z - h)) / (2 * h)


def parabolic_index(m, fixed_point: complex, return_period: int) -> complex:
    """Holomorphic fixed-point index of the even return map at a cycle point.

    ``return_period`` is the period of the cycle under the map itself; odd
    periods use the second iterate.
    """
    m = _as_map(m)
    n = ah.holo_period(return_period)

    def g(z):
        for _ in range(n):
            z = F_array(m, z)
        return z

    return ah.index_by_contour(g, fixed_point, m.tol)


# ---------------------------------------------------------------------------
# Koenigs ratio


def koenigs_ratio(a, period: int | None = None, max_steps: int = 20000, tol: Tolerances = DEFAULT) -> complex:
    m = _as_map(a, tol)
    k = period
    cp = critical_cycle(m, 64)
    if cp is not None and (k is None or cp == k):
        if cp % 2 == 0:
            raise NotOddAttracting(f"critical cycle has even period {cp}")
        return 0j
    if k is None or k % 2 == 0:
        raise NotOddAttracting("an odd period is required")
    n = 2 * k
    # run the critical value into the basin
    z = INF
    count = 0
    for _ in range(max_steps):
        z = F_apply(m, z)
        count += 1
        if count % n == 0 and z is not INF:
            w = ah.newton_fixed(step_function(m), z, n, steps=80)
            if w is not None and abs(w - z) < 1e-3 * max(1.0, abs(w)):
                break
    else:
        raise NotOddAttracting("critical orbit did not settle on a cycle")
    za = w
    _, d = iterate_with_derivative(m, za, n)
    lam = d.value
    if abs(lam) >= 1:
        raise NotOddAttracting(f"cycle multiplier {lam} is not attracting")

    # second-order term of the linearising map, so the limit can stop well
    # above the rounding floor: kappa(za + w) = w + c w^2 + O(w^3)
    h = 1e-4 * max(1.0, abs(za))
    g = lambda x: orbit(m, x, n)[-1]
    g2 = (g(za + h) - 2 * za + g(za - h)) / (h * h)
    c2 = g2 / (2 * (lam - lam * lam))

    def kappa(v):
        prev = None
        x = v
        scale = 1.0 + 0j
        for _ in range(max_steps):
            x = g(x)
            scale *= lam
            w = x - za
            cur = (w + c2 * w * w) / scale
            if prev is not None and abs(cur - prev) <= tol.koenigs_rel * abs(cur):
                return cur
            if abs(w) < 1e-7 * max(1.0, abs(za)):
                if prev is None:
                    raise LinearizationDiverged("orbit collapsed before linearising")
                return cur
            prev = cur
        raise LinearizationDiverged("Koenigs iteration did not converge")

    v = z
    fkv = orbit(m, v, k)[-1]
    return kappa(fkv) / kappa(v)


# ---------------------------------------------------------------------------
# parameter-plane solvers


def _center_residual(a: complex, period: int) -> complex:
    m = SchwarzMap.at(a)
    z = m.a
    for _ in range(period - 2):
        z = F_apply(m, z)
        if z is INF:
            raise NoImage("orbit reached infinity early")
    return z


def find_center(period: int, seed, tol: Tolerances = DEFAULT) -> complex:
    if period < 2:
        raise NoConvergence("the family has no centre of period 1")
    if period == 2:
        return 0j
    a = ah.newton2(lambda x: _center_residual(x, period), complex(seed), tol.center_residual)
    if abs(complex(seed).imag) == 0 and abs(a.imag) < 1e-10:
        a = complex(a.real, 0.0)
    return a


def _step_at(a: float):
    return step_function(SchwarzMap.at(complex(a, 0.0)))


def find_real_parabolic_boundary(period: int, bracket, seed_point: float | None = None, tol: Tolerances = DEFAULT):
    """Real parameter where the real period-k cycle becomes parabolic.

    ``bracket = (inside, outside)`` with the real cycle attracting at
    ``inside``. ``seed_point`` is a point of that cycle; it defaults to
    ``inside`` itself, which sits next to the cycle point near the critical
    value when ``inside`` is close to a centre. Returns ``(a, x, d)`` where
    ``d`` is the real derivative of the k-th iterate (+1 or -1).
    """
    inside, outside = (float(b) for b in bracket)
    seed = inside if seed_point is None else float(seed_point)
    return ah.real_parabolic_boundary(_step_at, period, inside, outside, seed, tol)


def slit_orbit_check(a: float, n: int = 100) -> tuple[bool, list]:
    """Orbit of infinity on the real line for a slit parameter, using the interval dynamics."""
    a = float(a)
    if not a < -1 / 12:
        raise ValueError("slit parameters satisfy a < -1/12")
    ts = np.linspace(0, TWO_PI, 4096, endpoint=False)
    pts = np.exp(1j * ts) / 2 - np.exp(2j * ts) / 4
    r = float(np.max(np.abs(pts - a)))
    q = a - r
    x = a
    out = [x]
    for _ in range(n - 1):
        if -0.75 <= x < 0:
            lam = 1 - math.sqrt(1 - 4 * x)
            x = (2 * lam - 1) / (4 * lam * lam)
        elif x == 0:
            x = a
        elif x <= q:
            x = a + r * r / (x - a)
        else:
            break
        out.append(x)
    return all(v <= 0 for v in out), out
