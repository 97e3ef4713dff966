"""Quadratic anti-polynomials z -> conj(z)^2 + c.

Rays are traced by Newton continuation in the escape potential: the point
of potential ``t`` on the ray at angle ``theta`` satisfies
``f^N(z) ~ exp(2^N t + 2 pi i (-2)^N theta)`` once the right-hand side is
large, because the Boettcher coordinate conjugates ``f`` to
``w -> conj(w)^2``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import antiholo as ah
from .antiholo import CycleRecord, WirtingerValue
from .coding import angle, angle_period, m2_map, m2_preimages, period_and_preperiod, periodic_angles
from .config import DEFAULT, Tolerances
from .errors import ContinuationStall, InsideTricorn, InvalidInput, NewtonStall

TWO_PI = 2 * math.pi
# |f^N| at which the Boettcher coordinate is replaced by the point itself
TARGET_RADIUS = 1e6


@dataclass(frozen=True)
class AntiPolynomial:
    c: complex

    def __call__(self, z):
        return f_apply(self.c, z)


def f_apply(c, z):
    zb = np.conj(z)
    return zb * zb + c


def step_function(c: complex):
    def step(z):
        zb = z.conjugate()
        return zb * zb + c, 2 * zb

    return step


def orbit(c, z, n: int) -> list:
    out = [complex(z)]
    for _ in range(n):
        out.append(f_apply(c, out[-1]))
    return out


def escape_time(c, z, R_esc: float = 4.0, max_iter: int = 1000):
    """First n with |f^n(z)| > R_esc, or None if the orbit stays bounded."""
    if R_esc < 4:
        raise InvalidInput("escape radius must be at least 4")
    z = complex(z)
    for n in range(max_iter + 1):
        if abs(z) > R_esc:
            return n
        zb = z.conjugate()
        z = zb * zb + c
    return None


def phi_big(c, R: float = 1e10, max_iter: int = 2000) -> complex:
    """Boettcher coordinate of the critical value, for c outside the connectedness locus."""
    c = complex(c)
    zs = [c]
    while abs(zs[-1]) <= R:
        if len(zs) > max_iter:
            raise InsideTricorn(f"critical orbit of c={c} stays bounded")
        zb = zs[-1].conjugate()
        zs.append(zb * zb + c)
    # phi(z_k) = z_k * u_k with u -> 1; each backward step takes one square root
    u = 1 + 0j
    for z in reversed(zs[:-1]):
        zb = z.conjugate()
        u = cmath.sqrt((1 + c / (zb * zb)) * u).conjugate()
    return c * u


def green(c, z, R: float = 1e10, max_iter: int = 2000) -> float:
    """Escape potential log|phi_c(z)|; 0 on the filled Julia set."""
    z = complex(z)
    for n in range(max_iter):
        if abs(z) > R:
            return math.log(abs(z)) / 2 ** n
        zb = z.conjugate()
        z = zb * zb + c
    return 0.0


# ---------------------------------------------------------------------------
# rays


@dataclass
class RayPath:
    angle: object
    points: list
    potentials: list
    landing_estimate: complex
    cauchy_gap: float
    level_points: list = field(default_factory=list)


def _target(theta, t: float) -> tuple[int, complex]:
    """Depth N and target value of f^N for potential t and angle theta."""
    n = max(0, math.ceil(math.log2(math.log(TARGET_RADIUS) / t)))
    if isinstance(theta, Fraction):
        th = float(angle(theta * (-2) ** n))
    else:
        th = (theta * (-2.0) ** n) % 1.0
    return n, cmath.exp(2 ** n * t + 2j * math.pi * th)


def _dyn_derivs(c, z, n):
    A, B = 1 + 0j, 0j
    for _ in range(n):
        zb = z.conjugate()
        A, B = 2 * zb * B.conjugate(), 2 * zb * A.conjugate()
        z = zb * zb + c
    return z, A, B


def _par_derivs(c, n):
    z, A, B = c, 1 + 0j, 0j
    for _ in range(n):
        zb = z.conjugate()
        A, B = 2 * zb * B.conjugate() + 1, 2 * zb * A.conjugate()
        z = zb * zb + c
    return z, A, B


def _newton(F, x, goal, iters=30):
    """Solve F(x)[0] = goal for a real-analytic F returning (value, d/dx, d/d conj x)."""
    for _ in range(iters):
        v, A, B = F(x)
        g = v - goal
        den = abs(A) ** 2 - abs(B) ** 2
        if den == 0 or not math.isfinite(den):
            return None
        dx = (-A.conjugate() * g + B * g.conjugate()) / den
        x += dx
        if abs(dx) < 1e-14 * max(1.0, abs(x)):
            v, _, _ = F(x)
            if abs(v - goal) <= 1e-6 * abs(goal):
                return x
            return None
    return None


def _continue(F_of_n, theta, x0, t0, t_end, samples, stall):
    """Follow the solution of F_N(x) = target(t) as the potential t decreases to t_end.

    Returns all points, their potentials, and the points at the dyadic
    potentials t0 / 2^j.
    """
    pts, pots, level_pts = [x0], [t0], [x0]
    x, t = x0, t0
    ratio = 2 ** (-1 / samples)
    next_level = t0 / 2
    last_step = None
    while t > t_end * (1 + 1e-12):
        t_new = max(t * ratio, next_level, t_end)
        sol = None
        for _ in range(40):
            n, goal = _target(theta, t_new)
            sol = _newton(lambda y: F_of_n(y, n), x, goal)
            # reject jumps onto a neighbouring ray
            if sol is not None and (last_step is None or abs(sol - x) <= 4 * last_step * (t - t_new) / (t * (1 - ratio)) + 1e-13):
                break
            sol = None
            t_new = t - (t - t_new) / 2
        if sol is None or t_new >= t:
            raise stall(f"continuation stalled at potential {t} (last point {x})")
        last_step = abs(sol - x) * (t * (1 - ratio)) / (t - t_new)
        x, t = sol, t_new
        pts.append(x)
        pots.append(t)
        if t == next_level:
            level_pts.append(x)
            next_level /= 2
    return pts, pots, level_pts


def _newton_segment(c, theta, t0, samples):
    """Ray points from potential t0 to t0/2 by Newton continuation (far from the Julia set)."""
    x0 = cmath.exp(t0 + 2j * math.pi * float(theta))
    n, goal = _target(theta, t0)
    x0 = _newton(lambda y: _dyn_derivs(c, y, n), x0, goal) or x0
    pts, pots, _ = _continue(lambda y, n: _dyn_derivs(c, y, n), theta, x0, t0, t0 / 2, samples, NewtonStall)
    return pts, pots


def _lift(c, path, anchor, max_refine=8):
    """Preimage of a polyline under f, continued from ``anchor`` (the preimage of path[0])."""
    out = [anchor]
    prev, src_prev = anchor, path[0]
    stack = list(reversed(path[1:]))
    budget = max_refine * len(path)
    while stack:
        w = stack.pop()
        r = cmath.sqrt(w - c).conjugate()
        d0, d1 = abs(r - prev), abs(-r - prev)
        near, far = min(d0, d1), max(d0, d1)
        if near > 0.5 * far and budget > 0:
            budget -= 1
            stack.append(w)
            stack.append((w + src_prev) / 2)
            continue
        prev = r if d0 <= d1 else -r
        src_prev = w
        out.append(prev)
    return out


def trace_dynamical_ray(c, theta, levels: int = 40, samples: int = 6, t0: float = math.log(100.0)) -> RayPath:
    """Dynamical ray at a rational angle from potential ``t0`` through ``levels`` halvings of the potential.

    The piece of the ray between potentials t/2 and t/4 is the preimage of the
    piece of the image ray between t and t/2, continued from the point already
    known at potential t/2. ``level_points`` holds the points at potentials
    t0 / 2^k; the Cauchy gap is the distance between the last two.
    """
    c = complex(c)
    th = angle(theta)
    per, pre = period_and_preperiod(th)
    cycle = [th]
    for _ in range(pre + per - 1):
        cycle.append(m2_map(cycle[-1]))
    periodic = cycle[pre:]
    segs = {}
    for a in periodic:
        segs[a] = [_newton_segment(c, a, t0, samples)[0]]
    for k in range(1, levels):
        new = {}
        for i, a in enumerate(periodic):
            img = periodic[(i + 1) % per]
            new[a] = _lift(c, segs[img][k - 1], segs[a][k - 1][-1])
        for a in periodic:
            segs[a].append(new[a])
    pieces = segs[periodic[0]]
    for i in reversed(range(pre)):
        a = cycle[i]
        head = _newton_segment(c, a, t0, samples)[0]
        lifted = [head]
        for piece in pieces[: levels - 1]:
            lifted.append(_lift(c, piece, lifted[-1][-1]))
        pieces = lifted
    pts = [pieces[0][0]]
    pots = [t0]
    for k, piece in enumerate(pieces):
        m = len(piece) - 1
        pts.extend(piece[1:])
        pots.extend(t0 * 2.0 ** (-k) * 2.0 ** (-(np.arange(1, m + 1) / m)))
    lv = [pieces[0][0]] + [pc[-1] for pc in pieces]
    gap = abs(lv[-1] - lv[-2])
    return RayPath(th, pts, [float(x) for x in pots], lv[-1], gap, lv)


def land_dynamical_ray(c, theta, gap: float = 1e-8, max_levels: int = 4000, samples: int = 6) -> RayPath:
    levels = 32
    while True:
        rp = trace_dynamical_ray(c, theta, levels, samples)
        if rp.cauchy_gap < gap or levels >= max_levels:
            return rp
        levels = min(max_levels, levels * 2)


def trace_parameter_ray(theta, levels: int | None = None, r_min: float = 1 + 1e-4, samples: int = 8, r_start: float = 4.0) -> RayPath:
    """Parameter ray: solves Phi(c) = r e^{2 pi i theta} for r decreasing from r_start to r_min."""
    th = angle(theta) if not isinstance(theta, float) else theta
    t0 = math.log(r_start)
    t_end = math.log(r_min)
    if levels is not None:
        t_end = max(t_end, t0 * 2.0 ** (-levels))
    c0 = r_start * cmath.exp(2j * math.pi * float(th))
    n, goal = _target(th, t0)
    c0 = _newton(lambda y: _par_derivs(y, n), c0, goal) or c0
    pts, pots, lv = _continue(lambda y, n: _par_derivs(y, n), th, c0, t0, t_end, samples, ContinuationStall)
    gap = abs(pts[-1] - pts[-2]) if len(pts) > 1 else math.inf
    return RayPath(th, pts, pots, pts[-1], gap, lv)


# ---------------------------------------------------------------------------
# centres, cycles, indices


def find_center(period: int, seed, tol: Tolerances = DEFAULT) -> complex:
    if period == 1:
        return 0j

    def res(c):
        z = 0j
        for _ in range(period):
            zb = z.conjugate()
            z = zb * zb + c
        return z

    def jac(c):
        z, A, B = _par_derivs(c, period - 1)
        return A, B

    c = ah.newton2(res, complex(seed), tol.center_residual, jacobian=jac)
    if complex(seed).imag == 0 and abs(c.imag) < 1e-10:
        c = complex(c.real, 0.0)
    return c


def multiplier(c, cycle) -> WirtingerValue:
    pts = cycle.points if isinstance(cycle, CycleRecord) else list(cycle)
    return ah.cycle_multiplier(step_function(complex(c)), pts)


def find_cycles(c, period: int, grid=None, tol: Tolerances = DEFAULT) -> list[CycleRecord]:
    c = complex(c)
    step = step_function(c)
    if grid is None:
        xs = np.linspace(-2.2, 2.2, 23)
        grid = [complex(x, y) for x in xs for y in xs]
    n = ah.holo_period(period)
    found: list[CycleRecord] = []
    for seed in grid:
        z = ah.newton_fixed(step, complex(seed), n)
        if z is None:
            continue
        pts = orbit(c, z, period)
        if abs(pts[-1] - z) > tol.cycle * max(1.0, abs(z)):
            continue
        if any(abs(pts[d] - z) < 1e-7 for d in range(1, period) if period % d == 0):
            continue
        cyc = pts[:-1]
        if any(min(abs(z - q) for q in rec.points) < 1e-7 for rec in found):
            continue
        mult = multiplier(c, cyc)
        found.append(CycleRecord(cyc, period, mult, ah.classify_multiplier(mult, tol.neutral_band)))
    return found


def parabolic_index(c, fixed_point: complex, return_period: int, tol: Tolerances = DEFAULT) -> complex:
    c = complex(c)
    n = ah.holo_period(return_period)

    def g(z):
        for _ in range(n):
            z = np.conj(z) ** 2 + c
        return z

    return ah.index_by_contour(g, fixed_point, tol)


def find_real_parabolic_boundary(period: int, bracket, seed_point: float = 0.0, tol: Tolerances = DEFAULT):
    """Real parameter where the real period-k cycle becomes parabolic; see the Schwarz counterpart."""
    inside, outside = (float(b) for b in bracket)
    return ah.real_parabolic_boundary(lambda a: step_function(complex(a, 0.0)), period, inside, outside, seed_point, tol)


# ---------------------------------------------------------------------------
# empirical laminations


def cluster_points(points: list, tol: float) -> list[list[int]]:
    """Single-linkage clusters of complex points at the given distance."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    arr = np.array(points)
    for i in range(n):
        close = np.flatnonzero(np.abs(arr[i + 1:] - arr[i]) < tol) + i + 1
        for j in close:
            parent[find(int(j))] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def lamination_angles(max_period: int, preperiod: int = 0) -> list[Fraction]:
    out = set()
    for p in range(1, max_period + 1):
        out.update(periodic_angles(p))
    frontier = set(out)
    for _ in range(preperiod):
        nxt = set()
        for t in frontier:
            for s in m2_preimages(t):
                if angle_period(s) == 0:
                    nxt.add(s)
        out |= nxt
        frontier = nxt
    return sorted(out)


def rational_lamination(c, max_period: int, levels: int = 200, preperiod: int = 0, cluster_tol: float = 1e-4):
    """Co-landing classes of the rays at the chosen rational angles."""
    from .portraits import Lamination

    c = complex(c)
    angles = lamination_angles(max_period, preperiod)
    landings = [land_dynamical_ray(c, t, gap=cluster_tol * 1e-3, max_levels=levels).landing_estimate for t in angles]
    groups = cluster_points(landings, cluster_tol)
    classes = [frozenset(angles[i] for i in g) for g in groups if len(g) > 1]
    reps = [np.mean([landings[i] for i in g]) for g in groups]
    spread = max((max(abs(landings[i] - landings[j]) for i in g for j in g) for g in groups), default=0.0)
    sep = min((abs(p - q) for i, p in enumerate(reps) for q in reps[i + 1:]), default=math.inf)
    lam = Lamination.from_classes(classes, "m2")
    lam.resolution = {"max_class_spread": float(spread), "min_separation": float(sep), "angles": len(angles)}
    return lam
