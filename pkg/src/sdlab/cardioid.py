"""Geometry of the main cardioid, its Schwarz reflection, and the circumscribing disk.

The cardioid is the univalent image of the unit disk under
``phi(l) = l/2 - l**2/4``. Its Schwarz reflection is ``phi(1/conj(l))`` in
the uniformising coordinate, and for every centre ``a`` there is a smallest
closed disk about ``a`` containing the cardioid. The gap between the two
(the droplet) is the fundamental tile of the reflection dynamics.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import CriticalPoint, OutsideCardioid, SlitError
from .sphere import INF, as_point

CUSP = 0.25 + 0j
TWO_PI = 2.0 * math.pi


def phi(lam):
    lam = as_point(lam)
    if lam is INF:
        return INF
    return lam / 2 - lam * lam / 4


def dphi(lam: complex) -> complex:
    return 0.5 - lam / 2


def phi_roots(w: complex) -> tuple[complex, complex]:
    s = cmath.sqrt(1 - 4 * w)
    return 1 + s, 1 - s


def phi_inverse(w, tol: float = 1e-12):
    """Return the preimage of ``w`` in the closed unit disk, or ``None`` if w is off the closed cardioid."""
    w = as_point(w)
    if w is INF:
        return None
    r1, r2 = phi_roots(w)
    # at most one root can sit in the closed disk (they sum to 2)
    best = r1 if abs(r1) <= abs(r2) else r2
    if abs(best) <= 1 + tol:
        return best
    return None


def schwarz_sigma(w, tol: float = 1e-12):
    w = as_point(w)
    lam = phi_inverse(w, tol)
    if lam is None:
        raise OutsideCardioid(f"{w} is outside the closed cardioid")
    if abs(lam) < 1e-150:
        return INF  # the true image overflows a double
    lb = lam.conjugate()
    return (2 * lb - 1) / (4 * lb * lb)


def sigma_wirtinger(w, tol: float = 1e-12) -> complex:
    """Anti-holomorphic derivative d(sigma)/d(conj w) inside the cardioid."""
    w = as_point(w)
    lam = phi_inverse(w, tol)
    if lam is None:
        raise OutsideCardioid(f"{w} is outside the closed cardioid")
    if lam == 0:
        raise CriticalPoint("sigma has a double pole at 0")
    lb = lam.conjugate()
    denom = lb * lb * dphi(lam).conjugate()
    if denom == 0:
        raise CriticalPoint("derivative undefined at the cusp")
    return -dphi(1 / lb) / denom


def boundary_point(t: float) -> complex:
    """Cardioid boundary point at parameter t (turns)."""
    return phi(cmath.exp(1j * TWO_PI * t))


# ---------------------------------------------------------------------------
# circumscribing circle


@dataclass(frozen=True)
class DropletGeometry:
    a: complex
    r: float
    alpha: complex
    t_alpha: float
    alpha_prime: complex
    degenerate: bool = False
    cusp: complex = field(default=CUSP)

    @property
    def theta_alpha(self) -> float:
        return TWO_PI * self.t_alpha


def _dist2_derivs(theta, a):
    e = np.exp(1j * theta)
    z = e / 2 - e * e / 4
    dz = (0.5 - e / 2) * 1j * e
    d2z = -0.5 * (1j * e) ** 2 + (0.5 - e / 2) * (-e)
    u = z - a
    d0 = (u * np.conj(u)).real
    d1 = 2 * (np.conj(u) * dz).real
    d2 = 2 * ((dz * np.conj(dz)).real + (np.conj(u) * d2z).real)
    return d0, d1, d2


def _polish(theta: float, a: complex, h: float, tol: Tolerances) -> float:
    for _ in range(tol.newton_steps):
        _, d1, d2 = _dist2_derivs(theta, a)
        if d2 >= 0:
            break
        step = -d1 / d2
        step = max(-h, min(h, step))
        theta += step
        if abs(step) < tol.newton_theta:
            break
    return theta % TWO_PI


def circumcircle(a, tol: Tolerances = DEFAULT) -> DropletGeometry:
    a = as_point(a)
    if a is INF:
        raise ValueError("the disk centre must be finite")
    n = tol.grid_samples
    grid = np.arange(n) * (TWO_PI / n)
    d0, _, _ = _dist2_derivs(grid, a)
    is_max = (d0 >= np.roll(d0, 1)) & (d0 >= np.roll(d0, -1))
    h = TWO_PI / n
    cands = []
    for k in np.flatnonzero(is_max):
        th = _polish(float(grid[k]), a, h, tol)
        cands.append((math.sqrt(float(_dist2_derivs(th, a)[0])), float(th)))
    rmax = max(c[0] for c in cands)
    top = [th for r, th in cands if rmax - r <= tol.slit_value]
    distinct = []
    for th in top:
        if all(abs((th - o + math.pi) % TWO_PI - math.pi) > tol.slit_angle for o in distinct):
            distinct.append(th)
    if len(distinct) > 1:
        raise SlitError(a, tuple(float(x) for x in distinct))
    theta = float(max(cands)[1])
    _, _, d2 = _dist2_derivs(theta, a)
    alpha = complex(phi(cmath.exp(1j * theta)))
    t = theta / TWO_PI
    alpha_prime = phi(1 / (2 - cmath.exp(1j * theta)).conjugate())
    return DropletGeometry(
        a=a,
        r=abs(alpha - a),
        alpha=alpha,
        t_alpha=t,
        alpha_prime=alpha_prime,
        degenerate=bool(abs(d2) < 1e-7),
    )


def circle_reflect(geom: DropletGeometry, w):
    w = as_point(w)
    if w is INF:
        return geom.a
    d = w - geom.a
    if d == 0:
        return INF
    return geom.a + geom.r * geom.r / d.conjugate()


def circle_reflect_wirtinger(geom: DropletGeometry, w: complex) -> complex:
    d = (w - geom.a).conjugate()
    return -geom.r * geom.r / (d * d)


class Region(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY_REGULAR = "boundary_regular"
    SINGULAR = "singular"
    OUTSIDE = "outside"


def droplet_contains(geom: DropletGeometry, w, tol: Tolerances = DEFAULT) -> Region:
    """Classify ``w`` against the droplet (closed disk minus open cardioid)."""
    w = as_point(w)
    if w is INF:
        return Region.OUTSIDE
    if abs(w - geom.alpha) < tol.singular or abs(w - CUSP) < tol.singular:
        return Region.SINGULAR
    dist = abs(w - geom.a)
    eps = tol.boundary * max(1.0, geom.r)
    if dist > geom.r + eps:
        return Region.OUTSIDE
    lam_abs = min(abs(x) for x in phi_roots(w))
    if lam_abs < 1 - tol.boundary:
        return Region.OUTSIDE
    if abs(dist - geom.r) <= eps or abs(lam_abs - 1) <= tol.boundary:
        return Region.BOUNDARY_REGULAR
    return Region.INTERIOR


# ---------------------------------------------------------------------------
# labelled square roots on the droplet
#
# A point z of the droplet has two cardioid-reflection preimages, coming from
# the two roots mu = 1 +- sqrt(1 - 4z) of phi(mu) = z. We fix a branch of the
# square root that is continuous off a cut running from the cusp straight to
# the tangency point (inside the cardioid) and then radially out of the disk.
# The cut never meets the open droplet, so the two roots carry consistent
# labels there: label 1 continues the identity along the boundary arc with
# parameter in (0, t_alpha), label 3 along (t_alpha, 1).


def _cut_sqrt(geom: DropletGeometry, z: complex) -> complex:
    d = (geom.alpha - geom.a) / abs(geom.alpha - geom.a)
    f1 = cmath.sqrt(-(z - geom.alpha) / d)
    dz = z - geom.alpha
    if dz == 0:
        return 0j
    f2 = cmath.sqrt((z - CUSP) / dz)
    return 2 * cmath.sqrt(d) * f1 * f2


def _label_sign(geom: DropletGeometry) -> int:
    t_ref = geom.t_alpha / 2
    z = boundary_point(t_ref)
    target = cmath.exp(1j * TWO_PI * t_ref)
    s = _cut_sqrt(geom, z)
    return 1 if abs(1 + s - target) < abs(1 - s - target) else -1


def labelled_roots(geom: DropletGeometry, z: complex) -> dict[int, complex]:
    """Roots of phi(mu)=z labelled 1 and 3 by the cut convention above."""
    eps = _label_sign(geom)
    s = _cut_sqrt(geom, z)
    return {1: 1 + eps * s, 3: 1 - eps * s}


def droplet_chart(geom: DropletGeometry, psi: float, frac: float) -> complex:
    """Point of the droplet in polar coordinates about the cusp.

    The cardioid is star-shaped about its cusp with radial function
    sin^2(psi/2), and the boundary point in direction psi has boundary
    parameter psi/2pi. ``frac`` in [0, 1] interpolates from the cardioid (0)
    to the circle (1).
    """
    e = cmath.exp(1j * psi)
    r_in = math.sin(psi / 2) ** 2
    d = CUSP - geom.a
    b = (d.conjugate() * e).real
    r_out = -b + math.sqrt(b * b - abs(d) ** 2 + geom.r ** 2)
    return CUSP + (r_in + frac * (r_out - r_in)) * e
