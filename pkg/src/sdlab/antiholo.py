"""Shared machinery for anti-holomorphic iteration: derivative bookkeeping,
periodic-cycle Newton, fixed-point indices and real-line parabolic solvers.

A *step* is a callable ``z -> (image, d image / d conj z)`` for one
application of an anti-holomorphic map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import ContourThroughZero, InvalidInput, NoBracketedCrossing, NoConvergence

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class WirtingerValue:
    """A derivative together with its conjugation parity (1 = anti-holomorphic)."""

    value: complex
    conjugations: int

    def then(self, other: "WirtingerValue") -> "WirtingerValue":
        """Derivative of ``other_map o self_map`` given both local derivatives."""
        v = self.value.conjugate() if other.conjugations else self.value
        return WirtingerValue(other.value * v, (self.conjugations + other.conjugations) % 2)

    @property
    def second_iterate(self) -> complex:
        """Multiplier of the holomorphic return map (the squared modulus for odd parity)."""
        if self.conjugations:
            return abs(self.value) ** 2 + 0j
        return self.value


@dataclass
class CycleRecord:
    points: list
    period: int
    multiplier: WirtingerValue
    classification: str


def iterate_with_derivative(step, z: complex, n: int) -> tuple[complex, WirtingerValue]:
    d = WirtingerValue(1 + 0j, 0)
    for _ in range(n):
        z, dz = step(z)
        d = d.then(WirtingerValue(dz, 1))
    return z, d


def holo_period(period: int) -> int:
    return period if period % 2 == 0 else 2 * period


def newton_fixed(step, z: complex, n: int, steps: int = 60, accept: float = 1e-10):
    """Newton for a fixed point of the holomorphic n-th iterate (n even)."""
    for _ in range(steps):
        gz, d = iterate_with_derivative(step, z, n)
        lam = d.value
        if lam == 1:
            return None
        dz = (gz - z) / (1 - lam)
        z = z + dz
        if not math.isfinite(abs(z)):
            return None
        if abs(dz) < 1e-15 * max(1.0, abs(z)):
            break
    gz, _ = iterate_with_derivative(step, z, n)
    return z if abs(gz - z) < accept * max(1.0, abs(z)) else None


def classify_multiplier(mult: WirtingerValue, band: float) -> str:
    r = abs(mult.value)
    if r == 0:
        return "superattracting"
    if r < 1 - band:
        return "attracting"
    if r > 1 + band:
        return "repelling"
    return "parabolic"


def cycle_multiplier(step, points: list) -> WirtingerValue:
    k = len(points)
    _, d = iterate_with_derivative(step, points[0], k)
    return WirtingerValue(d.value, k % 2)


# ---------------------------------------------------------------------------
# fixed-point index


def _contour_terms(g_array, z0: complex, radius: float, nodes: int):
    t = np.arange(nodes) * (TWO_PI / nodes)
    e = np.exp(1j * t)
    z = z0 + radius * e
    den = z - g_array(z)
    if not np.all(np.isfinite(den)) or np.min(np.abs(den)) == 0:
        raise ContourThroughZero("z - g(z) vanishes or is undefined on the contour")
    return complex(np.sum(radius * e / den) / nodes), float(np.min(np.abs(den)))


def contour_index(g_array, z0: complex, radius: float, nodes: int) -> complex:
    """Trapezoid rule for (1/2 pi i) times the loop integral of dz / (z - g(z))."""
    return _contour_terms(g_array, z0, radius, nodes)[0]


def index_by_contour(g_array, z0: complex, tol: Tolerances = DEFAULT) -> complex:
    """Contour index, anchored on the smallest pair of neighbouring radii that agree.

    Large loops can enclose other fixed points or poles of the return map
    and still give stable (wrong) values, so radii run from 32 times
    ``contour_radius`` (relative to |z0|) down to about a millionth of it.
    The smallest agreeing pair identifies the true value and the largest
    loop still matching it is returned, since bigger loops carry less
    rounding. Radii where rounding in z - g(z) exceeds a tenth of the
    agreement tolerance are skipped; near a double parabolic point that
    rules out all the small loops. With no agreeing pair at all, the
    best-agreeing one is used.
    """
    scale = max(1.0, abs(z0))
    vals = []
    for k in range(5, -21, -1):
        r = tol.contour_radius * scale * 2.0 ** k
        try:
            val, low = _contour_terms(g_array, z0, r, tol.contour_nodes)
        except ContourThroughZero:
            vals.append(None)
            continue
        vals.append(val if 1e-16 * scale / low < tol.contour_agree / 10 else None)
    pairs = [(i, abs(vals[i] - vals[i + 1])) for i in range(len(vals) - 1)
             if vals[i] is not None and vals[i + 1] is not None]
    if not pairs:
        raise ContourThroughZero("no usable contour radius")
    agreeing = [i for i, gap in pairs if gap < tol.contour_agree]
    if not agreeing:
        return vals[min(pairs, key=lambda p: p[1])[0] + 1]
    anchor = vals[agreeing[-1] + 1]
    i = agreeing[-1]
    while i > 0 and vals[i - 1] is not None and abs(vals[i - 1] - anchor) < tol.contour_agree:
        i -= 1
    return vals[i]


# ---------------------------------------------------------------------------
# parameter solvers


_SOFT = (InvalidInput, ArithmeticError, ValueError, OverflowError)


def newton2(residual, x0: complex, tol: float, max_iter: int = 80, h: float = 1e-7, jacobian=None) -> complex:
    """Damped Newton for a complex residual of a complex unknown, as two real unknowns.

    ``jacobian(x)`` may return the Wirtinger pair (d/dx, d/d conj x) of the
    residual; otherwise central differences are used.
    """
    x = complex(x0)
    f = residual(x)
    for _ in range(max_iter):
        if abs(f) < tol:
            return x
        if jacobian is not None:
            A, B = jacobian(x)
            den = abs(A) ** 2 - abs(B) ** 2
            if den == 0:
                raise NoConvergence("singular Jacobian")
            step = (-A.conjugate() * f + B * f.conjugate()) / den
        else:
            fx = (residual(x + h) - residual(x - h)) / (2 * h)
            fy = (residual(x + 1j * h) - residual(x - 1j * h)) / (2 * h)
            J = np.array([[fx.real, fy.real], [fx.imag, fy.imag]])
            try:
                dx = np.linalg.solve(J, [-f.real, -f.imag])
            except np.linalg.LinAlgError as exc:
                raise NoConvergence("singular Jacobian") from exc
            step = complex(dx[0], dx[1])
        t = 1.0
        while t > 1e-6:
            try:
                fn = residual(x + t * step)
                if abs(fn) < abs(f) or abs(fn) < tol:
                    break
            except _SOFT:
                pass
            t /= 2
        else:
            raise NoConvergence(f"line search failed at {x}")
        x, f = x + t * step, fn
    if abs(f) < tol:
        return x
    raise NoConvergence(f"residual {abs(f)} after {max_iter} steps")


def real_cycle_point(step_at, a: float, x0: float, k: int):
    """Real period-k point near ``x0`` for the real parameter ``a``, with the real derivative of the k-th iterate.

    ``step_at(a)`` builds the step function. Returns None when Newton leaves
    the real cycle (for instance past a saddle-node).
    """
    step = step_at(a)
    x = x0
    try:
        for _ in range(60):
            z, d = iterate_with_derivative(step, complex(x), k)
            r, dd = (z - x).real, d.value.real
            if dd == 1:
                return None
            dx = r / (1 - dd)
            x += dx
            if not math.isfinite(x):
                return None
            if abs(dx) < 1e-15 * max(1, abs(x)):
                break
        z, d = iterate_with_derivative(step, complex(x), k)
    except _SOFT:
        return None
    if abs(z - x) > 1e-9 * max(1, abs(x)):
        return None
    return x, d.value.real


def real_parabolic_boundary(step_at, k: int, inside: float, outside: float, seed: float, tol: Tolerances = DEFAULT):
    """Real parameter between ``inside`` and ``outside`` where the real k-cycle turns parabolic.

    Returns ``(a, x, d)``: the parameter, a real cycle point and the real
    derivative of the k-th iterate there (+1 for a saddle-node, -1 for a flip).
    """
    cur = real_cycle_point(step_at, inside, seed, k)
    if cur is None or abs(cur[1]) >= 1:
        raise NoBracketedCrossing(f"no attracting real {k}-cycle at {inside}")
    far = real_cycle_point(step_at, outside, cur[0], k)
    if far is not None and abs(far[1]) < 1:
        raise NoBracketedCrossing(f"the real {k}-cycle still attracts at {outside}")
    lo, hi, end = inside, outside, cur
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = real_cycle_point(step_at, mid, end[0], k)
        if r is not None and abs(r[1]) < 1:
            lo, end = mid, r
        else:
            hi = mid
        if abs(hi - lo) < 1e-13:
            break
    sign = 1.0 if end[1] > 0 else -1.0

    # polish: the parabolic condition is regular in (a, x) even at a saddle-node
    def res(a_, x_):
        z, d = iterate_with_derivative(step_at(a_), complex(x_), k)
        return np.array([(z - x_).real, d.value.real - sign])

    a, x = lo, end[0]
    for _ in range(40):
        f0 = res(a, x)
        if abs(f0[0]) < 1e-14 and abs(f0[1]) < 1e-13:
            break
        ha, hx = 1e-9 * max(1, abs(a)), 1e-8 * max(1, abs(x))
        J = np.column_stack([(res(a + ha, x) - res(a - ha, x)) / (2 * ha), (res(a, x + hx) - res(a, x - hx)) / (2 * hx)])
        try:
            da, dx = np.linalg.solve(J, -f0)
        except np.linalg.LinAlgError:
            break
        a, x = a + da, x + dx
    _, d = iterate_with_derivative(step_at(a), complex(x), k)
    dd = d.value.real
    if abs(dd * dd - 1) > tol.parabolic:
        raise NoConvergence(f"parabolic polish stalled: |lambda-1| = {abs(dd * dd - 1)}")
    return float(a), float(x), float(dd)
