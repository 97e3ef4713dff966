"""Points of the Riemann sphere: Python complex numbers plus one tagged infinity."""
from __future__ import annotations

import math


class _Infinity:
    """The point at infinity. A singleton; compares equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("sdlab.INF")


INF = _Infinity()


def is_inf(w) -> bool:
    return w is INF


def as_point(w):
    """Normalise input to ``complex`` or ``INF``. Non-finite floats become ``INF``."""
    if w is INF:
        return INF
    z = complex(w)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return INF
    return z


def chordal_distance(z, w) -> float:
    """Distance on the unit Riemann sphere; handles INF on either side."""
    if z is INF and w is INF:
        return 0.0
    if z is INF:
        return 2.0 / math.hypot(1.0, abs(w))
    if w is INF:
        return 2.0 / math.hypot(1.0, abs(z))
    return 2.0 * (abs(z - w) / math.hypot(1.0, abs(z))) / math.hypot(1.0, abs(w))


def chart(w) -> complex:
    """Local coordinate u = 1/w near infinity (INF -> 0)."""
    if w is INF:
        return 0j
    return 1.0 / w


def to_json(w):
    if w is INF:
        return "inf"
    return [w.real, w.imag]


def from_json(v):
    if v == "inf":
        return INF
    return complex(v[0], v[1])
