"""The ideal triangle with vertices at the cube roots of unity and its reflection map.

Side ``j`` is the circle orthogonal to the unit circle through the two
vertices bounding boundary arc ``j``: arc 1 is (0, 1/3), arc 2 is
(1/3, 2/3), arc 3 is (2/3, 1), all in turns. The piecewise map reflects a
point in the side that cuts it off from the triangle.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

from .config import DEFAULT, Tolerances
from .errors import InadmissibleWord, InteriorOfPi, OnVertex
from .sphere import INF

SQRT3 = math.sqrt(3.0)
OMEGA = cmath.exp(2j * math.pi / 3)
VERTICES = (1 + 0j, OMEGA, OMEGA * OMEGA)
SIDE_CENTERS = {
    1: 2 * cmath.exp(1j * math.pi / 3),
    2: -2 + 0j,
    3: 2 * cmath.exp(5j * math.pi / 3),
}
SIDE_RADIUS = SQRT3
# boundary arcs in turns, open intervals
ARCS = {1: (0.0, 1 / 3), 2: (1 / 3, 2 / 3), 3: (2 / 3, 1.0)}
VERTEX_ANGLES = (0.0, 1 / 3, 2 / 3)


def side_reflection(j: int, z):
    c = SIDE_CENTERS[j]
    if z is INF:
        return c
    d = z - c
    if d == 0:
        return INF
    return c + 3.0 / d.conjugate()


def side_of(z: complex, tol: Tolerances = DEFAULT):
    """Index of the closed side region containing z, or None if z is strictly inside the triangle."""
    best = None
    for j, c in SIDE_CENTERS.items():
        gap = abs(z - c) - SIDE_RADIUS
        if gap <= tol.side and (best is None or gap < best[1]):
            best = (j, gap)
    return best


def rho_disk(z: complex, tol: Tolerances = DEFAULT) -> complex:
    hit = side_of(z, tol)
    if hit is None:
        raise InteriorOfPi(f"{z} lies in the open triangle")
    j, gap = hit
    if abs(gap) <= tol.side:
        return z
    return side_reflection(j, z)


def arc_symbol(theta: float, tol: Tolerances = DEFAULT) -> int:
    t = theta % 1.0
    for v in VERTEX_ANGLES:
        if min(abs(t - v), 1 - abs(t - v)) <= tol.vertex:
            raise OnVertex(f"angle {theta} is a vertex")
    if t < 1 / 3:
        return 1
    if t < 2 / 3:
        return 2
    return 3


def _angle(z: complex) -> float:
    return (cmath.phase(z) / (2 * math.pi)) % 1.0


def rho_circle(theta: float, tol: Tolerances = DEFAULT) -> float:
    t = theta % 1.0
    try:
        j = arc_symbol(t, tol)
    except OnVertex:
        return t
    w = side_reflection(j, cmath.exp(2j * math.pi * t))
    return _angle(w / abs(w))


def rho_circle_preimages(theta: float) -> list[tuple[float, int]]:
    """The two preimages of an angle under the circle map, with their arc symbols."""
    z = cmath.exp(2j * math.pi * theta)
    out = []
    for j in (1, 2, 3):
        w = side_reflection(j, z)
        t = _angle(w / abs(w))
        lo, hi = ARCS[j]
        if lo < t < hi:
            out.append((t, j))
    return out


@dataclass(frozen=True)
class Word:
    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        for s in self.symbols:
            if s not in (1, 2, 3):
                raise InadmissibleWord(f"symbol {s} not in 1..3")

    @property
    def admissible(self) -> bool:
        return all(a != b for a, b in zip(self.symbols, self.symbols[1:]))

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return "".join(map(str, self.symbols))


def is_admissible(symbols) -> bool:
    return all(a != b for a, b in zip(symbols, symbols[1:]))


@dataclass(frozen=True)
class DiskTile:
    word: Word
    vertices: tuple

    @property
    def rank(self) -> int:
        return len(self.word)

    @property
    def diameter(self) -> float:
        v = self.vertices
        return max(abs(p - q) for p, q in itertools.combinations(v, 2))

    @property
    def centroid(self) -> complex:
        return sum(self.vertices) / 3


def tile_for_word(word) -> DiskTile:
    if not isinstance(word, Word):
        word = Word(tuple(word))
    if not word.admissible:
        raise InadmissibleWord(f"word {word} repeats a symbol")
    pts = list(VERTICES)
    for j in reversed(word.symbols):
        pts = [side_reflection(j, p) for p in pts]
    # reflections keep the vertices on the unit circle; renormalise rounding drift
    pts = [p / abs(p) for p in pts]
    return DiskTile(word=word, vertices=tuple(pts))


def admissible_words(rank: int):
    """All admissible words of the given length, in lexicographic order."""
    if rank == 0:
        yield ()
        return
    for w in itertools.product((1, 2, 3), repeat=rank):
        if is_admissible(w):
            yield w
