import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdlab import triangle as tg
from sdlab.errors import InadmissibleWord, InteriorOfPi, OnVertex

angles = st.floats(0.0, 1.0, exclude_max=True)
sides = st.sampled_from([1, 2, 3])


def side_point(j, u):
    """Point of side j inside the disk, u in (0, 1) running between the two vertices."""
    c = tg.SIDE_CENTERS[j]
    # the side subtends 60 degrees at its centre, symmetric about the direction to 0
    base = cmath.phase(-c)
    return c + tg.SIDE_RADIUS * cmath.exp(1j * (base + (u - 0.5) * math.pi / 3))


def test_sides_are_orthogonal_to_the_circle():
    for j, c in tg.SIDE_CENTERS.items():
        assert abs(abs(c) ** 2 - 1 - tg.SIDE_RADIUS ** 2) < 1e-12
        lo, hi = tg.ARCS[j]
        for t in (lo, hi):
            v = cmath.exp(2j * math.pi * t)
            assert abs(abs(v - c) - tg.SIDE_RADIUS) < 1e-12


@given(sides, st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False))
def test_side_reflection_is_an_involution(j, z):
    if abs(z - tg.SIDE_CENTERS[j]) < 1e-3:
        return
    assert abs(tg.side_reflection(j, tg.side_reflection(j, z)) - z) < 1e-12 * max(1, abs(z))


@given(sides, st.floats(0.01, 0.99))
def test_side_reflection_fixes_its_side(j, u):
    p = side_point(j, u)
    assert abs(p) < 1
    assert abs(tg.side_reflection(j, p) - p) < 1e-12


@given(sides, angles)
def test_side_reflection_preserves_the_unit_circle(j, t):
    w = tg.side_reflection(j, cmath.exp(2j * math.pi * t))
    assert abs(abs(w) - 1) < 1e-12


def test_rho_circle_has_exactly_three_fixed_points():
    for v in tg.VERTEX_ANGLES:
        assert tg.rho_circle(v) == pytest.approx(v)
    ts = (np.arange(200000) + 0.5) / 200000
    gaps = []
    for t in ts:
        d = (tg.rho_circle(t) - t) % 1.0
        gaps.append(min(d, 1 - d))
    gaps = np.array(gaps)
    near_vertex = np.min(np.abs(ts[:, None] - np.array([0, 1 / 3, 2 / 3, 1])[None, :]), axis=1)
    # away from the vertices the map moves every point; the displacement is
    # quadratic in the distance to a parabolic vertex
    far = near_vertex > 1e-3
    assert np.all(gaps[far] > 1e-7)


@given(angles)
def test_rho_circle_is_a_double_cover(t):
    if min(abs(t - v) for v in (0, 1 / 3, 2 / 3, 1)) < 1e-9:
        return
    pre = tg.rho_circle_preimages(t)
    assert len(pre) == 2
    for s, j in pre:
        assert tg.arc_symbol(s) == j
        d = (tg.rho_circle(s) - t) % 1.0
        assert min(d, 1 - d) < 1e-9


@given(angles)
def test_circle_orbits_give_admissible_itineraries(t):
    syms = []
    x = t
    for _ in range(30):
        try:
            syms.append(tg.arc_symbol(x))
        except OnVertex:
            break
        x = tg.rho_circle(x)
    assert tg.is_admissible(syms)


def test_arc_symbol_rejects_vertices():
    with pytest.raises(OnVertex):
        tg.arc_symbol(1 / 3)


def test_rho_disk():
    with pytest.raises(InteriorOfPi):
        tg.rho_disk(0j)
    p = side_point(2, 0.3)
    assert tg.rho_disk(p) == p
    z = 0.95 * cmath.exp(2j * math.pi * 0.5)
    w = tg.rho_disk(z)
    # reflection in side 2 leaves the side-2 region
    assert abs(w) < 1
    hit = tg.side_of(w)
    assert hit is None or hit[0] != 2


@pytest.mark.parametrize("rank", range(0, 7))
def test_admissible_word_counts(rank):
    words = list(tg.admissible_words(rank))
    assert len(words) == (1 if rank == 0 else 3 * 2 ** (rank - 1))
    assert all(tg.is_admissible(w) for w in words)


def test_words_validate_their_symbols():
    with pytest.raises(InadmissibleWord):
        tg.Word((1, 4))
    with pytest.raises(InadmissibleWord):
        tg.tile_for_word((1, 1))
    assert str(tg.Word((1, 2, 3))) == "123"


@pytest.mark.parametrize("word", [(1,), (2, 1), (3, 1, 2), (1, 2, 1, 3)])
def test_tiles_are_ideal_triangles_on_the_circle(word):
    tile = tg.tile_for_word(word)
    assert tile.rank == len(word)
    for v in tile.vertices:
        assert abs(abs(v) - 1) < 1e-12
    # a rank n tile sits in the side region of its first symbol
    assert tg.side_of(tile.centroid)[0] == word[0]


def test_tiles_shrink_with_rank():
    d = [tg.tile_for_word((1, 2) * k + (1,)).diameter for k in range(1, 6)]
    assert all(x > y for x, y in zip(d, d[1:]))
