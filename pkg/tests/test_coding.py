from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from sdlab import coding as ac
from sdlab.errors import HitsFixedPoint, InadmissibleWord, InvalidInput, NoRealization
from sdlab.triangle import rho_circle


def rationals(max_den=63):
    seen = set()
    for q in range(1, max_den + 1):
        for p in range(q):
            x = Fraction(p, q)
            if x not in seen:
                seen.add(x)
                yield x


def circ(x, y):
    d = (x - y) % 1.0
    return min(d, 1 - d)


fractions_ = st.builds(lambda p, q: Fraction(p % q, q), st.integers(0, 10 ** 6), st.integers(1, 400))


def _admissible(first, steps):
    out = [first]
    for k in steps:
        out.append((out[-1] + k - 1) % 3 + 1)
    return out


# each step moves to one of the two other arcs, so every word is admissible
words = st.builds(_admissible, st.sampled_from([1, 2, 3]), st.lists(st.sampled_from([1, 2]), max_size=6))


def test_anti_doubling_basics():
    assert ac.m2_map(Fraction(1, 7)) == Fraction(5, 7)
    assert set(ac.m2_preimages(Fraction(1, 3))) == {Fraction(1, 3), Fraction(5, 6)}
    assert ac.m2_branch(Fraction(1, 6), 2) == Fraction(5, 12)
    with pytest.raises(NoRealization):
        ac.m2_branch(Fraction(1, 2), 2)
    assert ac.period_and_preperiod(Fraction(1, 6)) == (1, 1)
    assert ac.period_and_preperiod(Fraction(1, 14)) == (6, 1)
    assert ac.angle_period(Fraction(1, 3)) == 1


@pytest.mark.parametrize("n,count", [(1, 3), (2, 0), (3, 6), (4, 12), (5, 30), (6, 54)])
def test_periodic_angle_counts(n, count):
    # |(-2)^n - 1| points of period dividing n; anti-doubling has no 2-cycles
    assert len(ac.periodic_angles(n)) == count


def test_exact_equivariance_for_small_denominators():
    checked = 0
    for x in rationals(63):
        try:
            it = ac.itinerary_of_rational(x)
        except HitsFixedPoint:
            continue
        assert ac.rational_from_itinerary(it) == x
        assert ac.itinerary_of_rational(ac.m2_map(x)) == it.shift()
        checked += 1
    assert checked > 900


def test_reflection_positions_are_equivariant_for_small_denominators():
    worst = 0.0
    for x in rationals(63):
        try:
            it = ac.itinerary_of_rational(x)
        except HitsFixedPoint:
            continue
        here, _ = ac.rho_angle_position(it, 40)
        there, _ = ac.rho_angle_position(it.shift(), 40)
        worst = max(worst, circ(rho_circle(here), there))
    assert worst < 1e-8


def test_fixed_points_are_vertices():
    for v in ac.FIXED:
        r = ac.E_inverse(v)
        assert r.itinerary.is_vertex
        assert r.numeric == pytest.approx(float(v), abs=1e-15)
        assert ac.E_of(r) == v
    for v in (0.0, 1 / 3, 2 / 3):
        assert ac.E_numeric(v) == pytest.approx(v, abs=1e-15)


def test_numeric_equivariance_on_samples():
    rng = np.random.default_rng(20261019)
    worst = 0.0
    for t in rng.random(1000):
        worst = max(worst, circ(ac.E_numeric(rho_circle(t), 40), -2 * ac.E_numeric(t, 40)))
    assert worst < 1e-6


def test_numeric_conjugacy_is_monotone():
    rng = np.random.default_rng(7)
    ts = np.sort(rng.random(2000))
    es = np.array([ac.E_numeric(t) for t in ts])
    # the conjugacy is very flat at the parabolic vertices, so ties are expected
    assert np.all(np.diff(es) >= -1e-12)
    assert es[0] >= 0 and es[-1] <= 1


def test_exact_conjugacy_preserves_cyclic_order():
    xs = sorted(x for x in rationals(31) if x not in ac.FIXED)
    pos = []
    for x in xs:
        pos.append(ac.E_inverse(x, allow_vertex=True).numeric)
    assert np.all(np.diff(pos) > 0)


def test_numeric_and_exact_conjugacy_agree():
    for x in (Fraction(1, 7), Fraction(2, 5), Fraction(5, 9), Fraction(11, 21)):
        r = ac.E_inverse(x)
        assert ac.E_numeric(r.numeric) == pytest.approx(float(x), abs=1e-9)


@given(fractions_)
def test_itinerary_round_trip(x):
    try:
        it = ac.itinerary_of_rational(x, allow_vertex=True)
    except HitsFixedPoint:
        raise AssertionError("allow_vertex should accept every angle")
    assert it.admissible
    assert ac.rational_from_itinerary(it) == x
    assert ac.parse_itinerary(str(it)) == it


@given(words, words)
def test_admissible_codes_are_realised(pre, per):
    assume(pre[-1] != per[0] and per[-1] != per[0])
    try:
        it = ac.Itinerary(tuple(pre), tuple(per))
    except InadmissibleWord:
        return
    if len(it.period) == 2:
        # alternating between two arcs squeezes onto their common vertex
        with pytest.raises(NoRealization):
            ac.rational_from_itinerary(it)
        return
    x = ac.rational_from_itinerary(it)
    assert ac.itinerary_of_rational(x, allow_vertex=True) == it


@given(words)
def test_shift_matches_the_map(per):
    assume(per[-1] != per[0])
    it = ac.Itinerary((), tuple(per))
    assume(len(it.period) != 2)
    x = ac.rational_from_itinerary(it)
    assert ac.rational_from_itinerary(it.shift()) == ac.m2_map(x)


def test_itinerary_normalisation():
    it = ac.Itinerary((1, 2), (1, 2))
    assert it.pre == () and it.period == (1, 2)
    assert ac.Itinerary((), (2, 3, 2, 3)).period == (2, 3)
    assert str(ac.Itinerary((1,), (), Fraction(2, 3))) == "1|@2/3"


@pytest.mark.parametrize("bad", [((1, 1), (2, 3)), ((), (2,)), ((), (1, 2, 1)), ((3,), (), Fraction(2, 3))])
def test_inadmissible_itineraries(bad):
    with pytest.raises(InadmissibleWord):
        ac.Itinerary(*bad)


def test_parsing_errors():
    with pytest.raises(InvalidInput):
        ac.parse_itinerary("123")
    with pytest.raises(InvalidInput):
        ac.parse_itinerary("1|x")
    with pytest.raises(HitsFixedPoint):
        ac.itinerary_of_rational(Fraction(1, 6))


def test_characteristic_itineraries_of_known_angles():
    assert str(ac.itinerary_of_rational(Fraction(3, 7))) == "|213231"
    assert ac.rational_from_itinerary(ac.parse_itinerary("|231213")) == Fraction(4, 7)
    assert str(ac.itinerary_of_rational(Fraction(1, 3), allow_vertex=True)) == "|@1/3"
