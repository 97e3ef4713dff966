from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from sdlab import portraits as P
from sdlab.coding import E_inverse, m2_map, periodic_angles, rational_from_itinerary
from sdlab.errors import NoPortrait

PERIODIC = sorted({x for n in range(1, 7) for x in periodic_angles(n)})


def test_fixed_portrait_validates():
    p = P.OrbitPortrait((frozenset({Fr(1, 3), Fr(2, 3)}),))
    assert P.validate_fop(p) == []
    assert P.characteristic_arc(p) == (Fr(1, 3), Fr(2, 3))


@pytest.mark.parametrize("classes", [
    ({Fr(1, 7), Fr(3, 7)},),                       # not closed under the map
    ({Fr(1, 3), Fr(2, 3)}, {Fr(1, 7), Fr(2, 7)}),  # classes of different sizes / not a cycle
    ({Fr(1, 6), Fr(5, 6)},),                       # preperiodic angles
])
def test_invalid_portraits_are_rejected(classes):
    p = P.OrbitPortrait(tuple(frozenset(A) for A in classes))
    assert P.validate_fop(p)


@pytest.mark.parametrize("pair,period", [
    ((Fr(3, 7), Fr(4, 7)), 3),
    ((Fr(7, 15), Fr(8, 15)), 4),
    ((Fr(2, 5), Fr(3, 5)), 2),
    ((Fr(4, 9), Fr(5, 9)), 3),
])
def test_portraits_from_characteristic_pairs(pair, period):
    p = P.generate_portrait_from_pair(*pair)
    assert P.validate_fop(p) == []
    assert p.period == period
    assert P.characteristic_arc(p) == pair
    assert P.characteristic_arc_bruteforce(p) == pair


@given(st.sampled_from(PERIODIC), st.sampled_from(PERIODIC))
def test_characteristic_arc_matches_brute_force(a, b):
    if a == b:
        return
    try:
        p = P.generate_portrait_from_pair(a, b)
    except NoPortrait:
        return
    assert P.validate_fop(p) == []
    assert P.characteristic_arc(p) == P.characteristic_arc_bruteforce(p)


def test_preperiodic_pairs_are_refused():
    with pytest.raises(NoPortrait):
        P.generate_portrait_from_pair(Fr(1, 6), Fr(5, 6))
    with pytest.raises(NoPortrait):
        P.generate_portrait_from_pair(Fr(1, 3), Fr(1, 3))


def test_transport_round_trip():
    p = P.generate_portrait_from_pair(Fr(3, 7), Fr(4, 7))
    q = P.push_forward_E(p)
    assert q.map_kind == P.RHO
    assert P.validate_fop(q) == []
    assert P.pull_back_E(q) == p
    direct = P.generate_portrait_from_pair(*(E_inverse(x).itinerary for x in (Fr(3, 7), Fr(4, 7))), map_kind=P.RHO)
    assert direct == q
    assert P.characteristic_arc(q) == tuple(E_inverse(x).itinerary for x in (Fr(3, 7), Fr(4, 7)))
    with pytest.raises(ValueError):
        P.pull_back_E(p)


def test_leaf_crossing():
    assert P.leaves_cross((Fr(1, 7), Fr(4, 7)), (Fr(2, 7), Fr(5, 7)))
    assert not P.leaves_cross((Fr(1, 7), Fr(2, 7)), (Fr(3, 7), Fr(4, 7)))
    assert not P.leaves_cross((Fr(1, 7), Fr(4, 7)), (Fr(2, 7), Fr(3, 7)))


def test_basilica_pullback_lamination():
    lam = P.pullback_lamination(Fr(1, 3), Fr(2, 3), depth=4)
    assert lam.is_unlinked()
    assert (Fr(1, 6), Fr(5, 6)) in lam.leaves
    assert len(lam.leaves) == 16
    for upper, lower in zip(lam.levels[1:], lam.levels):
        for a, b in upper:
            assert tuple(sorted((m2_map(a), m2_map(b)))) in {tuple(sorted(l)) for l in lower}


@pytest.mark.parametrize("pair", [(Fr(3, 7), Fr(4, 7)), (Fr(2, 5), Fr(3, 5))])
def test_pullback_commutes_with_the_conjugacy(pair):
    lam = P.pullback_lamination(*pair, depth=4)
    rho = P.pullback_lamination(*(E_inverse(x).itinerary for x in pair), map_kind=P.RHO, depth=4)
    assert rho.is_unlinked()
    moved = {tuple(sorted(rational_from_itinerary(x) for x in l)) for l in rho.leaves}
    assert moved == {tuple(sorted(l)) for l in lam.leaves}


def test_misiurewicz_detection():
    assert P.is_misiurewicz_type(P.Lamination.from_classes([{Fr(1, 12), Fr(7, 12)}]))
    assert not P.is_misiurewicz_type(P.Lamination.from_classes([{Fr(1, 3), Fr(2, 3)}]))


def test_characteristic_pairs_up_to_period_six():
    pairs = P.characteristic_pairs(6)
    assert len(pairs) == 18
    for a, b in [(Fr(1, 3), Fr(2, 3)), (Fr(3, 7), Fr(4, 7)), (Fr(2, 5), Fr(3, 5)), (Fr(4, 9), Fr(5, 9))]:
        assert (a, b) in pairs
    assert all(Fr(1, 3) <= a < b <= Fr(2, 3) for a, b in pairs)


@pytest.mark.parametrize("which", ["L_model", "CS_model"])
def test_parameter_laminations_are_unlinked(which):
    lam = P.parameter_lamination(6, which)
    assert len(lam.leaves) == 18
    assert lam.is_unlinked()


def test_model_isomorphism():
    res = P.model_isomorphism_check(6)
    assert res["passed"], res["failures"]
    assert res["leaves"] == 18


def test_model_isomorphism_negative_control():
    res = P.model_isomorphism_check(6, transport=lambda it: m2_map(rational_from_itinerary(it)))
    assert not res["passed"]


def test_lamination_json_is_stable():
    lam = P.parameter_lamination(4)
    assert lam.dumps() == P.parameter_lamination(4).dumps()
    data = lam.to_json()
    assert ["1/3", "2/3"] in data["leaves"]
    with pytest.raises(ValueError):
        P.parameter_lamination(4, "other")


def test_orbit_portraits_from_a_lamination():
    lam = P.Lamination.from_classes([{Fr(3, 7), Fr(4, 7)}, {Fr(1, 7), Fr(6, 7)}, {Fr(2, 7), Fr(5, 7)}])
    ports = P.orbit_portraits(lam)
    assert all(P.validate_fop(p) == [] for p in ports)
    assert [p.period for p in ports] == [3]
