import pickle

import pytest
from hypothesis import given, strategies as st

from sdlab import antiholo as ah
from sdlab import sphere
from sdlab.config import DEFAULT, profile, with_overrides
from sdlab.sphere import INF

finite = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


def test_infinity_is_a_singleton():
    assert pickle.loads(pickle.dumps(INF)) is INF
    assert sphere.as_point(float("inf")) is INF
    assert sphere.as_point(2) == 2 + 0j
    assert sphere.from_json(sphere.to_json(INF)) is INF
    assert sphere.from_json(sphere.to_json(1 - 2j)) == 1 - 2j
    assert sphere.chart(INF) == 0


@given(finite, finite)
def test_chordal_distance_is_a_bounded_symmetric_metric(z, w):
    d = sphere.chordal_distance(z, w)
    assert 0 <= d <= 2 + 1e-12
    assert d == pytest.approx(sphere.chordal_distance(w, z))
    inv = sphere.as_point(1 / z) if z else INF
    assert sphere.chordal_distance(z, INF) == pytest.approx(sphere.chordal_distance(inv, 0j), abs=1e-12)


def test_profiles():
    assert profile("default") is DEFAULT
    assert profile("strict").ray_gap < DEFAULT.ray_gap
    with pytest.raises(ValueError):
        profile("nope")
    assert with_overrides(DEFAULT, vertex=1e-6).vertex == 1e-6


def test_wirtinger_chain_rule():
    # f(z) = conj(z)^2, derivative 2 conj(z) with one conjugation
    step = lambda z: (z.conjugate() ** 2, 2 * z.conjugate())
    z0 = 0.3 + 0.4j
    z2, d = ah.iterate_with_derivative(step, z0, 2)
    assert d.conjugations == 0
    # the second iterate is z^4, so its derivative is 4 z^3
    assert z2 == pytest.approx(z0 ** 4)
    assert d.value == pytest.approx(4 * z0 ** 3)
    w = ah.WirtingerValue(0.5 + 0.5j, 1)
    assert w.second_iterate == pytest.approx(0.5)


def test_newton_fixed_and_classification():
    step = lambda z: (z.conjugate() ** 2 - 1, 2 * z.conjugate())
    z = ah.newton_fixed(step, 1.5 + 0.1j, 2)
    assert abs(z - (1 + 5 ** 0.5) / 2) < 1e-12
    mult = ah.cycle_multiplier(step, [z])
    assert ah.classify_multiplier(mult, 1e-8) == "repelling"
    assert ah.classify_multiplier(ah.WirtingerValue(0j, 1), 1e-8) == "superattracting"
    assert ah.classify_multiplier(ah.WirtingerValue(1 + 0j, 0), 1e-8) == "parabolic"


def test_contour_index_of_a_polynomial():
    lam = 0.5 + 0.25j
    g = lambda z: lam * z + z ** 2
    assert abs(ah.index_by_contour(g, 0j) - 1 / (1 - lam)) < 1e-10


def test_contour_index_avoids_neighbouring_fixed_points():
    # fixed points at 0 and 2e-3: a loop of radius 1e-3 or more sees both
    lam = 0.5
    g = lambda z: z - (1 - lam) * z * (1 - z / 2e-3)
    assert abs(ah.index_by_contour(g, 0j) - 1 / (1 - lam)) < 1e-8


def test_contour_index_at_parabolic_points():
    # z + a z^2 + b z^3 has index b / a^2
    g = lambda z: z + z ** 2 + z ** 3
    assert abs(ah.index_by_contour(g, 0j) - 1) < 1e-8
    # double parabolic: z + z^3 + z^4 has index -1, and small loops lose precision
    g = lambda z: z + z ** 3 + z ** 4
    assert abs(ah.index_by_contour(g, 0j) + 1) < 1e-8


def test_holo_period():
    assert ah.holo_period(3) == 6 and ah.holo_period(4) == 4


def test_newton2_solves_a_smooth_system():
    root = ah.newton2(lambda c: c * c + 1, 0.5 + 0.5j, 1e-13)
    assert abs(root - 1j) < 1e-12
