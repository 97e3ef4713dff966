"""Recompute the frozen reference values at 40 digits."""
import mpmath as mp
import pytest

import oracles as O


@pytest.fixture(scope="module")
def fresh():
    return O.compute_all()


@pytest.mark.parametrize("key,frozen", [
    ("S_root", (O.S_ROOT_PARAMETER, O.S_ROOT_POINT, O.S_ROOT_INDEX)),
    ("S_cusp", (O.S_CUSP_PARAMETER, O.S_CUSP_POINT, O.S_CUSP_INDEX)),
    ("T_root", (O.T_ROOT_PARAMETER, O.T_ROOT_POINT, O.T_ROOT_INDEX)),
    ("T_cusp", (O.T_CUSP_PARAMETER, O.T_CUSP_POINT, O.T_CUSP_INDEX)),
])
def test_parabolic_values_match_frozen(fresh, key, frozen):
    got = fresh[key]
    for g, f in zip(got, frozen):
        assert abs(complex(g) - f) < 1e-13


def test_real_cycle_derivatives_match_frozen(fresh):
    assert abs(fresh["S_D_0.1877"] - O.S_REAL_MULTIPLIER[0.1877]) < 1e-13
    assert abs(fresh["S_D_0.18725"] - O.S_REAL_MULTIPLIER[0.18725]) < 1e-13


def test_tricorn_real_centers_match_frozen(fresh):
    for k, vals in O.TRICORN_REAL_CENTERS.items():
        assert len(fresh["T_centers"][k]) == len(vals)
        for g, f in zip(fresh["T_centers"][k], vals):
            assert abs(g - f) < 1e-13


def test_tricorn_root_index_is_rational():
    # at c = -7/4 the 3-cycle is a real saddle-node and the index comes out as 47/98
    assert abs(O.T_ROOT_INDEX - 47 / 98) < 1e-14


def test_taylor_and_contour_index_agree_on_a_model_map():
    # f = z + z^2 + 2z^3: the second iterate is z + 2z^2 + 6z^3 + ..., index 6/4
    f = lambda z: z + z ** 2 + 2 * z ** 3
    t = O.taylor_index(f, mp.mpf(0))
    c = O.contour_index(lambda z: f(f(z)), mp.mpf(0), r=mp.mpf("1e-2"))
    assert abs(t - 1.5) < 1e-30
    assert abs(c - 1.5) < 1e-20


def test_tricorn_center_polynomial_period_two():
    # p^2(0) = c^2 + c
    assert [float(x) for x in O.tricorn_center_polynomial(2)] == [1.0, 1.0, 0.0]
