from fractions import Fraction as Fr

import pytest

import oracles as O
from sdlab import straightening as ST
from sdlab.coding import E_inverse, rational_from_itinerary
from sdlab.errors import SeedFailed

AIRPLANE = O.TRICORN_REAL_CENTERS[3][0]


def test_winding_number():
    square = [1, 1j, -1, -1j, 1]
    assert ST.winding_number(square, 0j) == 1
    assert ST.winding_number(square[::-1], 0j) == -1
    assert ST.winding_number(square, 3 + 0j) == 0


def test_limb_angles():
    angles = ST.limb_angles(3)
    assert Fr(3, 7) in angles and Fr(4, 7) in angles
    assert all(Fr(1, 3) <= x <= Fr(2, 3) for x in angles)


@pytest.mark.parametrize("c,pair", [(-1.0, (Fr(1, 3), Fr(2, 3))), (AIRPLANE, (Fr(3, 7), Fr(4, 7)))])
def test_tricorn_characteristic_angles(c, pair):
    assert ST.characteristic_angles_tricorn(c) == pair


@pytest.mark.parametrize("a,pair", [(0.0, (Fr(1, 3), Fr(2, 3))), (3 / 16, (Fr(3, 7), Fr(4, 7)))])
def test_schwarz_characteristic_angles(a, pair):
    its = ST.characteristic_angles_schwarz(a)
    assert tuple(rational_from_itinerary(x) for x in its) == pair


def test_schwarz_characteristic_angles_need_a_centre():
    with pytest.raises(SeedFailed):
        ST.characteristic_angles_schwarz(10.0)


@pytest.mark.parametrize("a,c", [(0.0, -1.0), (3 / 16, AIRPLANE), (2 / 9, O.TRICORN_REAL_CENTERS[4][0]),
                                 (O.S_CENTERS[4][1], O.TRICORN_REAL_CENTERS[4][1])])
def test_chi_on_real_centres(a, c):
    res = ST.chi_center(a)
    assert abs(res.c - c) < 1e-8
    assert tuple(E_inverse(x).itinerary for x in res.characteristic_angles_T) == res.characteristic_angles_S
    data = res.to_json()
    assert set(data) >= {"a", "c", "characteristic_angles_S", "characteristic_angles_T"}


@pytest.mark.parametrize("c,a", [(-1.0, 0.0), (AIRPLANE, 3 / 16)])
def test_chi_inverse(c, a):
    assert abs(ST.chi_inverse_center(c) - a) < 1e-8


@pytest.mark.parametrize("a,c", [(0.0, -1.0), (3 / 16, AIRPLANE)])
def test_verify_straightening(a, c):
    res = ST.verify_straightening(a, c, 6)
    assert res["passed"], res["mismatches"]
    assert res["depth"] == 6


def test_verify_straightening_rejects_a_wrong_partner():
    res = ST.verify_straightening(3 / 16, -1.0, 6)
    assert not res["passed"]
    assert res["mismatches"]


@pytest.fixture(scope="module")
def experiment():
    return ST.index_experiment()


def test_index_experiment_points(experiment):
    arcs = {(fam, p["arc"]): p for fam in ("schwarz", "tricorn") for p in experiment[fam]}
    assert abs(arcs["schwarz", "root"]["parameter"] - O.S_ROOT_PARAMETER) < 1e-10
    assert abs(arcs["schwarz", "cusp"]["parameter"] - O.S_CUSP_PARAMETER) < 1e-10
    assert abs(arcs["tricorn", "root"]["parameter"] - O.T_ROOT_PARAMETER) < 1e-10
    assert abs(arcs["tricorn", "cusp"]["parameter"] - O.T_CUSP_PARAMETER) < 1e-10
    assert arcs["tricorn", "root"]["approached_by_characteristic_rays"]


def test_index_experiment_values(experiment):
    assert abs(experiment["iota_S"] - O.S_ROOT_INDEX) < 1e-8
    assert abs(experiment["iota_T"] - O.T_ROOT_INDEX) < 1e-8
    assert experiment["max_imag"] < 1e-6
    assert experiment["characteristic_angles_T"] == ["3/7", "4/7"]
    assert experiment["separation"] == pytest.approx(abs(O.S_ROOT_INDEX - O.T_ROOT_INDEX), abs=1e-8)


def test_index_experiment_cusp_values(experiment):
    cusp = {fam: next(p for p in experiment[fam] if p["arc"] == "cusp") for fam in ("schwarz", "tricorn")}
    assert abs(cusp["schwarz"]["index"][0] - O.S_CUSP_INDEX) < 1e-8
    assert abs(cusp["tricorn"]["index"][0] - O.T_CUSP_INDEX) < 1e-8
