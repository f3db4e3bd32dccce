import copy
import itertools
import json

import pytest

import cvol
from cvol.errors import CuspError, GluingError, OrderingError, OrientationError, ParseError
from cvol.triangulation import (
    EDGES,
    Triangulation,
    check_ordering,
    cusp_link,
    disjoint_union,
    edge_classes,
    from_dict,
    orientation_violations,
    parse,
    relabel,
    reverse_orientation,
)

import oracles

# single tetrahedron, faces 0-1 and 2-3 paired; all six edges fall into one class
SELF_GLUED = [[(0, (1, 2, 0, 3)), (0, (2, 0, 1, 3)), (0, (0, 2, 3, 1)), (0, (0, 3, 1, 2))]]


def test_five_two_counts(five_two):
    assert five_two.n_tetrahedra == 3
    classes = edge_classes(five_two)
    assert len(classes) == 3
    assert sum(c.valence for c in classes) == 18
    cusps = cusp_link(five_two)
    assert len(cusps) == 1
    assert len(cusps[0].triangles) == 12 and cusps[0].euler_characteristic == 0


def test_figure_eight_counts(figure_eight):
    classes = edge_classes(figure_eight)
    assert [c.valence for c in classes] == [6, 6]
    cusps = cusp_link(figure_eight)
    assert len(cusps) == 1
    assert len(cusps[0].triangles) == 8 and cusps[0].euler_characteristic == 0


@pytest.mark.parametrize("name", cvol.FIXTURES)
def test_edge_classes_match_union_find(name):
    t = cvol.load_fixture(name)
    mine = sorted(sorted((tet, e) for tet, e, _ in c.incidences) for c in t.edge_classes)
    assert mine == oracles.edge_partition(t.gluings)


def test_self_glued_tetrahedron_hand_enumeration():
    t = Triangulation(SELF_GLUED, [1], validate=False)
    assert oracles.edge_partition(t.gluings) == [[(0, e) for e in range(6)]]
    (ec,) = t.edge_classes
    assert sorted(e for _, e, _ in ec.incidences) == list(range(6))
    assert ec.valence == 6


def test_coverage_and_each_edge_once(five_two, figure_eight):
    for t in (five_two, figure_eight):
        seen = [(tet, e) for c in t.edge_classes for tet, e, _ in c.incidences]
        assert len(seen) == len(set(seen)) == 6 * t.n_tetrahedra
        assert sum(len(c.triangles) for c in t.cusps) == 4 * t.n_tetrahedra


def test_gluing_involution(five_two, figure_eight):
    for t in (five_two, figure_eight):
        for tet, row in enumerate(t.gluings):
            for f, (u, perm) in enumerate(row):
                back_t, back = t.gluings[u][perm[f]]
                assert back_t == tet
                assert [back[perm[v]] for v in range(4)] == list(range(4))


def test_cusp_adjacency_involutive(five_two):
    tris = five_two.cusp_triangles
    for key, tri in tris.items():
        for side, (nb, nside) in enumerate(tri.neighbors):
            assert tris[nb].neighbors[nside] == (key, side)


def test_disjoint_union_has_two_cusps(five_two):
    both = disjoint_union(five_two, five_two)
    assert len(both.cusps) == 2
    assert all(c.euler_characteristic == 0 for c in both.cusps)
    assert len(both.edge_classes) == 6


def test_round_trip(five_two):
    again = parse(five_two.to_json())
    assert again.gluings == five_two.gluings
    assert again.cusp_equations == five_two.cusp_equations
    assert again.shape_field == five_two.shape_field


# -- parse errors -------------------------------------------------------------------


def test_invalid_json():
    with pytest.raises(ParseError) as err:
        parse("{not json")
    assert err.value.location.startswith("line 1")


def test_missing_field(five_two_data):
    del five_two_data["gluings"]
    with pytest.raises(ParseError):
        from_dict(five_two_data)


def test_wrong_sign(five_two_data):
    five_two_data["orientation_signs"][1] = 0
    with pytest.raises(ParseError) as err:
        from_dict(five_two_data)
    assert err.value.location == "orientation_signs[1]"


def test_bad_permutation(five_two_data):
    five_two_data["gluings"][0][2][1] = [0, 0, 3, 2]
    with pytest.raises(GluingError) as err:
        from_dict(five_two_data)
    assert err.value.location == "gluings[0][2]"


def test_single_tetrahedron_non_involutive():
    data = {
        "tetrahedra": 1,
        "orientation_signs": [1],
        "gluings": [[[0, [1, 0, 2, 3]], [0, [0, 1, 3, 2]], [0, [0, 1, 3, 2]], [0, [0, 1, 3, 2]]]],
    }
    with pytest.raises(GluingError):
        from_dict(data)


def test_broken_involution(five_two_data):
    five_two_data["gluings"][0][0][1] = [1, 0, 3, 2]
    with pytest.raises(GluingError):
        from_dict(five_two_data)


def test_target_out_of_range(five_two_data):
    five_two_data["gluings"][2][1][0] = 7
    with pytest.raises(GluingError):
        from_dict(five_two_data)


def _reorder_face(data, tet, face):
    # compose one face map with a swap inside the target face, keeping involution
    u, perm = data["gluings"][tet][face]
    target_face = perm[face]
    a, b = [v for v in range(4) if v != target_face][:2]
    swap = {a: b, b: a}
    new = [swap.get(x, x) for x in perm]
    data["gluings"][tet][face][1] = new
    inv = [new.index(v) for v in range(4)]
    data["gluings"][u][target_face] = [tet, inv]
    return data


def test_ordering_violation(five_two_data):
    data = _reorder_face(five_two_data, 0, 1)
    with pytest.raises(OrderingError):
        from_dict(data)
    t = from_dict(data, validate=False)
    ok, bad = check_ordering(t)
    assert not ok and (0, 1) in bad


def test_orientation_violation(five_two_data):
    five_two_data["orientation_signs"] = [1, -1, 1]
    with pytest.raises(OrientationError):
        from_dict(five_two_data)
    t = from_dict(five_two_data, validate=False)
    assert orientation_violations(t)


def test_spherical_vertex_link_rejected():
    # faces 0-1 and 2-3 folded onto each other: the links are spheres
    gl = [[(0, (1, 0, 2, 3)), (0, (1, 0, 2, 3)), (0, (0, 1, 3, 2)), (0, (0, 1, 3, 2))]]
    with pytest.raises(CuspError):
        Triangulation(gl, [1])


def test_cusp_equation_validation(five_two_data):
    five_two_data["cusp_equations"][0][0]["tet"] = 9
    with pytest.raises(ParseError):
        from_dict(five_two_data)


def test_cusp_equation_log_form_row(five_two_data):
    rows = five_two_data["cusp_equations"]
    five_two_data["cusp_equations"] = [[row, 0] for row in rows]
    t = from_dict(five_two_data)
    assert len(t.cusp_equations) == 2
    five_two_data["cusp_equations"] = [[rows[0], 1]]
    with pytest.raises(ParseError):
        from_dict(five_two_data)


# -- relabelling ----------------------------------------------------------------------


@pytest.mark.parametrize("order", list(itertools.permutations(range(3))))
def test_ordering_stable_under_relabeling(five_two, five_two_data, order):
    assert check_ordering(relabel(five_two, order))[0]
    broken = from_dict(_reorder_face(copy.deepcopy(five_two_data), 1, 2), validate=False)
    ok, bad = check_ordering(relabel(broken, order, validate=False))
    assert not ok and len(bad) == len(check_ordering(broken)[1])


def test_reverse_orientation(five_two):
    r = reverse_orientation(five_two)
    assert r.orientation_signs == (-1, -1, -1)
    assert reverse_orientation(r).orientation_signs == five_two.orientation_signs


def test_edge_table():
    assert EDGES == ((0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3))


def test_fixture_files_are_json():
    for name in cvol.FIXTURES:
        data = json.loads(cvol.fixture_path(name).read_text())
        assert set(data) >= {"tetrahedra", "orientation_signs", "gluings", "cusp_equations"}
