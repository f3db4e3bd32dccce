import json
import math

import pytest

from cvol.errors import EquationError, InvariantError
from cvol.numerics import PI2, distance_mod_pi2
from cvol.solver import shapes_from_field
from cvol.volume import (
    ComplexVolume,
    base_sides,
    complex_volume,
    conjugate_representation,
    decoration_independence,
    report_json,
    reverse_orientation,
    run_invariant_suite,
)

import oracles
from conftest import CS_52, CS_52_REAL, VOL_52


def test_five_two_geometric(five_two, five_two_shapes):
    r = complex_volume(five_two, five_two_shapes)
    assert r.vol == pytest.approx(VOL_52, abs=1e-9)
    assert distance_mod_pi2(r.cs, CS_52) < 1e-9
    assert [(f.p, f.q) for f in r.flattenings] == [(0, -1), (-1, 0), (-1, 0)]


def test_five_two_real(five_two):
    z = shapes_from_field(five_two, root=-0.7549).z
    r = complex_volume(five_two, z)
    assert abs(r.vol) < 1e-9
    assert distance_mod_pi2(r.cs, CS_52_REAL) < 1e-9
    # a real representation is its own conjugate
    c = conjugate_representation(r)
    assert abs(c.vol - r.vol) < 1e-12 and distance_mod_pi2(c.cs, r.cs) < 1e-12


def test_figure_eight(figure_eight, figure_eight_shapes):
    r = complex_volume(figure_eight, figure_eight_shapes)
    assert r.vol == pytest.approx(oracles.figure_eight_volume(), abs=1e-8)
    assert distance_mod_pi2(r.cs, 0) < 1e-9


def test_conjugate(five_two, five_two_shapes):
    r = complex_volume(five_two, five_two_shapes)
    c = conjugate_representation(r)
    assert c.vol == pytest.approx(-VOL_52, abs=1e-9)
    assert distance_mod_pi2(c.cs, r.cs) < 1e-9


def test_reverse_orientation(five_two, five_two_shapes):
    r = complex_volume(five_two, five_two_shapes)
    rev = reverse_orientation(r)
    assert rev.vol == pytest.approx(-r.vol, abs=1e-9)
    assert distance_mod_pi2(rev.cs, -r.cs) < 1e-9
    back = reverse_orientation(rev)
    assert back.vol == pytest.approx(r.vol, abs=1e-12)
    assert distance_mod_pi2(back.cs, r.cs) < 1e-12


def test_reverse_of_conjugate_negates_cs(five_two, five_two_shapes):
    r = complex_volume(five_two, five_two_shapes)
    rc = reverse_orientation(conjugate_representation(r))
    assert rc.vol == pytest.approx(r.vol, abs=1e-9)
    assert distance_mod_pi2(rc.cs, -r.cs) < 1e-9


def test_base_independence(five_two, five_two_shapes, figure_eight, figure_eight_shapes):
    for t, z in ((five_two, five_two_shapes), (figure_eight, figure_eight_shapes)):
        spread, changed, results = decoration_independence(t, z, base_sides(t, 5))
        assert len(results) == 5 and spread < 1e-9 and changed


def test_perturbed_shapes_rejected(five_two, five_two_shapes):
    z = list(five_two_shapes)
    z[1] += 1e-6
    with pytest.raises(EquationError) as err:
        complex_volume(five_two, z)
    assert err.value.residual > 1e-9


def test_wrong_shape_count(five_two, five_two_shapes):
    with pytest.raises(EquationError):
        complex_volume(five_two, five_two_shapes[:2])


def test_zero_tolerance_is_enforced(five_two, five_two_shapes):
    with pytest.raises(InvariantError) as err:
        complex_volume(five_two, five_two_shapes, tol=0)
    assert err.value.tolerance == 0


def test_result_json(five_two, five_two_shapes):
    data = complex_volume(five_two, five_two_shapes).to_json()
    assert set(data) == {"vol", "cs_mod_pi2", "flattenings", "residuals"}
    assert len(data["flattenings"]) == 3
    json.dumps(data)


def test_complex_volume_value_object():
    v = ComplexVolume.from_raw(complex(-0.0, -0.0))
    assert math.copysign(1, v.vol) == 1 and math.copysign(1, v.cs) == 1
    assert 0 <= ComplexVolume.from_raw(complex(-1.0, 2)).cs_normalized < 0.5
    v = ComplexVolume.from_raw(complex(PI2 / 2 + 0.1, 0))
    assert -PI2 / 2 < v.cs <= PI2 / 2


# -- invariant suite ----------------------------------------------------------------


@pytest.mark.parametrize("name", ["five_two", "figure_eight"])
def test_suite_passes(name, request):
    report = run_invariant_suite(request.getfixturevalue(name), five_term_samples=10, transfer_samples=100)
    assert report.passed, report_json(report)
    for c in report.checks:
        if c.residual is not None and c.tolerance:
            assert c.residual < c.tolerance


def test_suite_first_failure_gluing(five_two, five_two_shapes):
    z = list(five_two_shapes)
    z[0] *= 1.001
    report = run_invariant_suite(five_two, z, five_term_samples=2, transfer_samples=10)
    assert not report.passed and report.first_failure.name == "gluing"


def test_suite_structure_failure(five_two_data):
    five_two_data["gluings"][0][0][1] = [0, 0, 1, 2]
    report = run_invariant_suite(five_two_data, five_term_samples=2, transfer_samples=10)
    assert report.first_failure.name == "structure"


def test_suite_ordering_failure(five_two_data):
    # swap two target vertices of one face, and of its partner, to keep the involution
    u, perm = five_two_data["gluings"][0][1]
    f = perm[1]
    a, b = [v for v in range(4) if v != f][:2]
    new = [{a: b, b: a}.get(x, x) for x in perm]
    five_two_data["gluings"][0][1][1] = new
    five_two_data["gluings"][u][f] = [0, [new.index(v) for v in range(4)]]
    report = run_invariant_suite(five_two_data, five_term_samples=2, transfer_samples=10)
    assert report.first_failure.name == "ordering"


def test_suite_accepts_json_text(five_two):
    report = run_invariant_suite(five_two.to_json(), five_term_samples=2, transfer_samples=10)
    assert report.passed


def test_suite_report_deterministic(figure_eight):
    a = report_json(run_invariant_suite(figure_eight, five_term_samples=5, transfer_samples=50, rng_seed=3))
    b = report_json(run_invariant_suite(figure_eight, five_term_samples=5, transfer_samples=50, rng_seed=3))
    assert a == b
