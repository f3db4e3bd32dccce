import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvol.bloch import (
    TEN_EQUATIONS,
    PreBlochElement,
    check_flattening_condition,
    check_transfer,
    flattening_condition_residuals,
    lhat_sum,
    nu_hat,
)
from cvol.develop import five_term_flattenings, random_decorated_points
from cvol.errors import InconsistentInputError
from cvol.numerics import PI2, Flattening, distance_mod_pi2, lhat

from conftest import CS_52, CS_52_REAL, VOL_52

U = 0.21507985450097333 + 1.3071412786820455j
V = 0.33764102137762697 + 0.5622795120623013j
U_REAL = 0.5698402909980532
V_REAL = 2.324717957244746

shape = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z) > 1e-2 and abs(1 - z) > 1e-2
)
small = st.integers(-4, 4)


def configuration(seed):
    rng = np.random.default_rng(seed)
    points, mats = random_decorated_points(rng, 5)
    return points, five_term_flattenings(points, mats)


# -- pre-Bloch elements ------------------------------------------------------------


def test_merging_duplicates():
    f = Flattening(0.3 + 0.2j, 1, 0)
    e = PreBlochElement([(1, f), (2, Flattening(0.3 + 0.2j, 1, 0)), (-3, f)])
    assert e.is_zero()
    e = PreBlochElement.of([f, f])
    assert len(e) == 1 and e.terms[0][0] == 2


def test_lhat_sum_merge_invariance():
    f, g = Flattening(U, 0, -1), Flattening(V, -1, 0)
    split = PreBlochElement([(1, f), (1, g), (1, Flattening(V, -1, 0))], tol=0)
    merged = PreBlochElement.of([f, g], [1, 2])
    assert abs(lhat_sum(split) - lhat_sum(merged)) < 1e-13


def test_lhat_sum_empty():
    assert lhat_sum(PreBlochElement()) == 0


def test_lhat_sum_five_two_geometric():
    e = PreBlochElement.of([Flattening(U, 0, -1), Flattening(V, -1, 0), Flattening(V, -1, 0)])
    total = lhat_sum(e)
    assert 0 <= total.real < PI2
    assert distance_mod_pi2(total.real, -CS_52) < 1e-9
    assert total.imag == pytest.approx(VOL_52, abs=1e-9)


def test_lhat_sum_five_two_real():
    e = PreBlochElement.of([Flattening(U_REAL, 0, 0), Flattening(V_REAL, 0, 1), Flattening(V_REAL, 0, 1)])
    total = lhat_sum(e)
    assert distance_mod_pi2(total.real, -CS_52_REAL) < 1e-9
    assert abs(total.imag) < 1e-9


# -- nu-hat --------------------------------------------------------------------------


def test_nu_hat_single_generator():
    f = Flattening(0.4 + 0.9j, 0, 0)
    w = nu_hat(PreBlochElement.of([f]))
    assert len(w) == 1
    coeff, (x, y) = w.terms[0]
    # one term equal to w0 ^ w1 up to the canonical sign
    a, b = (x, y) if coeff == 1 else (y, x)
    pairs = {(f.w0, f.w1), (-f.w0, -f.w1), (f.w1, f.w0), (-f.w1, -f.w0)}
    assert any(abs(a - p) < 1e-12 and abs(b - q) < 1e-12 for p, q in pairs)


def test_nu_hat_expansion_of_general_generator():
    f = Flattening(0.4 + 0.9j, 2, -1)
    w = nu_hat(PreBlochElement.of([f]))
    # -Log z ^ Log(1-z) + q Log z ^ pi i + p Log(1-z) ^ pi i
    assert len(w) == 3


@given(shape)
def test_nu_hat_cancels_negation(z):
    e = PreBlochElement.of([Flattening(z, 1, -2)])
    assert nu_hat(e + (-e)).is_zero()


@given(shape, small, small, small, small)
def test_nu_hat_transfer_combination(z, p, q, p2, q2):
    e = PreBlochElement(
        [(1, Flattening(z, p, q)), (1, Flattening(z, p2, q2)),
         (-1, Flattening(z, p, q2)), (-1, Flattening(z, p2, q))]
    )
    assert nu_hat(e).is_zero()


# -- transfer relation -----------------------------------------------------------


@pytest.mark.parametrize("args", [(0, 1, 1, 0), (2, -1, 0, 3)])
def test_transfer_examples(args):
    assert check_transfer(0.3 + 0.4j, *args)


def test_transfer_random():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        z = complex(*rng.standard_normal(2)) * 2
        p, q, p2, q2 = (int(x) for x in rng.integers(-4, 5, 4))
        assert check_transfer(z, p, q, p2, q2)


# -- ten equations --------------------------------------------------------------------


def test_ten_equation_table_shape():
    assert len(TEN_EQUATIONS) == 10
    for terms in TEN_EQUATIONS.values():
        assert len(terms) == 3 and len({i for _, i, _ in terms}) == 3


@pytest.mark.parametrize("seed", range(10))
def test_psi_configurations_satisfy_ten_equations(seed):
    points, flats = configuration(seed)
    ok, res = check_flattening_condition(flats, points)
    assert ok and max(res.values()) < 1e-10


@pytest.mark.parametrize("i", range(5))
def test_perturbing_w0_breaks_exactly_its_equations(i):
    points, flats = configuration(100 + i)
    base = flattening_condition_residuals(flats)
    logs = [list(f) for f in flats]
    logs[i][0] += math.pi * 1j
    changed = {e for e, v in flattening_condition_residuals(logs).items() if abs(v - base[e]) > 1e-9}
    expected = {e for e, terms in TEN_EQUATIONS.items() if any(s == i and k == 0 for _, s, k in terms)}
    assert changed == expected and len(changed) == 2


@pytest.mark.parametrize("i", range(5))
def test_perturbing_p_fails_the_check(i):
    points, flats = configuration(200 + i)
    flats = list(flats)
    f = flats[i]
    flats[i] = Flattening(f.z, f.p + 1, f.q)  # w0 += pi i, w2 -= pi i
    ok, res = check_flattening_condition(flats, points)
    assert not ok
    assert sum(v > 1 for v in res.values()) == 4


def test_zero_flattenings_generally_fail():
    failures = 0
    for seed in range(20):
        points, flats = configuration(300 + seed)
        naive = [Flattening(f.z, 0, 0) for f in flats]
        ok, _ = check_flattening_condition(naive, points)
        failures += not ok
    assert failures > 0


def test_cross_ratio_mismatch_is_rejected():
    points, flats = configuration(400)
    flats = list(flats)
    flats[0] = Flattening(flats[0].z + 0.1, 0, 0)
    with pytest.raises(InconsistentInputError):
        check_flattening_condition(flats, points)


def test_alternating_lhat_sum_in_pi2_z():
    for seed in range(20):
        _, flats = configuration(500 + seed)
        total = sum((-1) ** i * lhat(f) for i, f in enumerate(flats))
        assert distance_mod_pi2(total.real, 0) < 1e-9 and abs(total.imag) < 1e-9
