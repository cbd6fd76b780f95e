import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shadowsimplex import bounds
from shadowsimplex.bounds import BoundInputs


def _h(n):
    """Independent harmonic oracle."""
    return math.fsum(1.0 / k for k in range(1, n + 1))


def test_harmonic_examples():
    assert bounds.harmonic(1) == (Fraction(1), 1.0)
    assert bounds.harmonic(2)[0] == Fraction(3, 2)
    assert bounds.harmonic(10)[1] == 2.9289682539682538
    assert bounds.harmonic_exact(8) == Fraction(761, 280)
    with pytest.raises(ValueError):
        bounds.harmonic(0)


def test_binomial_identity_examples():
    assert bounds.binomial_identity_check(1)
    assert 3 - Fraction(3, 2) + Fraction(1, 3) == Fraction(11, 6) == bounds.binomial_alternating_sum(3)
    assert bounds.binomial_identity_check(20)
    assert all(bounds.binomial_identity_check(n) for n in range(1, 31))
    with pytest.raises(ValueError):
        bounds.binomial_identity_check(31)


def test_expected_max():
    assert bounds.expected_max_improved(10, 1.0) == pytest.approx(_h(10))
    assert bounds.expected_max_overview(10, 1.0) == pytest.approx(math.log(10) + 1)
    assert bounds.expected_max_overview(10, 1.0) > bounds.expected_max_improved(10, 1.0)


def test_shadow_bound_round_value():
    value = bounds.shadow_bound_round(BoundInputs(3, 8, k=1, lam=1))
    expected = 16 * math.sqrt(2) / 3 * math.pi * (1 + 761 / 280) * math.sqrt(3) * 8
    assert value == pytest.approx(expected, rel=1e-14)
    assert value == pytest.approx(1220.6942840672007, rel=1e-12)


def test_shadow_bound_round_scaling():
    a = bounds.shadow_bound_round(BoundInputs(3, 8, k=1, lam=1))
    assert bounds.shadow_bound_round(BoundInputs(3, 8, k=2, lam=1)) == pytest.approx(2 * a)
    limit = 16 * math.sqrt(2) / 3 * math.pi * _h(8) * math.sqrt(3) * 8
    assert bounds.shadow_bound_round(BoundInputs(3, 8, lam=1e9)) == pytest.approx(limit, rel=1e-8)


def test_shadow_bound_nonround_value():
    value = bounds.shadow_bound_nonround(BoundInputs(3, 8, lam=1, t=2, rho=0.25))
    assert value == pytest.approx(26 * math.pi * 2 * (1 + 761 / 280) * math.sqrt(3) * 8 / 0.25)
    assert value == pytest.approx(33663.287, rel=1e-7)
    assert bounds.shadow_bound_nonround(BoundInputs(3, 8, lam=1, t=4, rho=0.25)) == pytest.approx(2 * value)


def test_nonround_to_round_ratio():
    t, k, rho = 3.0, 2.0, 0.2
    nr = bounds.shadow_bound_nonround(BoundInputs(4, 9, k=k, lam=0.7, t=t, rho=rho))
    r = bounds.shadow_bound_round(BoundInputs(4, 9, k=k, lam=0.7))
    assert nr / r == pytest.approx(26 / (16 * math.sqrt(2) / 3) * t / (k * rho))


def test_nonround_needs_t_and_rho():
    with pytest.raises(ValueError):
        bounds.shadow_bound_nonround(BoundInputs(3, 8))


def test_overview_bounds_are_weaker_forms():
    inp = BoundInputs(3, 8, k=1, lam=1)
    assert bounds.shadow_bound_round_overview(inp) == pytest.approx(
        12 * math.pi * (2 + math.log(8)) * math.sqrt(3) * 8)
    assert bounds.edge_length_lower_bound_overview(3, 8, 1) < bounds.edge_length_lower_bound(3, 8, 1)


def test_angle_bound_round_examples():
    assert bounds.angle_bound_round(2, 0.5) == 0
    assert bounds.angle_bound_round(4, 0.1) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        bounds.angle_bound_round(4, 1.0)


def test_angle_bound_perturbed_examples():
    assert bounds.angle_bound_perturbed(0.3, 0.3) == pytest.approx(3.4)
    assert bounds.angle_bound_perturbed(0.03, 0.3) == pytest.approx(0.034)
    assert bounds.angle_bound_perturbed(0.15, 0.3) == pytest.approx(0.85)
    eps = 0.3 / math.sqrt(3.4) * 1.01
    assert bounds.angle_bound_perturbed(eps, 0.3) > 1  # returned raw, not clamped


def test_edge_length_examples():
    v = bounds.edge_length_lower_bound(3, 8, 1.0)
    assert v == pytest.approx(3 * math.sqrt(2) / (16 * 8 * math.sqrt(3)))
    assert v == pytest.approx(0.01914, abs=1e-5)
    assert bounds.edge_length_lower_bound(3, 8, 2.0) == pytest.approx(2 * v)
    assert 3 * math.sqrt(2) / 16 == pytest.approx(0.2652, abs=1e-4) and 0.2652 > 1 / 6


def test_delta_tail_examples():
    assert bounds.delta_tail_bound(8, 1.0, 0.0) == 0
    assert bounds.delta_tail_bound(8, 1.0, 0.1) == pytest.approx(0.4)
    assert bounds.delta_tail_bound(8, 2.0, 2.0 / 8) == pytest.approx(0.5)


def test_edge_length_chain():
    for d in range(3, 12):
        chain = bounds.edge_length_chain(d, 4 * d, 1.0)
        assert chain["ok"]
        assert chain["p_long"] == pytest.approx(0.5)
        assert chain["p_steep"] == pytest.approx((d - 2) / (4 * d))
        assert chain["combined"] == pytest.approx(3 / 8)


def test_start_vertex_floor():
    assert bounds.start_vertex_floor(3, 16) == pytest.approx(1 - 5 / 16)


def test_bound_inputs_validation():
    for bad in (dict(d=2, n=8), dict(d=3, n=2), dict(d=3, n=8, k=0.5), dict(d=3, n=8, lam=0),
                dict(d=3, n=8, rho=0.6), dict(d=3, n=8, t=1.0), dict(d=3, n=8, epsilon=1.0)):
        with pytest.raises(ValueError):
            BoundInputs(**bad)


def test_evaluate_dispatch():
    assert bounds.evaluate("shadow-round", d=3, n=8) == (bounds.shadow_bound_round(BoundInputs(3, 8)), "improved")
    assert bounds.evaluate("edge-length-overview", d=3, n=8)[1] == "ks06_overview"
    assert bounds.evaluate("binomial-identity", n=12) == (True, "improved")
    with pytest.raises(ValueError):
        bounds.evaluate("nope")


small = st.floats(0.05, 5.0)


@given(st.integers(3, 10), st.integers(0, 20), small, small, small, small)
def test_round_bound_monotone(d, extra, k1, k2, lam1, lam2):
    n = d + extra
    lo, hi = sorted([1 + k1, 1 + k2])
    assert bounds.shadow_bound_round(BoundInputs(d, n, k=lo, lam=lam1)) <= \
        bounds.shadow_bound_round(BoundInputs(d, n, k=hi, lam=lam1)) * (1 + 1e-12)
    # (1 + lam H)/lam decreases in lam
    l_lo, l_hi = sorted([lam1, lam2])
    assert bounds.shadow_bound_round(BoundInputs(d, n, lam=l_hi)) <= \
        bounds.shadow_bound_round(BoundInputs(d, n, lam=l_lo)) * (1 + 1e-12)
    assert bounds.shadow_bound_round(BoundInputs(d, n)) <= bounds.shadow_bound_round(BoundInputs(d + 1, n + 1))


@given(st.integers(3, 10), st.floats(1.01, 10), st.floats(1.01, 10), st.floats(0.01, 0.3), st.floats(0.01, 0.3))
def test_nonround_bound_monotone(d, t1, t2, r1, r2):
    n = 2 * d
    t_lo, t_hi = sorted([t1, t2])
    r_lo, r_hi = sorted([r1, r2])
    f = lambda t, r: bounds.shadow_bound_nonround(BoundInputs(d, n, t=t, rho=r))
    assert f(t_lo, r_hi) <= f(t_hi, r_hi) * (1 + 1e-12)
    assert f(t_lo, r_hi) <= f(t_lo, r_lo) * (1 + 1e-12)


@given(st.integers(2, 20), st.integers(2, 20), st.floats(0.001, 0.999), st.floats(0.001, 0.999),
       st.floats(0.01, 3), st.floats(0.01, 3))
def test_angle_and_length_bounds_monotone(d1, d2, e1, e2, r1, r2):
    d_lo, d_hi = sorted([d1, d2])
    e_lo, e_hi = sorted([e1, e2])
    r_lo, r_hi = sorted([r1, r2])
    assert bounds.angle_bound_round(d_lo, e_lo) <= bounds.angle_bound_round(d_hi, e_lo)
    assert bounds.angle_bound_round(d_lo, e_lo) <= bounds.angle_bound_round(d_lo, e_hi)
    assert bounds.angle_bound_perturbed(e_lo, r_hi) <= bounds.angle_bound_perturbed(e_hi, r_hi)
    assert bounds.angle_bound_perturbed(e_lo, r_hi) <= bounds.angle_bound_perturbed(e_lo, r_lo)
    assert bounds.edge_length_lower_bound(d_hi, 30, r_lo) <= bounds.edge_length_lower_bound(d_lo, 30, r_lo)
    assert bounds.edge_length_lower_bound(d_lo, 30, r_lo) <= bounds.edge_length_lower_bound(d_lo, 30, r_hi)
    assert bounds.delta_tail_bound(30, r_hi, e_lo) <= bounds.delta_tail_bound(30, r_lo, e_lo)
    assert bounds.delta_tail_bound(30, r_lo, e_lo) <= bounds.delta_tail_bound(30, r_lo, e_hi)
