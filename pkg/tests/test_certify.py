import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shadowsimplex import oracle
from shadowsimplex.certify import (BoundednessCertificate, CertifyFailure, RescaleState, SolverConfig,
                                   certify_boundedness, check_maximizer_halfspace, default_step_budget,
                                   extract_certificate, halfspace_threshold, inscribed_scale, pair_multipliers,
                                   positive_combination, reference_logk, rescale, validate_certificate)
from shadowsimplex.errors import CertificateInfeasible, PreconditionUnmet
from shadowsimplex.polytope import Polytope, artificial_vertex, box, cube, polar_points
from shadowsimplex.sampling import RngStream, sample_unit_vector
from shadowsimplex.shadow_walk import vertex_from_basis

from _instances import labeled_suite, random_bounded


def test_cube_is_certified_bounded_with_uniform_weights():
    cert = certify_boundedness(cube(3), SolverConfig(seed=7))
    assert cert.kind == "Bounded"
    assert np.allclose(cert.weights, 1 / 6)
    validate_certificate(cube(3), cert)


def test_open_strip_is_unbounded_downward():
    P = Polytope([[1, 0], [0, 1], [-1, 0]], [1, 1, 1])
    cert = certify_boundedness(P, SolverConfig(seed=0))
    assert cert.kind == "Unbounded"
    assert np.allclose(cert.direction, [0, -1], atol=1e-6)


def test_cube_pair_multipliers_uniform():
    P = cube(3)
    hi = vertex_from_basis(P, (0, 1, 2))
    lo = vertex_from_basis(P, (3, 4, 5))
    c = np.ones(3) / math.sqrt(3)
    assert np.allclose(pair_multipliers(P, hi, lo, c), 1 / 6)
    cert = extract_certificate(P, hi, lo, c)
    assert cert.kind == "Bounded" and np.allclose(cert.weights, 1 / 6)


def test_pair_multipliers_reject_non_optimal_basis():
    P = cube(3)
    hi = vertex_from_basis(P, (0, 1, 5))  # (1, 1, -1) does not maximize (1, 1, 1)
    lo = vertex_from_basis(P, (3, 4, 5))
    with pytest.raises(CertificateInfeasible):
        pair_multipliers(P, hi, lo, np.ones(3) / math.sqrt(3))


def test_simplex_weights_above_floor():
    # a simplex around the origin: polar points are its facet normals over rhs
    P = Polytope(np.vstack([-np.eye(3), np.ones((1, 3))]), [0.5, 1.0, 2.0, 1.0])
    assert oracle.decide_bounded(P).bounded
    w = positive_combination(polar_points(P))
    assert w.min() >= 1e-6
    assert np.linalg.norm(w @ polar_points(P)) <= 1e-9


def test_origin_on_polar_boundary_is_infeasible():
    with pytest.raises(CertificateInfeasible):
        positive_combination(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]))


def test_validate_rejects_bad_certificates():
    P = cube(2)
    with pytest.raises(CertificateInfeasible):
        validate_certificate(P, BoundednessCertificate("Bounded", weights=np.array([0.5, 0.5, 0, 0])))
    with pytest.raises(CertificateInfeasible):
        validate_certificate(P, BoundednessCertificate("Unbounded", direction=np.array([1.0, 0.0])))
    with pytest.raises(CertificateInfeasible):
        validate_certificate(P, BoundednessCertificate("Maybe"))


def test_rescale_axis_aligned():
    P = Polytope([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], np.ones(3))
    newP, state = rescale(P, RescaleState.identity(2), np.array([4.0, 0.0]), 2.0)
    assert np.allclose(state.transform, np.diag([0.5, 1.0]))
    # rows transform as a^T S^{-1}, so the polytope shrinks along e1
    assert np.allclose(newP.rows[0], [2.0, 0.0])
    assert np.linalg.det(state.transform) == pytest.approx(0.5)
    assert state.history == [4.0]


def test_rescale_maps_points_by_transform():
    rng = RngStream(3)
    P = random_bounded(rng, 3, 10)
    y = 10 * sample_unit_vector(rng, 3)
    newP, state = rescale(P, RescaleState.identity(3), y, 2.0)
    x = 0.3 * sample_unit_vector(rng, 3)
    assert P.contains(x) == newP.contains(state.transform @ x)
    assert np.linalg.det(state.transform) == pytest.approx(2.0 / 10.0)


def test_rescale_needs_far_point():
    with pytest.raises(ValueError):
        rescale(cube(2), RescaleState.identity(2), np.array([3.0, 0.0]), 2.0)


def test_inscribed_scale_puts_margin_ball_inside():
    P = random_bounded(RngStream(4), 3, 10).normalized()
    sigma = inscribed_scale(P, 4.0)
    r_in = 1 / np.max(np.linalg.norm(P.rows / sigma, axis=1))
    assert r_in == pytest.approx(1.25 * np.linalg.norm(artificial_vertex(3, 4.0)))


def test_solver_config_presets():
    r = SolverConfig().resolve(3, 16)
    assert r["lambda"] == pytest.approx(1 / 16) and r["logk"] == 4.0
    r = SolverConfig(lambda_mode="paper", logk="paper").resolve(3, 16)
    assert r["lambda"] == pytest.approx(math.log(16)) and r["logk"] == reference_logk(3) == 49
    assert SolverConfig(lambda_mode=0.3).resolve(3, 16)["lambda"] == 0.3
    assert r["max_steps"] == default_step_budget(3, 16) <= 100_000
    for bad in (dict(lambda_mode="other"), dict(lambda_mode=-1.0), dict(max_restarts=0)):
        with pytest.raises(ValueError):
            SolverConfig(**bad)
    with pytest.raises(ValueError):
        SolverConfig(rho=1.0).resolve(3, 16)


def test_restart_budget_exhaustion():
    out = certify_boundedness(box([1, 1, 1000]), SolverConfig(max_steps=3, max_restarts=1, seed=0))
    assert isinstance(out, CertifyFailure)
    assert out.reason == "RestartBudgetExhausted"
    json.dumps(out.to_document())


def test_documents_are_json():
    cert = certify_boundedness(cube(3), SolverConfig(seed=1))
    doc = json.loads(json.dumps(cert.to_document()))
    assert doc["kind"] == "Bounded" and len(doc["weights"]) == 6


def test_stretched_box_rescales_halve_volume():
    out = certify_boundedness(box([1, 1, 100]), SolverConfig(max_steps=3, max_restarts=50, seed=2))
    assert out.kind == "Bounded"
    factors = [e["det_factor"] for e in out.events if "det_factor" in e]
    assert factors and all(f <= 0.5 + 1e-12 for f in factors)
    assert np.prod(factors) == pytest.approx(np.linalg.det(out.transform))


def test_small_suite_agrees_with_oracle():
    for i, (P, label) in enumerate(labeled_suite(seed=3, per_label=10)):
        out = certify_boundedness(P, SolverConfig(seed=i))
        if out.kind == "Failure":
            continue
        assert (out.kind == "Bounded") == label
        validate_certificate(P, out)


def test_halfspace_threshold_readings():
    for L in (1.5, 4.0, 49.0):
        assert halfspace_threshold(L, "statement") < -1
        assert -1 < halfspace_threshold(L, "proof") < -0.5
    with pytest.raises(ValueError):
        halfspace_threshold(4.0, "other")


def _ball_like(seed=0, m=24):
    rng = RngStream(seed, 1)
    rows = np.array([sample_unit_vector(rng, 3) for _ in range(m)])
    return Polytope(np.vstack([rows, np.eye(3), -np.eye(3)]), np.ones(m + 6))


def test_maximizer_halfspace_antipodal_case():
    P = _ball_like()
    c = np.array([0.0, 0.6, 0.8])
    assert check_maximizer_halfspace(P, c, -c, logk=2.0)


def test_maximizer_halfspace_vacuous_above_threshold():
    P = _ball_like()
    c = np.array([1.0, 0.0, 0.0])
    assert check_maximizer_halfspace(P, c, c, logk=2.0)


def test_maximizer_halfspace_needs_round_input():
    with pytest.raises(PreconditionUnmet):
        check_maximizer_halfspace(box([1, 1, 10]), np.array([1.0, 0, 0]), np.array([-1.0, 0, 0]), logk=2.0)
    with pytest.raises(ValueError):
        check_maximizer_halfspace(cube(3), np.array([2.0, 0, 0]), np.array([-1.0, 0, 0]), logk=2.0)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.booleans())
def test_certificates_agree_with_oracle(seed, d, unbounded):
    rng = RngStream(seed, 9)
    n = d + 2 + int(rng.uniform() * 5)
    A = np.array([sample_unit_vector(rng, d) for _ in range(n)])
    if unbounded:
        q = sample_unit_vector(rng, d)
        A = np.where((A @ q)[:, None] > 0, -A, A)
    P = Polytope(A, 0.5 + rng.uniform(n))
    out = certify_boundedness(P, SolverConfig(seed=seed, max_restarts=5))
    if out.kind == "Failure":
        return
    validate_certificate(P, out)
    assert (out.kind == "Bounded") == oracle.decide_bounded(P).bounded
