"""Seeded instance generators shared by the tests."""

import numpy as np

from shadowsimplex import oracle
from shadowsimplex.geometry_core import orthonormalize
from shadowsimplex.polytope import Polytope, perturb
from shadowsimplex.sampling import RngStream, sample_unit_vector
from shadowsimplex.shadow_walk import VertexBasis


def random_bounded(rng, d, n):
    """{a_i x <= 1} with unit rows, resampled until bounded."""
    while True:
        A = np.array([sample_unit_vector(rng, d) for _ in range(n)])
        P = Polytope(A, np.ones(n))
        if oracle.decide_bounded(P).bounded:
            return P


def labeled_suite(seed=0, per_label=50):
    """Alternating bounded/unbounded instances with d in {2, 3, 4}, labeled by the oracle."""
    out = []
    r = RngStream(seed, 77)
    while sum(lab for _, lab in out) < per_label or sum(not lab for _, lab in out) < per_label:
        n_true = sum(lab for _, lab in out)
        n_false = len(out) - n_true
        d = 2 + int(r.uniform() * 3)
        n = int(d + 1 + r.uniform() * (12 - d))
        A = np.array([sample_unit_vector(r, d) for _ in range(n)])
        b = 0.5 + 1.5 * r.uniform(n)
        want = n_true < per_label and (len(out) % 2 == 0 or n_false >= per_label)
        if not want:
            # flip every row that points along q so q becomes a recession direction
            q = sample_unit_vector(r, d)
            A = np.where((A @ q)[:, None] > 0, -A, A)
        P = Polytope(A, b)
        if oracle.decide_bounded(P).bounded == want:
            out.append((P, want))
    return out


def sweep_case(seed, d, n, lam=1.0):
    """A perturbed bounded instance, a plane through a random c, and an on-shadow start vertex."""
    rng = RngStream(seed, 5)
    P = random_bounded(rng, d, n)
    Q = perturb(P, lam, rng).as_polytope()
    vertices, _ = oracle.enumerate_vertices(Q)
    c = sample_unit_vector(rng, d)
    V = orthonormalize(c, sample_unit_vector(rng, d))
    i0 = oracle.argmax_vertices(vertices, V.e2)[0]
    start = VertexBasis(vertices[i0].tight, vertices[i0].point)
    return Q, V, c, vertices, start
