"""Closed-form shadow-size, edge-length and angle bounds.

Evaluators return the raw formula value even when it is vacuous (a
probability bound above 1, say); clamping is left to whoever displays it.
Two families are provided for the expected maximum perturbation: the
harmonic number H_n (``improved``) and the cruder ln(ne) of the earlier
overview (``ks06_overview``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# shadow-size constant of the earlier non-round analysis, kept for comparison only
OVERVIEW_NONROUND_CONSTANT = 42.0
ROUND_CONSTANT = 16.0 * math.sqrt(2.0) / 3.0
NONROUND_CONSTANT = 26.0
EDGE_LENGTH_CONSTANT = 3.0 * math.sqrt(2.0) / 16.0
OVERVIEW_EDGE_LENGTH_CONSTANT = 1.0 / 6.0
PERTURBED_ANGLE_CONSTANT = 3.4
HARMONIC_EXACT_LIMIT = 30


@dataclass(frozen=True)
class BoundInputs:
    """Arguments shared by the bound evaluators.

    ``rho``, ``t`` and ``epsilon`` are optional; only those given are
    validated.
    """

    d: int
    n: int
    k: float = 1.0
    lam: float = 1.0
    rho: float | None = None
    t: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.d < 3:
            raise ValueError("d must be at least 3")
        if self.n < self.d:
            raise ValueError("n must be at least d")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.rho is not None and not 0 < self.rho < 1 / math.sqrt(self.d):
            raise ValueError("rho must lie in (0, 1/sqrt(d))")
        if self.t is not None and not self.t > 1:
            raise ValueError("t must exceed 1")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")


def harmonic_exact(n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be at least 1")
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def harmonic(n: int) -> tuple[Fraction, float]:
    """H_n as an exact rational and as a double."""
    h = harmonic_exact(n)
    return h, float(h)


def harmonic_float(n: int) -> float:
    return harmonic(n)[1]


def binomial_alternating_sum(n: int) -> Fraction:
    """sum_{k=1}^n (-1)^(k+1) C(n,k) / k, exactly."""
    return sum((Fraction((-1) ** (k + 1) * math.comb(n, k), k) for k in range(1, n + 1)), Fraction(0))


def binomial_identity_check(n: int) -> bool:
    """Exact check that the alternating binomial sum equals H_n."""
    if not 1 <= n <= HARMONIC_EXACT_LIMIT:
        raise ValueError(f"n must lie in [1, {HARMONIC_EXACT_LIMIT}]")
    return binomial_alternating_sum(n) == harmonic_exact(n)


def expected_max_improved(n: int, lam: float) -> float:
    """E[max of n Exp(mean lam)] = lam H_n."""
    return lam * harmonic_float(n)


def expected_max_overview(n: int, lam: float) -> float:
    """The overview's upper estimate lam ln(ne)."""
    return lam * (math.log(n) + 1.0)


def shadow_bound_round(inp: BoundInputs) -> float:
    """(16 sqrt2 / 3) pi k (1 + lam H_n) sqrt(d) n / lam."""
    return ROUND_CONSTANT * math.pi * inp.k * (1 + inp.lam * harmonic_float(inp.n)) \
        * math.sqrt(inp.d) * inp.n / inp.lam


def shadow_bound_round_overview(inp: BoundInputs) -> float:
    """12 pi k (1 + lam ln(ne)) sqrt(d) n / lam."""
    return 12.0 * math.pi * inp.k * (1 + expected_max_overview(inp.n, inp.lam)) \
        * math.sqrt(inp.d) * inp.n / inp.lam


def shadow_bound_nonround(inp: BoundInputs) -> float:
    """26 pi t (1 + lam H_n) sqrt(d) n / (lam rho)."""
    if inp.t is None or inp.rho is None:
        raise ValueError("the non-round bound needs t and rho")
    return NONROUND_CONSTANT * math.pi * inp.t * (1 + inp.lam * harmonic_float(inp.n)) \
        * math.sqrt(inp.d) * inp.n / (inp.lam * inp.rho)


def shadow_bound_nonround_overview(inp: BoundInputs) -> float:
    """42 pi t (1 + lam ln n) sqrt(d) n / (lam rho); comparison constant only."""
    if inp.t is None or inp.rho is None:
        raise ValueError("the non-round bound needs t and rho")
    return OVERVIEW_NONROUND_CONSTANT * math.pi * inp.t * (1 + inp.lam * math.log(inp.n)) \
        * math.sqrt(inp.d) * inp.n / (inp.lam * inp.rho)


def angle_bound_round(d: int, epsilon: float) -> float:
    """((d - 2)/2) eps^2."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    return (d - 2) / 2.0 * epsilon**2


def angle_bound_perturbed(epsilon: float, rho: float) -> float:
    """3.4 (eps / rho)^2; may exceed 1."""
    if not (epsilon > 0 and rho > 0):
        raise ValueError("epsilon and rho must be positive")
    return PERTURBED_ANGLE_CONSTANT * (epsilon / rho) ** 2


def edge_length_lower_bound(d: int, n: int, lam: float) -> float:
    """(3 sqrt2 / 16) lam / (n sqrt d)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return EDGE_LENGTH_CONSTANT * lam / (n * math.sqrt(d))


def edge_length_lower_bound_overview(d: int, n: int, lam: float) -> float:
    """lam / (6 sqrt(d) n)."""
    return OVERVIEW_EDGE_LENGTH_CONSTANT * lam / (n * math.sqrt(d))


def delta_tail_bound(n: int, lam: float, epsilon: float) -> float:
    """P[delta(I) < eps | A(I)] <= n eps / (2 lam)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return n * epsilon / (2.0 * lam)


def start_vertex_floor(d: int, n: int) -> float:
    """1 - (d + 2)/n, the success probability with lam = ln n."""
    return 1.0 - (d + 2) / n


def edge_length_chain(d: int, n: int, lam: float) -> dict:
    """The probability chain behind the edge-length lower bound.

    With eps = lam/n the delta tail bound is 1/2; the round angle bound at
    eps = 1/sqrt(2d) is (d-2)/(4d) <= 1/4, so the edge is long and not too
    steep with probability at least 1/2 * 3/4 = 3/8.
    """
    p_long = 1.0 - delta_tail_bound(n, lam, lam / n)
    p_steep = angle_bound_round(d, 1.0 / math.sqrt(2 * d))
    steep_cap = 0.25  # (d-2)/(4d) < 1/4 for every d
    combined = p_long * (1.0 - steep_cap)
    return {"p_long": p_long, "p_steep": p_steep, "p_flat": 1.0 - p_steep,
            "combined": combined, "ok": p_long >= 0.5 and p_steep <= steep_cap and combined >= 3 / 8}


KINDS = {
    "shadow-round": "improved",
    "shadow-round-overview": "ks06_overview",
    "shadow-nonround": "improved",
    "shadow-nonround-overview": "ks06_overview",
    "angle-round": "improved",
    "angle-perturbed": "improved",
    "edge-length": "improved",
    "edge-length-overview": "ks06_overview",
    "delta-tail": "improved",
    "harmonic": "improved",
    "max-exp-overview": "ks06_overview",
    "binomial-identity": "improved",
}


def evaluate(kind: str, d=None, n=None, k=1.0, lam=1.0, rho=None, t=None, epsilon=None):
    """Dispatch by name; returns (value, tag)."""
    if kind not in KINDS:
        raise ValueError(f"unknown bound kind {kind!r}; choose from {sorted(KINDS)}")
    tag = KINDS[kind]
    if kind == "harmonic":
        return harmonic_float(n), tag
    if kind == "binomial-identity":
        return binomial_identity_check(n), tag
    if kind == "max-exp-overview":
        return expected_max_overview(n, lam), tag
    if kind == "angle-round":
        return angle_bound_round(d, epsilon), tag
    if kind == "angle-perturbed":
        return angle_bound_perturbed(epsilon, rho), tag
    if kind == "edge-length":
        return edge_length_lower_bound(d, n, lam), tag
    if kind == "edge-length-overview":
        return edge_length_lower_bound_overview(d, n, lam), tag
    if kind == "delta-tail":
        return delta_tail_bound(n, lam, epsilon), tag
    inp = BoundInputs(d=d, n=n, k=k, lam=lam, rho=rho, t=t)
    fn = {"shadow-round": shadow_bound_round, "shadow-round-overview": shadow_bound_round_overview,
          "shadow-nonround": shadow_bound_nonround,
          "shadow-nonround-overview": shadow_bound_nonround_overview}[kind]
    return fn(inp), tag
