"""Randomized boundedness certification with rescale-and-retry.

Each attempt augments the (normalized, current-coordinate) system with the
artificial rows, perturbs every right-hand side, and walks from the
artificial vertex to the maximizer of c and then to the maximizer of -c in
the plane span(c, u).  A double optimum yields a strictly positive convex
combination of the polar points equal to the origin; an unbounded edge
yields a recession ray.  A walk that runs out of steps at a far vertex
contracts the coordinates along that vertex and starts over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (CertificateInfeasible, DegenerateSpan, DegeneratePivot, NotAVertex,
                     PreconditionUnmet, SingularSystem, StartNotOnShadow)
from .geometry_core import orthonormalize, solve_square
from .polytope import (PerturbedPolytope, Polytope, add_artificial_constraints, artificial_vertex,
                       default_rho, perturb, polar_points, roundness)
from .sampling import RngStream, sample_unit_vector
from .shadow_walk import Outcome, VertexBasis, find_start_vertex, walk

WEIGHT_FLOOR = 1e-6
# working coordinates put the artificial vertex this far inside the inscribed ball
START_MARGIN = 1.25
RESIDUAL_TOL = 1e-7
RAY_TOL = 1e-9


DEFAULT_LOGK = 4.0


def reference_logk(d: int) -> float:
    return 16.0 * d + 1.0


def reference_step_budget(d: int, n: int) -> int:
    """s = 4e7 * d^4.5 * n."""
    return int(4e7 * d**4.5 * n)


def default_step_budget(d: int, n: int) -> int:
    """min(reference budget, 10 * C(n + d, d), 1e5)."""
    return min(reference_step_budget(d, n), 10 * math.comb(n + d, d), 100_000)


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one certification run.

    ``None`` entries are resolved per instance by :meth:`resolve`:
    logk = DEFAULT_LOGK (``"paper"`` selects 16d + 1),
    rho = (3 sqrt2/16) ln n / (sqrt(d) n), and
    max_steps = min(reference budget, 10 * C(n + d, d), 1e5).

    With logk = 16d + 1 the artificial rows are nearly parallel (their
    matrix has condition number about d logk^2 / (2 sqrt(2d))), so any
    right-hand-side perturbation throws the artificial vertex far outside
    P; the default logk keeps that matrix well conditioned.
    """

    lambda_mode: str | float = "ks06"
    logk: float | str | None = None
    rho: float | None = None
    max_steps: int | None = None
    max_restarts: int = 20
    seed: int = 0
    orientation: str = "cw"
    prescale: bool = True

    def __post_init__(self):
        if self.max_restarts < 1:
            raise ValueError("max_restarts must be at least 1")
        if isinstance(self.lambda_mode, str) and self.lambda_mode not in ("ks06", "paper"):
            raise ValueError("lambda_mode must be 'ks06', 'paper' or a positive number")
        if not isinstance(self.lambda_mode, str) and not self.lambda_mode > 0:
            raise ValueError("explicit lambda must be positive")

    def resolve(self, d: int, n: int) -> dict:
        if self.lambda_mode == "ks06":
            lam = 1.0 / n
        elif self.lambda_mode == "paper":
            lam = math.log(n)
        else:
            lam = float(self.lambda_mode)
        if self.logk is None:
            logk = DEFAULT_LOGK
        elif self.logk == "paper":
            logk = reference_logk(d)
        else:
            logk = float(self.logk)
        rho = float(self.rho) if self.rho is not None else default_rho(d, n)
        if not 0 < rho < 1 / math.sqrt(d):
            raise ValueError(f"rho={rho} violates 0 < rho < 1/sqrt(d)")
        if self.max_steps is not None:
            steps = int(self.max_steps)
        else:
            steps = default_step_budget(d, n)
        return {"lambda": lam, "logk": logk, "rho": rho, "max_steps": steps,
                "max_restarts": self.max_restarts, "seed": self.seed,
                "orientation": self.orientation, "lambda_mode": self.lambda_mode,
                "prescale": self.prescale,
                "reference_max_steps": reference_step_budget(d, n)}


@dataclass
class RescaleState:
    transform: np.ndarray
    restarts_used: int = 0
    history: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @classmethod
    def identity(cls, d: int) -> "RescaleState":
        return cls(np.eye(d))

    def to_document(self) -> dict:
        return {"transform": self.transform.tolist(), "restarts_used": self.restarts_used,
                "history": list(self.history), "events": list(self.events)}


@dataclass
class BoundednessCertificate:
    kind: str
    weights: np.ndarray | None = None
    direction: np.ndarray | None = None
    transform: np.ndarray | None = None
    restarts_used: int = 0
    history: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "events": list(self.events),
            "weights": None if self.weights is None else self.weights.tolist(),
            "direction": None if self.direction is None else self.direction.tolist(),
            "transform": None if self.transform is None else self.transform.tolist(),
            "restarts_used": self.restarts_used,
            "history": list(self.history),
        }


@dataclass
class CertifyFailure:
    reason: str
    state: RescaleState

    kind = "Failure"

    def to_document(self) -> dict:
        return {"kind": "Failure", "reason": self.reason, **self.state.to_document()}


def validate_certificate(P, cert: BoundednessCertificate) -> None:
    """Raise CertificateInfeasible unless ``cert`` is a valid certificate for P."""
    pts = polar_points(P)
    if cert.kind == "Bounded":
        w = cert.weights
        if w is None or w.shape != (P.n,):
            raise CertificateInfeasible("weights missing or of wrong length")
        if w.min() < WEIGHT_FLOOR:
            raise CertificateInfeasible(f"weight {w.min():.3e} below floor {WEIGHT_FLOOR}")
        if abs(w.sum() - 1) > 1e-9:
            raise CertificateInfeasible(f"weights sum to {w.sum()!r}")
        res = np.linalg.norm(w @ pts)
        if res > RESIDUAL_TOL:
            raise CertificateInfeasible(f"combination residual {res:.3e}")
    elif cert.kind == "Unbounded":
        q = cert.direction
        if q is None or np.linalg.norm(q) == 0:
            raise CertificateInfeasible("missing direction")
        if np.max(pts @ q) > RAY_TOL:
            raise CertificateInfeasible(f"polar point on the positive side: {np.max(pts @ q):.3e}")
        if np.max(P.rows @ q) > RAY_TOL * np.abs(P.rows).max():
            raise CertificateInfeasible("direction is not a recession ray")
    else:
        raise CertificateInfeasible(f"unknown certificate kind {cert.kind!r}")


def positive_combination(points: np.ndarray, floor: float = WEIGHT_FLOOR) -> np.ndarray:
    """Weights w >= floor, sum 1, with sum_i w_i p_i = 0.

    Maximizes the smallest weight with an LP, then removes the residual by
    a least-norm correction on the equality constraints.
    """
    n, d = points.shape
    # variables (w_1..w_n, t); maximize t
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    A_eq = np.zeros((d + 1, n + 1))
    A_eq[:d, :n] = points.T
    A_eq[d, :n] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    A_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * n + [(None, 1.0 / n)], method="highs")
    if res.status != 0 or -res.fun < floor:
        raise CertificateInfeasible("origin is not strictly inside the polar hull")
    w = res.x[:n]
    M = A_eq[:, :n]
    for _ in range(2):
        w = w - np.linalg.lstsq(M, M @ w - b_eq, rcond=None)[0]
    if w.min() < floor:
        raise CertificateInfeasible("polishing pushed a weight below the floor")
    return w


def pair_multipliers(P, x_plus: VertexBasis, x_minus: VertexBasis, c) -> np.ndarray:
    """Convex weights on polar points read off the two optimal bases.

    At the maximizer of c, c = sum y_i a_i over the tight rows with y >= 0;
    likewise -c at the minimizer.  Adding both gives a non-negative
    combination of the rows equal to zero, i.e. of the polar points a_i/b_i
    with coefficients y_i b_i.
    """
    c = np.asarray(c, dtype=float)
    rows, rhs = np.asarray(P.rows), np.asarray(P.rhs)
    w = np.zeros(rows.shape[0])
    for basis, obj in ((x_plus.tight, c), (x_minus.tight, -c)):
        y = solve_square(rows[list(basis)].T, obj)
        if y.min() < -1e-9 * max(1.0, np.abs(y).max()):
            raise CertificateInfeasible(f"basis {basis} is not optimal (multiplier {y.min():.3e})")
        w[list(basis)] += np.maximum(y, 0.0) * rhs[list(basis)]
    if w.sum() <= 0:
        raise CertificateInfeasible("optimal bases give an empty combination")
    return w / w.sum()


def extract_certificate(P, x_plus: VertexBasis, x_minus: VertexBasis, c,
                        target: Polytope | None = None) -> BoundednessCertificate:
    """Boundedness certificate from the maximizers of c and -c.

    The optimal bases must produce a non-negative zero combination of the
    rows of P (otherwise the optima were spurious).  Strictly positive
    weights over all rows of ``target`` (default P) are then found by LP
    and validated.
    """
    pair_multipliers(P, x_plus, x_minus, c)
    target = P if target is None else target
    w = positive_combination(polar_points(target))
    cert = BoundednessCertificate("Bounded", weights=w)
    validate_certificate(target, cert)
    return cert


def rescale(P: Polytope, state: RescaleState, y, k_eff: float):
    """Contract coordinates by k_eff/|y| along y.

    With S = I + (k_eff/|y| - 1) yy^T/|y|^2 and new coordinates z = S x,
    the rows become a_i^T S^{-1}, the right-hand sides are unchanged and
    the volume is multiplied by det S = k_eff/|y| <= 1/2.
    """
    y = np.asarray(y, dtype=float)
    ny = float(np.linalg.norm(y))
    if ny < 2 * k_eff:
        raise ValueError(f"rescale needs |y| >= 2 k_eff, got |y|={ny:.4g}, k_eff={k_eff:.4g}")
    yh = y / ny
    factor = k_eff / ny
    S = np.eye(len(y)) + (factor - 1.0) * np.outer(yh, yh)
    S_inv = np.eye(len(y)) + (1.0 / factor - 1.0) * np.outer(yh, yh)
    newP = Polytope(P.rows @ S_inv, P.rhs, P.name)
    new_state = RescaleState(S @ state.transform, state.restarts_used, state.history + [ny],
                             list(state.events))
    return newP, new_state


def inscribed_scale(P: Polytope, logk: float) -> float:
    """Isotropic factor sigma such that sigma * P contains B(0, START_MARGIN |x0|).

    P must be normalized (rhs = 1); its inscribed radius about the origin
    is then 1 / max |a_i|.  Scaling by a scalar changes neither the polar
    certificate weights nor ray directions.
    """
    x0_norm = float(np.linalg.norm(artificial_vertex(P.d, logk)))
    r_in = 1.0 / float(np.max(np.linalg.norm(P.rows, axis=1) / P.rhs))
    return START_MARGIN * x0_norm / r_in


def _pull_back_ray(state: RescaleState, ray) -> np.ndarray:
    r = np.linalg.solve(state.transform, ray)
    return r / np.linalg.norm(r)


def certify_boundedness(P: Polytope, cfg: SolverConfig | None = None):
    """Certify that P = {x : Ax <= b}, b > 0, is bounded or unbounded.

    Returns a validated BoundednessCertificate, or a CertifyFailure when
    ``cfg.max_restarts`` attempts are used up.
    """
    cfg = cfg or SolverConfig()
    params = cfg.resolve(P.d, P.n)
    base = P.normalized()
    state = RescaleState.identity(P.d)
    current = base
    master = RngStream(cfg.seed)
    for attempt in range(cfg.max_restarts):
        state.restarts_used = attempt + 1
        rng = master.child(attempt)
        event = {"attempt": attempt}
        state.events.append(event)
        sigma = inscribed_scale(current, params["logk"]) if params["prescale"] else 1.0
        work = Polytope(current.rows / sigma, current.rhs, current.name)
        event["scale"] = sigma
        try:
            setup = add_artificial_constraints(work, params["logk"], params["rho"], rng)
            Qp = perturb(setup.augmented, params["lambda"], rng)
            start = find_start_vertex(setup, Qp)
            u = sample_unit_vector(rng, P.d)
            V = orthonormalize(setup.c, u)
            c = V.e1 * np.linalg.norm(setup.c)
            first = walk(Qp, V, start, c, params["max_steps"], params["orientation"])
        except (NotAVertex, StartNotOnShadow, DegenerateSpan, DegeneratePivot, SingularSystem) as exc:
            event["outcome"] = type(exc).__name__
            continue
        tag, payload = _handle(first, P, current, sigma, state, params, event)
        if tag == "certificate":
            return payload
        if tag == "rescale":
            current, state = payload
            continue
        if tag != "optimum":
            continue
        x1 = first.vertex
        if set(x1.tight) & set(setup.artificial_indices):
            event["outcome"] = "artificial row tight at x1"
            continue
        Q = PerturbedPolytope(work, Qp.r[:P.n], params["lambda"])
        try:
            second = walk(Q, V, x1, -c, params["max_steps"], params["orientation"])
        except (StartNotOnShadow, DegeneratePivot, SingularSystem) as exc:
            event["outcome"] = "second walk: " + type(exc).__name__
            continue
        event["steps"] = [first.steps_taken, second.steps_taken]
        tag, payload = _handle(second, P, current, sigma, state, params, event)
        if tag == "certificate":
            return payload
        if tag == "rescale":
            current, state = payload
            continue
        if tag != "optimum":
            continue
        try:
            cert = extract_certificate(Q, x1, second.vertex, c, target=P)
        except CertificateInfeasible as exc:
            event["outcome"] = f"CertificateInfeasible: {exc}"
            continue
        event["outcome"] = "Bounded"
        cert.transform = state.transform.copy()
        cert.restarts_used = state.restarts_used
        cert.history = list(state.history)
        cert.events = list(state.events)
        return cert
    return CertifyFailure("RestartBudgetExhausted", state)


def _handle(out, P, current, sigma, state, params, event):
    """Interpret one walk outcome as (tag, payload).

    Tags: "optimum", "certificate" (payload: certificate), "rescale"
    (payload: (polytope, state)) and "retry".
    """
    if out.kind is Outcome.OPTIMUM:
        return "optimum", None
    if out.kind is Outcome.UNBOUNDED:
        cert = BoundednessCertificate("Unbounded", direction=_pull_back_ray(state, out.ray),
                                      transform=state.transform.copy(),
                                      restarts_used=state.restarts_used, history=list(state.history),
                                      events=list(state.events))
        try:
            validate_certificate(P, cert)
        except CertificateInfeasible as exc:
            event["outcome"] = f"invalid ray: {exc}"
            return "retry", None
        event["outcome"] = "Unbounded"
        return "certificate", cert
    y = out.vertex.point / sigma
    event["fail_norm"] = float(np.linalg.norm(y))
    if np.linalg.norm(y) >= 2 * params["logk"]:
        event["outcome"] = "rescale"
        newP, new_state = rescale(current, state, y, params["logk"])
        event["det_factor"] = float(np.linalg.det(new_state.transform) / np.linalg.det(state.transform))
        return "rescale", (newP, new_state)
    event["outcome"] = "fail, redraw"
    return "retry", None


THRESHOLD_READINGS = ("proof", "statement")


def halfspace_threshold(logk: float, reading: str = "proof") -> float:
    """Hypothesis bound on c.q.

    ``statement``: -(2 L^2 - 1)/L^2, which is below -1 for L > 1.
    ``proof``: -(2 L^2 - 1)/(2 L^2), the value the argument
    |q + c|^2 = 2 + 2 c.q <= 1/L^2 actually needs.
    """
    L2 = logk * logk
    if reading == "proof":
        return -(2 * L2 - 1) / (2 * L2)
    if reading == "statement":
        return -(2 * L2 - 1) / L2
    raise ValueError(f"reading must be one of {THRESHOLD_READINGS}")


def check_maximizer_halfspace(P, c, q, logk: float, vertex_oracle=None, reading: str = "proof",
                    vertices=None) -> bool:
    """Check: if c.q is below the threshold then the c-maximizer v has v.q <= 0."""
    c = np.asarray(c, dtype=float)
    q = np.asarray(q, dtype=float)
    if abs(np.linalg.norm(c) - 1) > 1e-9 or abs(np.linalg.norm(q) - 1) > 1e-9:
        raise ValueError("c and q must be unit vectors")
    if vertices is None:
        if vertex_oracle is None:
            from .oracle import enumerate_vertices as vertex_oracle
        report = roundness(P, logk, vertex_oracle)
        if not report.is_k_round:
            raise PreconditionUnmet(f"polytope is not {logk}-round (outer radius {report.outer_radius:.4g})")
        vertices, _ = vertex_oracle(P)
    if c @ q > halfspace_threshold(logk, reading):
        return True
    pts = np.array([v.point for v in vertices])
    v = pts[int(np.argmax(pts @ c))]
    return bool(v @ q <= 1e-9)
