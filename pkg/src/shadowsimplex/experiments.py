"""Monte Carlo estimates of the quantities the shadow-size analysis bounds.

Every trial owns the stream ``RngStream(seed, trial)``, so a report depends
only on its configuration and never on thread count or completion order.
Conditional probabilities are pooled over the conditioning events of all
trials; their standard error is the binomial one over those events.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds
from .certify import default_step_budget, reference_logk
from .errors import (DegeneratePivot, DegenerateSpan, HypothesisViolation, IoError, NoShadowEdges,
                     NotAVertex, RoundnessViolation, SingularSystem, StartNotOnShadow)
from .geometry_core import orthonormalize, point_segment_distance
from .oracle import MAX_D, MAX_N, argmax_vertices, decide_bounded, enumerate_vertices, shadow_hull, shadow_stats
from .polytope import (PerturbedPolytope, Polytope, add_artificial_constraints, box, cube, default_rho, perturb,
                       roundness)
from .sampling import RhoPerturbationParams, RngStream, sample_exponential, sample_rho_perturbation, sample_unit_vector
from .shadow_walk import find_start_vertex, walk

KINDS = ("max-exp", "shadow-round", "shadow-nonround", "angle-round", "angle-perturbed", "edge-length",
         "start-vertex")
FAMILIES = ("cube", "random-facet", "random-round", "stretched-box", "fixture")
MIN_TRIALS = 100
PER_TRIAL_LIMIT = 10_000
CSV_COLUMNS = ("kind", "trials", "estimate", "std_error", "paper_bound", "satisfied", "seed")
_RESAMPLE_LIMIT = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo campaign.

    ``lam`` may be a number or a preset name (``"ks06"`` for 1/n,
    ``"paper"`` for ln n).  ``family`` picks the instance source; with
    ``"fixture"`` the polytope is given in ``polytope``.
    """

    kind: str
    trials: int = 1000
    d: int = 3
    n: int | None = None
    k: float | None = None
    lam: float | str = 1.0
    rho: float | None = None
    t: float | None = None
    epsilon: float | None = None
    logk: float | None = None
    family: str = "cube"
    polytope: Polytope | None = None
    stretch: float = 100.0
    perturb: bool = True
    seed: int = 0
    threads: int = 1
    keep_per_trial: bool = False
    max_steps: int | None = None
    orientation: str = "cw"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.trials < MIN_TRIALS:
            raise ValueError(f"need at least {MIN_TRIALS} trials")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.kind == "max-exp":
            if self.n is None or self.n < 1:
                raise ValueError("max-exp needs n >= 1")
        elif self.family == "fixture":
            if self.polytope is None:
                raise ValueError("family 'fixture' needs a polytope")
            object.__setattr__(self, "d", self.polytope.d)
            object.__setattr__(self, "n", self.polytope.n)
        elif self.family in ("cube", "stretched-box"):
            if self.n is not None and self.n != 2 * self.d:
                raise ValueError(f"family {self.family} has n = 2d = {2 * self.d}")
            object.__setattr__(self, "n", 2 * self.d)
        elif self.n is None:
            object.__setattr__(self, "n", 12 if self.kind != "start-vertex" else 16)
        if self.kind != "max-exp":
            extra = self.d if self.kind == "start-vertex" else 0
            if self.d > MAX_D or self.n + extra > MAX_N:
                raise ValueError(f"instance exceeds the oracle budget (d <= {MAX_D}, n <= {MAX_N})")
        if self.rho is not None and not 0 < self.rho < 1 / math.sqrt(self.d):
            raise ValueError("rho must lie in (0, 1/sqrt(d))")
        if self.lambda_value <= 0:
            raise ValueError("lambda must be positive")

    @property
    def lambda_value(self) -> float:
        if self.lam == "ks06":
            return 1.0 / self.n
        if self.lam == "paper":
            return math.log(self.n)
        return float(self.lam)

    def to_document(self) -> dict:
        doc = asdict(self)
        # thread count changes scheduling only, never results
        del doc["threads"]
        doc["polytope"] = None if self.polytope is None else self.polytope.to_document()
        doc["lambda_value"] = self.lambda_value
        return doc


@dataclass
class ExperimentReport:
    kind: str
    trials: int
    estimate: float
    std_error: float
    paper_bound: float
    satisfied: bool
    seed: int
    config: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    per_trial: list | None = None

    def to_document(self) -> dict:
        return {"kind": self.kind, "trials": self.trials, "estimate": self.estimate,
                "std_error": self.std_error, "paper_bound": self.paper_bound,
                "satisfied": self.satisfied, "seed": self.seed, "config": self.config,
                "details": self.details, "per_trial": self.per_trial}

    @classmethod
    def from_document(cls, doc: dict) -> "ExperimentReport":
        return cls(**doc)


def _plain(x):
    """Convert numpy scalars and arrays to JSON-native values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def emit_report(report, fmt: str = "json") -> str:
    """Serialize one report (or a list of them) as JSON or CSV text.

    CSV carries the aggregate columns only, one row per report.
    """
    reports = report if isinstance(report, list) else [report]
    if fmt == "json":
        docs = [_plain(r.to_document()) for r in reports]
        return json.dumps(docs if isinstance(report, list) else docs[0], sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow([r.kind, r.trials, repr(float(r.estimate)), repr(float(r.std_error)),
                             repr(float(r.paper_bound)), str(bool(r.satisfied)).lower(), r.seed])
        return buf.getvalue()
    raise ValueError("format must be 'json' or 'csv'")


def write_report(report, path, fmt: str = "json") -> None:
    text = emit_report(report, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc}") from None


# instance families

def _random_rows(rng: RngStream, d: int, n: int, shrink: bool) -> np.ndarray:
    A = np.array([sample_unit_vector(rng, d) for _ in range(n)])
    if shrink:
        A *= 0.5 + 0.5 * rng.uniform(n)[:, None]
    return A


def random_facet_polytope(rng: RngStream, d: int, n: int) -> Polytope:
    """{a_i x <= 1} with a_i uniform directions of norm in [1/2, 1]; resampled until bounded."""
    for _ in range(_RESAMPLE_LIMIT):
        P = Polytope(_random_rows(rng, d, n, shrink=True), np.ones(n), "random-facet")
        if decide_bounded(P).bounded:
            return P
    raise RoundnessViolation("could not draw a bounded random-facet instance")


def random_round_polytope(rng: RngStream, d: int, n: int, k: float) -> Polytope:
    """{a_i x <= 1} with unit a_i, resampled until bounded and inside B(0, k)."""
    for _ in range(_RESAMPLE_LIMIT):
        P = Polytope(_random_rows(rng, d, n, shrink=False), np.ones(n), "random-round")
        verts, rays = enumerate_vertices(P)
        if not rays and max(np.linalg.norm(v.point) for v in verts) <= k:
            return P
    raise RoundnessViolation(f"could not draw a bounded {k}-round instance")


def _fixed_instance(cfg: ExperimentConfig) -> Polytope | None:
    if cfg.family == "cube":
        return cube(cfg.d)
    if cfg.family == "stretched-box":
        return box(np.concatenate([np.ones(cfg.d - 1), [cfg.stretch]]))
    if cfg.family == "fixture":
        return cfg.polytope
    return None


def _instance(cfg: ExperimentConfig, fixed: Polytope | None, rng: RngStream, k_round: float | None) -> Polytope:
    if fixed is not None:
        return fixed
    if cfg.family == "random-facet":
        return random_facet_polytope(rng, cfg.d, cfg.n)
    return random_round_polytope(rng, cfg.d, cfg.n, k_round if k_round is not None else 4.0 * cfg.d)


def _qpoly(cfg, P, rng) -> PerturbedPolytope:
    if cfg.perturb:
        return perturb(P, cfg.lambda_value, rng)
    return PerturbedPolytope(P, np.zeros(P.n), cfg.lambda_value)


def _map_trials(fn, cfg: ExperimentConfig) -> list:
    ids = range(cfg.trials)
    if cfg.threads == 1:
        return [fn(i) for i in ids]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(fn, ids))


def _mean_and_se(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return float(v.mean()), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


def _rate_and_se(hits: int, total: int) -> tuple[float, float]:
    p = hits / total
    return p, math.sqrt(p * (1 - p) / total)


def _report(cfg, estimate, se, bound, satisfied, details, records) -> ExperimentReport:
    keep = cfg.keep_per_trial or cfg.trials <= PER_TRIAL_LIMIT
    return ExperimentReport(cfg.kind, cfg.trials, float(estimate), float(se), float(bound), bool(satisfied),
                            int(cfg.seed), _plain(cfg.to_document()), _plain(details),
                            _plain(records) if keep else None)


def _require_round(P: Polytope, k: float) -> None:
    report = roundness(P, k)
    if not report.is_k_round:
        raise RoundnessViolation(
            f"fixture is not {k}-round (inner ok: {report.inner_ok}, outer radius {report.outer_radius:.4g})")


# experiments

def run_max_exp(cfg: ExperimentConfig) -> ExperimentReport:
    """Mean of max of n Exp(lam) draws against lam H_n (two-sided)."""
    lam, n = cfg.lambda_value, cfg.n

    def trial(i):
        return {"max": float(np.max(sample_exponential(RngStream(cfg.seed, i), lam, n)))}

    records = _map_trials(trial, cfg)
    est, se = _mean_and_se([r["max"] for r in records])
    bound = bounds.expected_max_improved(n, lam)
    details = {"overview_bound": bounds.expected_max_overview(n, lam), "test": "two-sided"}
    return _report(cfg, est, se, bound, abs(est - bound) <= 3 * se, details, records)


def _perimeter_factor(Q: PerturbedPolytope) -> float:
    """Q lies in (1 + max r_i/b_i) P; for b = 1 that is 1 + max r."""
    return 1.0 + float(np.max(Q.r / Q.base.rhs))


def run_shadow_size_round(cfg: ExperimentConfig) -> ExperimentReport:
    """Shadow edge count of Q on a uniformly random plane, with perimeter checks."""
    fixed = _fixed_instance(cfg)
    if fixed is None:
        k = cfg.k if cfg.k is not None else 4.0 * cfg.d
    else:
        k = cfg.k if cfg.k is not None else roundness(fixed, 1.0).outer_radius
        _require_round(fixed, k)
    fixed_vertices = enumerate_vertices(fixed)[0] if fixed is not None else None
    tol = 1e-6

    def trial(i):
        rng = RngStream(cfg.seed, i)
        P = _instance(cfg, fixed, rng, k)
        base_vertices = fixed_vertices if fixed is not None else enumerate_vertices(P)[0]
        V = orthonormalize(sample_unit_vector(rng, cfg.d), sample_unit_vector(rng, cfg.d))
        Q = _qpoly(cfg, P, rng)
        hull, _ = shadow_hull(Q.as_polytope(), V)
        base_hull, _ = shadow_hull(P, V, base_vertices)
        limit = 2 * math.pi * k * _perimeter_factor(Q)
        return {"edges": hull.edge_count, "perimeter": hull.perimeter, "max_r": float(np.max(Q.r)),
                "perimeter_limit": limit, "perimeter_ok": hull.perimeter <= limit + tol,
                "base_perimeter": base_hull.perimeter,
                "base_perimeter_ok": base_hull.perimeter <= 2 * math.pi * k + tol}

    records = _map_trials(trial, cfg)
    est, se = _mean_and_se([r["edges"] for r in records])
    bound = bounds.shadow_bound_round(bounds.BoundInputs(cfg.d, cfg.n, k=max(k, 1.0), lam=cfg.lambda_value))
    details = {
        "k": k,
        "perimeter_violations": sum(not r["perimeter_ok"] for r in records),
        "base_perimeter_violations": sum(not r["base_perimeter_ok"] for r in records),
        "overview_bound": bounds.shadow_bound_round_overview(
            bounds.BoundInputs(cfg.d, cfg.n, k=max(k, 1.0), lam=cfg.lambda_value)),
        "test": "one-sided",
    }
    ok = est <= bound and details["perimeter_violations"] == 0 and details["base_perimeter_violations"] == 0
    return _report(cfg, est, se, bound, ok, details, records)


def _lifted_hull_edges(hull, vertices):
    """Pairs of lifted endpoints of the shadow polygon's edges."""
    idx = list(hull.indices)
    if hull.edge_count == 0:
        return []
    if hull.edge_count == 1:
        return [(vertices[idx[0]].point, vertices[idx[1]].point)]
    return [(vertices[idx[j]].point, vertices[idx[(j + 1) % len(idx)]].point) for j in range(len(idx))]


def _plane_vector(cfg) -> np.ndarray:
    return np.full(cfg.d, 1.0 / math.sqrt(cfg.d))


def run_shadow_size_nonround(cfg: ExperimentConfig) -> ExperimentReport:
    """Shadow edges meeting B(0, t) when one plane vector is a rho-perturbation."""
    if cfg.t is None or cfg.rho is None:
        raise ValueError("the non-round shadow experiment needs t and rho")
    fixed = _fixed_instance(cfg)
    params = RhoPerturbationParams(cfg.rho, _plane_vector(cfg))

    def trial(i):
        rng = RngStream(cfg.seed, i)
        P = _instance(cfg, fixed, rng, None)
        if np.max(np.linalg.norm(P.rows, axis=1)) > 1 + 1e-12:
            raise HypothesisViolation("constraint rows must have norm at most 1")
        V = orthonormalize(sample_rho_perturbation(rng, params), sample_unit_vector(rng, cfg.d))
        Q = _qpoly(cfg, P, rng)
        hull, vertices = shadow_hull(Q.as_polytope(), V)
        origin = np.zeros(cfg.d)
        inside = sum(point_segment_distance(origin, a, b) <= cfg.t for a, b in _lifted_hull_edges(hull, vertices))
        return {"edges": inside, "hull_edges": hull.edge_count}

    records = _map_trials(trial, cfg)
    est, se = _mean_and_se([r["edges"] for r in records])
    inp = bounds.BoundInputs(cfg.d, cfg.n, lam=cfg.lambda_value, rho=cfg.rho, t=cfg.t)
    bound = bounds.shadow_bound_nonround(inp)
    details = {"overview_bound": bounds.shadow_bound_nonround_overview(inp), "test": "one-sided",
               "mean_hull_edges": _mean_and_se([r["hull_edges"] for r in records])[0]}
    return _report(cfg, est, se, bound, est <= bound, details, records)


def run_angle_bound(cfg: ExperimentConfig, variant: str | None = None) -> ExperimentReport:
    """P[cos theta < eps | edge on shadow], pooled over on-shadow edges.

    ``round``: both plane vectors uniform.  ``perturbed``: one is a
    rho-perturbation of a fixed vector.
    """
    variant = variant or ("perturbed" if cfg.kind == "angle-perturbed" else "round")
    if variant not in ("round", "perturbed"):
        raise ValueError("variant must be 'round' or 'perturbed'")
    if cfg.epsilon is None or not 0 < cfg.epsilon < 1:
        raise ValueError("the angle experiment needs epsilon in (0, 1)")
    if variant == "perturbed" and cfg.rho is None:
        raise ValueError("the perturbed variant needs rho")
    fixed = _fixed_instance(cfg)
    params = RhoPerturbationParams(cfg.rho, _plane_vector(cfg)) if variant == "perturbed" else None

    def trial(i):
        rng = RngStream(cfg.seed, i)
        P = _instance(cfg, fixed, rng, cfg.k)
        v = sample_rho_perturbation(rng, params) if params else sample_unit_vector(rng, cfg.d)
        V = orthonormalize(v, sample_unit_vector(rng, cfg.d))
        Q = _qpoly(cfg, P, rng)
        _, edges = shadow_stats(Q.as_polytope(), V)
        on = [e for e in edges if e.on_shadow]
        return {"events": len(on), "hits": sum(e.cos_theta < cfg.epsilon for e in on),
                "identity_error": max((abs(e.shadow_length - e.delta * e.cos_theta) for e in on), default=0.0)}

    records = _map_trials(trial, cfg)
    events = sum(r["events"] for r in records)
    if events == 0:
        raise NoShadowEdges("no on-shadow edges in any trial")
    est, se = _rate_and_se(sum(r["hits"] for r in records), events)
    if variant == "round":
        bound = bounds.angle_bound_round(cfg.d, cfg.epsilon)
    else:
        bound = bounds.angle_bound_perturbed(cfg.epsilon, cfg.rho)
    details = {"variant": variant, "events": events, "test": "one-sided",
               "max_identity_error": max(r["identity_error"] for r in records),
               "display_bound": min(bound, 1.0)}
    return _report(cfg, est, se, bound, est <= bound + 3 * se, details, records)


def run_edge_length(cfg: ExperimentConfig) -> ExperimentReport:
    """Mean shadow length of on-shadow edges, and the short-edge frequency.

    The headline estimate is E[l | on shadow] against the lower bound; the
    details carry P[delta < eps | edge of Q] against n eps / (2 lam), with
    eps = lam / n unless given.
    """
    fixed = _fixed_instance(cfg)
    lam = cfg.lambda_value
    eps = cfg.epsilon if cfg.epsilon is not None else lam / cfg.n

    def trial(i):
        rng = RngStream(cfg.seed, i)
        P = _instance(cfg, fixed, rng, cfg.k)
        V = orthonormalize(sample_unit_vector(rng, cfg.d), sample_unit_vector(rng, cfg.d))
        Q = _qpoly(cfg, P, rng)
        _, edges = shadow_stats(Q.as_polytope(), V)
        return {"lengths": [e.shadow_length for e in edges if e.on_shadow],
                "deltas": [e.delta for e in edges]}

    records = _map_trials(trial, cfg)
    lengths = [x for r in records for x in r["lengths"]]
    deltas = [x for r in records for x in r["deltas"]]
    if not lengths:
        raise NoShadowEdges("no on-shadow edges in any trial")
    est, se = _mean_and_se(lengths)
    bound = bounds.edge_length_lower_bound(cfg.d, cfg.n, lam)
    ok_a = est >= bound - 3 * se
    short, short_se = _rate_and_se(sum(x < eps for x in deltas), len(deltas))
    tail = bounds.delta_tail_bound(cfg.n, lam, eps)
    ok_b = short <= tail + 3 * short_se
    details = {"test": "one-sided", "events": len(lengths), "length_satisfied": ok_a,
               "overview_lower_bound": bounds.edge_length_lower_bound_overview(cfg.d, cfg.n, lam),
               "short_epsilon": eps, "short_estimate": short, "short_std_error": short_se,
               "short_bound": tail, "short_edges": len(deltas), "short_satisfied": ok_b}
    return _report(cfg, est, se, bound, ok_a and ok_b, details, records)


def run_start_vertex(cfg: ExperimentConfig) -> ExperimentReport:
    """The three artificial-vertex properties, checked against the oracle.

    Per trial: add the artificial rows, perturb every right-hand side, then
    test (1) the artificial vertex is feasible, (2) -c is maximized there,
    (3) no artificial row is tight where c is maximized.  Also runs one
    walk from the artificial vertex toward c and records whether it reaches
    the oracle optimum within the step budget.  With ``perturb=False``
    neither the right-hand sides nor c are randomized.
    """
    logk = cfg.logk if cfg.logk is not None else reference_logk(cfg.d)
    rho = cfg.rho if cfg.rho is not None else default_rho(cfg.d, cfg.n)
    fixed = _fixed_instance(cfg)
    if fixed is not None:
        fixed = fixed.normalized()
        _require_round(fixed, logk)
    steps = cfg.max_steps if cfg.max_steps is not None else default_step_budget(cfg.d, cfg.n)
    tol = 1e-9

    def trial(i):
        rng = RngStream(cfg.seed, i)
        P = _instance(cfg, fixed, rng, logk)
        setup = add_artificial_constraints(P, logk, rho, rng)
        Qp = _qpoly(cfg, setup.augmented, rng)
        u = sample_unit_vector(rng, cfg.d)
        vertices, _ = enumerate_vertices(Qp.as_polytope())
        pts = np.array([v.point for v in vertices])
        # without perturbation c is the unperturbed direction (1, ..., 1)/sqrt(d)
        c = setup.c if cfg.perturb else _plane_vector(cfg)
        art = set(setup.artificial_indices)
        try:
            start = find_start_vertex(setup, Qp)
            p1 = True
        except NotAVertex:
            start, p1 = None, False
        p2 = p1 and bool(-c @ start.point >= np.max(pts @ -c) - tol * (1 + np.abs(pts @ c).max()))
        best = argmax_vertices(vertices, c)
        p3 = all(not (vertices[j].active & art) for j in best)
        walked, walk_steps = False, None
        if p1:
            try:
                V = orthonormalize(c, u)
                out = walk(Qp, V, start, V.e1 * np.linalg.norm(c), steps, cfg.orientation)
                walk_steps = out.steps_taken
                walked = out.ok and bool(out.vertex.point @ c >= pts[best[0]] @ c - 1e-7 * (1 + abs(pts[best[0]] @ c)))
            except (StartNotOnShadow, DegeneratePivot, DegenerateSpan, SingularSystem):
                walked = False
        return {"p1": p1, "p2": p2, "p3": p3, "all": p1 and p2 and p3, "walk_ok": walked,
                "walk_steps": walk_steps}

    records = _map_trials(trial, cfg)
    est, se = _rate_and_se(sum(r["all"] for r in records), cfg.trials)
    floor = bounds.start_vertex_floor(cfg.d, cfg.n)
    walk_rate, walk_se = _rate_and_se(sum(r["walk_ok"] for r in records), cfg.trials)
    ok_props = est >= floor - 3 * se
    ok_walk = walk_rate >= 0.75 - 3 * walk_se
    details = {"test": "one-sided floor", "logk": logk, "rho": rho, "max_steps": steps,
               "rate_p1": sum(r["p1"] for r in records) / cfg.trials,
               "rate_p2": sum(r["p2"] for r in records) / cfg.trials,
               "rate_p3": sum(r["p3"] for r in records) / cfg.trials,
               "properties_satisfied": ok_props,
               "walk_rate": walk_rate, "walk_std_error": walk_se, "walk_floor": 0.75, "walk_satisfied": ok_walk}
    return _report(cfg, est, se, floor, ok_props and ok_walk, details, records)


_RUNNERS = {
    "max-exp": run_max_exp,
    "shadow-round": run_shadow_size_round,
    "shadow-nonround": run_shadow_size_nonround,
    "angle-round": run_angle_bound,
    "angle-perturbed": run_angle_bound,
    "edge-length": run_edge_length,
    "start-vertex": run_start_vertex,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return _RUNNERS[cfg.kind](cfg)


def available_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
