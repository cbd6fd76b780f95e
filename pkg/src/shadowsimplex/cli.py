"""Command-line entry point.

Exit codes: 0 on success, 1 when the run produced a failure result
(restart budget exhausted, failed walk, unsatisfied bound), 2 on usage or
input errors.  A short summary goes to standard output; the structured
report, which echoes the seed and every resolved parameter, goes to --out.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds
from .certify import CertifyFailure, SolverConfig, certify_boundedness, inscribed_scale
from .errors import (DegeneratePivot, DegenerateSpan, IoError, NotAVertex, ParseError, ShadowSimplexError,
                     SingularSystem, StartNotOnShadow)
from .experiments import FAMILIES, KINDS, ExperimentConfig, available_threads, run_experiment, write_report
from .geometry_core import orthonormalize
from .oracle import decide_bounded, enumerate_edges, shadow_hull
from .polytope import PerturbedPolytope, Polytope, add_artificial_constraints, load_polytope, perturb
from .sampling import RngStream, sample_unit_vector
from .shadow_walk import Outcome, find_start_vertex, walk

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
_U64 = (1 << 64) - 1


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= _U64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _logk(text: str):
    return text if text == "paper" else float(text)


def _add_lambda(p):
    g = p.add_argument_group("perturbation").add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lam", type=float, help="explicit exponential mean")
    g.add_argument("--lambda-mode", choices=("ks06", "paper"), help="ks06: 1/n, paper: ln n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shadowsimplex",
                                     description="Randomized shadow-vertex simplex and bound verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, polytope=True):
        if polytope:
            p.add_argument("--polytope", required=True, help="polytope JSON document")
        p.add_argument("--seed", type=_u64, default=0)
        p.add_argument("--out", help="write the structured report here")
        return p

    for name in ("solve-walk", "certify"):
        p = common(sub.add_parser(name))
        _add_lambda(p)
        p.add_argument("--logk", type=_logk, help="artificial-row parameter; 'paper' selects 16d+1")
        p.add_argument("--rho", type=float)
        p.add_argument("--max-steps", type=_positive_int)
        p.add_argument("--orientation", choices=("cw", "ccw"), default="cw")
        p.add_argument("--max-restarts", type=_positive_int, default=20,
                       help="attempts before reporting Failure")

    p = common(sub.add_parser("oracle"))

    p = common(sub.add_parser("experiment"), polytope=False)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--polytope", help="fixture polytope (sets --family fixture)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int)
    _add_lambda(p)
    p.add_argument("--rho", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--logk", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-steps", type=_positive_int)
    p.add_argument("--stretch", type=float, default=100.0)
    p.add_argument("--unperturbed", action="store_true", help="skip every random perturbation")
    p.add_argument("--per-trial", action="store_true", help="keep per-trial records above 10^4 trials")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=_positive_int, default=None, help="default: available cores")

    p = sub.add_parser("bounds")
    p.add_argument("--kind", required=True, choices=sorted(bounds.KINDS))
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--rho", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    return parser


def _load(path) -> Polytope:
    return load_polytope(path)


def _solver_config(args) -> SolverConfig:
    mode = args.lam if args.lam is not None else (args.lambda_mode or "ks06")
    return SolverConfig(lambda_mode=mode, logk=args.logk, rho=args.rho, max_steps=args.max_steps,
                        max_restarts=args.max_restarts, seed=args.seed,
                        orientation=args.orientation)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write(path, text):
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def _echo(out, params: dict):
    for key in sorted(params):
        print(f"  {key} = {params[key]}", file=out)


def cmd_certify(args, out) -> int:
    P = _load(args.polytope)
    cfg = _solver_config(args)
    params = cfg.resolve(P.d, P.n)
    result = certify_boundedness(P, cfg)
    doc = {"command": "certify", "polytope": P.to_document(), "config": params,
           "result": result.to_document()}
    _write(args.out, _dump(doc))
    print(f"certify: {result.kind} (d={P.d}, n={P.n}, seed={args.seed})", file=out)
    _echo(out, params)
    if isinstance(result, CertifyFailure):
        print(f"  failure: {result.reason} after {result.state.restarts_used} attempts", file=out)
        return EXIT_FAILURE
    print(f"  restarts_used = {result.restarts_used}", file=out)
    return EXIT_OK


def cmd_solve_walk(args, out) -> int:
    """One phase: artificial start, walk to the maximizer of c, then of -c."""
    P = _load(args.polytope)
    cfg = _solver_config(args)
    params = cfg.resolve(P.d, P.n)
    base = P.normalized()
    sigma = inscribed_scale(base, params["logk"])
    work = Polytope(base.rows / sigma, base.rhs, base.name)
    doc = {"command": "solve-walk", "polytope": P.to_document(), "config": params, "scale": sigma}
    redraws = []
    # an infeasible artificial vertex is a property of the draw, so redraw as certify does
    for attempt in range(cfg.max_restarts):
        rng = RngStream(args.seed).child(attempt)
        try:
            setup = add_artificial_constraints(work, params["logk"], params["rho"], rng)
            Qp = perturb(setup.augmented, params["lambda"], rng)
            start = find_start_vertex(setup, Qp)
            V = orthonormalize(setup.c, sample_unit_vector(rng, P.d))
            c = V.e1 * np.linalg.norm(setup.c)
            first = walk(Qp, V, start, c, params["max_steps"], args.orientation)
            second = None
            if first.kind is Outcome.OPTIMUM:
                Q = PerturbedPolytope(work, Qp.r[:P.n], params["lambda"])
                second = walk(Q, V, first.vertex, -c, params["max_steps"], args.orientation)
            break
        except (NotAVertex, StartNotOnShadow, DegenerateSpan, DegeneratePivot, SingularSystem) as exc:
            redraws.append(f"{type(exc).__name__}: {exc}")
    else:
        doc["result"] = {"kind": "Failure", "reason": "RestartBudgetExhausted", "redraws": redraws}
        _write(args.out, _dump(doc))
        print(f"solve-walk: Failure after {len(redraws)} draws ({redraws[-1].split(':')[0]})", file=out)
        _echo(out, params)
        return EXIT_FAILURE

    def outcome_doc(o):
        if o is None:
            return None
        return {"kind": o.kind.value, "steps_taken": o.steps_taken,
                "tight": None if o.vertex is None else list(o.vertex.tight),
                # work coordinates are sigma times the input coordinates
                "point": None if o.vertex is None else (o.vertex.point / sigma).tolist(),
                "ray": None if o.ray is None else o.ray.tolist(),
                "shadow_path": [list(map(float, p)) for p in o.shadow_path]}

    doc["c"] = c.tolist()
    doc["plane"] = {"e1": V.e1.tolist(), "e2": V.e2.tolist()}
    doc["result"] = {"first": outcome_doc(first), "second": outcome_doc(second), "redraws": redraws}
    _write(args.out, _dump(doc))
    print(f"solve-walk: first walk {first.kind.value} after {first.steps_taken} pivots"
          f" ({len(redraws)} redraws)", file=out)
    if second is not None:
        print(f"  second walk {second.kind.value} after {second.steps_taken} pivots", file=out)
    _echo(out, params)
    return EXIT_FAILURE if first.kind is Outcome.FAIL or (second and second.kind is Outcome.FAIL) else EXIT_OK


def cmd_oracle(args, out) -> int:
    P = _load(args.polytope)
    decision = decide_bounded(P)
    vertices = decision.vertices
    rng = RngStream(args.seed).child(0)
    V = orthonormalize(sample_unit_vector(rng, P.d), sample_unit_vector(rng, P.d))
    doc = {"command": "oracle", "polytope": P.to_document(), "seed": args.seed,
           "bounded": decision.bounded,
           "ray": None if decision.ray is None else decision.ray.tolist(),
           "vertices": [{"point": v.point.tolist(), "bases": [list(b) for b in v.bases]} for v in vertices]}
    if decision.bounded:
        hull, _ = shadow_hull(P, V, vertices)
        doc["edges"] = len(enumerate_edges(P, vertices))
        doc["shadow"] = {"plane": {"e1": V.e1.tolist(), "e2": V.e2.tolist()},
                         "hull_vertices": list(hull.indices), "edge_count": hull.edge_count,
                         "perimeter": hull.perimeter}
    _write(args.out, _dump(doc))
    state = "bounded" if decision.bounded else "unbounded"
    print(f"oracle: {state}, {len(vertices)} vertices (d={P.d}, n={P.n})", file=out)
    if decision.bounded:
        print(f"  {doc['edges']} edges; random shadow has {doc['shadow']['edge_count']} edges", file=out)
    return EXIT_OK


def cmd_experiment(args, out) -> int:
    fixture = _load(args.polytope) if args.polytope else None
    family = args.family or ("fixture" if fixture is not None else
                             {"shadow-nonround": "random-facet", "start-vertex": "random-round"}.get(args.kind, "cube"))
    lam = args.lam if args.lam is not None else (args.lambda_mode or 1.0)
    cfg = ExperimentConfig(kind=args.kind, trials=args.trials, d=args.d, n=args.n, k=args.k,
                           lam=lam, rho=args.rho, t=args.t, epsilon=args.epsilon, logk=args.logk,
                           family=family, polytope=fixture, stretch=args.stretch,
                           perturb=not args.unperturbed, seed=args.seed,
                           threads=args.threads or available_threads(), keep_per_trial=args.per_trial,
                           max_steps=args.max_steps)
    report = run_experiment(cfg)
    if args.out:
        write_report(report, args.out, args.format)
    print(f"experiment {report.kind}: estimate {report.estimate:.6g} +/- {report.std_error:.3g}, "
          f"bound {report.paper_bound:.6g}, satisfied {report.satisfied}", file=out)
    _echo(out, {k: v for k, v in report.config.items() if k not in ("polytope",)})
    return EXIT_OK if report.satisfied else EXIT_FAILURE


def cmd_bounds(args, out) -> int:
    value, tag = bounds.evaluate(args.kind, d=args.d, n=args.n, k=args.k, lam=args.lam, rho=args.rho,
                                 t=args.t, epsilon=args.epsilon)
    inputs = {"d": args.d, "n": args.n, "k": args.k, "lambda": args.lam, "rho": args.rho, "t": args.t,
              "epsilon": args.epsilon}
    doc = {"command": "bounds", "kind": args.kind, "tag": tag, "value": value, "inputs": inputs}
    _write(args.out, _dump(doc))
    shown = value if isinstance(value, bool) else repr(float(value))
    print(f"{args.kind} [{tag}] = {shown}", file=out)
    return EXIT_OK


_COMMANDS = {"certify": cmd_certify, "solve-walk": cmd_solve_walk, "oracle": cmd_oracle,
             "experiment": cmd_experiment, "bounds": cmd_bounds}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, out)
    except (ParseError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ShadowSimplexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
