"""The shadow-vertex simplex method.

The walk keeps a basis B of d tight constraints and an angle phi in the
shadow plane.  The vertex x_B maximizes o(phi) = cos(phi) f1 + sin(phi) f2
exactly when the multipliers y = A_B^{-T} o(phi) are all non-negative.  Each
multiplier is a sinusoid in phi, so the next breakpoint is the first angle
at which one of them turns negative; that row leaves the basis, we slide
along the edge it opens, and the ratio test picks the row that enters.
Rotating the objective moves the optimal vertex around the boundary of the
shadow polygon, which is the path the method traces.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import DegeneratePivot, NotAVertex, SingularSystem, StartNotOnShadow
from .geometry_core import Plane2, project, solve_square

TWO_PI = 2.0 * math.pi
_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class VertexBasis:
    tight: tuple
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tight", tuple(sorted(int(i) for i in self.tight)))
        p = np.array(self.point, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "point", p)


def vertex_from_basis(P, tight) -> VertexBasis:
    """Solve the d tight rows and check feasibility against the rest."""
    tight = tuple(sorted(int(i) for i in tight))
    rows, rhs = np.asarray(P.rows), np.asarray(P.rhs)
    if len(tight) != rows.shape[1] or len(set(tight)) != len(tight):
        raise ValueError(f"a basis needs {rows.shape[1]} distinct indices, got {tight}")
    x = solve_square(rows[list(tight)], rhs[list(tight)])
    slack = rhs - rows @ x
    if np.any(slack < -config.FEAS_TOL * (1 + np.abs(rhs))):
        raise NotAVertex(f"basis {tight} gives an infeasible point (min slack {slack.min():.3e})")
    return VertexBasis(tight, x)


class Outcome(enum.Enum):
    OPTIMUM = "optimum"
    UNBOUNDED = "unbounded"
    FAIL = "fail"


@dataclass
class WalkOutcome:
    kind: Outcome
    vertex: VertexBasis | None
    ray: np.ndarray | None
    steps_taken: int
    shadow_path: list = field(default_factory=list)
    bases: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.kind is Outcome.OPTIMUM


def _frame(V: Plane2, orientation: str):
    if orientation == "ccw":
        return V.e1, V.e2
    if orientation == "cw":
        return V.e1, -V.e2
    raise ValueError("orientation must be 'cw' or 'ccw'")


def _wrap(a):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - a, TWO_PI)


class _Sweep:
    """Mutable sweep state: basis, vertex, and angle in the (f1, f2) frame."""

    def __init__(self, P, V: Plane2, start: VertexBasis, orientation: str):
        self.rows = np.asarray(P.rows, dtype=float)
        self.rhs = np.asarray(P.rhs, dtype=float)
        self.V = V
        self.f1, self.f2 = _frame(V, orientation)
        self.basis = list(start.tight)
        try:
            self.x = solve_square(self.rows[self.basis], self.rhs[self.basis])
        except SingularSystem as exc:
            raise ValueError(f"start basis {start.tight} is singular") from exc
        self._multipliers()
        self.phi = self._start_angle()

    def _multipliers(self):
        AT = self.rows[self.basis].T
        p = solve_square(AT, self.f1)
        q = solve_square(AT, self.f2)
        self.psi = np.arctan2(q, p)
        self.R = np.hypot(p, q)

    def _start_angle(self) -> float:
        live = self.R > 1e-12 * max(1.0, self.R.max())
        psi = self.psi[live]
        if psi.size == 0:
            raise StartNotOnShadow("plane is orthogonal to every multiplier")
        cands = np.sort(np.mod(np.concatenate([psi + np.pi / 2, psi - np.pi / 2]), TWO_PI))
        mids = (cands + np.roll(cands, -1) + np.where(np.arange(len(cands)) == len(cands) - 1, TWO_PI, 0)) / 2
        trial = np.concatenate([cands, mids])
        margin = np.cos(trial[:, None] - psi[None, :]).min(axis=1)
        best = int(np.argmax(margin))
        if margin[best] < -1e-9:
            raise StartNotOnShadow(
                f"basis {tuple(self.basis)} is optimal for no objective in the shadow plane"
            )
        return float(np.mod(trial[best], TWO_PI))

    def breakpoint(self):
        """(angle to next breakpoint, basis position of the leaving row)."""
        live = self.R > 1e-12 * max(1.0, self.R.max())
        dphi = np.full(len(self.basis), np.inf)
        d = _wrap(self.phi - self.psi[live])
        dphi[live] = np.maximum(np.pi / 2 - d, 0.0)
        best = dphi.min()
        ties = np.flatnonzero(dphi <= best + _ANGLE_TOL)
        # lexicographic: smallest constraint index among ties
        k = min(ties, key=lambda t: self.basis[t])
        return float(best), int(k)

    def optimal_for(self, objective) -> bool:
        y = solve_square(self.rows[self.basis].T, objective)
        return bool(y.min() >= -1e-10 * max(1.0, np.abs(y).max()))

    def pivot(self, k: int):
        """Leave basis position k; return the unbounded ray or None."""
        e = np.zeros(len(self.basis))
        e[k] = -1.0
        direction = solve_square(self.rows[self.basis], e)
        s = self.rows @ direction
        slack = np.maximum(self.rhs - self.rows @ self.x, 0.0)
        in_basis = np.zeros(len(self.rhs), dtype=bool)
        in_basis[self.basis] = True
        tol = 1e-9 * np.linalg.norm(self.rows, axis=1) * np.linalg.norm(direction)
        blocking = (~in_basis) & (s > tol)
        if not np.any(blocking):
            return direction / np.linalg.norm(direction)
        t = np.full(len(s), np.inf)
        t[blocking] = slack[blocking] / s[blocking]
        tmin = t.min()
        entering = int(np.flatnonzero(t <= tmin + 1e-12 * (1.0 + tmin))[0])
        new_basis = sorted(self.basis[:k] + self.basis[k + 1:] + [entering])
        try:
            self.x = solve_square(self.rows[new_basis], self.rhs[new_basis])
        except SingularSystem as exc:
            raise DegeneratePivot(f"entering row {entering} makes the basis singular") from exc
        self.basis = new_basis
        self._multipliers()
        return None

    def vertex(self) -> VertexBasis:
        return VertexBasis(tuple(self.basis), self.x.copy())

    def shadow_point(self):
        return tuple(project(self.x, self.V))


def _run(P, V, start, objective, max_steps, orientation, steps_before=0):
    sweep = _Sweep(P, V, start, orientation)
    path = [sweep.shadow_point()]
    bases = [sweep.vertex()]
    steps = steps_before
    if objective is None:
        remaining = TWO_PI
    else:
        if sweep.optimal_for(objective):
            return WalkOutcome(Outcome.OPTIMUM, sweep.vertex(), None, steps, path, bases)
        target = math.atan2(objective @ sweep.f2, objective @ sweep.f1)
        remaining = float(np.mod(target - sweep.phi, TWO_PI))
    seen = set()
    while True:
        dphi, k = sweep.breakpoint()
        if dphi >= remaining - _ANGLE_TOL:
            return WalkOutcome(Outcome.OPTIMUM, sweep.vertex(), None, steps, path, bases)
        if objective is not None and sweep.optimal_for(objective):
            return WalkOutcome(Outcome.OPTIMUM, sweep.vertex(), None, steps, path, bases)
        if steps >= max_steps:
            return WalkOutcome(Outcome.FAIL, sweep.vertex(), None, steps, path, bases)
        key = (tuple(sweep.basis), round(remaining - dphi, 12))
        if key in seen:
            raise DegeneratePivot(f"cycling at basis {key[0]}")
        seen.add(key)
        sweep.phi = float(np.mod(sweep.phi + dphi, TWO_PI))
        remaining -= dphi
        ray = sweep.pivot(k)
        if ray is not None:
            return WalkOutcome(Outcome.UNBOUNDED, sweep.vertex(), ray, steps, path, bases)
        steps += 1
        path.append(sweep.shadow_point())
        bases.append(sweep.vertex())


def walk(P, V: Plane2, start: VertexBasis, objective, max_steps: int | None = None,
         orientation: str = "cw") -> WalkOutcome:
    """Shadow-vertex walk from ``start`` to the maximizer of ``objective``.

    ``objective`` must lie in the plane V.  The objective direction is
    rotated from one that ``start`` optimizes toward ``objective`` in the
    given orientation.  If an unbounded edge appears along which the target
    objective does not increase, the sweep is retried in the opposite
    orientation; of the two arcs, the shorter one stays inside the cone of
    bounded objectives whenever the target itself is bounded.
    """
    objective = np.asarray(objective, dtype=float)
    if not V.contains(objective):
        raise ValueError("objective does not lie in the shadow plane")
    if max_steps is None:
        max_steps = config.DEFAULT_MAX_STEPS
    out = _run(P, V, start, objective, max_steps, orientation)
    if out.kind is not Outcome.UNBOUNDED:
        return out
    if out.ray @ objective > 1e-9 * np.linalg.norm(objective):
        return out
    other = "ccw" if orientation == "cw" else "cw"
    back = _run(P, V, start, objective, max_steps, other, steps_before=out.steps_taken)
    back.shadow_path = out.shadow_path + back.shadow_path[1:]
    back.bases = out.bases + back.bases[1:]
    if back.kind is Outcome.UNBOUNDED and back.ray @ objective <= 1e-9 * np.linalg.norm(objective):
        raise DegeneratePivot("unbounded edges in both orientations, neither improves the objective")
    return back


def full_sweep(P, V: Plane2, start: VertexBasis, max_steps: int | None = None,
               orientation: str = "cw") -> WalkOutcome:
    """Rotate the objective through a full turn starting from ``start``.

    On a bounded polytope in general position this visits every vertex
    whose projection is a vertex of the shadow polygon, and returns to
    ``start`` with kind OPTIMUM.
    """
    if max_steps is None:
        max_steps = config.DEFAULT_MAX_STEPS
    return _run(P, V, start, None, max_steps, orientation)


def optimize_pair(P, V: Plane2, start: VertexBasis, c, max_steps: int | None = None,
                  orientation: str = "cw"):
    """Walk to the maximizer of c, then from there to the maximizer of -c."""
    c = np.asarray(c, dtype=float)
    first = walk(P, V, start, c, max_steps, orientation)
    if first.kind is not Outcome.OPTIMUM:
        return first, None
    second = walk(P, V, first.vertex, -c, max_steps, orientation)
    return first, second


def find_start_vertex(setup, Qp) -> VertexBasis:
    """The vertex where all artificial rows are tight under perturbed rhs."""
    if Qp.n != setup.augmented.n or not np.array_equal(Qp.rows, setup.augmented.rows):
        raise ValueError("perturbed polytope does not match the artificial setup")
    return vertex_from_basis(Qp, setup.artificial_indices)
