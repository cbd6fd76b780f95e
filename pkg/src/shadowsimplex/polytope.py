"""Constraint systems ``A x <= b`` with ``b > 0``, their perturbations and polars."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .errors import InvariantError, ParseError, UnboundedInput
from .geometry_core import solve_square
from .sampling import RhoPerturbationParams, RngStream, sample_exponential, sample_rho_perturbation


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Polytope:
    """P = {x : rows @ x <= rhs}."""

    rows: np.ndarray
    rhs: np.ndarray
    name: str | None = None

    def __post_init__(self):
        rows = _frozen(self.rows)
        rhs = _frozen(self.rhs)
        if rows.ndim != 2 or rhs.ndim != 1 or rows.shape[0] != rhs.shape[0]:
            raise InvariantError(f"shape mismatch: rows {rows.shape}, rhs {rhs.shape}")
        n, d = rows.shape
        if d < 2:
            raise InvariantError("ambient dimension must be at least 2")
        if n < d:
            raise InvariantError(f"need n >= d constraints, got n={n}, d={d}")
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(rhs))):
            raise InvariantError("non-finite constraint data")
        if np.any(rhs <= 0):
            bad = int(np.flatnonzero(rhs <= 0)[0])
            raise InvariantError(f"right-hand side b[{bad}] = {rhs[bad]} is not positive")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms <= 1e-12):
            raise InvariantError(f"zero constraint row {int(np.argmin(norms))}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "rhs", rhs)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def contains(self, x, tol: float = config.FEAS_TOL) -> bool:
        return bool(np.all(self.rows @ np.asarray(x, dtype=float) <= self.rhs + tol))

    def normalized(self) -> "Polytope":
        """Same set written as {x : (a_i / b_i) x <= 1}."""
        return Polytope(self.rows / self.rhs[:, None], np.ones(self.n), self.name)

    def to_document(self) -> dict:
        doc = {"d": self.d, "n": self.n, "A": self.rows.tolist(), "b": self.rhs.tolist()}
        if self.name is not None:
            doc["name"] = self.name
        return doc


@dataclass(frozen=True)
class PerturbedPolytope:
    """Q = {x : a_i x <= b_i + r_i} with r_i drawn i.i.d. Exp(mean lam)."""

    base: Polytope
    r: np.ndarray
    lam: float

    def __post_init__(self):
        r = _frozen(self.r)
        if r.shape != (self.base.n,):
            raise InvariantError("perturbation vector has wrong length")
        if np.any(r < 0):
            raise InvariantError("perturbations must be non-negative")
        object.__setattr__(self, "r", r)

    @property
    def rows(self) -> np.ndarray:
        return self.base.rows

    @property
    def rhs(self) -> np.ndarray:
        return self.base.rhs + self.r

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def d(self) -> int:
        return self.base.d

    def contains(self, x, tol: float = config.FEAS_TOL) -> bool:
        return bool(np.all(self.rows @ np.asarray(x, dtype=float) <= self.rhs + tol))

    def as_polytope(self) -> Polytope:
        return Polytope(self.rows, self.rhs, self.base.name)


_DOC_FIELDS = {"d", "n", "A", "b", "name"}


def polytope_from_document(doc) -> Polytope:
    if not isinstance(doc, dict):
        raise ParseError("polytope document must be a JSON object")
    unknown = set(doc) - _DOC_FIELDS
    if unknown:
        raise ParseError(f"unknown field(s): {sorted(unknown)}")
    missing = {"d", "n", "A", "b"} - set(doc)
    if missing:
        raise ParseError(f"missing field(s): {sorted(missing)}")
    d, n = doc["d"], doc["n"]
    if not (isinstance(d, int) and isinstance(n, int)) or isinstance(d, bool) or isinstance(n, bool):
        raise ParseError("d and n must be integers")
    try:
        A = np.array(doc["A"], dtype=float)
        b = np.array(doc["b"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"A and b must be numeric: {exc}") from None
    if b.shape != (n,):
        raise ParseError(f"b must hold n={n} numbers, got shape {b.shape}")
    if n == 0:
        A = A.reshape(0, d)
    if A.shape != (n, d):
        raise ParseError(f"A must be {n} x {d}, got shape {A.shape}")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string")
    return Polytope(A, b, name)


def load_polytope(source) -> Polytope:
    """Load a polytope document from a path or from JSON text."""
    if isinstance(source, os.PathLike) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from None
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    return polytope_from_document(doc)


def cube(d: int, half_width: float = 1.0) -> Polytope:
    """{x : |x_i| <= half_width}."""
    eye = np.eye(d)
    return Polytope(np.vstack([eye, -eye]), np.full(2 * d, float(half_width)), f"cube{d}")


def box(half_widths) -> Polytope:
    h = np.asarray(half_widths, dtype=float)
    eye = np.eye(len(h))
    return Polytope(np.vstack([eye, -eye]), np.concatenate([h, h]), "box")


def perturb(P: Polytope, lam: float, rng: RngStream) -> PerturbedPolytope:
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return PerturbedPolytope(P, sample_exponential(rng, lam, P.n), float(lam))


def max_perturbation(Q: PerturbedPolytope) -> float:
    return float(np.max(Q.r)) if Q.n else 0.0


def polar_points(P) -> np.ndarray:
    """The points a_i / b_i whose convex hull is the polar P*."""
    return P.rows / P.rhs[:, None]


@dataclass(frozen=True)
class RoundnessReport:
    inner_ok: bool
    outer_radius: float
    is_k_round: bool
    k: float


def roundness(P, k: float, vertex_oracle=None) -> RoundnessReport:
    """Check B(0,1) <= P <= B(0,k).

    ``vertex_oracle(P) -> (vertices, rays)``; defaults to brute-force
    enumeration.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if vertex_oracle is None:
        from .oracle import enumerate_vertices as vertex_oracle
    vertices, rays = vertex_oracle(P)
    if len(rays):
        raise UnboundedInput("polytope has a recession direction")
    inner_ok = bool(np.all(P.rhs / np.linalg.norm(P.rows, axis=1) >= 1 - 1e-12))
    outer = max(float(np.linalg.norm(v.point)) for v in vertices)
    return RoundnessReport(inner_ok, outer, inner_ok and outer <= k, float(k))


def artificial_rows(d: int, logk: float) -> np.ndarray:
    """Rows 3 w_i / (4 |w_i|) with w_i = -sum_j e_j + 2 sqrt(2d) e_i / logk^2."""
    w = -np.ones((d, d)) + (2.0 * math.sqrt(2.0 * d) / logk**2) * np.eye(d)
    return 0.75 * w / np.linalg.norm(w, axis=1)[:, None]


def artificial_vertex(d: int, logk: float) -> np.ndarray:
    """The point where every artificial row is tight with right-hand side 1."""
    return solve_square(artificial_rows(d, logk), np.ones(d))


def default_rho(d: int, n: int) -> float:
    """(3 sqrt 2 / 16) * ln n / (sqrt(d) n)."""
    return (3.0 * math.sqrt(2.0) / 16.0) * math.log(n) / (math.sqrt(d) * n)


@dataclass(frozen=True)
class ArtificialSetup:
    """P plus d artificial rows whose common vertex x0 seeds the walk.

    The artificial rows are the last ``d`` rows of ``augmented``.
    """

    augmented: Polytope
    x0: np.ndarray
    c: np.ndarray
    logk: float
    rho: float
    original_n: int = field(default=0)

    @property
    def artificial_indices(self) -> tuple:
        return tuple(range(self.original_n, self.augmented.n))


def add_artificial_constraints(P: Polytope, logk: float, rho: float, rng: RngStream) -> ArtificialSetup:
    """Append the d artificial rows to P and draw the objective c.

    c is a rho-perturbation of the unit vector (1, ..., 1)/sqrt(d).
    """
    d = P.d
    if not logk > 1:
        raise ValueError("logk must exceed 1")
    if not 0 < rho < 1 / math.sqrt(d):
        raise ValueError(f"rho must lie in (0, 1/sqrt(d)) = (0, {1 / math.sqrt(d):.4g})")
    W = artificial_rows(d, logk)
    # eigenvalues of the row matrix are proportional to gamma and gamma - d,
    # so logk^2 = 2 sqrt(2/d) gives a singular system (e.g. d=2, logk=sqrt 2)
    x0 = solve_square(W, np.ones(d))
    augmented = Polytope(np.vstack([P.rows, W]), np.concatenate([P.rhs, np.ones(d)]), P.name)
    base = np.full(d, 1.0 / math.sqrt(d))
    c = sample_rho_perturbation(rng, RhoPerturbationParams(rho, base))
    return ArtificialSetup(augmented, _frozen(x0), _frozen(c), float(logk), float(rho), P.n)
