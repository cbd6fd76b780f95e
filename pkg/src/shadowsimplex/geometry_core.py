"""Small dense linear algebra, plane projection and planar convex hulls."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import DegenerateSpan, SingularSystem


@dataclass(frozen=True)
class Plane2:
    """Orthonormal basis (e1, e2) of a 2-D subspace of R^d."""

    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        e1 = np.asarray(self.e1, dtype=float)
        e2 = np.asarray(self.e2, dtype=float)
        if e1.shape != e2.shape or e1.ndim != 1:
            raise ValueError("plane basis vectors must be 1-D of equal length")
        if abs(np.linalg.norm(e1) - 1) > config.UNIT_TOL * 10 or abs(np.linalg.norm(e2) - 1) > config.UNIT_TOL * 10:
            raise ValueError("plane basis vectors must be unit length")
        if abs(e1 @ e2) > config.UNIT_TOL * 10:
            raise ValueError("plane basis vectors must be orthogonal")
        e1.setflags(write=False)
        e2.setflags(write=False)
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @property
    def dim(self) -> int:
        return self.e1.shape[0]

    @property
    def basis(self) -> np.ndarray:
        """2 x d matrix whose rows are e1 and e2."""
        return np.vstack([self.e1, self.e2])

    def contains(self, v, tol: float = 1e-9) -> bool:
        """True when v lies in the plane up to ``tol`` relative to its norm."""
        v = np.asarray(v, dtype=float)
        residual = v - (v @ self.e1) * self.e1 - (v @ self.e2) * self.e2
        return bool(np.linalg.norm(residual) <= tol * max(1.0, np.linalg.norm(v)))


def orthonormalize(a, b) -> Plane2:
    """Gram-Schmidt on (a, b).

    Raises DegenerateSpan when the angle between a and b is below
    ``config.SPAN_ANGLE_TOL``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DegenerateSpan("zero vector cannot span a plane")
    e1 = a / na
    r = b - (b @ e1) * e1
    # two passes keep the result orthogonal to machine precision
    r = r - (r @ e1) * e1
    nr = np.linalg.norm(r)
    if nr / nb < np.sin(config.SPAN_ANGLE_TOL):
        raise DegenerateSpan("vectors are (nearly) parallel")
    return Plane2(e1, r / nr)


def project(p, plane: Plane2) -> np.ndarray:
    """Coordinates of p (or of each row of p) in the plane basis."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != plane.dim:
        raise ValueError(f"dimension mismatch: {p.shape[-1]} vs plane in R^{plane.dim}")
    return p @ plane.basis.T


def solve_square(M, rhs) -> np.ndarray:
    """Solve Mx = rhs by Gaussian elimination with partial pivoting.

    Raises SingularSystem when a pivot falls below ``config.PIVOT_TOL``.
    """
    A = np.array(M, dtype=float)
    x = np.array(rhs, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or x.shape != (n,):
        raise ValueError("solve_square needs an n x n matrix and length-n rhs")
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[piv, col]) < config.PIVOT_TOL:
            raise SingularSystem(f"pivot {abs(A[piv, col]):.3e} in column {col}")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            x[[col, piv]] = x[[piv, col]]
        f = A[col + 1:, col] / A[col, col]
        A[col + 1:, col:] -= np.outer(f, A[col, col:])
        x[col + 1:] -= f * x[col]
    for row in range(n - 1, -1, -1):
        x[row] = (x[row] - A[row, row + 1:] @ x[row + 1:]) / A[row, row]
    return x


@dataclass(frozen=True)
class Hull2:
    """Counterclockwise convex hull of a planar point set.

    ``indices`` maps each hull vertex back to its position in the input.
    A hull of one distinct point has edge_count 0; of collinear points,
    edge_count 1 and perimeter twice the segment length (the flattened
    polygon traversed both ways).
    """

    ordered_vertices: np.ndarray
    indices: tuple
    edge_count: int
    perimeter: float

    def __len__(self):
        return len(self.indices)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points, tol: float = config.COLLINEAR_TOL) -> Hull2:
    """Andrew's monotone chain.

    Points within ``tol`` of the line through their hull neighbours are
    treated as collinear and dropped.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite point in hull input")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    # drop exact and near duplicates after sorting
    uniq = [int(order[0])]
    for i in order[1:]:
        if np.linalg.norm(pts[i] - pts[uniq[-1]]) > tol:
            uniq.append(int(i))
    if len(uniq) == 1:
        return Hull2(pts[uniq].copy(), tuple(uniq), 0, 0.0)

    def chain(seq):
        out = []
        for i in seq:
            p = pts[i]
            while len(out) >= 2:
                o, a = pts[out[-2]], pts[out[-1]]
                base = np.hypot(p[0] - o[0], p[1] - o[1])
                if _cross(o, a, p) <= tol * base:
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(uniq[::-1])
    idx = lower[:-1] + upper[:-1]
    verts = pts[idx]
    if len(idx) == 2:
        length = float(np.linalg.norm(verts[1] - verts[0]))
        return Hull2(verts, tuple(idx), 1, 2.0 * length)
    edges = np.roll(verts, -1, axis=0) - verts
    perim = float(np.sum(np.hypot(edges[:, 0], edges[:, 1])))
    return Hull2(verts, tuple(idx), len(idx), perim)


def point_segment_distance(p, a, b) -> float:
    """Euclidean distance from p to segment [a, b] (any dimension)."""
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    ab = b - a
    denom = ab @ ab
    if denom == 0:
        return float(np.linalg.norm(p - a))
    t = np.clip((p - a) @ ab / denom, 0.0, 1.0)
    return float(np.linalg.norm(p - a - t * ab))


def distance_to_hull_boundary(p, hull: Hull2) -> float:
    verts = hull.ordered_vertices
    if len(verts) == 1:
        return float(np.linalg.norm(np.asarray(p) - verts[0]))
    return min(
        point_segment_distance(p, verts[i], verts[(i + 1) % len(verts)])
        for i in range(len(verts))
    )
