"""Brute-force ground truth for small instances.

Everything here enumerates all bases, so it is only usable at desk scale
(d <= 7, n <= 32). It is deliberately independent of the shadow walk.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import BudgetExceeded
from .geometry_core import Hull2, Plane2, convex_hull_2d, project

MAX_D = 7
MAX_N = 32
_CHUNK = 20_000


@dataclass(frozen=True)
class Vertex:
    """A geometric vertex together with every basis that produces it."""

    point: np.ndarray
    bases: tuple
    active: frozenset

    @property
    def tight(self) -> tuple:
        return self.bases[0]


@dataclass
class EdgeRecord:
    I: tuple
    endpoints: tuple
    vertex_ids: tuple
    delta: float
    on_shadow: bool | None = None
    shadow_length: float | None = None
    cos_theta: float | None = None

    @property
    def direction(self) -> np.ndarray:
        diff = self.endpoints[1] - self.endpoints[0]
        return diff / np.linalg.norm(diff)


def _guard(P):
    if P.d > MAX_D or P.n > MAX_N:
        raise BudgetExceeded(f"brute force limited to d <= {MAX_D}, n <= {MAX_N}; got d={P.d}, n={P.n}")


def _combos(n, k):
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp).reshape(len(block), k)


def _basic_solutions(rows, rhs):
    """All feasible basic solutions as (points, bases)."""
    n, d = rows.shape
    scale = np.linalg.norm(rows, axis=1)
    pts, bases = [], []
    tol = config.FEAS_TOL * (1.0 + np.abs(rhs))
    for idx in _combos(n, d):
        M = rows[idx]
        det = np.abs(np.linalg.det(M)) / np.prod(scale[idx], axis=1)
        ok = det > config.PIVOT_TOL
        if not np.any(ok):
            continue
        idx = idx[ok]
        x = np.linalg.solve(rows[idx], rhs[idx][..., None])[..., 0]
        feas = np.all(x @ rows.T <= rhs + tol, axis=1)
        pts.append(x[feas])
        bases.append(idx[feas])
    if not pts:
        return np.empty((0, d)), np.empty((0, d), dtype=np.intp)
    return np.concatenate(pts), np.concatenate(bases)


def _extreme_rays(rows):
    n, d = rows.shape
    if np.linalg.matrix_rank(rows) < d:
        # lineality space: any null vector and its negative are recession rays
        null = np.linalg.svd(rows)[2][-1]
        return [null, -null]
    scale = np.abs(rows).max()
    rays = []
    for idx in _combos(n, d - 1):
        _, s, vh = np.linalg.svd(rows[idx])
        ok = s[:, -1] / np.maximum(s[:, 0], 1e-300) > 1e-9
        cand = vh[ok, -1, :]
        cand = np.concatenate([cand, -cand])
        feasible = np.all(cand @ rows.T <= 1e-9 * scale, axis=1)
        for r in cand[feasible]:
            r = r / np.linalg.norm(r)
            if not any(np.linalg.norm(r - q) < 1e-7 for q in rays):
                rays.append(r)
    return rays


def enumerate_vertices(P):
    """Vertices and extreme recession rays of {x : P.rows x <= P.rhs}.

    Coincident basic solutions (degenerate vertices) are merged into one
    Vertex that keeps every basis.
    """
    _guard(P)
    rows = np.asarray(P.rows, dtype=float)
    rhs = np.asarray(P.rhs, dtype=float)
    pts, bases = _basic_solutions(rows, rhs)
    groups: list[list[int]] = []
    reps = np.empty((0, rows.shape[1]))
    for i, p in enumerate(pts):
        if len(reps):
            dist = np.linalg.norm(reps - p, axis=1)
            j = int(np.argmin(dist))
            if dist[j] < config.DEDUP_TOL:
                groups[j].append(i)
                continue
        groups.append([i])
        reps = np.vstack([reps, p])
    vertices = []
    for g in groups:
        point = pts[g].mean(axis=0)
        slack = rhs - rows @ point
        active = frozenset(np.flatnonzero(np.abs(slack) <= config.FEAS_TOL * (1 + np.abs(rhs))).tolist())
        basis_list = tuple(sorted({tuple(sorted(int(k) for k in bases[i])) for i in g}))
        point.setflags(write=False)
        vertices.append(Vertex(point, basis_list, active))
    vertices.sort(key=lambda v: v.bases[0])
    return vertices, _extreme_rays(rows)


def enumerate_edges(P, vertices=None):
    """Bounded edges: vertex pairs whose common active rows have rank d - 1."""
    if vertices is None:
        vertices, _ = enumerate_vertices(P)
    rows = np.asarray(P.rows, dtype=float)
    d = rows.shape[1]
    edges = []
    for i, j in itertools.combinations(range(len(vertices)), 2):
        shared = sorted(vertices[i].active & vertices[j].active)
        if len(shared) < d - 1 or np.linalg.matrix_rank(rows[shared]) < d - 1:
            continue
        a, b = vertices[i].point, vertices[j].point
        edges.append(EdgeRecord(tuple(shared), (a, b), (i, j), float(np.linalg.norm(b - a))))
    return edges


def shadow_hull(P, V: Plane2, vertices=None):
    """Hull of the projected vertices; hull.indices refer to ``vertices``."""
    if vertices is None:
        vertices, _ = enumerate_vertices(P)
    pts = project(np.array([v.point for v in vertices]), V)
    return convex_hull_2d(pts), vertices


def shadow_stats(P, V: Plane2, vertices=None, edges=None) -> tuple[Hull2, list[EdgeRecord]]:
    """Project P onto V and annotate every edge with its shadow statistics."""
    if vertices is None:
        vertices, _ = enumerate_vertices(P)
    if edges is None:
        edges = enumerate_edges(P, vertices)
    hull, _ = shadow_hull(P, V, vertices)
    h = list(hull.indices)
    if len(h) == 2:
        consecutive = {frozenset(h)}
    elif len(h) >= 3:
        consecutive = {frozenset((h[k], h[(k + 1) % len(h)])) for k in range(len(h))}
    else:
        consecutive = set()
    B = V.basis
    for e in edges:
        q = e.direction
        e.cos_theta = float(min(1.0, np.linalg.norm(B @ q)))
        e.on_shadow = frozenset(e.vertex_ids) in consecutive
        diff = B @ (e.endpoints[1] - e.endpoints[0])
        e.shadow_length = float(np.linalg.norm(diff))
    return hull, edges


@dataclass(frozen=True)
class BoundednessDecision:
    bounded: bool
    ray: np.ndarray | None
    vertices: list


def decide_bounded(P) -> BoundednessDecision:
    vertices, rays = enumerate_vertices(P)
    if rays:
        return BoundednessDecision(False, rays[0], vertices)
    return BoundednessDecision(True, None, vertices)


def argmax_vertices(vertices, objective, tol: float = 1e-9) -> list[int]:
    """Indices of every vertex attaining the maximum of objective . x."""
    vals = np.array([v.point @ objective for v in vertices])
    best = vals.max()
    return [int(i) for i in np.flatnonzero(vals >= best - tol * (1 + abs(best)))]
