"""Seedable random sources: exponentials, uniform directions, rho-perturbations.

Every stream is a Philox4x64 counter-based generator keyed on
``(seed, stream_id)``, so Monte Carlo trial ``i`` can own stream ``i`` with
no shared state and identical output on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_U64 = (1 << 64) - 1


class RngStream:
    """A single-owner random stream identified by (seed, stream_id)."""

    def __init__(self, seed: int, stream_id: int = 0):
        if not (0 <= seed <= _U64 and 0 <= stream_id <= _U64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._gen = np.random.Generator(np.random.Philox(key=self.seed | (self.stream_id << 64)))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, stream_id: int) -> "RngStream":
        """Fresh stream sharing this seed."""
        return RngStream(self.seed, stream_id)

    def uniform(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def normal(self, size=None):
        return self._gen.standard_normal(size)


def exponential_from_uniform(u, lam: float):
    """Inverse CDF of the exponential law with mean ``lam``."""
    return -lam * np.log1p(-np.asarray(u, dtype=float))


def sample_exponential(rng: RngStream, lam: float, size=None):
    """Exponential draw(s) with expectation ``lam``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    out = exponential_from_uniform(rng.uniform(size), lam)
    return float(out) if size is None else out


def sample_unit_vector(rng: RngStream, d: int) -> np.ndarray:
    """Uniformly random point on the unit sphere S^{d-1}."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    while True:
        g = rng.normal(d)
        n = np.linalg.norm(g)
        if n > 1e-300:
            return g / n


@dataclass(frozen=True)
class RhoPerturbationParams:
    rho: float
    base: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        if not 0 < self.rho < math.pi:
            raise ValueError("rho must lie in (0, pi)")
        if abs(np.linalg.norm(base) - 1) > 1e-12:
            raise ValueError("base must be a unit vector")
        object.__setattr__(self, "base", base)


def truncated_exponential_angle(u, rho: float):
    """Inverse CDF of Exp(mean rho) restricted to [0, pi].

    F(theta) = (1 - exp(-theta/rho)) / (1 - exp(-pi/rho)).
    """
    u = np.asarray(u, dtype=float)
    return -rho * np.log1p(u * np.expm1(-math.pi / rho))


def truncated_exponential_cdf(theta, rho: float):
    return np.expm1(-np.asarray(theta, dtype=float) / rho) / np.expm1(-math.pi / rho)


def truncated_exponential_mean(rho: float) -> float:
    """Closed-form mean of the truncated angle law."""
    a = math.pi / rho
    return rho * (1.0 - a * math.exp(-a) / -math.expm1(-a))


def unit_vector_at_angle(base, theta: float, direction) -> np.ndarray:
    """cos(theta)*base + sin(theta)*w, w = direction made orthogonal to base."""
    base = np.asarray(base, dtype=float)
    w = np.asarray(direction, dtype=float)
    w = w - (w @ base) * base
    w = w - (w @ base) * base
    w /= np.linalg.norm(w)
    v = math.cos(theta) * base + math.sin(theta) * w
    return v / np.linalg.norm(v)


def sample_rho_perturbation(rng: RngStream, params: RhoPerturbationParams) -> np.ndarray:
    """Random unit vector at a truncated-exponential angle from ``params.base``.

    The angle is drawn first, then a direction uniform on the sphere of
    vectors orthogonal to the base.
    """
    theta = float(truncated_exponential_angle(rng.uniform(), params.rho))
    d = params.base.shape[0]
    while True:
        g = rng.normal(d)
        g -= (g @ params.base) * params.base
        if np.linalg.norm(g) > 1e-12:
            break
    return unit_vector_at_angle(params.base, theta, g)
