"""Randomized shadow-vertex simplex with a Monte Carlo bound-verification harness."""

from .certify import (BoundednessCertificate, CertifyFailure, RescaleState, SolverConfig, certify_boundedness,
                      check_maximizer_halfspace, extract_certificate, rescale)
from .geometry_core import Hull2, Plane2, convex_hull_2d, orthonormalize, project, solve_square
from .polytope import Polytope, PerturbedPolytope, add_artificial_constraints, cube, load_polytope, perturb
from .sampling import RngStream
from .shadow_walk import Outcome, VertexBasis, find_start_vertex, full_sweep, optimize_pair, walk

__version__ = "0.1.0"

__all__ = [
    "BoundednessCertificate", "CertifyFailure", "Hull2", "Outcome", "PerturbedPolytope", "Plane2", "Polytope",
    "RescaleState", "RngStream", "SolverConfig", "VertexBasis", "add_artificial_constraints",
    "certify_boundedness", "check_maximizer_halfspace", "convex_hull_2d", "cube", "extract_certificate",
    "find_start_vertex", "full_sweep", "load_polytope", "optimize_pair", "orthonormalize", "perturb",
    "project", "rescale", "solve_square", "walk",
]
