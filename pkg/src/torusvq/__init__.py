"""Optimal soft vector quantizers for circular and toroidal input manifolds."""

from .codec import (
    DomainError,
    Manifold,
    Piece,
    PosteriorProfile,
    ProblemSpec,
    ReferenceLayout,
    Regime,
    build_profile,
    posterior_all,
    posterior_eval,
    reference_vector,
)
from .solver import (
    Solution,
    SolverError,
    objective_closed_form,
    optimal_r,
    residual_s,
    solve,
    solve_s,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Manifold",
    "Piece",
    "PosteriorProfile",
    "ProblemSpec",
    "ReferenceLayout",
    "Regime",
    "Solution",
    "SolverError",
    "build_profile",
    "objective_closed_form",
    "optimal_r",
    "posterior_all",
    "posterior_eval",
    "reference_vector",
    "residual_s",
    "solve",
    "solve_s",
]
