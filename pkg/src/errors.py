# -*- coding: utf-8 -*-
"""
Error types for the toric stability toolkit.

Everything derives from ValueError so callers that already guard numeric
input with ``except ValueError`` keep working.
"""
from typing import Optional, Sequence


class ToricError(ValueError):
    """Base class for all library errors."""


class PolytopeError(ToricError):
    """Malformed, unbounded, empty or redundant polytope data."""


class WeightError(ToricError):
    """Weight system cannot be built (positivity, conditioning, normalization)."""


class SolverError(ToricError):
    """A solver was called outside its domain."""


class StencilError(ToricError):
    """A finite-difference stencil leaves the polytope."""


class NonConvexError(ToricError):
    """Hessian of a potential is not positive definite at a probe."""

    def __init__(self, point: Sequence[float], min_eigenvalue: float):
        self.point = tuple(float(t) for t in point)
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"Hess u is not positive definite at {self.point} "
            f"(smallest eigenvalue {self.min_eigenvalue:.3e})"
        )


class ConfigError(ToricError):
    """Invalid run configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field: str, message: str, value: Optional[object] = None):
        self.field = field
        self.value = value
        super().__init__(f"{field}: {message}")
