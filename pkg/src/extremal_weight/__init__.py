"""Exact construction and verification of an extremal A2 weight on the line."""

__version__ = "0.1.0"

from .checks import VerifyReport, run_checks
from .estimators import ExtremalWeight, HilbertTransform
from .exactfun import PeriodicFn, PiecewiseFn, QuadField, QuadScalar
from .lattice import JPair, TriadicInterval, cover_with_j
from .weightlab import ConstructedWeight, WeightParams, build_weight, derive_params

__all__ = [
    "__version__",
    "VerifyReport",
    "run_checks",
    "ExtremalWeight",
    "HilbertTransform",
    "PeriodicFn",
    "PiecewiseFn",
    "QuadField",
    "QuadScalar",
    "JPair",
    "TriadicInterval",
    "cover_with_j",
    "ConstructedWeight",
    "WeightParams",
    "build_weight",
    "derive_params",
]
