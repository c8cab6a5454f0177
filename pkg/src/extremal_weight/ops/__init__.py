"""Maximal operators, the Hilbert transform and weight diagnostics."""

from .diagnostics import DiagnosticsReport, a1_a2_diagnostics, default_scale_floor, fine_scale_ratio_cap
from .hilbert import (
    HilbertEvaluator,
    HilbertSymbolic,
    HilbertValue,
    digits_to_bits,
    hilbert_at,
    hilbert_float,
    hilbert_symbolic,
)
from .maximal import (
    MaximalMajorant,
    PeriodicMajorant,
    finest_grid_scale,
    lattice_maximal_at,
    maximal_at,
    maximal_majorant,
    maximal_periodic,
    triadic_maximal,
)

__all__ = [
    "DiagnosticsReport",
    "a1_a2_diagnostics",
    "default_scale_floor",
    "fine_scale_ratio_cap",
    "HilbertEvaluator",
    "HilbertSymbolic",
    "HilbertValue",
    "digits_to_bits",
    "hilbert_at",
    "hilbert_float",
    "hilbert_symbolic",
    "MaximalMajorant",
    "PeriodicMajorant",
    "finest_grid_scale",
    "lattice_maximal_at",
    "maximal_at",
    "maximal_majorant",
    "maximal_periodic",
    "triadic_maximal",
]
