"""Discrete sine-Gordon Goursat problems and discrete K-surfaces."""

from ._core import (
    IoError,
    NumericalError,
    ValidationError,
    build_surface,
    check_compatibility,
    fit_slope,
    hirota_rhs,
    lax_U,
    lax_V,
    naive_rhs,
    run_sweep,
    solve,
    su2_project,
    validate,
)

__all__ = [
    "IoError",
    "NumericalError",
    "ValidationError",
    "build_surface",
    "check_compatibility",
    "fit_slope",
    "hirota_rhs",
    "lax_U",
    "lax_V",
    "naive_rhs",
    "run_sweep",
    "solve",
    "su2_project",
    "validate",
]
