"""Constrained rational minimax fitting and rational matrix functions."""

from ._ratmin import (
    Approximant,
    BoundSpec,
    FitResult,
    NumericalError,
    apply,
    apply_vec,
    builtin,
    builtin_domain,
    builtin_ids,
    cheb_eval,
    cheb_expand,
    cheb_nodes,
    cond_check,
    fit,
    fit_samples,
    normal_matrix,
)

__all__ = [
    "Approximant",
    "BoundSpec",
    "FitResult",
    "NumericalError",
    "apply",
    "apply_vec",
    "builtin",
    "builtin_domain",
    "builtin_ids",
    "cheb_eval",
    "cheb_expand",
    "cheb_nodes",
    "cond_check",
    "fit",
    "fit_samples",
    "normal_matrix",
]
