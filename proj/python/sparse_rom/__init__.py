"""Sparse polynomial interpolation of parametric flow snapshots."""

from ._core import (
    ConfigError,
    DimensionError,
    DivergenceError,
    DomainError,
    Error,
    GeometryError,
    InvalidInputError,
    InvalidSetError,
    OutOfRangeError,
    SolverError,
    SparseInterpolant,
    StaleCacheError,
    canonical_sequence,
    compare_point_rules,
    equidistant,
    is_downward_closed,
    leja_order,
    leja_sequence,
    point_rule,
    run_study,
    solve_flow,
    symmetrized_leja,
)

__all__ = [name for name in dir() if not name.startswith("_")]
