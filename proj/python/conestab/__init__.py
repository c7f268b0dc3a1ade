"""Stability certificates for conic constraint systems."""

from ._core import (  # noqa: F401
    Cone,
    DimensionError,
    InputError,
    PreconditionError,
    Tol,
    analyze_json,
    contains,
    example1_strict_complementarity,
    example41_isolated_calm,
    fd_proj_deriv,
    proj_dir_deriv,
    project,
    repro,
    repro_names,
    smat,
    svec,
)

__all__ = [
    "Cone",
    "DimensionError",
    "InputError",
    "PreconditionError",
    "Tol",
    "analyze_json",
    "contains",
    "example1_strict_complementarity",
    "example41_isolated_calm",
    "fd_proj_deriv",
    "proj_dir_deriv",
    "project",
    "repro",
    "repro_names",
    "smat",
    "svec",
]
