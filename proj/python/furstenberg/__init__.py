"""Finite-resolution Furstenberg set constructions, covering counts and
lower-bound certificates."""

from ._core import (
    Error,
    build_box,
    cantor_points,
    cli,
    covering_count,
    dyadic_schedule,
    estimate_dimension,
    grid_count,
    mesh_cover_count,
    metric_d1,
    pigeonhole_bound,
    run_packing,
    thresholds,
)

__all__ = [
    "Error",
    "build_box",
    "cantor_points",
    "cli",
    "covering_count",
    "dyadic_schedule",
    "estimate_dimension",
    "grid_count",
    "mesh_cover_count",
    "metric_d1",
    "pigeonhole_bound",
    "run_packing",
    "thresholds",
]
