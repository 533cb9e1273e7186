"""Python bindings for the confkit C++ core."""

from ._confkit import (
    ConfkitError,
    build_staircase,
    demo_liouville,
    eccentricity,
    frobenius_residual,
    growth_profile,
    h_condition,
    holonomy,
    lift_path,
    list_maps,
    modulus_annulus,
    modulus_lifted,
    modulus_rectangle,
    parabolicity,
    qc_profile,
    run_cli,
)

__all__ = [
    "ConfkitError",
    "build_staircase",
    "demo_liouville",
    "eccentricity",
    "frobenius_residual",
    "growth_profile",
    "h_condition",
    "holonomy",
    "lift_path",
    "list_maps",
    "modulus_annulus",
    "modulus_lifted",
    "modulus_rectangle",
    "parabolicity",
    "qc_profile",
    "run_cli",
]
