"""Python bindings for the nehari-sp solver core."""

from ._core import (
    Box,
    NehariSpError,
    bubble_estimates,
    builtin_config,
    ground_energy,
    nehari_project,
    radial_ground_state,
    read_field,
    sobolev_constant,
    write_field,
)

__all__ = [
    "Box",
    "NehariSpError",
    "bubble_estimates",
    "builtin_config",
    "ground_energy",
    "nehari_project",
    "radial_ground_state",
    "read_field",
    "sobolev_constant",
    "write_field",
]
