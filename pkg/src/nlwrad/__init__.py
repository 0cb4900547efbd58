"""Simulator and diagnostics for the radial defocusing semilinear wave
equation u_tt - Laplace(u) = -|u|^{p-1} u in dimension d >= 3, reduced to
one space dimension along characteristics."""

from .core import ModelParams, RadialGrid, make_grid, make_params, radial_integral, sphere_area
from .kernels import COMPILED, KERNEL_NAME
from .solver import FieldState, Trajectory, evolve, init_from_profile, reconstruct_u, step

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "RadialGrid",
    "make_params",
    "make_grid",
    "sphere_area",
    "radial_integral",
    "FieldState",
    "Trajectory",
    "init_from_profile",
    "step",
    "evolve",
    "reconstruct_u",
    "COMPILED",
    "KERNEL_NAME",
]
