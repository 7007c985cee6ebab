"""Collocation boundary-element solver for linear and HSBC/MSA surface charge."""

from .analytic import kirkwood_energy
from .mesh import (ChargeSet, MeshFormatError, SurfaceMesh, icosphere, read_charges,
                   read_off, write_charges, write_off)
from .operators import assemble_K, potential_matrix, source_normal_derivative, triangle_rule
from .solver import (BemError, PanelSystem, Solution, apply_K, normal_field,
                     reaction_energy, solve_linear, solve_nonlinear)

__all__ = [
    "ChargeSet", "MeshFormatError", "SurfaceMesh", "icosphere", "read_charges",
    "read_off", "write_charges", "write_off", "assemble_K", "potential_matrix",
    "source_normal_derivative", "triangle_rule", "kirkwood_energy", "BemError",
    "PanelSystem", "Solution", "apply_K", "normal_field", "reaction_energy",
    "solve_linear", "solve_nonlinear",
]
