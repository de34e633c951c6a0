"""Spectral computations for Robin Laplacians on sharp infinite cones.

The package discretizes the relevant quadratic forms in stretched
coordinates, solves the resulting sparse symmetric pencils, and checks the
computed spectra against built-in analytic references: the collapsing-cone
eigenvalue law, the exact round-cone ground state, interval Robin roots and
the effective 1D spectrum.
"""

from .geometry import (CrossSection, CrossSectionSpec, BoundaryFacet,
                       make_cross_section, boundary_quadrature)
from .assembly import (Assembly, ConeMode, Mesh1D, build_mesh_1d, graded_mesh,
                       extend_mesh, refine_mesh, assemble_cross_section_robin,
                       assemble_effective, assemble_cone, assemble_trace_problem)
from .eigensolve import SolveOptions, Spectrum, SolverError, solve, certify
from . import oracles

__version__ = "0.1.0"

__all__ = [
    "CrossSection", "CrossSectionSpec", "BoundaryFacet",
    "make_cross_section", "boundary_quadrature",
    "Assembly", "ConeMode", "Mesh1D", "build_mesh_1d", "graded_mesh",
    "extend_mesh", "refine_mesh", "assemble_cross_section_robin",
    "assemble_effective", "assemble_cone", "assemble_trace_problem",
    "SolveOptions", "Spectrum", "SolverError", "solve", "certify",
    "oracles",
    "__version__",
]
