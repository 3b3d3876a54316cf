"""Exact scattering diagrams, consistent completion and theta functions.

Submodules:

- ``lattice``: integer vectors, lattice maps, rational polyhedral cones
- ``series``: truncated power series over a free monoid with Laurent lattice part
- ``diagram``: walls, wall-crossing automorphisms, consistency and equivalence
- ``completion``: tropical hypersurfaces, widgets, order-by-order completion
- ``cluster``: seeds, initial diagrams, the quotient map ``psi``, slices
- ``theta``: broken lines, theta functions and structure constants
- ``cli``: the ``scatter`` command line tool
"""

__version__ = "0.1.0"

from .errors import (AssumptionError, CompletionError, DimensionError, DomainError,
                     GenericityError, InvalidWallError, NonTransversalPathError,
                     NotInvertibleError, PreconditionError, PsiConditionError, ScatterError)
from .lattice import LatticeMap, RationalCone, SkewForm
from .series import MonoidContext, TruncatedSeries
from .diagram import (Automorphism, ScatteringDiagram, Wall, WallCrossing, equivalent,
                      is_consistent, normalize, path_ordered_product)
from .completion import TropicalHypersurface, check_balancing, complete, widget
from .cluster import (PrincipalSeed, Seed, check_assumptions, fiber_diagram, initial_diagram,
                      psi, quotient_diagram, slice_to_x)
from .theta import (BrokenLine, ThetaAlgebra, ThetaExpansion, broken_lines,
                    cprin_theta_shift_check, multiply, theta, trace)

__all__ = [
    "AssumptionError", "CompletionError", "DimensionError", "DomainError", "GenericityError",
    "InvalidWallError", "NonTransversalPathError", "NotInvertibleError", "PreconditionError",
    "PsiConditionError", "ScatterError",
    "LatticeMap", "RationalCone", "SkewForm", "MonoidContext", "TruncatedSeries",
    "Automorphism", "ScatteringDiagram", "Wall", "WallCrossing", "equivalent", "is_consistent",
    "normalize", "path_ordered_product",
    "TropicalHypersurface", "check_balancing", "complete", "widget",
    "PrincipalSeed", "Seed", "check_assumptions", "fiber_diagram", "initial_diagram", "psi",
    "quotient_diagram", "slice_to_x",
    "BrokenLine", "ThetaAlgebra", "ThetaExpansion", "broken_lines", "cprin_theta_shift_check",
    "multiply", "theta", "trace",
]
