"""capabench: capacities, Dirichlet eigenvalues and isoperimetric checks on
regular grids, plus 1-D measure-criteria machinery and a config-driven CLI.
"""

from ._kernels import BACKEND as kernel_backend
from .grid import (
    Annulus,
    Ball,
    Box,
    CustomMask,
    DomainGrid,
    NodeSet,
    ScalarField,
    build_domain,
    gradient_energy,
    perimeter,
    volume,
)
from .capacity import (
    CapacityResult,
    Condenser,
    condenser_capacity,
    harmonic_capacity,
    p_capacity,
    spherical_condenser_exact,
)
from .spectral import EigenResult, fundamental_eigenvalue, rayleigh_quotient

__version__ = "0.1.0"

__all__ = [
    "Annulus", "Ball", "Box", "CustomMask", "DomainGrid", "NodeSet",
    "ScalarField", "build_domain", "gradient_energy", "perimeter", "volume",
    "CapacityResult", "Condenser", "condenser_capacity", "harmonic_capacity",
    "p_capacity", "spherical_condenser_exact", "EigenResult",
    "fundamental_eigenvalue", "rayleigh_quotient", "kernel_backend",
    "__version__",
]
