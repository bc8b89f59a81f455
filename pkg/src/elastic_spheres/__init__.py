"""Static, spherically symmetric, self-gravitating elastic bodies in Newtonian gravity (G = 1)."""

__version__ = "0.1.0"

from .bodies import (
    Body,
    Core,
    MatterDistribution,
    ShellRequest,
    add_shell,
    assemble,
    build_ball,
    build_inner_shell,
    r_max_scan,
    r_min,
    verify_distribution,
)
from .calibration import KS_from_shell, K_from_central, K_from_surface, Observables
from .equilibrium import Controls, EquilibriumState, SolutionProfile, Termination, integrate
from .errors import ElasticSpheresError, ExistenceError, MaterialError, NumericalError
from .materials import Family, LameCoefficients, MaterialSpec, validate_material
from .seth import analyse, fixed_points, self_similar

__all__ = [
    "Body",
    "Controls",
    "Core",
    "ElasticSpheresError",
    "EquilibriumState",
    "ExistenceError",
    "Family",
    "KS_from_shell",
    "K_from_central",
    "K_from_surface",
    "LameCoefficients",
    "MaterialError",
    "MaterialSpec",
    "MatterDistribution",
    "NumericalError",
    "Observables",
    "ShellRequest",
    "SolutionProfile",
    "Termination",
    "add_shell",
    "analyse",
    "assemble",
    "build_ball",
    "build_inner_shell",
    "fixed_points",
    "integrate",
    "r_max_scan",
    "r_min",
    "self_similar",
    "validate_material",
    "verify_distribution",
]
