"""Homogenised surface energies and boundary-value problems for rugose nematic slabs."""

__version__ = "0.1.0"

from .analytic import LimitSolution, eval_limit, residual_check, solve_limit
from .errors import NumericalError, RugosityError, ValidationError
from .fem import RobinProblem, solve_cg, solve_on_mesh, solve_rugose
from .geometry import SlabDomain, build_mesh
from .homogenize import (homogenize_energy, homogenize_polynomial, ldg_effective,
                         oseen_frank_effective, slab_effective)
from .profile import PeriodicProfile, cos_bump, flat, validate
from .quadrature import QuadratureRule
from .study import SweepConfig, fit_rate, run_sweep, weak_conv_check
from .tensors import QTensor2, QTensor3

__all__ = [
    "LimitSolution", "NumericalError", "PeriodicProfile", "QTensor2", "QTensor3",
    "QuadratureRule", "RobinProblem", "RugosityError", "SlabDomain", "SweepConfig",
    "ValidationError", "build_mesh", "cos_bump", "eval_limit", "fit_rate", "flat",
    "homogenize_energy", "homogenize_polynomial", "ldg_effective", "oseen_frank_effective",
    "residual_check", "run_sweep", "slab_effective", "solve_cg", "solve_limit",
    "solve_on_mesh", "solve_rugose", "validate", "weak_conv_check",
]
