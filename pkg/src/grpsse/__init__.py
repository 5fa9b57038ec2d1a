"""GRP and Godunov finite-volume solvers for spherically symmetric
general-relativistic hydrodynamics coupled to the Einstein equations."""

from ._backend import BACKEND
from .eos import BarotropicEos
from .errors import (DomainError, GrpError, HorizonError, RiemannError, SolverError,
                     UnphysicalStateError)
from .problems import PROBLEMS, ProblemSpec, get_problem
from .scheme import Grid, SolverState, run, solution_errors
from .state import ConservativeState, PrimitiveState

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BarotropicEos", "ConservativeState", "DomainError", "Grid", "GrpError",
    "HorizonError", "PROBLEMS", "PrimitiveState", "ProblemSpec", "RiemannError",
    "SolverError", "SolverState", "UnphysicalStateError", "get_problem", "run",
    "solution_errors",
]
