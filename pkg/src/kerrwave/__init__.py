"""Energy-passive space-time Galerkin schemes for 1D Maxwell equations in Kerr media.

Two formulations are provided: the field form in ``(e, h)`` with a
discontinuous Galerkin time discretization (:mod:`kerrwave.solver_eh`) and the
vector-potential form in ``(e, a)`` with a continuous Petrov-Galerkin time
discretization (:mod:`kerrwave.solver_ea`).
"""

from .config import RunConfig
from .diagnostics import (
    ConvergenceTable,
    EnergyReport,
    energy_audit,
    energy_ea,
    energy_eh,
    eoc_study,
    run_trajectory,
    self_convergence_error,
)
from .errors import ConfigError, KerrwaveError, SingularMassError, SolverDivergedError
from .fem import FeSpace1D, Mesh1D
from .material import KerrMaterial
from .solver_ea import run_ea, step_ea
from .solver_eh import run_eh, step_eh
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceTable",
    "EnergyReport",
    "FeSpace1D",
    "KerrMaterial",
    "KerrwaveError",
    "Mesh1D",
    "RunConfig",
    "SingularMassError",
    "SolverDivergedError",
    "Trajectory",
    "energy_audit",
    "energy_ea",
    "energy_eh",
    "eoc_study",
    "run_ea",
    "run_eh",
    "run_trajectory",
    "self_convergence_error",
    "step_ea",
    "step_eh",
]
