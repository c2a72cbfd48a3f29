"""Simulation and information analysis of two driven-dissipative Kerr modes."""

__version__ = "0.1.0"

from .drive import DriveSignal, telegraph, uniform_iid
from .fockspace import FockCutoff, build_annihilation, partial_trace, vacuum_density
from .infodecomp import (DiscreteJoint, PIDResult, broja_pid, co_information,
                         discretize, joint_histogram, load_gate,
                         mutual_information)
from .lindblad import (IntegrationError, Trajectory, build_hamiltonian, evolve,
                       quantum_mutual_information, von_neumann_entropy)
from .memory import MemoryCurve, fit_readout, mc_curve, memory_capacity
from .params import SystemParams
from .response import (HessianSpectrum, PoleSet, effective_potential,
                       hessian_at_origin, retarded_poles_analytic,
                       retarded_poles_numeric)
from .semiclassical import (CumulantState, MeanFieldState, cumulant_rhs,
                            integrate, meanfield_rhs)

__all__ = [
    "DriveSignal", "telegraph", "uniform_iid",
    "FockCutoff", "build_annihilation", "partial_trace", "vacuum_density",
    "DiscreteJoint", "PIDResult", "broja_pid", "co_information", "discretize",
    "joint_histogram", "load_gate", "mutual_information",
    "IntegrationError", "Trajectory", "build_hamiltonian", "evolve",
    "quantum_mutual_information", "von_neumann_entropy",
    "MemoryCurve", "fit_readout", "mc_curve", "memory_capacity",
    "SystemParams",
    "HessianSpectrum", "PoleSet", "effective_potential", "hessian_at_origin",
    "retarded_poles_analytic", "retarded_poles_numeric",
    "CumulantState", "MeanFieldState", "cumulant_rhs", "integrate",
    "meanfield_rhs",
    "__version__",
]
