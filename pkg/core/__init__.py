# Core module
from .algebra import PhasePoint, SE3Dual, SU2xC2Dual
from .maps import LiftGauge, collective_M, jacobian_M, lift
from .hamiltonians import TopParams, TopPreset, collective_H, h_heavytop
from .integrators import Formulation, Method, NewtonOptions, StepperConfig, Trajectory, integrate
from .diagnostics import InvariantSeries, DriftReport, bracket_check, convergence_order, drift_report, invariant_series
from .errors import CollectiveTopError

__all__ = [
    "PhasePoint",
    "SE3Dual",
    "SU2xC2Dual",
    "LiftGauge",
    "collective_M",
    "jacobian_M",
    "lift",
    "TopParams",
    "TopPreset",
    "collective_H",
    "h_heavytop",
    "Formulation",
    "Method",
    "NewtonOptions",
    "StepperConfig",
    "Trajectory",
    "integrate",
    "InvariantSeries",
    "DriftReport",
    "bracket_check",
    "convergence_order",
    "drift_report",
    "invariant_series",
    "CollectiveTopError",
]
