"""Boundary control of scalar conservation laws on box domains."""
from .control import ControlPlan, extract_trace, profile_at, synthesize
from .diagnostics import (DecayReport, bln_residual, check_decay, final_match_report,
                          j_theta, l1_distance, omega_minus, omega_plus)
from .estimator import BoundaryController
from .flux import (Flux, FluxComponent, NondegeneracyReport, audit_nondegeneracy,
                   engquist_osher_flux, godunov_flux)
from .grid import BoxDomain, Grid, build_grid, width_along
from .replacement import ReplacementCertificate, certify, search_direction
from .solver import BoundarySchedule, FiniteVolumeSolver, State, Trajectory

__version__ = "0.1.0"

__all__ = [
    "BoundaryController", "BoundarySchedule", "BoxDomain", "ControlPlan", "DecayReport", "FiniteVolumeSolver",
    "Flux", "FluxComponent", "Grid", "NondegeneracyReport", "ReplacementCertificate",
    "State", "Trajectory", "audit_nondegeneracy", "bln_residual", "build_grid", "certify",
    "check_decay", "engquist_osher_flux", "extract_trace", "final_match_report",
    "godunov_flux", "j_theta", "l1_distance", "omega_minus", "omega_plus", "profile_at",
    "search_direction", "synthesize", "width_along",
]
