"""Stability certificates and set-valued simulation for stick-slip friction.

A mass dragged by a constant-speed spring anchor over a Stribeck/Coulomb
friction surface either settles at its sliding equilibrium or falls into
a stick-slip limit cycle.  This package computes, for a given reference
speed:

* an ellipsoidal outer estimate of the global trap region
  (:mod:`stickslip.attractor`),
* an ellipsoidal inner estimate of the basin of attraction of the
  equilibrium (:mod:`stickslip.basin`),
* a global-asymptotic-stability certificate from the containment of the
  first set in the second (:mod:`stickslip.gas`),

all as small semidefinite feasibility problems handled by the built-in
barrier solver (:mod:`stickslip.sdpcore`) and re-verified by an
independent Jacobi eigensolver — and cross-validates every certificate
against nonsmooth time-domain simulation (:mod:`stickslip.simulator`).
"""

from .attractor import AttractorCertificate, attractor_problem, certify_attractor, decay_outside, tau0_max
from .basin import BasinCertificate, certify_basin, check_corollary1, decay_inside, local_problem, maximize_basin
from .dynamics import Equilibrium, SystemMatrices, build_matrices, equilibrium, error_rhs, state_rhs
from .errors import CertificationFailure, PreconditionError
from .friction import (
    FrictionBounds,
    Interval,
    PhysicalParams,
    dry_friction,
    dry_friction_set,
    error_nonlinearity,
    error_residual,
    error_slope,
    friction_force,
    hurwitz_interval,
    instability_indicator,
    sector_bound,
    sign_set,
)
from .gas import GasCertificate, boundary_containment, certify_gas, find_gas_threshold
from .sdpcore import (
    MARGIN_FLOOR,
    PSD,
    PSD_TOL,
    STRICT_NEG,
    MatrixPencil,
    SdpProblem,
    SdpSolution,
    solve,
    sym_eig,
    sym_eigenvalues,
    verify,
)
from .simulator import (
    REGIMES,
    CycleReport,
    RegimeReport,
    SimConfig,
    Trajectory,
    classify_regime,
    detect_cycle,
    regime_report,
    simulate,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "AttractorCertificate",
    "BasinCertificate",
    "CertificationFailure",
    "CycleReport",
    "Equilibrium",
    "FrictionBounds",
    "GasCertificate",
    "Interval",
    "MARGIN_FLOOR",
    "MatrixPencil",
    "PSD",
    "PSD_TOL",
    "PhysicalParams",
    "PreconditionError",
    "REGIMES",
    "RegimeReport",
    "STRICT_NEG",
    "SdpProblem",
    "SdpSolution",
    "SimConfig",
    "SystemMatrices",
    "Trajectory",
    "attractor_problem",
    "boundary_containment",
    "build_matrices",
    "certify_attractor",
    "certify_basin",
    "certify_gas",
    "check_corollary1",
    "classify_regime",
    "decay_inside",
    "decay_outside",
    "detect_cycle",
    "dry_friction",
    "dry_friction_set",
    "equilibrium",
    "error_nonlinearity",
    "error_residual",
    "error_rhs",
    "error_slope",
    "find_gas_threshold",
    "friction_force",
    "hurwitz_interval",
    "instability_indicator",
    "local_problem",
    "maximize_basin",
    "regime_report",
    "sector_bound",
    "sign_set",
    "simulate",
    "solve",
    "state_rhs",
    "step",
    "sym_eig",
    "sym_eigenvalues",
    "tau0_max",
    "verify",
]
