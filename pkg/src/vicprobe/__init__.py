"""Pump-probe simulator for a three-level V-system with interference between
spontaneous-decay channels.

Two excited states share a vacuum: when their dipole moments are
non-orthogonal, the common decay channels interfere and reshape the
Autler-Townes doublet of a weak probe, to the point of flipping one (or
both) absorption components into gain and quasi-trapping population in a
slowly decaying dressed-state combination.  This package solves the
rotating-frame equations of motion exactly (harmonic balance in the
pump-probe beat, adaptive time integration, pump-only linear solves) and
cross-checks everything against closed-form expressions.
"""
from .analytic import (
    PumpResponse,
    rho13_no_vic,
    sigma23_exact,
    sigma23_small_theta,
    trap_populations_small_theta,
)
from .dressed import (
    DressedDecomposition,
    SecularState,
    dressed_basis,
    evolve_secular,
    gamma_uc,
    secular_from_density,
    to_trap_basis,
)
from .floquet import (
    HarmonicSet,
    PerturbativeSolution,
    absorption_coefficient,
    autler_townes_peaks,
    solve_floquet,
    solve_perturbative,
)
from .master import (
    MasterRHS,
    Mode,
    Trajectory,
    integrate,
    rhs,
    steady_state_pump_only,
)
from .model import (
    DensityMatrix,
    SystemParams,
    config_text,
    eta,
    load_config,
    make_params,
    parse_config_text,
)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "DressedDecomposition",
    "HarmonicSet",
    "MasterRHS",
    "Mode",
    "PerturbativeSolution",
    "PumpResponse",
    "SecularState",
    "SystemParams",
    "Trajectory",
    "absorption_coefficient",
    "autler_townes_peaks",
    "config_text",
    "dressed_basis",
    "eta",
    "evolve_secular",
    "gamma_uc",
    "integrate",
    "load_config",
    "make_params",
    "parse_config_text",
    "rho13_no_vic",
    "rhs",
    "secular_from_density",
    "sigma23_exact",
    "sigma23_small_theta",
    "solve_floquet",
    "solve_perturbative",
    "steady_state_pump_only",
    "to_trap_basis",
    "trap_populations_small_theta",
]
