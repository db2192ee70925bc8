"""Relaxation of an isotropic XY spin chain suddenly end-coupled to a heat bath.

Library layout:
  spectrum     diagonalized chain: dispersion, eigenbasis tables, site operators
  bath         Gaussian bath spectrum and its finite-time spectral function
  liouvillian  master-equation right-hand side (generator, Lamb shifts, oracle)
  secular      semi-classical rate equations and their closed-form solution
  dynamics     adaptive RK4 trajectories, heat flux, magnetization, plateaus
  spinflip     analytic single-spin-flip magnetization response
  cli          deterministic command-line front end emitting CSV
"""

from .bath import (
    BathParams,
    incomplete_spectral,
    markov_spectral,
    regularized_gamma_p,
    spectral_density,
    truncated_spectral_density,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    adaptive_rk4,
    heat_flux,
    integrate,
    magnetization,
    plateau_intervals,
    plateau_metrics,
)
from .errors import (
    CapabilityError,
    ConfigError,
    IntegrationError,
    IntegrityError,
    QuadratureError,
)
from .liouvillian import (
    NO_WINDOW,
    WindowMode,
    generator_apply,
    hermiticity_defect,
    kronecker_window,
    lamb_shift,
    master_rhs,
    maximally_mixed,
    min_eigenvalue,
    reference_rhs,
    thermal_product_state,
    trace_defect,
)
from .secular import (
    SecularSolution,
    flux_bounds,
    occupation,
    occupations,
    rate_matrix,
    secular_energy,
    secular_flux,
    secular_magnetization,
    steady_occupations,
    relaxation_times,
    thermal_occupations,
)
from .spectrum import (
    ChainParams,
    ModeTable,
    OccupationConfig,
    config_energy,
    dispersion,
    dispersions,
    eigenbasis,
    flip_config,
    mode_table,
    number_operator_matrix,
    sigma_z_matrix,
    sign_factors,
)
from .spinflip import (
    ResponseQuery,
    brute_force_response,
    crest_positions,
    eigenstate_response,
    evaluate_response,
    fit_crest_speed,
    fourier_coeff_b,
    high_temp_response,
    low_temp_response,
    thermal_response,
    thermo_integral_response,
)

__version__ = "0.1.0"
