"""Spectral laboratory for a fifth-order BBM-type water wave equation."""

from .coefficients import (
    AbcdFirst,
    AbcdSecond,
    Bbm5Coefficients,
    ModelParameters,
    REFERENCE_COEFFICIENTS,
    REFERENCE_PARAMETERS,
    derive_bbm5,
    derive_first_order,
    derive_second_order,
    rho_for_energy_conservation,
    validate,
)
from .spectral import Field, Grid, energy, low_pass, sobolev_norm, spectral_derivative
from .symbols import Symbol, apply_symbol, apply_symbol_real, eval_symbol, sup_bound
from .evolution import (
    RhsSpec,
    RunReport,
    StepperConfig,
    duhamel_picard,
    energy_drift_predicted,
    exponential_rk4_step,
    nonlinear_rhs,
    run_simulation,
    semigroup_apply,
)

__version__ = "0.1.0"
