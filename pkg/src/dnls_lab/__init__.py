"""Pseudospectral simulation and verification lab for the derivative
nonlinear Schroedinger equation on a large torus."""

from .errors import AbortError, ConfigError, PreconditionError
from .spectral import (
    Band,
    Field,
    GaugeFrame,
    Grid,
    Spectrum,
    apply_symbol,
    bessel_norm,
    derivative,
    fractional_derivative,
    high_pass,
    homogeneous_norm,
    inverse_transform,
    low_pass,
    lp_norm,
    make_grid,
    project,
    transform,
)
from .gauge import PhaseProfile, cumulative_mass, gauge_forward, gauge_inverse
from .functionals import (
    ConservedSet,
    conserved_set,
    energy_gauged,
    energy_original,
    mass,
    momentum_gauged,
    momentum_original,
)
from .apriori import (
    SHARP,
    InequalityReport,
    SharpConstants,
    check_gn_interp,
    check_gn_sextic,
    cubic_f,
    cubic_f_max,
    gamma0,
    h1_bound,
    kinetic_l4_bound,
    l4_bound,
    momentum_lower_bound,
    phase_modulation_residual,
    sharp_constants,
)
from .imethod import (
    CommutatorStudy,
    DriftStudy,
    GwpBudget,
    IMultiplier,
    OperatorNormStudy,
    apply_I,
    gwp_budget,
    make_multiplier,
    measure_rescale_constant,
    modified_energy_drift_study,
    modified_functionals,
    momentum_commutator_study,
    multiplier_symbol,
    operator_norm_study,
    rescale,
)
from .evolution import SimConfig, Trajectory, evolve, nonlinearity, step
from .datum import (
    field_from_function,
    gaussian_field,
    load_field,
    multi_gaussian_field,
    parse_datum,
    plane_wave_field,
    probe_field_suite,
    random_decaying_field,
    save_field,
)

__version__ = "0.1.0"
