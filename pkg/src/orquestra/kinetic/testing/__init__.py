################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from .oracles import (
    GaussianOracle,
    expm_propagator,
    gaussian_rule,
    hermite_oracle_errors,
    polynomial_parts,
    random_low_degree_coefficients,
    truncated_convolution_oracle,
)
from .random_states import (
    random_band_limited,
    random_coefficients,
    random_kinetic_state,
    random_micro_coefficients,
    random_mode_state,
)
