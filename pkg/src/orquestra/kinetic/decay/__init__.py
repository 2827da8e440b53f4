################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ._fitting import (
    ExponentialFit,
    PowerLawFit,
    fit_exponential,
    fit_power_law,
    windowed_exponents,
)
from ._profiles import DuhamelSource, InitialProfile, gaussian_lq_norm
from ._quadrature import KQuadrature, sphere_rule
from ._synthesis import (
    synthesis_integration_config,
    synthesize_linear_norm,
    synthesize_linear_norms,
    verify_duhamel_bound,
)
