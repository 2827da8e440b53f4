################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ..decay import ExponentialFit, fit_exponential
from ._checks import (
    frequency_split_check,
    interpolation_check,
    interpolation_exponent,
    lyapunov_check,
)
from ._conservation import ConservationResiduals, conservation_residuals
from ._functionals import (
    FunctionalKind,
    FunctionalWeights,
    SpectralSnapshot,
    as_functional_kind,
    evaluate_functional,
    evaluate_functionals,
    shell_weight,
    velocity_derivative_gram,
)
from ._report import (
    TORUS_KINDS,
    ConservationRecorder,
    FunctionalRecorder,
    FunctionalReport,
    PositivityRecorder,
    torus_recorders,
)
