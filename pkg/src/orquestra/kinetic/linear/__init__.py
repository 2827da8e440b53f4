################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ._evolution import ModeIntegrationConfig, evolve_mode, evolve_mode_trajectory
from ._lyapunov import (
    LyapunovWeights,
    check_envelope,
    fit_mode_decay,
    lyapunov_derivative,
    lyapunov_matrix,
    mode_lyapunov_EM,
)
from ._mode import ModeGenerator, ModeLayout, ModeState, assemble_generator
