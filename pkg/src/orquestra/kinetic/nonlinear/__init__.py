################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ._imex import (
    ArsImex232,
    ImexEuler,
    ImexScheme,
    cfl_limit,
    check_cfl,
    make_scheme,
    step_imex,
    transport_speed,
)
from ._initial_data import admissible_initial_data
from ._observer import Observer
from ._picard import FrozenOperator, h1_norm, picard_iterate, picard_step
from ._positivity import positivity_min
from ._rhs import SplitOperator, compute_rhs, linear_rhs, split_operator
from ._simulation import Trajectory, run_simulation
from ._state import KineticFluidState, StepperConfig, VacuumGuardError
