################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import logging
import math
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Dict, Optional, Type

import numpy as np
from overrides import EnforceOverrides, overrides
from scipy.special import roots_hermitenorm

from ..api import PhysicalParams
from ._rhs import SplitOperator
from ._state import KineticFluidState, StepperConfig

logger = logging.getLogger(__name__)

ACOUSTIC_SPEED = 2.0
EXPLICIT_STABILITY_LIMIT = math.sqrt(3.0)


@lru_cache(maxsize=None)
def transport_speed(truncation: int) -> float:
    """Largest eigenvalue of the truncated MULT_V Jacobi matrix."""
    roots, _ = roots_hermitenorm(truncation + 1)
    return float(np.max(roots))


def cfl_limit(state: KineticFluidState, config: StepperConfig) -> float:
    """Largest dt allowed by the explicit transport and advection terms."""
    speed = max(transport_speed(state.basis.truncation), ACOUSTIC_SPEED)
    speed += float(np.max(np.linalg.norm(state.u, axis=0)))
    return config.cfl_safety * EXPLICIT_STABILITY_LIMIT / (
        speed * state.grid.max_wavenumber
    )


def check_cfl(state: KineticFluidState, config: StepperConfig):
    limit = cfl_limit(state, config)
    if config.dt > limit:
        raise ValueError(
            f"CFL violation: dt={config.dt:.3g} exceeds {limit:.3g} for "
            f"N={state.basis.truncation} and n={state.grid.n}."
        )


class ImexScheme(ABC, EnforceOverrides):
    """One step of an implicit-explicit Runge-Kutta method on a split tendency."""

    order: int

    @abstractmethod
    def advance(
        self, operator: SplitOperator, values: np.ndarray, dt: float
    ) -> np.ndarray:
        """Returns the state values after one step of size dt."""


class ImexEuler(ImexScheme):
    """(1 - dt I) U1 = U0 + dt E(U0)."""

    order = 1

    @overrides
    def advance(
        self, operator: SplitOperator, values: np.ndarray, dt: float
    ) -> np.ndarray:
        return operator.solve(values + dt * operator.explicit(values), dt)


class ArsImex232(ImexScheme):
    """Two-stage, second-order, L-stable IMEX scheme with an explicit first stage."""

    order = 2
    gamma = 1.0 - 1.0 / math.sqrt(2.0)
    delta = -2.0 * math.sqrt(2.0) / 3.0

    @overrides
    def advance(
        self, operator: SplitOperator, values: np.ndarray, dt: float
    ) -> np.ndarray:
        gamma, delta = self.gamma, self.delta
        explicit_1 = operator.explicit(values)

        stage_2 = operator.solve(values + dt * gamma * explicit_1, gamma * dt)
        explicit_2 = operator.explicit(stage_2)
        implicit_2 = operator.implicit(stage_2)

        combined = (
            delta * explicit_1 + (1.0 - delta) * explicit_2 + (1.0 - gamma) * implicit_2
        )
        stage_3 = operator.solve(values + dt * combined, gamma * dt)
        explicit_3 = operator.explicit(stage_3)
        implicit_3 = operator.implicit(stage_3)
        second = explicit_2 + implicit_2
        third = explicit_3 + implicit_3
        return values + dt * ((1.0 - gamma) * second + gamma * third)


SCHEMES: Dict[str, Type[ImexScheme]] = {"imex1": ImexEuler, "imex2": ArsImex232}


def make_scheme(name: str) -> ImexScheme:
    try:
        return SCHEMES[name]()
    except KeyError:
        raise ValueError(f"Unknown scheme {name!r}; use one of {sorted(SCHEMES)}.")


def step_imex(
    state: KineticFluidState,
    config: Optional[StepperConfig] = None,
    params: Optional[PhysicalParams] = None,
    operator: Optional[SplitOperator] = None,
) -> KineticFluidState:
    """Advances the state by one step of size config.dt.

    Args:
        state: current state.
        config: step size, scheme and dealiasing.
        params: physical parameters; ignored when `operator` is given.
        operator: prebuilt split operator for repeated steps on the same grid.

    Raises:
        ValueError: if dt violates the CFL condition.
        VacuumGuardError: if 1 + rho drops below the threshold before or after the
            step.
        RuntimeError: if the implicit solve fails.
    """
    config = config or StepperConfig()
    state.check_vacuum(config.vacuum_threshold)
    check_cfl(state, config)
    if operator is None:
        operator = SplitOperator(state.grid, state.basis, params, config.dealias)
    values = make_scheme(config.scheme).advance(operator, state.values, config.dt)
    result = state.with_values(values, t=state.t + config.dt)
    result.check_vacuum(config.vacuum_threshold)
    return result
