################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import logging
import math
from dataclasses import dataclass, field, replace
from os import PathLike
from typing import List, Optional, Sequence, Union

import numpy as np

from ..api import PhysicalParams
from ..fourier import SpatialGrid
from ..hermite import hermite_basis
from ._imex import step_imex
from ._observer import Observer
from ._rhs import SplitOperator
from ._state import KineticFluidState, StepperConfig

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """Observed snapshots of a run, in time order."""

    states: List[KineticFluidState] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([state.t for state in self.states])

    @property
    def final(self) -> KineticFluidState:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.states)

    def append(self, state: KineticFluidState):
        if self.states and state.t <= self.states[-1].t:
            raise ValueError("Snapshot times must be strictly increasing.")
        self.states.append(state)

    def save(self, path: Union[str, PathLike]):
        """Writes times, values, grid and truncation to a compressed npz archive."""
        first = self.states[0]
        np.savez_compressed(
            path,
            times=self.times,
            values=np.stack([state.values for state in self.states]),
            grid=np.array([first.grid.dim, first.grid.n, first.grid.length]),
            truncation=np.array(first.basis.truncation),
        )

    @classmethod
    def load(cls, path: Union[str, PathLike]) -> "Trajectory":
        with np.load(path) as archive:
            dim, n, length = archive["grid"]
            grid = SpatialGrid(dim=int(dim), n=int(n), length=float(length))
            basis = hermite_basis(int(archive["truncation"]))
            return cls(
                [
                    KineticFluidState(grid, basis, values, float(t))
                    for t, values in zip(archive["times"], archive["values"])
                ]
            )


def _notify(
    observers: Sequence[Observer], trajectory: Trajectory, state: KineticFluidState
):
    trajectory.append(state)
    for observer in observers:
        observer.observe(state)


def run_simulation(
    initial: KineticFluidState,
    t_final: float,
    config: Optional[StepperConfig] = None,
    params: Optional[PhysicalParams] = None,
    observers: Sequence[Observer] = (),
    observe_every: Optional[float] = None,
) -> Trajectory:
    """Advances `initial` to t_final with the IMEX stepper.

    The last step is shortened so that the run ends exactly at t_final. Observers
    see the initial state, every state at a multiple of `observe_every` (rounded to
    whole steps) and the final state, and are finalized at the end.

    Args:
        initial: starting state; its t is the start time.
        t_final: end time, not before initial.t.
        config: stepper settings.
        params: physical parameters.
        observers: callbacks receiving each observed snapshot.
        observe_every: time between observations. Defaults to every step.

    Returns:
        Trajectory of the observed snapshots.
    """
    config = config or StepperConfig()
    params = params or PhysicalParams()
    duration = t_final - initial.t
    if duration < 0:
        raise ValueError(f"t_final={t_final} precedes the initial time {initial.t}.")
    initial.check_vacuum(config.vacuum_threshold)
    stride = 1
    if observe_every is not None:
        if not observe_every > 0:
            raise ValueError("observe_every must be positive.")
        stride = max(1, int(round(observe_every / config.dt)))

    operator = SplitOperator(initial.grid, initial.basis, params, config.dealias)
    trajectory = Trajectory()
    _notify(observers, trajectory, initial)
    n_steps = math.ceil(duration / config.dt - 1e-9) if duration > 0 else 0
    logger.info(
        "Running %d %s steps of dt=%g to t=%g",
        n_steps,
        config.scheme,
        config.dt,
        t_final,
    )

    state = initial
    for step in range(1, n_steps + 1):
        step_config = config
        if step == n_steps:
            remaining = t_final - state.t
            if remaining < config.dt:
                step_config = replace(config, dt=remaining)
        state = step_imex(state, step_config, operator=operator)
        if step % stride == 0 or step == n_steps:
            logger.debug("Observed t=%.6g after %d steps", state.t, step)
            _notify(observers, trajectory, state)

    for observer in observers:
        observer.finalize()
    return trajectory
