################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from abc import ABC, abstractmethod

from overrides import EnforceOverrides

from ._state import KineticFluidState


class Observer(ABC, EnforceOverrides):
    """Callback invoked by time-stepping drivers at observation times.

    Observers receive read-only snapshots and must not mutate them. Drivers call
    `observe` in increasing time order.
    """

    @abstractmethod
    def observe(self, state: KineticFluidState) -> None:
        """Records information about `state`, which carries its own time stamp."""

    def finalize(self) -> None:
        """Called once after the last observation."""
