################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import pytest
from overrides import overrides

from orquestra.kinetic.fourier import SpatialGrid
from orquestra.kinetic.hermite import hermite_basis
from orquestra.kinetic.nonlinear import KineticFluidState, Observer


def test_observer_requires_observe():
    with pytest.raises(TypeError):
        Observer()


def test_default_finalize_is_noop():
    class Counter(Observer):
        def __init__(self):
            self.count = 0

        @overrides
        def observe(self, state: KineticFluidState) -> None:
            self.count += 1

    counter = Counter()
    counter.observe(KineticFluidState.zeros(SpatialGrid(dim=1, n=8), hermite_basis(2)))
    counter.finalize()
    assert counter.count == 1
