################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import numpy as np
import pytest

from orquestra.kinetic.api import FluidState
from orquestra.kinetic.fourier import SpatialGrid
from orquestra.kinetic.hermite import HermiteCoeffVector, hermite_basis
from orquestra.kinetic.nonlinear import (
    KineticFluidState,
    StepperConfig,
    VacuumGuardError,
)

GRID = SpatialGrid(dim=1, n=8)


class TestKineticFluidState:
    def test_from_parts_splits_back(self):
        # Given
        basis = hermite_basis(2)
        rng = np.random.default_rng(0)
        f = HermiteCoeffVector(basis, rng.standard_normal((basis.size, 8)))
        fluid = FluidState(
            rng.standard_normal(8), rng.standard_normal((3, 8)), rng.standard_normal(8)
        )

        # When
        state = KineticFluidState.from_parts(GRID, f, fluid, t=0.5)

        # Then
        assert state.values.shape == (basis.size + 5, 8)
        np.testing.assert_array_equal(state.f.values, f.values)
        np.testing.assert_array_equal(state.rho, fluid.rho)
        np.testing.assert_array_equal(state.u, fluid.u)
        np.testing.assert_array_equal(state.theta, fluid.theta)
        assert state.t == 0.5

    def test_wrong_shape_raises_value_error(self):
        with pytest.raises(ValueError):
            KineticFluidState(GRID, hermite_basis(2), np.zeros((10, 8)))

    def test_with_values_keeps_time_unless_given(self):
        state = KineticFluidState.zeros(GRID, hermite_basis(2), t=1.0)
        assert state.with_values(state.values).t == 1.0
        assert state.with_values(state.values, t=2.0).t == 2.0

    def test_vacuum_guard(self):
        state = KineticFluidState.zeros(GRID, hermite_basis(2))
        state.values[state.n_herm, 3] = -0.95
        with pytest.raises(VacuumGuardError):
            state.check_vacuum(0.1)
        state.check_vacuum(0.01)


class TestStepperConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dt": 0.0},
            {"scheme": "rk4"},
            {"cfl_safety": 1.5},
            {"vacuum_threshold": 1.0},
        ],
    )
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ValueError):
            StepperConfig(**kwargs)

    def test_dict_round_trip(self):
        config = StepperConfig(dt=1e-3, scheme="imex1", dealias=False)
        assert StepperConfig.from_dict(config.to_dict()) == config

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            StepperConfig.from_dict({"dt": 1e-3, "order": 2})
