################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import numpy as np
import pytest
from overrides import overrides

from orquestra.kinetic.fourier import SpatialGrid
from orquestra.kinetic.hermite import hermite_basis
from orquestra.kinetic.nonlinear import (
    KineticFluidState,
    Observer,
    StepperConfig,
    Trajectory,
    run_simulation,
)
from orquestra.kinetic.testing import random_kinetic_state


class RecordingObserver(Observer):
    def __init__(self):
        self.times = []
        self.finalized = False

    @overrides
    def observe(self, state: KineticFluidState) -> None:
        self.times.append(state.t)

    @overrides
    def finalize(self) -> None:
        self.finalized = True


@pytest.fixture()
def initial():
    grid = SpatialGrid(dim=1, n=16)
    return random_kinetic_state(grid, hermite_basis(3), np.random.default_rng(1))


def test_run_ends_exactly_at_final_time(initial):
    # Given
    observer = RecordingObserver()

    # When
    trajectory = run_simulation(
        initial,
        0.105,
        StepperConfig(dt=0.01),
        observers=[observer],
        observe_every=0.05,
    )

    # Then
    np.testing.assert_allclose(trajectory.times, [0.0, 0.05, 0.1, 0.105])
    assert trajectory.final.t == pytest.approx(0.105)
    assert observer.times == list(trajectory.times)
    assert observer.finalized


def test_zero_duration_observes_initial_state_once(initial):
    observer = RecordingObserver()
    trajectory = run_simulation(initial, 0.0, observers=[observer])
    assert len(trajectory) == 1
    assert trajectory.final is initial
    assert observer.times == [0.0]
    assert observer.finalized


def test_final_time_before_start_raises(initial):
    with pytest.raises(ValueError):
        run_simulation(initial.with_values(initial.values, t=1.0), 0.5)


def test_observe_every_must_be_positive(initial):
    with pytest.raises(ValueError):
        run_simulation(initial, 0.1, observe_every=0.0)


def test_small_data_decay(initial):
    trajectory = run_simulation(initial, 1.0, StepperConfig(dt=0.01))
    norms = [np.linalg.norm(state.values) for state in trajectory.states]
    assert norms[-1] < norms[0]
    assert np.all(np.isfinite(trajectory.final.values))


class TestTrajectory:
    def test_append_requires_increasing_times(self, initial):
        trajectory = Trajectory([initial])
        with pytest.raises(ValueError):
            trajectory.append(initial)

    def test_save_and_load(self, initial, tmp_path):
        # Given
        trajectory = run_simulation(initial, 0.02, StepperConfig(dt=0.01))
        path = tmp_path / "trajectory.npz"

        # When
        trajectory.save(path)
        loaded = Trajectory.load(path)

        # Then
        np.testing.assert_allclose(loaded.times, trajectory.times)
        assert loaded.final.grid == initial.grid
        assert loaded.final.basis.truncation == 3
        for first, second in zip(loaded.states, trajectory.states):
            np.testing.assert_array_equal(first.values, second.values)


def test_zero_state_stays_zero():
    grid = SpatialGrid(dim=2, n=8)
    state = KineticFluidState.zeros(grid, hermite_basis(3))
    final = run_simulation(state, 0.05, StepperConfig(dt=0.01)).final
    np.testing.assert_array_equal(final.values, 0.0)
