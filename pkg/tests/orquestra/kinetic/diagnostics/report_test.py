################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import inspect
import logging

import numpy as np
import pytest

from orquestra.kinetic.diagnostics import (
    TORUS_KINDS,
    FunctionalKind,
    FunctionalReport,
    PositivityRecorder,
    torus_recorders,
)
from orquestra.kinetic.fourier import SpatialGrid
from orquestra.kinetic.hermite import hermite_basis
from orquestra.kinetic.nonlinear import (
    KineticFluidState,
    Observer,
    StepperConfig,
    run_simulation,
)
from orquestra.kinetic.testing import random_kinetic_state


@pytest.fixture()
def initial():
    grid = SpatialGrid(dim=1, n=16)
    return random_kinetic_state(grid, hermite_basis(3), np.random.default_rng(8))


class TestFunctionalReport:
    def test_repeated_stamp_is_recorded_once(self):
        report = FunctionalReport()
        report.stamp(0.0)
        report.stamp(0.0)
        report.stamp(0.5)
        assert report.times == [0.0, 0.5]

    def test_stamp_going_back_in_time_raises(self):
        report = FunctionalReport()
        report.stamp(1.0)
        with pytest.raises(ValueError):
            report.stamp(0.5)

    def test_empty_conservation_drift(self):
        assert FunctionalReport().conservation_drift().shape == (0, 4)

    def test_fit_rate_recovers_exponential(self):
        # Given
        times = np.linspace(0.0, 4.0, 21)
        report = FunctionalReport(
            times=list(times),
            functionals={FunctionalKind.ENERGY_E: list(2.0 * np.exp(-0.7 * times))},
        )

        # When
        fit = report.fit_rate("energy_e", start=1.0, stop=3.0)

        # Then
        assert fit.rate == pytest.approx(0.7)
        assert fit.residual < 1e-12


class TestRecorders:
    def test_recorders_keep_the_observer_signature(self):
        expected = inspect.signature(Observer.observe)
        for recorder in torus_recorders(FunctionalReport()):
            assert inspect.signature(type(recorder).observe) == expected

    def test_single_observation_fills_every_series(self, initial):
        report = FunctionalReport()
        for recorder in torus_recorders(report):
            recorder.observe(initial)
        assert report.times == [0.0]
        for kind in TORUS_KINDS:
            assert len(report.series(kind)) == 1
        assert len(report.conservation) == 1
        assert len(report.positivity) == 1

    def test_recorders_share_aligned_series(self, initial):
        # Given
        report = FunctionalReport()

        # When
        run_simulation(
            initial,
            0.2,
            StepperConfig(dt=0.01),
            observers=torus_recorders(report),
            observe_every=0.05,
        )

        # Then
        np.testing.assert_allclose(report.times, [0.0, 0.05, 0.1, 0.15, 0.2])
        for kind in TORUS_KINDS:
            assert len(report.series(kind)) == 5
        assert len(report.conservation) == 5
        assert len(report.positivity) == 5
        assert np.all(np.isfinite(report.positivity))

    def test_energy_decays_along_small_data_run(self, initial):
        report = FunctionalReport()
        run_simulation(
            initial,
            0.5,
            StepperConfig(dt=0.01),
            observers=torus_recorders(report),
            observe_every=0.25,
        )
        energy = report.series(FunctionalKind.ENERGY_E)
        assert energy[-1] < energy[0]
        assert np.all(report.conservation_drift()[:, :2] < 1e-12)

    def test_positivity_loss_is_logged(self, initial, caplog):
        # Given
        values = np.zeros_like(initial.values)
        values[0] = -2.0
        state = KineticFluidState(initial.grid, initial.basis, values)
        recorder = PositivityRecorder(FunctionalReport())

        # When
        with caplog.at_level(logging.WARNING):
            recorder.observe(state)
            recorder.finalize()

        # Then
        assert "lost positivity" in caplog.text
