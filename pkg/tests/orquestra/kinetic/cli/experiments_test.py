################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import numpy as np
import pytest

from orquestra.kinetic.cli import (
    ExperimentConfig,
    ExperimentError,
    _experiments,
    load_manifest,
    mode_decay_table,
    read_table,
    refit_outputs,
    run_experiment,
    sample_directions,
)
from orquestra.kinetic.hermite import HermiteBasisSpec

SMALL_BASIS = HermiteBasisSpec(truncation=3)


def _config(experiment: str, **blocks) -> ExperimentConfig:
    return ExperimentConfig.from_dict(
        {"experiment": experiment, "basis": {"truncation": 3}, **blocks}
    )


class TestSampleDirections:
    def test_directions_are_unit_vectors(self):
        directions = sample_directions(10, seed=3)
        assert directions.shape == (10, 3)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)

    def test_directions_are_seeded(self):
        np.testing.assert_array_equal(sample_directions(4, 1), sample_directions(4, 1))


class TestModeDecayTable:
    def test_sampled_modes_decay(self):
        # When
        table = mode_decay_table([0.5, 2.0], 2, spec=SMALL_BASIS, samples=17)

        # Then
        assert table.k_vectors.shape == (4, 3)
        np.testing.assert_allclose(table.k_norms, [0.5, 0.5, 2.0, 2.0])
        assert table.max_abscissa < 0
        assert np.all(table.normalized_rates > 0)
        assert table.rate_spread >= 1.0

    def test_explicit_directions(self):
        table = mode_decay_table(
            [1.0], np.eye(3), spec=SMALL_BASIS, samples=17, seed=2
        )
        np.testing.assert_allclose(table.k_vectors, np.eye(3))

    def test_worker_processes_reproduce_serial_table(self):
        serial = mode_decay_table([0.5, 2.0], 1, spec=SMALL_BASIS, samples=17)
        parallel = mode_decay_table(
            [0.5, 2.0], 1, spec=SMALL_BASIS, samples=17, threads=2
        )
        np.testing.assert_allclose(parallel.abscissae, serial.abscissae)
        np.testing.assert_allclose(parallel.normalized_rates, serial.normalized_rates)

    @pytest.mark.parametrize("k_magnitudes", [[], [0.0, 1.0]])
    def test_invalid_magnitudes_raise(self, k_magnitudes):
        with pytest.raises(ValueError):
            mode_decay_table(k_magnitudes, 1, spec=SMALL_BASIS)


class TestRunExperiment:
    def test_torus_run_of_zero_duration_writes_one_row(self, tmp_path):
        # Given
        config = _config(
            "torus-sim", grid={"n": 16}, run={"t_final": 0.0, "modes": 2}
        )

        # When
        manifest = run_experiment(config, output_dir=tmp_path)

        # Then
        columns, rows = read_table(tmp_path / "torus.csv")
        assert rows.shape == (1, len(columns))
        assert manifest.checks["conservation"]
        assert manifest.checks["energy_monotone"]
        assert (tmp_path / "manifest.json").is_file()
        assert (tmp_path / "config.json").is_file()
        assert load_manifest(tmp_path).experiment == "torus-sim"

    def test_short_torus_run_is_deterministic(self, tmp_path):
        # Given
        config = _config(
            "torus-sim",
            grid={"n": 16},
            stepper={"dt": 0.01},
            run={"t_final": 0.1, "observe_every": 0.05, "modes": 2},
            seed=5,
        )

        # When
        run_experiment(config, output_dir=tmp_path / "first")
        run_experiment(config, output_dir=tmp_path / "second")

        # Then
        _, first = read_table(tmp_path / "first" / "torus.csv")
        _, second = read_table(tmp_path / "second" / "torus.csv")
        np.testing.assert_array_equal(first, second)
        assert first.shape[0] == 3

    def test_picard_check_contracts(self, tmp_path):
        config = _config(
            "picard-check",
            grid={"n": 16},
            run={"modes": 2, "picard_iterations": 4},
        )
        manifest = run_experiment(config, output_dir=tmp_path)
        assert manifest.checks["contracting"]
        _, rows = read_table(tmp_path / "picard.csv")
        np.testing.assert_array_equal(rows[:, 0], [2, 3, 4])

    def test_diagnostics_checks_pass(self, tmp_path):
        config = _config(
            "diagnostics",
            grid={"dim": 1, "n": 16},
            run={"samples": 3, "modes": 2},
        )
        manifest = run_experiment(config, output_dir=tmp_path)
        assert manifest.passed
        assert "ENERGY_E" in manifest.fits["functionals"]
        _, rows = read_table(tmp_path / "interpolation.csv")
        assert rows.shape == (3 * 4, 5)

    def test_mode_decay_writes_table(self, tmp_path):
        config = _config(
            "mode-decay",
            run={"k_magnitudes": [1.0], "n_directions": 2, "mode_samples": 17},
        )
        manifest = run_experiment(config, output_dir=tmp_path)
        assert manifest.checks["spectral_abscissa"]
        _, rows = read_table(tmp_path / "mode_decay.csv")
        assert rows.shape == (2, 9)

    def test_runtime_failure_keeps_partial_manifest(self, tmp_path):
        # Given
        # a time step far above the explicit stability limit
        config = _config(
            "torus-sim",
            grid={"n": 16},
            stepper={"dt": 10.0},
            run={"t_final": 20.0, "modes": 2},
        )

        # When
        with pytest.raises(ExperimentError) as info:
            run_experiment(config, output_dir=tmp_path)

        # Then
        assert info.value.manifest.error
        assert load_manifest(tmp_path).error == info.value.manifest.error

    def test_missing_output_keeps_failed_manifest(self, tmp_path, monkeypatch):
        # Given
        def forgetful_runner(config, out, manifest, threads):
            manifest.add_output(out / "never_written.csv")

        monkeypatch.setitem(_experiments.RUNNERS, "diagnostics", forgetful_runner)

        # When
        with pytest.raises(ExperimentError) as info:
            run_experiment(_config("diagnostics"), output_dir=tmp_path)

        # Then
        assert "never_written.csv" in info.value.manifest.error
        assert load_manifest(tmp_path).error == info.value.manifest.error
        assert not load_manifest(tmp_path).passed

    def test_threads_must_be_positive(self, tmp_path):
        with pytest.raises(ValueError):
            run_experiment(_config("diagnostics"), threads=0, output_dir=tmp_path)


class TestRefitOutputs:
    def test_non_decay_run_cannot_be_refitted(self, tmp_path):
        config = _config("picard-check", grid={"n": 16}, run={"modes": 2})
        run_experiment(config, output_dir=tmp_path)
        with pytest.raises(ValueError):
            refit_outputs(tmp_path)

    @pytest.mark.slow
    def test_linear_decay_refit_matches_manifest(self, tmp_path):
        # Given
        config = _config(
            "linear-decay",
            quadrature={"n_radial": 32},
            run={"decay_times": 12, "orders": [0, 1]},
        )
        manifest = run_experiment(config, output_dir=tmp_path)

        # When
        fits = refit_outputs(tmp_path)

        # Then
        for m in (0, 1):
            assert fits[f"norm_m{m}"]["exponent"] == pytest.approx(
                manifest.fits[f"norm_m{m}"]["exponent"]
            )


@pytest.mark.slow
class TestAcceptance:
    def test_linear_decay_exponents(self, tmp_path):
        manifest = run_experiment(
            ExperimentConfig.default("linear-decay"), threads=4, output_dir=tmp_path
        )
        assert manifest.passed

    def test_mode_decay_rates(self, tmp_path):
        manifest = run_experiment(
            ExperimentConfig.default("mode-decay"), threads=4, output_dir=tmp_path
        )
        assert manifest.checks["spectral_abscissa"]
        assert manifest.checks["positive_rates"]
