################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import importlib

import pytest
import rapidjson as json

from orquestra.kinetic.cli import ExperimentConfig, save_experiment_config
from orquestra.kinetic.cli.main import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_RUNTIME,
    build_parser,
    main,
)


@pytest.fixture()
def diagnostics_config(tmp_path):
    config = ExperimentConfig.from_dict(
        {
            "experiment": "diagnostics",
            "grid": {"dim": 1, "n": 16},
            "basis": {"truncation": 3},
            "run": {"samples": 2, "modes": 2},
        }
    )
    path = tmp_path / "diagnostics.json"
    save_experiment_config(config, path)
    return path


def test_console_entry_point_is_importable():
    module = importlib.import_module("orquestra.kinetic.cli.main")
    assert callable(module.main)


class TestParser:
    def test_every_experiment_is_a_subcommand(self):
        args = build_parser().parse_args(["torus-sim", "--seed", "3", "--threads", "2"])
        assert args.command == "torus-sim"
        assert args.seed == 3
        assert args.threads == 2
        assert args.config is None

    @pytest.mark.parametrize(
        "argv",
        [
            ["mode-decay", "--threads", "0"],
            ["mode-decay", "--seed", "-1"],
            ["validate"],
            ["unknown"],
        ],
    )
    def test_invalid_arguments_exit(self, argv):
        with pytest.raises(SystemExit):
            build_parser().parse_args(argv)


class TestValidate:
    def test_valid_config(self, diagnostics_config):
        assert main(["validate", "--config", str(diagnostics_config)]) == EXIT_OK

    def test_unknown_key_is_invalid(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"experiment": "torus-sim", "speed": 1}))
        assert main(["validate", "--config", str(path)]) == EXIT_INVALID

    def test_missing_file_is_invalid(self, tmp_path):
        path = tmp_path / "absent.json"
        assert main(["validate", "--config", str(path)]) == EXIT_INVALID


class TestExperimentCommands:
    def test_diagnostics_run_passes(self, diagnostics_config, tmp_path):
        # Given
        out = tmp_path / "run"
        argv = ["diagnostics", "--config", str(diagnostics_config), "--out", str(out)]

        # When
        code = main(argv)

        # Then
        assert code == EXIT_OK
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["passed"]
        assert manifest["config"]["output_dir"] == str(out)

    def test_seed_override_is_recorded(self, diagnostics_config, tmp_path):
        out = tmp_path / "run"
        argv = ["diagnostics", "--config", str(diagnostics_config), "--out", str(out)]
        main(argv + ["--seed", "17"])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 17

    def test_config_for_another_experiment_is_invalid(
        self, diagnostics_config, tmp_path
    ):
        code = main(
            ["torus-sim", "--config", str(diagnostics_config), "--out", str(tmp_path)]
        )
        assert code == EXIT_INVALID
        assert not (tmp_path / "manifest.json").exists()

    def test_run_failure_returns_runtime_code(self, tmp_path):
        # Given
        config = ExperimentConfig.from_dict(
            {
                "experiment": "torus-sim",
                "grid": {"n": 16},
                "basis": {"truncation": 3},
                "stepper": {"dt": 10.0},
                "run": {"t_final": 20.0, "modes": 2},
            }
        )
        path = tmp_path / "unstable.json"
        save_experiment_config(config, path)

        # When
        code = main(["torus-sim", "--config", str(path), "--out", str(tmp_path / "r")])

        # Then
        assert code == EXIT_RUNTIME


class TestReport:
    def test_missing_run_directory(self, tmp_path):
        assert main(["report", "--out", str(tmp_path / "absent")]) == EXIT_RUNTIME

    def test_run_without_decay_table(self, diagnostics_config, tmp_path):
        out = tmp_path / "run"
        main(["diagnostics", "--config", str(diagnostics_config), "--out", str(out)])
        assert main(["report", "--out", str(out)]) == EXIT_RUNTIME
