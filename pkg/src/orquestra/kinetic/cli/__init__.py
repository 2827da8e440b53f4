################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ._config import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    FitWindow,
    RunSettings,
    WeightsBlock,
    load_experiment_config,
    save_experiment_config,
)
from ._experiments import (
    ExperimentError,
    code_version,
    mode_decay_table,
    refit_outputs,
    run_experiment,
    sample_directions,
)
from ._output import (
    DECAY_COLUMNS,
    TORUS_COLUMNS,
    RunManifest,
    emit_decay_table,
    emit_envelope_table,
    emit_plot_data,
    load_manifest,
    read_table,
    write_table,
)
