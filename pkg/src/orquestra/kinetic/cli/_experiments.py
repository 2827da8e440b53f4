################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np
from scipy.optimize import OptimizeResult

from ..api import PhysicalParams
from ..decay import fit_exponential, fit_power_law, synthesize_linear_norms
from ..diagnostics import (
    FunctionalKind,
    FunctionalReport,
    evaluate_functionals,
    frequency_split_check,
    interpolation_check,
    lyapunov_check,
    torus_recorders,
)
from ..fourier import SpatialGrid, SpectralField
from ..hermite import (
    HermiteBasisSpec,
    dissipation_form,
    hermite_basis,
    macro_coercivity_floor,
    micro_coercivity_constant,
)
from ..linear import LyapunovWeights, ModeState, assemble_generator, fit_mode_decay
from ..nonlinear import admissible_initial_data, picard_iterate, run_simulation
from ..testing import hermite_oracle_errors, random_band_limited, random_coefficients
from ._config import ExperimentConfig, save_experiment_config
from ._output import (
    RunManifest,
    emit_decay_table,
    emit_envelope_table,
    emit_plot_data,
    load_manifest,
    read_table,
    write_table,
)

logger = logging.getLogger(__name__)

PACKAGE_NAME = "orquestra-kinetic"
STABILITY_TOLERANCE = 1e-10
RATE_SPREAD_LIMIT = 5.0
DECAY_EXPONENTS = {0: (-0.75, 0.10), 1: (-1.25, 0.10), 2: (-1.75, 0.15)}
RATE_INCREMENT = (0.5, 0.07)
DRIFT_LIMIT = 1e-6
FIT_RESIDUAL_LIMIT = 0.1
ORACLE_TOLERANCE = 1e-8
COERCIVITY_TOLERANCE = 1e-12
MONOTONE_TOLERANCE = 1e-10


class ExperimentError(RuntimeError):
    """A run failed after it started; `manifest` lists the partial outputs."""

    def __init__(self, message: str, manifest: RunManifest):
        super().__init__(message)
        self.manifest = manifest


def code_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "unknown"


def sample_directions(count: int, seed: int = 0) -> np.ndarray:
    """`count` unit vectors drawn uniformly on the sphere."""
    vectors = np.random.default_rng(seed).standard_normal((count, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _mode_sample(arguments) -> Dict[str, float]:
    k, index, params, spec, weights, horizon, samples, seed = arguments
    gen = assemble_generator(k, params, spec)
    abscissa = float(np.max(np.linalg.eigvals(gen.matrix).real))
    rng = np.random.default_rng([seed, index])
    size = gen.size
    state0 = ModeState.from_vector(
        k, gen.basis, rng.standard_normal(size) + 1j * rng.standard_normal(size)
    )
    k_squared = float(np.dot(k, k))
    t_grid = np.linspace(0.0, horizon * (1.0 + k_squared) / k_squared, samples)
    fit = fit_mode_decay(gen, state0, t_grid, weights)
    return {
        "abscissa": abscissa,
        "normalized_rate": fit.normalized_rate,
        "decay_rate": fit.decay_rate,
        "residual": fit.residual,
        "max_envelope_violation": fit.max_envelope_violation,
    }


def mode_decay_table(
    k_magnitudes: Sequence[float],
    directions: Union[int, np.ndarray],
    params: Optional[PhysicalParams] = None,
    spec: Optional[HermiteBasisSpec] = None,
    weights: Optional[LyapunovWeights] = None,
    horizon: float = 2.0,
    samples: int = 24,
    seed: int = 0,
    threads: int = 1,
) -> OptimizeResult:
    """Spectral abscissa and fitted E_M decay for every sampled wave vector.

    Each curve covers the scaled time |k|^2 t / (1 + |k|^2) in [0, horizon].

    Args:
        k_magnitudes: |k| samples.
        directions: unit vectors (n, 3), or a count of random directions.
        params: physical parameters.
        spec: Hermite truncation.
        weights: weights of E_M.
        horizon: scaled time horizon of each curve.
        samples: samples per curve.
        seed: seed of the random initial modes and directions.
        threads: worker processes.

    Returns:
        OptimizeResult with the per-sample arrays `k_vectors`, `k_norms`,
        `abscissae`, `normalized_rates`, `decay_rates`, `residuals` and
        `envelope_violations`, and the summaries `max_abscissa` and `rate_spread`
        (largest over smallest normalized rate).

    Raises:
        ValueError: for an empty or non-positive |k| list.
    """
    if len(k_magnitudes) == 0:
        raise ValueError("The mode-decay table needs at least one |k| sample.")
    if any(not k > 0 for k in k_magnitudes):
        raise ValueError("|k| samples must be positive.")
    if isinstance(directions, (int, np.integer)):
        directions = sample_directions(int(directions), seed)
    directions = np.asarray(directions, dtype=float)
    vectors = np.array([k * d for k in k_magnitudes for d in directions])
    params = params or PhysicalParams()
    spec = spec or HermiteBasisSpec()
    weights = weights or LyapunovWeights()
    tasks = [
        (vector, index, params, spec, weights, horizon, samples, seed)
        for index, vector in enumerate(vectors)
    ]
    logger.info("Fitting %d mode-decay curves (threads=%d)", len(tasks), threads)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            rows = list(executor.map(_mode_sample, tasks))
    else:
        rows = [_mode_sample(task) for task in tasks]

    def column(name: str) -> np.ndarray:
        return np.array([row[name] for row in rows])

    rates = column("normalized_rate")
    spread = float(rates.max() / rates.min()) if np.all(rates > 0) else np.inf
    return OptimizeResult(
        k_vectors=vectors,
        k_norms=np.linalg.norm(vectors, axis=1),
        abscissae=column("abscissa"),
        normalized_rates=rates,
        decay_rates=column("decay_rate"),
        residuals=column("residual"),
        envelope_violations=column("max_envelope_violation"),
        max_abscissa=float(column("abscissa").max()),
        rate_spread=spread,
    )


def _run_mode_decay(
    config: ExperimentConfig, out: Path, manifest: RunManifest, threads
):
    run = config.run
    table = mode_decay_table(
        run.k_magnitudes,
        run.n_directions,
        config.params,
        config.basis,
        config.weights.lyapunov,
        run.mode_horizon,
        run.mode_samples,
        config.seed,
        threads,
    )
    rows = np.column_stack(
        [
            table.k_norms,
            table.k_vectors,
            table.abscissae,
            table.normalized_rates,
            table.decay_rates,
            table.residuals,
            table.envelope_violations,
        ]
    )
    columns = (
        "k_norm",
        "k1",
        "k2",
        "k3",
        "abscissa",
        "normalized_rate",
        "decay_rate",
        "residual",
        "envelope_violation",
    )
    manifest.add_output(write_table(out / "mode_decay.csv", columns, rows))
    manifest.fits["mode_decay"] = {
        "max_abscissa": table.max_abscissa,
        "min_normalized_rate": float(table.normalized_rates.min()),
        "max_normalized_rate": float(table.normalized_rates.max()),
    }
    manifest.checks["spectral_abscissa"] = table.max_abscissa <= STABILITY_TOLERANCE
    manifest.checks["positive_rates"] = bool(np.all(table.normalized_rates > 0))
    manifest.checks["rate_spread"] = table.rate_spread < RATE_SPREAD_LIMIT


def _run_linear_decay(
    config: ExperimentConfig, out: Path, manifest: RunManifest, threads
):
    run = config.run
    times = np.geomspace(run.decay_t_min, run.decay_t_max, run.decay_times)
    norms = synthesize_linear_norms(
        run.profile,
        times,
        run.orders,
        config.quadrature,
        config.params,
        config.basis,
        threads=threads,
    )
    manifest.add_output(emit_decay_table(times, norms, out / "linear_decay.csv"))
    inside = config.fit_window.contains(times)
    exponents = {}
    for m in sorted(norms):
        fit = fit_power_law(times[inside], norms[m][inside])
        exponents[m] = fit.exponent
        manifest.fits[f"norm_m{m}"] = {
            "model": "power_law",
            "exponent": fit.exponent,
            "intercept": fit.intercept,
            "residual": fit.residual,
        }
        manifest.add_output(
            emit_envelope_table(
                times[inside], norms[m][inside], fit.envelope, out / f"fit_m{m}.csv"
            )
        )
        target, tolerance = DECAY_EXPONENTS[m]
        manifest.checks[f"exponent_m{m}"] = abs(fit.exponent - target) <= tolerance
        logger.info(
            "Order %d: fitted exponent %.4f (target %.2f)", m, fit.exponent, target
        )
    increment, tolerance = RATE_INCREMENT
    for m in sorted(exponents):
        if m + 1 in exponents:
            step = exponents[m] - exponents[m + 1]
            manifest.checks[f"rate_increment_m{m}"] = abs(step - increment) <= tolerance


def _run_torus(config: ExperimentConfig, out: Path, manifest: RunManifest, threads):
    run = config.run
    weights = config.weights.functional
    initial = admissible_initial_data(
        config.grid, config.basis, run.amplitude, config.seed, run.modes
    )
    report = FunctionalReport()
    trajectory = run_simulation(
        initial,
        run.t_final,
        config.stepper,
        config.params,
        torus_recorders(report, weights, config.basis.quadrature_order),
        run.observe_every,
    )
    manifest.add_output(emit_plot_data(report, out / "torus.csv"))
    trajectory_path = out / "trajectory.npz"
    trajectory.save(trajectory_path)
    manifest.add_output(trajectory_path)

    times = np.array(report.times)
    energy = report.series(FunctionalKind.ENERGY_E)
    manifest.checks["positivity"] = bool(min(report.positivity) > 0)
    manifest.checks["energy_monotone"] = bool(
        np.all(np.diff(energy) <= MONOTONE_TOLERANCE * energy[0])
    )
    duration = times[-1] - times[0]
    if duration > 0:
        scale = config.grid.volume * run.amplitude
        drift_rate = report.conservation_drift().max(axis=0) / (scale * duration)
        manifest.fits["conservation_drift_rate"] = dict(
            zip(("mass_f", "mass_rho", "momentum", "energy"), drift_rate.tolist())
        )
        manifest.checks["conservation"] = bool(np.all(drift_rate < DRIFT_LIMIT))
    else:
        manifest.checks["conservation"] = True

    inside = config.fit_window.contains(times)
    if inside.sum() >= 8:
        window = config.fit_window
        fit = report.fit_rate(FunctionalKind.ENERGY_E, window.start, window.stop)
        manifest.fits["E"] = {
            "model": "exponential",
            "rate": fit.rate,
            "intercept": fit.intercept,
            "residual": fit.residual,
        }
        manifest.add_output(
            emit_envelope_table(
                times[inside], energy[inside], fit.envelope, out / "fit_E.csv"
            )
        )
        manifest.checks["decay_rate"] = fit.rate > 0
        manifest.checks["fit_quality"] = fit.residual < FIT_RESIDUAL_LIMIT
    if len(trajectory) >= 3:
        lyapunov = lyapunov_check(
            trajectory,
            FunctionalKind.ENERGY_E,
            FunctionalKind.DISSIPATION_D,
            weights,
        )
        manifest.fits["lyapunov"] = {
            "max_ratio": lyapunov.max_ratio,
            "measured_lambda": lyapunov.measured_lambda,
        }
        manifest.checks["lyapunov"] = lyapunov.passed


def _run_picard(config: ExperimentConfig, out: Path, manifest: RunManifest, threads):
    run = config.run
    initial = admissible_initial_data(
        config.grid, config.basis, run.amplitude, config.seed, run.modes
    )
    result = picard_iterate(
        initial,
        run.picard_dt,
        config.params,
        run.picard_iterations,
        config.stepper.dealias,
    )
    iterations = np.arange(2, len(result.differences) + 2)
    manifest.add_output(
        write_table(
            out / "picard.csv",
            ("iteration", "h1_difference"),
            np.column_stack([iterations, result.differences]),
        )
    )
    ratios = result.ratios
    manifest.fits["picard"] = {
        "ratios": ratios.tolist(),
        "max_ratio": result.max_ratio,
        "resolved": result.resolved,
    }
    manifest.checks["contracting"] = result.contracting
    manifest.checks["ratios_decreasing"] = result.decreasing


def _run_diagnostics(
    config: ExperimentConfig, out: Path, manifest: RunManifest, threads
):
    run = config.run
    spec = config.basis
    grid: SpatialGrid = config.grid
    rng = np.random.default_rng(config.seed)

    errors = hermite_oracle_errors(spec.truncation, run.samples, config.seed)
    manifest.fits["oracle_errors"] = errors
    manifest.checks["hermite_oracles"] = max(errors.values()) <= ORACLE_TOLERANCE

    basis = hermite_basis(spec.truncation)
    coercivity = []
    for _ in range(2 * run.samples):
        c = random_coefficients(basis, rng)
        coercivity.append(
            (dissipation_form(c), macro_coercivity_floor(c), c.norm_squared())
        )
    coercivity_rows = np.array(coercivity)
    manifest.add_output(
        write_table(
            out / "coercivity.csv",
            ("dissipation", "macro_floor", "norm_squared"),
            coercivity_rows,
        )
    )
    margin = coercivity_rows[:, 0] - coercivity_rows[:, 1]
    manifest.checks["coercivity"] = bool(
        np.all(margin >= -COERCIVITY_TOLERANCE * coercivity_rows[:, 2])
    )
    micro_constant = micro_coercivity_constant(spec.truncation)
    manifest.fits["micro_coercivity"] = micro_constant
    manifest.checks["micro_coercivity"] = micro_constant > 0

    split = config.weights.functional.split
    split_rows = []
    interpolation_rows = []
    for sample in range(run.samples):
        field = SpectralField(grid, random_band_limited(grid, rng))
        split_rows.append(frequency_split_check(field, split).ratios)
        for p in run.lq_exponents:
            check = interpolation_check(field, p)
            interpolation_rows.append((sample, p, check.lhs, check.rhs, check.ratio))
    split_rows = np.array(split_rows)
    interpolation_rows = np.array(interpolation_rows)
    manifest.add_output(
        write_table(
            out / "frequency_split.csv",
            ("high_by_gradient", "high_by_hessian", "low_hessian_by_gradient"),
            split_rows,
        )
    )
    manifest.add_output(
        write_table(
            out / "interpolation.csv",
            ("sample", "p", "lhs", "rhs", "ratio"),
            interpolation_rows,
        )
    )
    manifest.checks["frequency_split"] = bool(
        np.all(split_rows <= 1.0 + STABILITY_TOLERANCE)
    )
    manifest.checks["interpolation"] = bool(
        np.all(interpolation_rows[:, 4] <= 1.0 + STABILITY_TOLERANCE)
    )

    state = admissible_initial_data(grid, spec, run.amplitude, config.seed, run.modes)
    values = evaluate_functionals(
        list(FunctionalKind), state, config.weights.functional
    )
    manifest.fits["functionals"] = {kind.name: value for kind, value in values.items()}


RUNNERS: Dict[str, Callable] = {
    "mode-decay": _run_mode_decay,
    "linear-decay": _run_linear_decay,
    "torus-sim": _run_torus,
    "picard-check": _run_picard,
    "diagnostics": _run_diagnostics,
}


def run_experiment(
    config: ExperimentConfig,
    threads: int = 1,
    output_dir: Optional[Union[str, Path]] = None,
) -> RunManifest:
    """Runs the configured experiment and writes its tables and manifest.

    The configuration is validated on construction, so nothing is written for an
    invalid one. Identical configurations give identical tables.

    Args:
        config: validated experiment configuration.
        threads: worker processes for independent modes.
        output_dir: overrides `config.output_dir`.

    Returns:
        the manifest, also written as manifest.json next to the outputs.

    Raises:
        ExperimentError: if the run fails after it started; the manifest written
            so far records the partial outputs and the error.
    """
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}.")
    out = Path(output_dir if output_dir is not None else config.output_dir)
    manifest = RunManifest(
        experiment=config.experiment, config=config.to_dict(), version=code_version()
    )
    logger.info("Starting %s into %s", config.experiment, out)
    start = time.perf_counter()
    out.mkdir(parents=True, exist_ok=True)
    config_path = out / "config.json"
    save_experiment_config(config, str(config_path))
    manifest.add_output(config_path)
    try:
        RUNNERS[config.experiment](config, out, manifest, threads)
    except Exception as error:
        manifest.error = f"{type(error).__name__}: {error}"
        manifest.wall_time = time.perf_counter() - start
        manifest.write(out)
        logger.error("%s failed: %s", config.experiment, manifest.error)
        raise ExperimentError(manifest.error, manifest) from error
    manifest.wall_time = time.perf_counter() - start
    missing = manifest.missing_outputs()
    if missing:
        manifest.error = f"Outputs missing or empty: {missing}"
        manifest.write(out)
        logger.error("%s failed: %s", config.experiment, manifest.error)
        raise ExperimentError(manifest.error, manifest)
    manifest.write(out)
    failed = [name for name, passed in manifest.checks.items() if not passed]
    logger.info(
        "Finished %s in %.1f s; failed checks: %s",
        config.experiment,
        manifest.wall_time,
        failed or "none",
    )
    return manifest


def refit_outputs(directory: Union[str, Path]) -> Dict[str, Dict[str, float]]:
    """Re-fits the tables of a finished run without recomputing them.

    Linear-decay tables get a power law per norm column and torus tables an
    exponential for E, both over the fit window stored in the run's manifest.

    Raises:
        ValueError: if the run has no table that can be re-fitted.
    """
    directory = Path(directory)
    manifest = load_manifest(directory)
    config = ExperimentConfig.from_dict(manifest.config)
    fits: Dict[str, Dict[str, float]] = {}
    if config.experiment == "linear-decay":
        columns, rows = read_table(directory / "linear_decay.csv")
        inside = config.fit_window.contains(rows[:, 0])
        for index, name in enumerate(columns[1:], start=1):
            fit = fit_power_law(rows[inside, 0], rows[inside, index])
            fits[name] = {"exponent": fit.exponent, "residual": fit.residual}
    elif config.experiment == "torus-sim":
        columns, rows = read_table(directory / "torus.csv")
        inside = config.fit_window.contains(rows[:, 0])
        energy = rows[inside, columns.index("E")]
        fit = fit_exponential(rows[inside, 0], energy)
        fits["E"] = {"rate": fit.rate, "residual": fit.residual}
    else:
        raise ValueError(f"{config.experiment} runs hold no decay table to re-fit.")
    for name, values in fits.items():
        logger.info("Re-fitted %s: %s", name, values)
    return fits
