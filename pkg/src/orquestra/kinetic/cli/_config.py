################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
import rapidjson as json

from ..api import PhysicalParams
from ..decay import InitialProfile, KQuadrature
from ..diagnostics import FunctionalWeights
from ..fourier import SpatialGrid
from ..hermite import HermiteBasisSpec
from ..linear import LyapunovWeights
from ..nonlinear import StepperConfig

EXPERIMENTS = ("mode-decay", "linear-decay", "torus-sim", "picard-check", "diagnostics")

AnyPath = Union[str, Path]
LoadSource = Union[AnyPath, IO[str]]


class ConfigError(ValueError):
    """Raised when an experiment configuration does not validate."""


def _reject_unknown(item: Mapping, allowed, block: str):
    unknown = set(item) - set(allowed)
    if unknown:
        raise ConfigError(f"Unknown keys in {block!r}: {sorted(unknown)}.")


@dataclass(frozen=True)
class WeightsBlock:
    functional: FunctionalWeights = field(default_factory=FunctionalWeights)
    lyapunov: LyapunovWeights = field(default_factory=LyapunovWeights)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "functional": self.functional.to_dict(),
            "lyapunov": self.lyapunov.to_dict(),
        }

    @classmethod
    def from_dict(cls, item: Mapping) -> "WeightsBlock":
        _reject_unknown(item, ("functional", "lyapunov"), "weights")
        return cls(
            functional=FunctionalWeights.from_dict(item.get("functional", {})),
            lyapunov=LyapunovWeights.from_dict(item.get("lyapunov", {})),
        )


@dataclass(frozen=True)
class FitWindow:
    """Closed time interval used by the fits of an experiment; no stop means open."""

    start: float = 0.0
    stop: Optional[float] = None

    def __post_init__(self):
        if self.start < 0 or (self.stop is not None and self.stop <= self.start):
            raise ValueError(
                f"Fit window needs 0 <= start < stop, got [{self.start}, {self.stop}]."
            )

    def contains(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        inside = times >= self.start
        if self.stop is not None:
            inside &= times <= self.stop
        return inside

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {"start": self.start, "stop": self.stop}

    @classmethod
    def from_dict(cls, item: Mapping, default: Optional["FitWindow"] = None):
        default = default or cls()
        _reject_unknown(item, ("start", "stop"), "fit_window")
        stop = item.get("stop", default.stop)
        return cls(
            start=float(item.get("start", default.start)),
            stop=None if stop is None else float(stop),
        )


@dataclass(frozen=True)
class RunSettings:
    """Experiment-specific knobs.

    Args:
        t_final: end time of torus runs.
        observe_every: spacing of torus observations.
        amplitude: sup norm of random initial data (torus runs, Picard checks).
        modes: highest integer mode of random initial data.
        k_magnitudes: |k| samples of the mode-decay table.
        n_directions: number of directions per |k| in the mode-decay table.
        mode_horizon: mode-decay horizon in the scaled time |k|^2 t / (1 + |k|^2).
        mode_samples: samples per mode-decay curve.
        decay_times: number of log-spaced synthesis times.
        decay_t_min: first synthesis time.
        decay_t_max: last synthesis time.
        orders: derivative orders of the linear-decay table.
        picard_dt: time step of the Picard check.
        picard_iterations: Picard iterations, at least 4 so that two ratios exist.
        samples: random inputs per diagnostics check.
        lq_exponents: exponents p of the interpolation check.
        profile: Gaussian initial data of the linear-decay synthesis.
    """

    t_final: float = 20.0
    observe_every: float = 0.5
    amplitude: float = 1e-2
    modes: int = 3
    k_magnitudes: Tuple[float, ...] = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
    n_directions: int = 6
    mode_horizon: float = 2.0
    mode_samples: int = 24
    decay_times: int = 20
    decay_t_min: float = 1.0
    decay_t_max: float = 1e3
    orders: Tuple[int, ...] = (0, 1, 2)
    picard_dt: float = 1e-2
    picard_iterations: int = 5
    samples: int = 100
    lq_exponents: Tuple[float, ...] = (2.0, 3.0, 4.0, 6.0)
    profile: InitialProfile = field(default_factory=InitialProfile)

    def __post_init__(self):
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative.")
        if not self.observe_every > 0:
            raise ValueError("observe_every must be positive.")
        if not 0 < self.amplitude <= 0.5:
            raise ValueError("amplitude must lie in (0, 0.5].")
        if any(not k > 0 for k in self.k_magnitudes):
            raise ValueError("k_magnitudes must be positive.")
        if self.n_directions < 1 or self.mode_samples < 8 or self.decay_times < 8:
            raise ValueError(
                "Need n_directions >= 1 and at least 8 mode and decay samples."
            )
        if not 0 < self.decay_t_min < self.decay_t_max:
            raise ValueError("Need 0 < decay_t_min < decay_t_max.")
        if any(m not in (0, 1, 2) for m in self.orders) or not self.orders:
            raise ValueError("orders must be a non-empty subset of {0, 1, 2}.")
        if not self.picard_dt > 0 or self.picard_iterations < 4:
            raise ValueError("Need picard_dt > 0 and picard_iterations >= 4.")
        if self.samples < 1:
            raise ValueError("samples must be positive.")
        if any(not 2 <= p <= 6 for p in self.lq_exponents):
            raise ValueError("lq_exponents must lie in [2, 6].")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t_final": self.t_final,
            "observe_every": self.observe_every,
            "amplitude": self.amplitude,
            "modes": self.modes,
            "k_magnitudes": list(self.k_magnitudes),
            "n_directions": self.n_directions,
            "mode_horizon": self.mode_horizon,
            "mode_samples": self.mode_samples,
            "decay_times": self.decay_times,
            "decay_t_min": self.decay_t_min,
            "decay_t_max": self.decay_t_max,
            "orders": list(self.orders),
            "picard_dt": self.picard_dt,
            "picard_iterations": self.picard_iterations,
            "samples": self.samples,
            "lq_exponents": list(self.lq_exponents),
            "profile": self.profile.to_dict(),
        }

    @classmethod
    def from_dict(cls, item: Mapping, default: Optional["RunSettings"] = None):
        default = default or cls()
        _reject_unknown(item, default.to_dict(), "run")
        values: Dict[str, Any] = {}
        for key, value in item.items():
            if key == "profile":
                values[key] = InitialProfile.from_dict(value)
            elif key in ("k_magnitudes", "lq_exponents"):
                values[key] = tuple(float(entry) for entry in value)
            elif key == "orders":
                values[key] = tuple(int(entry) for entry in value)
            else:
                values[key] = type(getattr(default, key))(value)
        return replace(default, **values)


_DEFAULT_WINDOWS = {
    "mode-decay": FitWindow(),
    "linear-decay": FitWindow(10.0, 1e3),
    "torus-sim": FitWindow(2.0, 20.0),
    "picard-check": FitWindow(),
    "diagnostics": FitWindow(),
}


def _default_grid(experiment: str) -> SpatialGrid:
    if experiment == "diagnostics":
        return SpatialGrid(dim=3, n=16)
    if experiment == "picard-check":
        return SpatialGrid(dim=1, n=32)
    return SpatialGrid(dim=1, n=64)


def _default_stepper(experiment: str) -> StepperConfig:
    if experiment == "torus-sim":
        return StepperConfig(dt=2e-3)
    return StepperConfig()


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one reproducible run.

    Every block is a validated value object; building an `ExperimentConfig` thus
    validates everything before any computation starts.
    """

    experiment: str
    grid: SpatialGrid
    basis: HermiteBasisSpec = field(default_factory=HermiteBasisSpec)
    params: PhysicalParams = field(default_factory=PhysicalParams)
    weights: WeightsBlock = field(default_factory=WeightsBlock)
    quadrature: KQuadrature = field(default_factory=KQuadrature)
    fit_window: FitWindow = field(default_factory=FitWindow)
    stepper: StepperConfig = field(default_factory=StepperConfig)
    run: RunSettings = field(default_factory=RunSettings)
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"Unknown experiment {self.experiment!r}; use one of {EXPERIMENTS}."
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError(
                f"seed must be an unsigned 64-bit integer, got {self.seed}."
            )
        if self.experiment == "mode-decay" and not self.run.k_magnitudes:
            raise ConfigError("mode-decay needs at least one |k| sample.")
        if self.experiment in ("torus-sim", "picard-check", "diagnostics"):
            if not 1 <= self.run.modes < self.grid.n / 3:
                raise ConfigError(
                    f"modes must lie in [1, n/3) = [1, {self.grid.n / 3:.3g}), "
                    f"got {self.run.modes}."
                )
        if self.basis.truncation < 3:
            raise ConfigError("Experiments need a Hermite truncation of at least 3.")

    @classmethod
    def default(cls, experiment: str) -> "ExperimentConfig":
        if experiment not in EXPERIMENTS:
            raise ConfigError(
                f"Unknown experiment {experiment!r}; use one of {EXPERIMENTS}."
            )
        return cls(
            experiment=experiment,
            grid=_default_grid(experiment),
            fit_window=_DEFAULT_WINDOWS[experiment],
            stepper=_default_stepper(experiment),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "grid": self.grid.to_dict(),
            "basis": self.basis.to_dict(),
            "params": self.params.to_dict(),
            "weights": self.weights.to_dict(),
            "quadrature": self.quadrature.to_dict(),
            "fit_window": self.fit_window.to_dict(),
            "stepper": self.stepper.to_dict(),
            "run": self.run.to_dict(),
        }

    @classmethod
    def from_dict(cls, item: Mapping) -> "ExperimentConfig":
        """Builds a config, filling absent blocks with the experiment's defaults.

        Raises:
            ConfigError: for unknown keys, a missing experiment name or any block
                that does not validate.
        """
        if not isinstance(item, Mapping):
            raise ConfigError("An experiment configuration must be a JSON object.")
        _reject_unknown(item, cls.default("diagnostics").to_dict(), "config")
        if "experiment" not in item:
            raise ConfigError("The configuration does not name an experiment.")
        try:
            default = cls.default(item["experiment"])
            return cls(
                experiment=default.experiment,
                seed=int(item.get("seed", default.seed)),
                output_dir=str(item.get("output_dir", default.output_dir)),
                grid=_block(SpatialGrid, item, "grid", default.grid),
                basis=_block(
                    HermiteBasisSpec, item, "basis", default.basis, merge=False
                ),
                params=_block(PhysicalParams, item, "params", default.params),
                weights=_block(WeightsBlock, item, "weights", default.weights),
                quadrature=_block(KQuadrature, item, "quadrature", default.quadrature),
                fit_window=FitWindow.from_dict(
                    item.get("fit_window", {}), default.fit_window
                ),
                stepper=_block(StepperConfig, item, "stepper", default.stepper),
                run=RunSettings.from_dict(item.get("run", {}), default.run),
            )
        except ConfigError:
            raise
        except (ValueError, TypeError, KeyError) as error:
            raise ConfigError(str(error)) from error

    def with_overrides(
        self, seed: Optional[int] = None, output_dir: Optional[str] = None
    ) -> "ExperimentConfig":
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if output_dir is not None:
            changes["output_dir"] = output_dir
        return replace(self, **changes)


def _block(block_type, item: Mapping, key: str, default, merge: bool = True):
    """Block `key` of `item` over the experiment default.

    With `merge` off the block is read on its own, for blocks whose defaults derive
    from other fields.
    """
    if key not in item:
        return default
    block = item[key]
    if not isinstance(block, Mapping):
        raise ConfigError(f"Block {key!r} must be a JSON object.")
    _reject_unknown(block, default.to_dict(), key)
    if not merge:
        return block_type.from_dict(block)
    return block_type.from_dict({**default.to_dict(), **block})


def load_experiment_config(file: LoadSource) -> ExperimentConfig:
    """Loads an experiment configuration from a path or a file-like object.

    Raises:
        ConfigError: if the document is not valid JSON or does not validate.
    """
    try:
        if isinstance(file, (str, Path)):
            with open(file, "r") as f:
                data = json.load(f)
        else:
            data = json.load(file)
    except json.JSONDecodeError as error:
        raise ConfigError(f"Malformed configuration: {error}") from error
    return ExperimentConfig.from_dict(data)


def save_experiment_config(config: ExperimentConfig, file: LoadSource):
    """Writes the configuration as indented JSON to a path or a file-like object."""
    if isinstance(file, (str, Path)):
        with open(file, "w") as f:
            json.dump(config.to_dict(), f, indent=2)
    else:
        json.dump(config.to_dict(), file, indent=2)
