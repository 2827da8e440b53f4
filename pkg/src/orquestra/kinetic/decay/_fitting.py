################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import warnings
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

MIN_FIT_SAMPLES = 8


@dataclass(frozen=True)
class PowerLawFit:
    """values ~ exp(intercept) (1 + t)^exponent."""

    exponent: float
    intercept: float
    residual: float

    def envelope(self, times) -> np.ndarray:
        return np.exp(self.intercept) * (1.0 + np.asarray(times, dtype=float)) ** (
            self.exponent
        )


@dataclass(frozen=True)
class ExponentialFit:
    """values ~ exp(intercept - rate t)."""

    rate: float
    intercept: float
    residual: float

    def envelope(self, times) -> np.ndarray:
        return np.exp(self.intercept - self.rate * np.asarray(times, dtype=float))


def _validate_series(times, values, min_samples: int) -> Tuple[np.ndarray, np.ndarray]:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ValueError("times and values must be 1D arrays of equal length.")
    if len(times) < min_samples:
        raise ValueError(
            f"At least {min_samples} samples are needed, got {len(times)}."
        )
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing.")
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise ValueError("values must be finite and positive.")
    return times, values


def _linear_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), float(intercept), residual


def fit_power_law(times, values, min_samples: int = MIN_FIT_SAMPLES) -> PowerLawFit:
    """Least-squares slope of log(values) against log(1 + t).

    The residual is the largest deviation of log(values) from the fitted line.

    Raises:
        ValueError: for fewer than `min_samples` samples, non-increasing times or
            non-positive values.
    """
    times, values = _validate_series(times, values, min_samples)
    slope, intercept, residual = _linear_fit(np.log1p(times), np.log(values))
    return PowerLawFit(exponent=slope, intercept=intercept, residual=residual)


def fit_exponential(
    times, values, min_samples: int = MIN_FIT_SAMPLES
) -> ExponentialFit:
    """Least-squares fit of log(values) against t.

    The residual is relative: max |values / envelope - 1|.
    """
    times, values = _validate_series(times, values, min_samples)
    slope, intercept, _ = _linear_fit(times, np.log(values))
    fit = ExponentialFit(rate=-slope, intercept=intercept, residual=0.0)
    residual = float(np.max(np.abs(values / fit.envelope(times) - 1.0)))
    return ExponentialFit(rate=-slope, intercept=intercept, residual=residual)


def windowed_exponents(
    times, values, windows: Sequence[float], min_samples: int = MIN_FIT_SAMPLES
) -> List[PowerLawFit]:
    """Power-law fits on the windows [T, 10 T] for every T in `windows`.

    Windows with fewer than `min_samples` but at least two samples are still fitted
    with a warning.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    fits = []
    for start in windows:
        inside = (times >= start) & (times <= 10.0 * start)
        count = int(inside.sum())
        if count < 2:
            raise ValueError(f"Window [{start}, {10 * start}] holds {count} samples.")
        if count < min_samples:
            warnings.warn(
                f"Window [{start}, {10 * start}] holds only {count} samples; "
                f"{min_samples} were requested."
            )
        fits.append(fit_power_law(times[inside], values[inside], min_samples=2))
    return fits
