################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import OptimizeResult

from ..fourier import FrequencySplitSpec, SpatialGrid, SpectralField, lp_norm_values
from ..hermite import HermiteCoeffVector
from ..nonlinear import KineticFluidState, Trajectory
from ._functionals import (
    FunctionalKind,
    FunctionalWeights,
    as_functional_kind,
    evaluate_functionals,
)

INTERPOLATION_TOLERANCE = 1e-10


def lyapunov_check(
    trajectory: Union[Trajectory, Sequence[KineticFluidState]],
    kind_e: Union[FunctionalKind, str] = FunctionalKind.ENERGY_E,
    kind_d: Union[FunctionalKind, str] = FunctionalKind.DISSIPATION_D,
    weights: Optional[FunctionalWeights] = None,
) -> OptimizeResult:
    """Checks dE/dt <= -lambda D along observed snapshots.

    dE/dt is the centered second-order difference at interior observation times.

    Returns:
        OptimizeResult with `times`, `energy`, `dissipation`, `derivative`
        (interior times only), `ratios` ((dE/dt) / D, NaN where E = D = 0),
        `max_ratio`, `measured_lambda` (= -max_ratio) and `passed`. An all-zero
        trajectory passes vacuously.

    Raises:
        ValueError: for fewer than three snapshots, or D = 0 at an interior time
            where E does not vanish.
    """
    if isinstance(trajectory, Trajectory):
        states = trajectory.states
    else:
        states = list(trajectory)
    if len(states) < 3:
        raise ValueError("A Lyapunov check needs at least three observation times.")
    kind_e, kind_d = as_functional_kind(kind_e), as_functional_kind(kind_d)
    times = np.array([state.t for state in states])
    energy = np.empty(len(states))
    dissipation = np.empty(len(states))
    for index, state in enumerate(states):
        values = evaluate_functionals([kind_e, kind_d], state, weights)
        energy[index], dissipation[index] = values[kind_e], values[kind_d]

    derivative = np.gradient(energy, times)[1:-1]
    interior_e, interior_d = energy[1:-1], dissipation[1:-1]
    ratios = np.full(len(derivative), np.nan)
    for index, (e_value, d_value) in enumerate(zip(interior_e, interior_d)):
        if d_value > 0:
            ratios[index] = derivative[index] / d_value
        elif e_value != 0:
            raise ValueError(
                f"Dissipation vanishes at t={times[index + 1]:.6g} "
                f"while E={e_value:.3g}."
            )
    defined = ratios[~np.isnan(ratios)]
    max_ratio = float(defined.max()) if len(defined) else 0.0
    return OptimizeResult(
        times=times,
        energy=energy,
        dissipation=dissipation,
        derivative=derivative,
        ratios=ratios,
        max_ratio=max_ratio,
        measured_lambda=-max_ratio,
        passed=bool(max_ratio < 0) if len(defined) else True,
    )


def interpolation_exponent(p: float) -> float:
    """zeta with 1/p = zeta/2 + (1 - zeta)/6."""
    return (6.0 - p) / (2.0 * p)


def _norms(field, grid: Optional[SpatialGrid], p: float) -> float:
    if isinstance(field, SpectralField):
        values, grid = field.physical(), field.grid
    elif isinstance(field, HermiteCoeffVector):
        if grid is None:
            raise ValueError("A grid is required for coefficient collections.")
        per_coefficient = lp_norm_values(grid, field.values, p)
        return float(np.sqrt(np.sum(per_coefficient**2)))
    else:
        values = np.asarray(field)
        if grid is None:
            raise ValueError("A grid is required for raw sample arrays.")
    leading = values.ndim - grid.dim
    if leading:
        values = np.sqrt(np.sum(np.abs(values) ** 2, axis=tuple(range(leading))))
    return float(lp_norm_values(grid, values, p))


def interpolation_check(
    field: Union[SpectralField, HermiteCoeffVector, np.ndarray],
    p: float,
    grid: Optional[SpatialGrid] = None,
) -> OptimizeResult:
    """Grid form of ||g||_{L^p} <= ||g||_{L^2}^zeta ||g||_{L^6}^(1 - zeta).

    Coefficient collections use the l^2 sum over Hermite coefficients of spatial
    norms, for which the same inequality holds.

    Returns:
        OptimizeResult with `p`, `zeta`, `lhs`, `rhs`, `ratio` and `holds`
        (ratio <= 1 + 1e-10).

    Raises:
        ValueError: if p lies outside [2, 6].
    """
    if not 2 <= p <= 6:
        raise ValueError(f"p must lie in [2, 6], got {p}.")
    zeta = interpolation_exponent(p)
    lhs = _norms(field, grid, p)
    rhs = _norms(field, grid, 2.0) ** zeta * _norms(field, grid, 6.0) ** (1.0 - zeta)
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
    return OptimizeResult(
        p=p,
        zeta=zeta,
        lhs=lhs,
        rhs=rhs,
        ratio=ratio,
        holds=bool(ratio <= 1.0 + INTERPOLATION_TOLERANCE),
    )


def frequency_split_check(
    field: Union[SpectralField, np.ndarray],
    split: Optional[FrequencySplitSpec] = None,
    grid: Optional[SpatialGrid] = None,
) -> OptimizeResult:
    """Sharp-cutoff inequalities between the split parts and the derivatives.

    With r0 the cutoff, checks

        ||g^H|| <= (2 / r0) ||grad g||,
        ||g^H|| <= (2 / r0)^2 ||grad^2 g||,
        ||grad^2 g^L|| <= r0 ||grad g^L||

    in L^2, with every norm evaluated exactly in Fourier space.

    Returns:
        OptimizeResult with `ratios` (left over right side for each inequality,
        0 where both sides vanish) and `holds`.
    """
    split = split or FrequencySplitSpec()
    if isinstance(field, SpectralField):
        grid, coefficients = field.grid, field.coefficients()
    else:
        if grid is None:
            raise ValueError("A grid is required for raw sample arrays.")
        coefficients = grid.forward(np.asarray(field))
    power = np.abs(coefficients) ** 2
    leading = power.ndim - grid.dim
    if leading:
        power = power.sum(axis=tuple(range(leading)))
    low = split.low_mask(grid)
    k_squared = grid.k_squared

    def norm(weight, mask):
        return math.sqrt(float(np.sum((weight * power)[mask])))

    everywhere = np.ones(grid.shape, dtype=bool)
    high_part = norm(1.0, ~low)
    pairs = [
        (high_part, 2.0 / split.cutoff * norm(k_squared, everywhere)),
        (high_part, (2.0 / split.cutoff) ** 2 * norm(k_squared**2, everywhere)),
        (norm(k_squared**2, low), split.cutoff * norm(k_squared, low)),
    ]
    ratios = np.array(
        [lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf) for lhs, rhs in pairs]
    )
    return OptimizeResult(
        ratios=ratios, holds=bool(np.all(ratios <= 1.0 + INTERPOLATION_TOLERANCE))
    )
