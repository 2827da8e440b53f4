################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Whole-space norms of linear solutions by quadrature over wave vectors.

For data U0(x) = g(x) d, the solution is U_hat(t, k) = g_hat(|k|) A(t, k) d, so

    ||d^m A(t) U0||_{Z_2}^2 = (2 pi)^-3 int |k|^{2m} |g_hat(|k|)|^2 |A(t, k) d|^2 dk.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeResult

from ..api import PhysicalParams
from ..hermite import HermiteBasisSpec, hermite_basis
from ..linear import (
    ModeIntegrationConfig,
    ModeState,
    assemble_generator,
    evolve_mode_trajectory,
)
from ._profiles import DuhamelSource, InitialProfile, gaussian_lq_norm
from ._quadrature import KQuadrature

logger = logging.getLogger(__name__)

SUPPORTED_ORDERS = (0, 1, 2)
FOURIER_VOLUME = (2 * math.pi) ** 3


def synthesis_integration_config() -> ModeIntegrationConfig:
    return ModeIntegrationConfig.default(stiff=True)


def _mode_energies(
    k_vector: np.ndarray,
    direction: np.ndarray,
    times: np.ndarray,
    params: PhysicalParams,
    spec: HermiteBasisSpec,
    config: ModeIntegrationConfig,
    source_direction: Optional[np.ndarray] = None,
    source_window: Optional[tuple] = None,
) -> np.ndarray:
    """|A(t, k) d|^2 (or of the forced response from zero data) at every time."""
    gen = assemble_generator(k_vector, params, spec)
    state0 = ModeState.from_vector(k_vector, gen.basis, direction)
    source = None
    breakpoints: Sequence[float] = ()
    if source_direction is not None:
        t_on, t_off = source_window  # type: ignore

        def source(t):
            if t < t_on or (t_off is not None and t >= t_off):
                return np.zeros_like(source_direction)
            return source_direction

        breakpoints = tuple(b for b in (t_on, t_off) if b is not None and b > 0)
    trajectory = evolve_mode_trajectory(
        gen, state0, times, source=source, config=config, breakpoints=breakpoints
    )
    return np.sum(np.abs(trajectory) ** 2, axis=1)


def _node_task(arguments):
    return _mode_energies(*arguments)


def _map_nodes(tasks: List[tuple], threads: int) -> List[np.ndarray]:
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(_node_task, tasks, chunksize=8))
    return [_node_task(task) for task in tasks]


def _select_nodes(quad: KQuadrature, low_cutoff: Optional[float]):
    vectors, weights = quad.nodes()
    if low_cutoff is not None:
        keep = np.linalg.norm(vectors, axis=1) <= low_cutoff
        if not keep.any():
            raise ValueError(f"No quadrature node lies below |k| = {low_cutoff}.")
        vectors, weights = vectors[keep], weights[keep]
    return vectors, weights


def _reduce(weights: np.ndarray, factors: np.ndarray, energies: List[np.ndarray]):
    """Fixed-order compensated sum over nodes for every time."""
    stacked = np.stack(energies) * (weights * factors)[:, None]
    return np.array([math.fsum(column) for column in stacked.T]) / FOURIER_VOLUME


def synthesize_linear_norms(
    profile: InitialProfile,
    times: Sequence[float],
    orders: Sequence[int] = SUPPORTED_ORDERS,
    quad: Optional[KQuadrature] = None,
    params: Optional[PhysicalParams] = None,
    spec: Optional[HermiteBasisSpec] = None,
    config: Optional[ModeIntegrationConfig] = None,
    low_cutoff: Optional[float] = None,
    threads: int = 1,
) -> Dict[int, np.ndarray]:
    """||d^m A(t) U0||_{Z_2} for every m in `orders` and every time.

    Each mode is integrated once over all times; the orders only change the
    |k|^{2m} weights of the reduction.

    Args:
        profile: Gaussian initial data.
        times: non-decreasing non-negative times.
        orders: derivative orders, each in {0, 1, 2}.
        quad: wave-vector quadrature.
        params: physical parameters.
        spec: Hermite truncation.
        config: integration settings; Radau by default.
        low_cutoff: if given, only nodes with |k| <= low_cutoff contribute.
        threads: worker processes for the per-node integrations.

    Returns:
        mapping from m to the array of norms over `times`.
    """
    for m in orders:
        if m not in SUPPORTED_ORDERS:
            raise ValueError(f"Derivative order must be 0, 1 or 2, got {m}.")
    quad = quad or KQuadrature()
    params = params or PhysicalParams()
    spec = spec or HermiteBasisSpec()
    config = config or synthesis_integration_config()
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("Times must be non-negative.")
    order = np.argsort(times, kind="stable")
    sorted_times = times[order]

    direction = profile.direction(hermite_basis(spec.truncation))
    vectors, weights = _select_nodes(quad, low_cutoff)
    logger.info(
        "Synthesizing %d modes over %d times (threads=%d)",
        len(weights),
        len(times),
        threads,
    )
    tasks = [(k, direction, sorted_times, params, spec, config) for k in vectors]
    energies = _map_nodes(tasks, threads)

    k_norm = np.linalg.norm(vectors, axis=1)
    envelope = np.abs(profile.envelope_hat(k_norm)) ** 2
    norms = {}
    for m in orders:
        squared = _reduce(weights, envelope * k_norm ** (2 * m), energies)
        result = np.empty_like(squared)
        result[order] = np.sqrt(squared)
        norms[m] = result
    return norms


def synthesize_linear_norm(
    profile: InitialProfile,
    t: float,
    m: int = 0,
    quad: Optional[KQuadrature] = None,
    params: Optional[PhysicalParams] = None,
    spec: Optional[HermiteBasisSpec] = None,
    config: Optional[ModeIntegrationConfig] = None,
    low_cutoff: Optional[float] = None,
    refinement_tolerance: Optional[float] = None,
    threads: int = 1,
) -> float:
    """||d^m A(t) U0||_{Z_2} by quadrature over k.

    Raises:
        ValueError: if t < 0, m is not in {0, 1, 2}, or `refinement_tolerance` is
            given and the refined quadrature changes the result by more than that
            relative amount.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}.")
    quad = quad or KQuadrature()
    arguments = dict(
        orders=(m,),
        params=params,
        spec=spec,
        config=config,
        low_cutoff=low_cutoff,
        threads=threads,
    )
    value = float(synthesize_linear_norms(profile, [t], quad=quad, **arguments)[m][0])
    if refinement_tolerance is not None:
        refined = float(
            synthesize_linear_norms(
                profile, [t], quad=quad.refined(), **arguments
            )[m][0]
        )
        change = abs(refined - value) / max(abs(refined), np.finfo(float).tiny)
        if change > refinement_tolerance:
            raise ValueError(
                f"Quadrature too coarse: refinement changes the norm by {change:.3g} "
                f"(tolerance {refinement_tolerance:.3g})."
            )
    return value


def _kernel_integral(t: float, exponent: float, start: float, stop: float) -> float:
    """int_start^stop (1 + t - s)^(-exponent) ds for 0 <= start <= stop <= t."""
    if stop <= start:
        return 0.0
    upper, lower = 1.0 + t - start, 1.0 + t - stop
    if abs(exponent - 1.0) < 1e-14:
        return math.log(upper / lower)
    return (upper ** (1 - exponent) - lower ** (1 - exponent)) / (1 - exponent)


def _is_bounded(ratio: np.ndarray) -> bool:
    defined = ratio[~np.isnan(ratio)]
    if not np.all(np.isfinite(defined)):
        return False
    half = len(ratio) // 2
    first, second = ratio[:half], ratio[half:]
    if np.all(np.isnan(first)) or np.all(np.isnan(second)):
        return True
    return bool(np.nanmax(second) <= 2.0 * np.nanmax(first))


def verify_duhamel_bound(
    source: DuhamelSource,
    t_grid: Sequence[float],
    q: float = 2.0,
    quad: Optional[KQuadrature] = None,
    params: Optional[PhysicalParams] = None,
    spec: Optional[HermiteBasisSpec] = None,
    config: Optional[ModeIntegrationConfig] = None,
    threads: int = 1,
) -> OptimizeResult:
    """Compares the forced response with the convolution bound on its Z_2 norm.

    The left side is ||int_0^t A(t - s) S(s) ds||_{Z_2}^2 for the forced response
    from zero data. The right side is

        int_0^t (1 + t - s)^(-3(1/q - 1/2)) chi(s)^2 ds
            * (||g||_{L^q}^2 + ||g||_{L^2}^2) (sum_i ||G_i||^2 + ||nu^{-1/2} h||^2),

    with g the spatial envelope and chi the time window of the source.

    Returns:
        OptimizeResult with `times`, `lhs`, `rhs`, `ratio` (NaN where the right
        side vanishes), `max_ratio` and `bounded`. The ratio is bounded when it
        is finite and its maximum over the second half of the times is at most
        twice its maximum over the first half.

    Raises:
        ValueError: if the source violates the orthogonality conditions, or q is
            outside [1, 2].
    """
    if not 1 <= q <= 2:
        raise ValueError(f"q must lie in [1, 2], got {q}.")
    source.check_orthogonality()
    quad = quad or KQuadrature()
    params = params or PhysicalParams()
    spec = spec or HermiteBasisSpec(truncation=source.basis.truncation)
    if spec.truncation != source.basis.truncation:
        raise ValueError("Source and spec use different truncations.")
    config = config or synthesis_integration_config()
    times = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(times) <= 0) or np.any(times < 0):
        raise ValueError("t_grid must be increasing and non-negative.")

    basis = hermite_basis(spec.truncation)
    size = basis.size + 5
    source_vector = np.zeros(size, dtype=complex)
    source_vector[: basis.size] = source.kinetic_direction()
    zero = np.zeros(size, dtype=complex)
    vectors, weights = quad.nodes()
    tasks = [
        (
            k,
            zero,
            times,
            params,
            spec,
            config,
            source_vector,
            (source.t_on, source.t_off),
        )
        for k in vectors
    ]
    logger.info("Forced response over %d modes", len(tasks))
    energies = _map_nodes(tasks, threads)
    envelope = np.abs(source.envelope_hat(np.linalg.norm(vectors, axis=1))) ** 2
    lhs = _reduce(weights, envelope, energies)

    exponent = 3.0 * (1.0 / q - 0.5)
    source_norm = source.velocity_norm_squared()
    spatial = (
        gaussian_lq_norm(source.sigma, q) ** 2 + gaussian_lq_norm(source.sigma, 2) ** 2
    )
    rhs = np.empty_like(lhs)
    for index, t in enumerate(times):
        stop = t if source.t_off is None else min(t, source.t_off)
        start = min(source.t_on, t)
        rhs[index] = _kernel_integral(t, exponent, start, stop) * spatial * source_norm

    ratio = np.full_like(lhs, np.nan)
    positive = rhs > 0
    ratio[positive] = lhs[positive] / rhs[positive]
    bounded = _is_bounded(ratio)
    return OptimizeResult(
        times=times,
        lhs=lhs,
        rhs=rhs,
        ratio=ratio,
        max_ratio=float(np.nanmax(ratio)) if np.any(positive) else 0.0,
        bounded=bounded,
    )
