################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeResult

from ..hermite import HermiteBasis, MultiIndex, hermite_basis, macro_projection_matrix
from ._evolution import ModeIntegrationConfig, evolve_mode_trajectory
from ._mode import ModeGenerator, ModeLayout, ModeState

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
MIN_FIT_SAMPLES = 8


@dataclass(frozen=True)
class LyapunovWeights:
    """Weights of the cross terms of E_M; all zero reduces E_M to |U|^2."""

    kappa1: float = 0.01
    kappa2: float = 0.01
    kappa3: float = 0.01

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "kappa3"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise ValueError(f"{name} must lie in [0, 1), got {value}.")

    def to_dict(self) -> Dict[str, float]:
        return {"kappa1": self.kappa1, "kappa2": self.kappa2, "kappa3": self.kappa3}

    @classmethod
    def from_dict(cls, item: Mapping[str, float]) -> "LyapunovWeights":
        unknown = set(item) - {"kappa1", "kappa2", "kappa3"}
        if unknown:
            raise ValueError(f"Unknown Lyapunov weights: {sorted(unknown)}.")
        return cls(**{key: float(value) for key, value in item.items()})


@lru_cache(maxsize=None)
def _micro_moment_rows(truncation: int):
    """Rows of Gamma_ij, Upsilon_i applied to (I - P) f, and of a, b, omega."""
    basis = hermite_basis(truncation)
    micro = np.eye(basis.size) - macro_projection_matrix(truncation)
    index = basis.index

    gamma = np.zeros((3, 3, basis.size))
    upsilon = np.zeros((3, basis.size))
    for i in range(3):
        gamma[i, i, index(MultiIndex.unit(i, 2))] = math.sqrt(2.0)
        for j in range(3):
            if j != i:
                gamma[i, j, index(MultiIndex.unit(i).shifted(j, 1))] = 1.0
                gamma[i, j, 0] = -1.0
                upsilon[i, index(MultiIndex.unit(i).shifted(j, 2))] = 1.0 / SQRT3
        upsilon[i, index(MultiIndex.unit(i, 3))] = 1.0
        upsilon[i, index(MultiIndex.unit(i))] = 2.0 / SQRT6

    b = np.zeros((3, basis.size))
    for axis, position in enumerate(basis.unit_positions):
        b[axis, position] = 1.0
    omega = np.zeros(basis.size)
    omega[list(basis.second_shell_diagonal_positions)] = 1.0 / SQRT3
    a = np.zeros(basis.size)
    a[0] = 1.0
    return gamma @ micro, upsilon @ micro, a, b, omega


def _real_pairing(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Hermitian H with U* H U = Re(first U | second U), (x|y) = x conj(y)."""
    product = np.outer(np.conj(second), first)
    return 0.5 * (product + product.conj().T)


def lyapunov_matrix(
    k: Sequence[float], basis: HermiteBasis, weights: LyapunovWeights
) -> np.ndarray:
    """Hermitian matrix Q(k) with E_M(U) = U* Q U.

    Raises:
        ValueError: if Q(k) is not positive definite for these weights.
    """
    k = np.asarray(k, dtype=float)
    layout = ModeLayout(basis)
    size = layout.size
    gamma, upsilon, a, b, omega = _micro_moment_rows(basis.truncation)

    def embed(row: np.ndarray) -> np.ndarray:
        full = np.zeros(size, dtype=complex)
        full[layout.f] = row
        return full

    cross = np.zeros((size, size), dtype=complex)
    for i in range(3):
        for j in range(3):
            symmetric_gradient = 1j * (k[i] * b[j] + k[j] * b[i])
            cross += _real_pairing(embed(symmetric_gradient), embed(gamma[i, j]))
        cross += _real_pairing(embed(1j * k[i] * omega), embed(upsilon[i]))
    flux = 1j * (SQRT6 / 5.0) * np.tensordot(k, upsilon, axes=1) - 1j * (k @ b)
    cross += weights.kappa1 * _real_pairing(embed(a), embed(flux))

    k_factor = 1.0 / (1.0 + float(k @ k))
    u_row = np.zeros((3, size), dtype=complex)
    u_row[:, layout.u] = np.eye(3)
    ik_rho = np.zeros((3, size), dtype=complex)
    ik_rho[:, layout.rho] = 1j * k
    acoustic = sum(_real_pairing(u_row[i], ik_rho[i]) for i in range(3))

    q = np.eye(size, dtype=complex) + k_factor * (
        weights.kappa2 * cross + weights.kappa3 * acoustic
    )
    smallest = float(np.linalg.eigvalsh(q)[0])
    if smallest <= 0:
        raise ValueError(
            f"Lyapunov weights {weights} give an indefinite E_M at |k|="
            f"{np.linalg.norm(k):.3g} (smallest eigenvalue {smallest:.3g})."
        )
    return q


def mode_lyapunov_EM(
    state: ModeState, weights: Optional[LyapunovWeights] = None
) -> float:
    weights = weights or LyapunovWeights()
    q = lyapunov_matrix(state.k, state.f_hat.basis, weights)
    vector = state.to_vector()
    return float(np.real(np.conj(vector) @ q @ vector))


def lyapunov_derivative(
    gen: ModeGenerator, state: ModeState, weights: Optional[LyapunovWeights] = None
) -> float:
    """d/dt E_M along the source-free flow, U* (Q A + A* Q) U."""
    weights = weights or LyapunovWeights()
    q = lyapunov_matrix(gen.k, gen.basis, weights)
    vector = state.to_vector()
    rate = q @ gen.matrix
    return float(np.real(np.conj(vector) @ (rate + rate.conj().T) @ vector))


def fit_mode_decay(
    gen: ModeGenerator,
    state0: ModeState,
    t_grid: Sequence[float],
    weights: Optional[LyapunovWeights] = None,
    config: Optional[ModeIntegrationConfig] = None,
) -> OptimizeResult:
    """Fits E_M(t) ~ E_M(0) exp(-c |k|^2 t / (1 + |k|^2)) along the free evolution.

    Returns:
        OptimizeResult with the entries:
            normalized_rate: the fitted c.
            decay_rate: c |k|^2 / (1 + |k|^2), the slope of -log E_M against t.
            envelope_rate: largest c' such that the one-sided envelope with c' holds
                at every sample.
            max_envelope_violation: max over samples of
                (E_M(t) - E_M(0) exp(-c s(t)))_+ / E_M(0).
            residual: max deviation of log E_M from the fitted line.
            times, energies: the sampled curve.

    Raises:
        ValueError: if t_grid has fewer than 8 increasing samples, k = 0 or
            E_M(0) = 0.
    """
    weights = weights or LyapunovWeights()
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < MIN_FIT_SAMPLES or np.any(np.diff(t_grid) <= 0):
        raise ValueError(
            f"t_grid must be increasing with at least {MIN_FIT_SAMPLES} samples."
        )
    k_squared = float(gen.k @ gen.k)
    if k_squared == 0:
        raise ValueError("The normalized decay rate is undefined at k = 0.")
    initial_energy = mode_lyapunov_EM(state0, weights)
    if initial_energy <= 0:
        raise ValueError("E_M(0) = 0; the decay rate is undefined.")

    trajectory = evolve_mode_trajectory(gen, state0, t_grid, config=config)
    q = lyapunov_matrix(gen.k, gen.basis, weights)
    energies = np.real(np.einsum("ti,ij,tj->t", np.conj(trajectory), q, trajectory))
    if np.any(energies <= 0):
        raise RuntimeError("E_M became non-positive along the trajectory.")

    scaled_time = k_squared * t_grid / (1.0 + k_squared)
    slope, intercept = np.polyfit(-scaled_time, np.log(energies), 1)
    fitted = intercept - slope * scaled_time
    residual = float(np.max(np.abs(np.log(energies) - fitted)))

    envelope = initial_energy * np.exp(-slope * scaled_time)
    violation = float(np.max(np.maximum(energies - envelope, 0.0)) / initial_energy)
    positive = scaled_time > 0
    envelope_rate = float(
        np.min(-np.log(energies[positive] / initial_energy) / scaled_time[positive])
    )
    logger.debug(
        "Mode |k|=%.3g: c=%.4g, envelope c'=%.4g",
        math.sqrt(k_squared),
        slope,
        envelope_rate,
    )
    return OptimizeResult(
        normalized_rate=float(slope),
        decay_rate=float(slope) * k_squared / (1.0 + k_squared),
        envelope_rate=envelope_rate,
        max_envelope_violation=violation,
        residual=residual,
        times=t_grid,
        energies=energies,
    )


def check_envelope(result: OptimizeResult, tolerance: float = 1e-8) -> bool:
    """Warns when the fitted envelope is exceeded beyond roundoff."""
    if result.max_envelope_violation > tolerance:
        warnings.warn(
            f"E_M exceeds the fitted envelope by {result.max_envelope_violation:.3g} "
            "relative to E_M(0)."
        )
        return False
    return True
