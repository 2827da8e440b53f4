################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from typing import Optional

import numpy as np

from ..fourier import SpatialGrid
from ..hermite import HermiteBasisSpec, hermite_basis
from ._state import KineticFluidState

MAX_RANDOM_DEGREE = 3
SQRT3 = math.sqrt(3.0)
ENERGY_OMEGA_WEIGHT = math.sqrt(6.0) / 2.0


def _random_low_mode_field(
    grid: SpatialGrid, rng: np.random.Generator, modes: int, amplitude: float
) -> np.ndarray:
    mask = np.all(np.abs(grid.integer_modes) <= modes, axis=0)
    spectral = np.zeros(grid.shape, dtype=complex)
    count = int(mask.sum())
    spectral[mask] = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    field = np.fft.ifftn(spectral).real
    return amplitude * field / np.max(np.abs(field))


def admissible_initial_data(
    grid: SpatialGrid,
    spec: Optional[HermiteBasisSpec] = None,
    amplitude: float = 1e-2,
    seed: int = 0,
    modes: int = 3,
) -> KineticFluidState:
    """Smooth random small data satisfying the four torus constraints exactly.

    Every fluid field and every Hermite coefficient of degree at most 3 is a random
    combination of the Fourier modes |m_j| <= `modes`, scaled to sup norm
    `amplitude`. Mean corrections then enforce

        int a = 0, int rho = 0, int (b + (1 + rho) u) = 0,
        int [(1 + rho)(theta + |u|^2 / 2) + sqrt(6)/2 omega] = 0.

    The energy constraint is met by shifting the three c_{2e_i} by a common
    constant.

    Raises:
        ValueError: if the amplitude is outside (0, 0.5] or the modes are not
            resolved by the 2/3 rule.
    """
    if not 0 < amplitude <= 0.5:
        raise ValueError(f"amplitude must lie in (0, 0.5], got {amplitude}.")
    if not 1 <= modes < grid.n / 3:
        raise ValueError(f"modes must lie in [1, n/3) = [1, {grid.n / 3:.3g}).")
    spec = spec or HermiteBasisSpec()
    basis = hermite_basis(spec.truncation)
    rng = np.random.default_rng(seed)
    state = KineticFluidState.zeros(grid, basis)
    values = state.values

    for position, order in enumerate(basis.orders):
        if order <= MAX_RANDOM_DEGREE:
            values[position] = _random_low_mode_field(grid, rng, modes, amplitude)
    for position in range(basis.size, basis.size + 5):
        values[position] = _random_low_mode_field(grid, rng, modes, amplitude)

    rho, u, theta = state.rho, state.u, state.theta
    values[0] -= grid.mean(values[0])
    rho -= grid.mean(rho)
    for axis, position in enumerate(basis.unit_positions):
        values[position] -= grid.mean(values[position] + (1.0 + rho) * u[axis])

    shell = list(basis.second_shell_diagonal_positions)
    omega = values[shell].sum(axis=0) / SQRT3
    kinetic_energy = 0.5 * np.sum(u * u, axis=0)
    energy = grid.mean(
        (1.0 + rho) * (theta + kinetic_energy) + ENERGY_OMEGA_WEIGHT * omega
    )
    values[shell] -= energy / (ENERGY_OMEGA_WEIGHT * SQRT3)
    return state
