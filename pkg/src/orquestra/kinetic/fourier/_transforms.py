################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from enum import Enum
from typing import Sequence, Union

import numpy as np

from ._grid import SpatialGrid, SpectralField

MAX_DERIVATIVE_ORDER = 3


class Direction(Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


def transform(
    field: SpectralField, direction: Union[Direction, str] = Direction.FORWARD
) -> SpectralField:
    """Moves a field between physical samples and Fourier coefficients.

    Raises:
        ValueError: if the field is already in the requested space.
    """
    direction = Direction(direction)
    if direction is Direction.FORWARD:
        if field.in_fourier_space:
            raise ValueError("Field is already in Fourier space.")
        return SpectralField(field.grid, field.grid.forward(field.values), True)
    if not field.in_fourier_space:
        raise ValueError("Field is already in physical space.")
    return SpectralField(field.grid, field.grid.inverse(field.values), False)


def derivative_symbol(grid: SpatialGrid, multi_index: Sequence[int]) -> np.ndarray:
    """(ik)^alpha on the grid for a spatial multi-index of length <= 3."""
    multi_index = tuple(int(m) for m in multi_index)
    if len(multi_index) > 3 or any(m < 0 for m in multi_index):
        raise ValueError(f"Invalid spatial multi-index {multi_index}.")
    if sum(multi_index) > MAX_DERIVATIVE_ORDER:
        raise ValueError(
            f"Derivative order {sum(multi_index)} exceeds {MAX_DERIVATIVE_ORDER}."
        )
    symbol = np.ones(grid.shape, dtype=complex)
    for axis, order in enumerate(multi_index):
        if order:
            symbol = symbol * (1j * grid.wavenumbers[axis]) ** order
    return symbol


def derivative(field: SpectralField, multi_index: Sequence[int]) -> SpectralField:
    """Spectral derivative d^alpha; the result stays in the space of the input."""
    symbol = derivative_symbol(field.grid, multi_index)
    coefficients = field.coefficients() * symbol
    if field.in_fourier_space:
        return field.with_values(coefficients)
    return SpectralField(field.grid, field.grid.inverse(coefficients))


def gradient(grid: SpatialGrid, values: np.ndarray) -> np.ndarray:
    """Gradient of real samples (*components, *shape) -> (3, *components, *shape)."""
    coefficients = grid.forward(values)
    return np.stack(
        [
            grid.inverse(1j * grid.wavenumbers[axis] * coefficients)
            for axis in range(3)
        ]
    )


def divergence(grid: SpatialGrid, vector: np.ndarray) -> np.ndarray:
    coefficients = grid.forward(vector)
    return grid.inverse(
        sum(1j * grid.wavenumbers[axis] * coefficients[axis] for axis in range(3))
    )


def laplacian(grid: SpatialGrid, values: np.ndarray) -> np.ndarray:
    return grid.inverse(-grid.k_squared * grid.forward(values))
