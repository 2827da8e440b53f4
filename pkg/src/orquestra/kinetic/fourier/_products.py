################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import numpy as np

from ._grid import SpatialGrid, SpectralField, check_same_grid


def dealiased_product(grid: SpatialGrid, first: np.ndarray, second: np.ndarray):
    """Pointwise product of real samples under the 2/3 rule.

    Both factors and the product are truncated to the retained modes.
    """
    return grid.dealias(grid.dealias(first) * grid.dealias(second))


def dealias_product(first: SpectralField, second: SpectralField) -> SpectralField:
    check_same_grid(first, second)
    grid = first.grid
    product = SpectralField(
        grid, dealiased_product(grid, first.physical(), second.physical())
    )
    if first.in_fourier_space:
        return SpectralField(grid, grid.forward(product.values), True)
    return product
