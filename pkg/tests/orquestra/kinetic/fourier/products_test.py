################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import numpy as np
import pytest

from orquestra.kinetic.fourier import (
    FrequencySplitSpec,
    SpatialGrid,
    SpectralField,
    dealias_product,
    dealiased_product,
    frequency_split,
    split_values,
    transform,
)
from orquestra.kinetic.testing import random_band_limited, truncated_convolution_oracle


@pytest.mark.parametrize("seed", range(3))
def test_dealiased_product_matches_direct_convolution(seed):
    # Given
    grid = SpatialGrid(dim=1, n=24)
    rng = np.random.default_rng(seed)
    first = rng.standard_normal(grid.shape)
    second = rng.standard_normal(grid.shape)

    # When
    product = grid.forward(dealiased_product(grid, first, second))

    # Then
    expected = truncated_convolution_oracle(
        grid, grid.forward(first), grid.forward(second)
    )
    np.testing.assert_allclose(product, expected, atol=1e-9)


def test_product_of_band_limited_fields_is_exact():
    grid = SpatialGrid(dim=2, n=24)
    rng = np.random.default_rng(1)
    first = random_band_limited(grid, rng, max_mode=3)
    second = random_band_limited(grid, rng, max_mode=3)
    np.testing.assert_allclose(
        dealiased_product(grid, first, second), first * second, atol=1e-10
    )


def test_dealias_product_keeps_fourier_representation():
    grid = SpatialGrid(dim=1, n=16)
    x = grid.coordinates[0]
    first = transform(SpectralField(grid, np.cos(x)))
    result = dealias_product(first, first)
    assert result.in_fourier_space
    np.testing.assert_allclose(
        grid.inverse(result.values), np.cos(x) ** 2, atol=1e-12
    )


def test_oracle_is_one_dimensional():
    grid = SpatialGrid(dim=2, n=8)
    with pytest.raises(ValueError):
        truncated_convolution_oracle(grid, np.zeros(8), np.zeros(8))


class TestFrequencySplit:
    @pytest.fixture()
    def grid(self):
        return SpatialGrid(dim=1, n=16)

    def test_split_separates_modes(self, grid):
        # Given
        x = grid.coordinates[0]
        values = np.cos(x) + np.sin(3 * x)

        # When
        low, high = split_values(grid, values, FrequencySplitSpec(cutoff=2.0))

        # Then
        np.testing.assert_allclose(low, np.cos(x), atol=1e-12)
        np.testing.assert_allclose(high, np.sin(3 * x), atol=1e-12)

    @pytest.mark.parametrize("in_fourier_space", [False, True])
    def test_parts_sum_to_field(self, grid, in_fourier_space):
        rng = np.random.default_rng(3)
        values = rng.standard_normal(grid.shape)
        field = SpectralField(grid, values)
        if in_fourier_space:
            field = transform(field)
        low, high = frequency_split(field, FrequencySplitSpec(cutoff=5.0))
        assert low.in_fourier_space == in_fourier_space
        np.testing.assert_allclose(
            (low + high).physical(), values, atol=1e-12
        )

    @pytest.mark.parametrize("kwargs", [{"cutoff": 0.0}, {"mode": "smooth"}])
    def test_invalid_split_settings(self, kwargs):
        with pytest.raises(ValueError):
            FrequencySplitSpec(**kwargs)

    def test_dict_round_trip(self):
        spec = FrequencySplitSpec(cutoff=3.0)
        assert FrequencySplitSpec.from_dict(spec.to_dict()) == spec
