################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple, Union

import numpy as np

from ._grid import SpatialGrid, SpectralField

SUPPORTED_SPLIT_MODES = ("sharp",)


@dataclass(frozen=True)
class FrequencySplitSpec:
    """Low/high frequency cut-off phi_0 = 1 on |k| <= cutoff / 2, phi_1 = 1 - phi_0."""

    cutoff: float = 2.0
    mode: str = "sharp"

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}.")
        if self.mode not in SUPPORTED_SPLIT_MODES:
            raise ValueError(
                f"Split mode {self.mode!r} not supported; use one of "
                f"{SUPPORTED_SPLIT_MODES}."
            )

    def low_mask(self, grid: SpatialGrid) -> np.ndarray:
        return grid.k_norm <= self.cutoff / 2

    def to_dict(self) -> Dict[str, Union[float, str]]:
        return {"cutoff": self.cutoff, "mode": self.mode}

    @classmethod
    def from_dict(cls, item: Mapping[str, Union[float, str]]) -> "FrequencySplitSpec":
        unknown = set(item) - {"cutoff", "mode"}
        if unknown:
            raise ValueError(f"Unknown frequency split settings: {sorted(unknown)}.")
        return cls(
            cutoff=float(item.get("cutoff", 2.0)), mode=str(item.get("mode", "sharp"))
        )


def split_values(
    grid: SpatialGrid, values: np.ndarray, spec: FrequencySplitSpec
) -> Tuple[np.ndarray, np.ndarray]:
    """Splits real samples into their low and high frequency parts."""
    coefficients = grid.forward(values)
    mask = spec.low_mask(grid)
    low = grid.inverse(coefficients * mask)
    return low, values - low


def frequency_split(
    field: SpectralField, spec: FrequencySplitSpec
) -> Tuple[SpectralField, SpectralField]:
    """Returns (g^L, g^H) with g^L + g^H = g, both in the space of the input."""
    mask = spec.low_mask(field.grid)
    if field.in_fourier_space:
        low = field.values * mask
        return field.with_values(low), field.with_values(field.values * ~mask)
    low, high = split_values(field.grid, field.values, spec)
    return field.with_values(low), field.with_values(high)
