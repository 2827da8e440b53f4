################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Mapping, Tuple, Union

import numpy as np


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on the box [0, 2 pi L)^d.

    Args:
        dim: number of spatial dimensions, 1, 2 or 3.
        n: points per axis, even and at least 8.
        length: L, the box period divided by 2 pi. Wavenumbers are m / L with
            integer m in [-n/2, n/2).
    """

    dim: int = 3
    n: int = 16
    length: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}.")
        if self.n < 8 or self.n % 2:
            raise ValueError(f"n must be even and at least 8, got {self.n}.")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}.")

    def to_dict(self) -> Dict[str, Union[int, float]]:
        return {"dim": self.dim, "n": self.n, "length": self.length}

    @classmethod
    def from_dict(cls, item: Mapping[str, Union[int, float]]) -> "SpatialGrid":
        unknown = set(item) - {"dim", "n", "length"}
        if unknown:
            raise ValueError(f"Unknown grid settings: {sorted(unknown)}.")
        return cls(
            dim=int(item.get("dim", 3)),
            n=int(item.get("n", 16)),
            length=float(item.get("length", 1.0)),
        )

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def axes(self) -> Tuple[int, ...]:
        """Positions of the spatial axes in an array of shape (..., *shape)."""
        return tuple(range(-self.dim, 0))

    @property
    def period(self) -> float:
        return 2 * math.pi * self.length

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.period**self.dim

    @property
    def max_wavenumber(self) -> float:
        return self.n / (2 * self.length)

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Grid points, shape (dim, *shape)."""
        points = np.arange(self.n) * self.spacing
        return np.stack(np.meshgrid(*([points] * self.dim), indexing="ij"))

    @cached_property
    def integer_modes(self) -> np.ndarray:
        """Integer mode numbers m, shape (dim, *shape), in FFT ordering."""
        m = np.fft.fftfreq(self.n, d=1.0 / self.n)
        return np.stack(np.meshgrid(*([m] * self.dim), indexing="ij"))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Wave vectors k, shape (3, *shape); components beyond `dim` are zero."""
        k = np.zeros((3,) + self.shape)
        k[: self.dim] = self.integer_modes / self.length
        return k

    @cached_property
    def k_squared(self) -> np.ndarray:
        return np.sum(self.wavenumbers**2, axis=0)

    @cached_property
    def k_norm(self) -> np.ndarray:
        return np.sqrt(self.k_squared)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3 rule: keeps modes with |m_j| < n/3 on every axis."""
        return np.all(np.abs(self.integer_modes) < self.n / 3.0, axis=0)

    def forward(self, values: np.ndarray) -> np.ndarray:
        """g_hat(k) = integral of exp(-i x.k) g(x), by the rectangle rule."""
        return self.cell_volume * np.fft.fftn(values, axes=self.axes)

    def inverse(self, coefficients: np.ndarray, real: bool = True) -> np.ndarray:
        values = np.fft.ifftn(coefficients, axes=self.axes) / self.cell_volume
        return values.real if real else values

    def dealias(self, values: np.ndarray) -> np.ndarray:
        """Removes the modes outside the 2/3 rule from real samples."""
        return self.inverse(self.forward(values) * self.dealias_mask)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Periodic rectangle rule over the spatial axes."""
        return self.cell_volume * np.sum(values, axis=self.axes)

    def mean(self, values: np.ndarray) -> np.ndarray:
        return np.mean(values, axis=self.axes)

    def check_shape(self, values: np.ndarray, name: str = "field"):
        if tuple(values.shape[-self.dim :]) != self.shape:
            raise ValueError(
                f"{name} of shape {values.shape} does not live on a grid of shape "
                f"{self.shape}."
            )


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Samples of a scalar or vector field on a grid, in physical or Fourier space.

    `values` has shape (*components, *grid.shape). Physical samples are real for
    real fields; Fourier coefficients follow the convention of `SpatialGrid.forward`.
    """

    grid: SpatialGrid
    values: np.ndarray
    in_fourier_space: bool = False

    def __post_init__(self):
        values = np.asarray(self.values)
        self.grid.check_shape(values)
        object.__setattr__(self, "values", values)

    @property
    def component_shape(self) -> Tuple[int, ...]:
        return self.values.shape[: self.values.ndim - self.grid.dim]

    def physical(self) -> np.ndarray:
        if self.in_fourier_space:
            return self.grid.inverse(self.values)
        return self.values

    def coefficients(self) -> np.ndarray:
        if self.in_fourier_space:
            return self.values
        return self.grid.forward(self.values)

    def with_values(self, values: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, values, self.in_fourier_space)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        check_same_grid(self, other)
        if self.in_fourier_space != other.in_fourier_space:
            return SpectralField(self.grid, self.physical() + other.physical())
        return self.with_values(self.values + other.values)

    def __mul__(self, factor) -> "SpectralField":
        return self.with_values(self.values * factor)

    __rmul__ = __mul__


def check_same_grid(first: SpectralField, second: SpectralField):
    if first.grid != second.grid:
        raise ValueError(f"Grid mismatch: {first.grid} vs {second.grid}.")
