################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class FluidState:
    """Fluid perturbation fields sampled on a spatial grid.

    Args:
        rho: density perturbation, shape equal to the grid shape.
        u: velocity perturbation, shape (3, *grid_shape). The velocity always has three
            components, independently of the spatial dimension.
        theta: temperature perturbation, shape equal to the grid shape.
    """

    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho)
        u = np.asarray(self.u)
        theta = np.asarray(self.theta)
        if u.shape != (3,) + rho.shape or theta.shape != rho.shape:
            raise ValueError(
                f"Inconsistent fluid shapes: rho {rho.shape}, u {u.shape}, "
                f"theta {theta.shape}."
            )
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "theta", theta)

    @property
    def shape(self):
        return self.rho.shape

    @classmethod
    def zeros(cls, shape) -> "FluidState":
        shape = tuple(shape)
        return cls(np.zeros(shape), np.zeros((3,) + shape), np.zeros(shape))

    def scaled(self, factor: float) -> "FluidState":
        return FluidState(factor * self.rho, factor * self.u, factor * self.theta)
