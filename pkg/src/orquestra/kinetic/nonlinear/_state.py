################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from dataclasses import dataclass
from typing import Dict, Mapping, Union

import numpy as np

from ..api import FluidState
from ..fourier import SpatialGrid
from ..hermite import HermiteBasis, HermiteCoeffVector

FLUID_SIZE = 5
DEFAULT_VACUUM_THRESHOLD = 0.1
SUPPORTED_SCHEMES = ("imex1", "imex2")


class VacuumGuardError(RuntimeError):
    """Raised when 1 + rho drops below the vacuum threshold."""


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping settings for the torus solver.

    Args:
        dt: time step.
        scheme: "imex1" (IMEX Euler) or "imex2" (second-order ARS).
        dealias: apply the 2/3 rule to every nonlinear product.
        cfl_safety: fraction of the explicit stability limit that dt may use.
        vacuum_threshold: smallest admissible value of 1 + rho.
    """

    dt: float = 5e-3
    scheme: str = "imex2"
    dealias: bool = True
    cfl_safety: float = 0.8
    vacuum_threshold: float = DEFAULT_VACUUM_THRESHOLD

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}.")
        if self.scheme not in SUPPORTED_SCHEMES:
            raise ValueError(
                f"Unknown scheme {self.scheme!r}; use one of {SUPPORTED_SCHEMES}."
            )
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1].")
        if not 0 < self.vacuum_threshold < 1:
            raise ValueError("vacuum_threshold must lie in (0, 1).")

    def to_dict(self) -> Dict[str, Union[float, str, bool]]:
        return {
            "dt": self.dt,
            "scheme": self.scheme,
            "dealias": self.dealias,
            "cfl_safety": self.cfl_safety,
            "vacuum_threshold": self.vacuum_threshold,
        }

    @classmethod
    def from_dict(cls, item: Mapping[str, Union[float, str, bool]]) -> "StepperConfig":
        unknown = set(item) - set(cls().to_dict())
        if unknown:
            raise ValueError(f"Unknown stepper settings: {sorted(unknown)}.")
        return cls(**item)  # type: ignore


@dataclass(frozen=True, eq=False)
class KineticFluidState:
    """Kinetic and fluid perturbations on a periodic grid at time t.

    `values` has shape (basis.size + 5, *grid.shape): the Hermite coefficients
    c_alpha(x) followed by rho, u_1, u_2, u_3 and theta, all real samples.
    """

    grid: SpatialGrid
    basis: HermiteBasis
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (self.basis.size + FLUID_SIZE,) + self.grid.shape
        if values.shape != expected:
            raise ValueError(
                f"Expected state values of shape {expected}, got {values.shape}."
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: SpatialGrid, basis: HermiteBasis, t: float = 0.0):
        return cls(grid, basis, np.zeros((basis.size + FLUID_SIZE,) + grid.shape), t)

    @classmethod
    def from_parts(
        cls,
        grid: SpatialGrid,
        f: HermiteCoeffVector,
        fluid: FluidState,
        t: float = 0.0,
    ) -> "KineticFluidState":
        values = np.concatenate(
            [
                f.values,
                fluid.rho[None],
                fluid.u,
                fluid.theta[None],
            ]
        )
        return cls(grid, f.basis, values, t)

    @property
    def n_herm(self) -> int:
        return self.basis.size

    @property
    def coefficients(self) -> np.ndarray:
        return self.values[: self.n_herm]

    @property
    def rho(self) -> np.ndarray:
        return self.values[self.n_herm]

    @property
    def u(self) -> np.ndarray:
        return self.values[self.n_herm + 1 : self.n_herm + 4]

    @property
    def theta(self) -> np.ndarray:
        return self.values[self.n_herm + 4]

    @property
    def f(self) -> HermiteCoeffVector:
        return HermiteCoeffVector(self.basis, self.coefficients)

    @property
    def fluid(self) -> FluidState:
        return FluidState(rho=self.rho, u=self.u, theta=self.theta)

    def with_values(self, values: np.ndarray, t: float = None) -> "KineticFluidState":
        return KineticFluidState(
            self.grid, self.basis, values, self.t if t is None else t
        )

    def scaled(self, factor: float) -> "KineticFluidState":
        return self.with_values(factor * self.values)

    def check_vacuum(self, threshold: float = DEFAULT_VACUUM_THRESHOLD):
        smallest = float(np.min(1.0 + self.rho))
        if not smallest >= threshold:
            raise VacuumGuardError(
                f"1 + rho reached {smallest:.3g} < {threshold} at t={self.t:.6g}."
            )
