################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from typing import NamedTuple, Tuple

import numpy as np

from ..nonlinear import KineticFluidState

ENERGY_OMEGA_WEIGHT = math.sqrt(6.0) / 2.0


class ConservationResiduals(NamedTuple):
    """Box integrals that stay constant along torus solutions."""

    mass_f: float
    mass_rho: float
    momentum: np.ndarray
    energy: float

    def scalars(self) -> Tuple[float, float, float, float]:
        """Mass, density, Euclidean norm of the momentum, and energy."""
        return (
            self.mass_f,
            self.mass_rho,
            float(np.linalg.norm(self.momentum)),
            self.energy,
        )

    def drift(self, reference: "ConservationResiduals") -> np.ndarray:
        """|self - reference| componentwise, with the momentum as a vector norm."""
        return np.array(
            [
                abs(self.mass_f - reference.mass_f),
                abs(self.mass_rho - reference.mass_rho),
                float(np.linalg.norm(self.momentum - reference.momentum)),
                abs(self.energy - reference.energy),
            ]
        )


def conservation_residuals(state: KineticFluidState) -> ConservationResiduals:
    """int a, int rho, int (b + (1 + rho) u) and
    int [(1 + rho)(theta + |u|^2 / 2) + sqrt(6)/2 omega] over the box."""
    grid = state.grid
    basis = state.basis
    coefficients = state.coefficients
    rho, u, theta = state.rho, state.u, state.theta
    b = coefficients[list(basis.unit_positions)]
    omega = coefficients[list(basis.second_shell_diagonal_positions)].sum(
        axis=0
    ) / math.sqrt(3.0)
    energy_density = (1.0 + rho) * (
        theta + 0.5 * np.sum(u * u, axis=0)
    ) + ENERGY_OMEGA_WEIGHT * omega
    return ConservationResiduals(
        mass_f=float(grid.integrate(coefficients[0])),
        mass_rho=float(grid.integrate(rho)),
        momentum=np.asarray(grid.integrate(b + (1.0 + rho) * u), dtype=float),
        energy=float(grid.integrate(energy_density)),
    )
