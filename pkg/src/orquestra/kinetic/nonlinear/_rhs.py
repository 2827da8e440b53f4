################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Tendency of the perturbation system on the torus, split for IMEX stepping.

The implicit part collects the stiff linear terms that are local in Fourier space:
the Fokker-Planck operator, the exchange couplings (u - b, sqrt(6) omega - 3 theta)
with their kinetic counterparts, viscosity and heat conduction. Everything else
(transport, the pressure-type couplings and every nonlinear term) is explicit.
"""
import math
from typing import Optional

import numpy as np

from ..api import PhysicalParams
from ..fourier import SpatialGrid, divergence, gradient, laplacian
from ..hermite import (
    HermiteBasis,
    LadderKind,
    apply_matrix,
    ladder_matrix,
    velocity_laplacian_matrix,
)
from ._state import KineticFluidState

SQRT2 = math.sqrt(2.0)


class SplitOperator:
    """Explicit and implicit parts of the tendency on a fixed grid and basis.

    All methods take and return real sample arrays shaped like
    `KineticFluidState.values`.

    Args:
        grid: periodic grid.
        basis: Hermite basis of the kinetic part.
        params: physical parameters.
        dealias: apply the 2/3 rule to the factors and the result of every product.
    """

    def __init__(
        self,
        grid: SpatialGrid,
        basis: HermiteBasis,
        params: Optional[PhysicalParams] = None,
        dealias: bool = True,
    ):
        self.grid = grid
        self.basis = basis
        self.params = params or PhysicalParams()
        self.dealias = dealias
        self.n_herm = basis.size
        self.b_positions = list(basis.unit_positions)
        self.shell_positions = list(basis.second_shell_diagonal_positions)
        self.orders = basis.orders.astype(float)
        truncation = basis.truncation
        self._mult_v = [
            ladder_matrix(LadderKind.MULT_V, axis, truncation) for axis in range(3)
        ]
        self.raise_matrices = [
            ladder_matrix(LadderKind.RAISE, axis, truncation) for axis in range(3)
        ]
        self.laplacian_v = velocity_laplacian_matrix(truncation)

    @property
    def shape(self):
        return (self.n_herm + 5,) + self.grid.shape

    def components(self, values: np.ndarray):
        n = self.n_herm
        return values[:n], values[n], values[n + 1 : n + 4], values[n + 4]

    def broadcast(self, vector: np.ndarray) -> np.ndarray:
        return vector.reshape((-1,) + (1,) * self.grid.dim)

    def _filtered(self, values: np.ndarray) -> np.ndarray:
        return self.grid.dealias(values) if self.dealias else values

    def transport(self, coefficients: np.ndarray) -> np.ndarray:
        """-sum_j MULT_V_j d_j c over the first `dim` velocity components."""
        grid = self.grid
        spectral = grid.forward(coefficients)
        total = np.zeros_like(spectral)
        for axis in range(grid.dim):
            total -= apply_matrix(
                self._mult_v[axis], 1j * grid.wavenumbers[axis] * spectral
            )
        return grid.inverse(total)

    def explicit_linear(self, values: np.ndarray) -> np.ndarray:
        """Transport and the gradient couplings of the linearized system."""
        grid = self.grid
        coefficients, rho, u, theta = self.components(values)
        result = np.zeros(self.shape)
        c_out, _, u_out, _ = self.components(result)
        c_out[:] = self.transport(coefficients)
        div_u = divergence(grid, u)
        result[self.n_herm] = -div_u
        u_out[:] = -gradient(grid, rho + theta)
        result[self.n_herm + 4] = -div_u
        return result

    def _implicit_spectral(self, spectral: np.ndarray) -> np.ndarray:
        params = self.params
        k = self.grid.wavenumbers
        k_squared = self.grid.k_squared
        coefficients, _, u, theta = self.components(spectral)
        b = coefficients[self.b_positions]
        shell = coefficients[self.shell_positions]

        result = np.zeros_like(spectral)
        c_out, _, u_out, _ = self.components(result)
        c_out[:] = -self.broadcast(self.orders) * coefficients
        c_out[self.b_positions] += u
        c_out[self.shell_positions] += SQRT2 * theta
        k_dot_u = np.sum(k * u, axis=0)
        u_out[:] = (
            -params.mu1 * k_squared * u
            - (params.mu1 + params.mu2) * k * k_dot_u
            - u
            + b
        )
        result[self.n_herm + 4] = (
            -params.kappa * k_squared * theta - 3.0 * theta + SQRT2 * shell.sum(axis=0)
        )
        return result

    def implicit(self, values: np.ndarray) -> np.ndarray:
        """Stiff linear part: L, the exchange couplings, viscosity and conduction."""
        grid = self.grid
        return grid.inverse(self._implicit_spectral(grid.forward(values)))

    def solve(self, values: np.ndarray, h: float) -> np.ndarray:
        """Solves (1 - h I) X = R exactly, mode by mode.

        The (u, b) block is reduced to a Sherman-Morrison solve in u, the
        (theta, c_{2e_i}) block to a scalar equation in theta. Every other
        coefficient is diagonal and rho does not appear in the implicit part.

        Raises:
            RuntimeError: if the solution is not finite.
        """
        if not h >= 0:
            raise ValueError(f"Implicit step must be non-negative, got {h}.")
        grid = self.grid
        params = self.params
        k = grid.wavenumbers
        k_squared = grid.k_squared
        spectral = grid.forward(values)
        coefficients, _, r_u, r_theta = self.components(spectral)
        r_b = coefficients[self.b_positions]
        r_shell = coefficients[self.shell_positions]

        solution = np.empty_like(spectral)
        x_c, _, x_u, _ = self.components(solution)
        x_c[:] = coefficients / (1.0 + h * self.broadcast(self.orders))
        solution[self.n_herm] = spectral[self.n_herm]

        alpha = 1.0 + h + h * params.mu1 * k_squared - h**2 / (1.0 + h)
        beta = h * (params.mu1 + params.mu2)
        rhs_u = r_u + h * r_b / (1.0 + h)
        k_dot_r = np.sum(k * rhs_u, axis=0)
        x_u[:] = (rhs_u - beta * k * k_dot_r / (alpha + beta * k_squared)) / alpha
        x_c[self.b_positions] = (r_b + h * x_u) / (1.0 + h)

        theta_diagonal = (
            1.0 + 3.0 * h + h * params.kappa * k_squared - 6.0 * h**2 / (1.0 + 2.0 * h)
        )
        x_theta = (
            r_theta + h * SQRT2 * r_shell.sum(axis=0) / (1.0 + 2.0 * h)
        ) / theta_diagonal
        solution[self.n_herm + 4] = x_theta
        x_c[self.shell_positions] = (r_shell + h * SQRT2 * x_theta) / (1.0 + 2.0 * h)

        result = grid.inverse(solution)
        if not np.all(np.isfinite(result)):
            raise RuntimeError("Implicit solve produced non-finite values.")
        return result

    def linear(self, values: np.ndarray) -> np.ndarray:
        return self.explicit_linear(values) + self.implicit(values)

    def heating(
        self,
        a: np.ndarray,
        b: np.ndarray,
        u: np.ndarray,
        theta: np.ndarray,
        grad_u: np.ndarray,
    ) -> np.ndarray:
        """|u|^2 - 2 u.b + a |u|^2 - 3 a theta + 2 mu1 |D(u)|^2 + mu2 (div u)^2."""
        params = self.params
        speed_squared = np.sum(u * u, axis=0)
        strain = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
        div_u = np.trace(grad_u)
        return (
            speed_squared
            - 2.0 * np.sum(u * b, axis=0)
            + a * speed_squared
            - 3.0 * a * theta
            + 2.0 * params.mu1 * np.sum(strain**2, axis=(0, 1))
            + params.mu2 * div_u**2
        )

    def nonlinear(self, values: np.ndarray) -> np.ndarray:
        """Every term of the tendency that is at least quadratic in the state."""
        grid = self.grid
        params = self.params
        if self.dealias:
            values = grid.dealias(values)
        coefficients, rho, u, theta = self.components(values)
        a = coefficients[0]
        b = coefficients[self.b_positions]
        exchange = SQRT2 * coefficients[self.shell_positions].sum(axis=0) - 3.0 * theta
        weight = 1.0 / (1.0 + rho)

        grad_rho = gradient(grid, rho)
        grad_theta = gradient(grid, theta)
        # grad_u[j, i] = d_j u_i
        grad_u = gradient(grid, u)
        div_u = np.trace(grad_u)
        viscous = params.mu1 * laplacian(grid, u)
        viscous = viscous + (params.mu1 + params.mu2) * gradient(grid, div_u)

        result = np.zeros(self.shape)
        c_out, _, u_out, _ = self.components(result)
        for axis in range(3):
            c_out += u[axis] * apply_matrix(self.raise_matrices[axis], coefficients)
        c_out += theta * apply_matrix(self.laplacian_v, coefficients)

        result[self.n_herm] = -np.sum(u * grad_rho, axis=0) - rho * div_u

        advection = np.einsum("j...,ji...->i...", u, grad_u)
        u_out[:] = (
            -advection
            - ((1.0 + theta) * weight - 1.0) * grad_rho
            + (weight - 1.0) * (viscous + b - u)
            - weight * a * u
        )

        result[self.n_herm + 4] = (
            -np.sum(u * grad_theta, axis=0)
            - theta * div_u
            + (weight - 1.0) * (exchange + params.kappa * laplacian(grid, theta))
            + weight * self.heating(a, b, u, theta, grad_u)
        )
        return self._filtered(result)

    def explicit(self, values: np.ndarray) -> np.ndarray:
        return self.explicit_linear(values) + self.nonlinear(values)

    def tendency(self, values: np.ndarray) -> np.ndarray:
        return self.explicit(values) + self.implicit(values)


def split_operator(
    state: KineticFluidState,
    params: Optional[PhysicalParams] = None,
    dealias: bool = True,
) -> SplitOperator:
    return SplitOperator(state.grid, state.basis, params, dealias)


def compute_rhs(
    state: KineticFluidState,
    params: Optional[PhysicalParams] = None,
    dealias: bool = True,
    vacuum_threshold: float = 0.1,
) -> np.ndarray:
    """Full tendency d/dt of the state, shaped like `state.values`.

    Raises:
        VacuumGuardError: if 1 + rho falls below `vacuum_threshold` somewhere.
    """
    state.check_vacuum(vacuum_threshold)
    return split_operator(state, params, dealias).tendency(state.values)


def linear_rhs(
    state: KineticFluidState, params: Optional[PhysicalParams] = None
) -> np.ndarray:
    """Tendency of the system linearized about equilibrium."""
    return split_operator(state, params).linear(state.values)
