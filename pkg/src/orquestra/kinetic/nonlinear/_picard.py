################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Frozen-coefficient iteration behind local existence.

Given coefficients (u, rho, theta, a, b) from the previous iterate, the next iterate
solves a linear system over one backward-Euler step. The couplings u.v sqrt(M) and
theta (|v|^2 - 3) sqrt(M) act on the unknowns, so a zero previous iterate gives the
linearized system.
"""
import logging
import math
import warnings
from typing import List, Optional

import numpy as np
from scipy.optimize import OptimizeResult
from scipy.sparse.linalg import LinearOperator, gmres

from ..api import PhysicalParams
from ..fourier import divergence, gradient, laplacian
from ..hermite import apply_matrix
from ._rhs import SplitOperator
from ._state import DEFAULT_VACUUM_THRESHOLD, KineticFluidState

logger = logging.getLogger(__name__)

SOLVER_RTOL = 1e-12
# differences below this fraction of the iterate are at the solver noise level
CONVERGED_FLOOR = 1e-9


class FrozenOperator:
    """Linear operator Y -> A[previous] Y of the frozen-coefficient system."""

    def __init__(self, previous: KineticFluidState, split: SplitOperator):
        self.split = split
        grid = split.grid
        values = grid.dealias(previous.values) if split.dealias else previous.values
        coefficients, rho, u, theta = split.components(values)
        self.u = u
        self.theta = theta
        self.a = coefficients[0]
        self.rho = rho
        self.weight = 1.0 / (1.0 + rho)
        self.div_u = divergence(grid, u)
        b = coefficients[split.b_positions]
        self.source = np.zeros(split.shape)
        self.source[split.n_herm + 4] = self.weight * split.heating(
            self.a, b, u, theta, gradient(grid, u)
        )

    def _product(self, values: np.ndarray) -> np.ndarray:
        split = self.split
        return split.grid.dealias(values) if split.dealias else values

    def apply(self, values: np.ndarray) -> np.ndarray:
        split = self.split
        grid = split.grid
        params = split.params
        n = split.n_herm
        coefficients, rho, u, theta = split.components(values)
        result = split.linear(values)

        frozen_kinetic = np.zeros_like(coefficients)
        for axis in range(3):
            frozen_kinetic += self.u[axis] * apply_matrix(
                split.raise_matrices[axis], coefficients
            )
        frozen_kinetic += self.theta * apply_matrix(split.laplacian_v, coefficients)
        result[:n] += self._product(frozen_kinetic)

        grad_rho = gradient(grid, rho)
        grad_u = gradient(grid, u)
        div_u = np.trace(grad_u)
        result[n] -= self._product(
            np.sum(self.u * grad_rho, axis=0) + self.rho * div_u
        )

        b = coefficients[split.b_positions]
        viscous = params.mu1 * laplacian(grid, u)
        viscous = viscous + (params.mu1 + params.mu2) * gradient(grid, div_u)
        excess = self.weight - 1.0
        result[n + 1 : n + 4] += self._product(
            excess * (viscous + b - u)
            - self.weight * self.a * u
            - np.einsum("j...,ji...->i...", self.u, grad_u)
            - ((1.0 + self.theta) * self.weight - 1.0) * grad_rho
        )

        shells = coefficients[split.shell_positions].sum(axis=0)
        exchange = math.sqrt(2.0) * shells - 3.0 * theta
        result[n + 4] += self._product(
            excess * (params.kappa * laplacian(grid, theta) + exchange)
            - np.sum(self.u * gradient(grid, theta), axis=0)
            - theta * self.div_u
        )
        return result


def h1_norm(state_or_values, grid=None) -> float:
    """Grid H^1 norm summed over every component, by Plancherel."""
    if isinstance(state_or_values, KineticFluidState):
        grid = state_or_values.grid
        values = state_or_values.values
    else:
        values = np.asarray(state_or_values)
    spectral = grid.forward(values)
    weight = 1.0 + grid.k_squared
    return math.sqrt(float(np.sum(weight * np.abs(spectral) ** 2)) / grid.volume)


def picard_step(
    previous: KineticFluidState,
    iterate: KineticFluidState,
    dt: float,
    params: Optional[PhysicalParams] = None,
    dealias: bool = True,
    rtol: float = 1e-10,
    maxiter: int = 200,
) -> KineticFluidState:
    """One frozen-coefficient backward-Euler step from `iterate`.

    Solves (1 - dt A[previous]) Y = iterate + dt g(previous) with matrix-free GMRES,
    preconditioned by the constant-coefficient implicit solve. `g` collects the
    heating terms that depend on the previous iterate alone.

    Args:
        previous: state supplying the frozen coefficients.
        iterate: data at the start of the step.
        dt: step length.
        params: physical parameters.
        dealias: apply the 2/3 rule to the frozen products.
        rtol: GMRES relative tolerance.
        maxiter: GMRES restart cycles.

    Returns:
        the solution Y at time iterate.t + dt.

    Raises:
        ValueError: if the states live on different grids or bases, or dt <= 0.
        VacuumGuardError: if 1 + rho of `previous` falls below the threshold.
        RuntimeError: if GMRES does not converge.
    """
    if (
        previous.grid != iterate.grid
        or previous.basis.truncation != iterate.basis.truncation
    ):
        raise ValueError("previous and iterate must share grid and basis.")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}.")
    previous.check_vacuum(DEFAULT_VACUUM_THRESHOLD)
    split = SplitOperator(iterate.grid, iterate.basis, params, dealias)
    frozen = FrozenOperator(previous, split)
    shape = split.shape
    size = int(np.prod(shape))

    def matvec(vector):
        values = np.reshape(vector, shape)
        return (values - dt * frozen.apply(values)).ravel()

    def precondition(vector):
        return split.solve(np.reshape(vector, shape), dt).ravel()

    system = LinearOperator((size, size), matvec=matvec, dtype=float)
    preconditioner = LinearOperator((size, size), matvec=precondition, dtype=float)
    rhs = (iterate.values + dt * frozen.source).ravel()
    if not np.any(rhs):
        return iterate.with_values(np.zeros(shape), t=iterate.t + dt)

    counter = {"iterations": 0}

    def count(_):
        counter["iterations"] += 1

    solution, info = gmres(
        system,
        rhs,
        x0=precondition(rhs),
        rtol=rtol,
        atol=0.0,
        maxiter=maxiter,
        M=preconditioner,
        callback=count,
        callback_type="pr_norm",
    )
    if info != 0:
        raise RuntimeError(f"GMRES did not converge (info={info}).")
    logger.debug("GMRES converged in %d iterations", counter["iterations"])
    return iterate.with_values(solution.reshape(shape), t=iterate.t + dt)


def picard_iterate(
    initial: KineticFluidState,
    dt: float,
    params: Optional[PhysicalParams] = None,
    iterations: int = 5,
    dealias: bool = True,
) -> OptimizeResult:
    """Repeats `picard_step` from the zero iterate over one step from `initial`.

    Returns:
        OptimizeResult with `iterates`, `differences` (H^1 norms of successive
        differences), `ratios` (consecutive quotients of the differences, computed
        while the differences stay above the solver noise floor) and `max_ratio`.
        `resolved` is set when at least two ratios survive the floor; `contracting`
        (every ratio below one) and `decreasing` (ratios non-increasing) are only
        reported true for resolved runs.
    """
    if iterations < 2:
        raise ValueError("At least two iterations are needed for a ratio.")
    previous = KineticFluidState.zeros(initial.grid, initial.basis, initial.t)
    iterates: List[KineticFluidState] = []
    differences: List[float] = []
    for index in range(iterations):
        current = picard_step(previous, initial, dt, params, dealias, rtol=SOLVER_RTOL)
        iterates.append(current)
        if index > 0:
            differences.append(h1_norm(current.values - previous.values, initial.grid))
        logger.info("Picard iteration %d done", index + 1)
        previous = current

    scale = max(h1_norm(iterates[-1]), np.finfo(float).tiny)
    ratios = []
    for before, after in zip(differences, differences[1:]):
        if before <= CONVERGED_FLOOR * scale:
            break
        ratios.append(after / before)
    ratios_array = np.array(ratios)
    resolved = len(ratios) >= 2
    if not resolved:
        warnings.warn(
            f"Only {len(ratios)} Picard ratio(s) above the noise floor; "
            "contraction is unresolved."
        )
    return OptimizeResult(
        iterates=iterates,
        differences=np.array(differences),
        ratios=ratios_array,
        max_ratio=float(ratios_array.max()) if len(ratios) else 0.0,
        resolved=resolved,
        contracting=resolved and bool(np.all(ratios_array < 1.0)),
        decreasing=resolved and bool(np.all(np.diff(ratios_array) <= 0.0)),
    )
