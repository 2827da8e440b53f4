################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from typing import Union

import numpy as np

from ..api import FluidState
from ..hermite import HermiteCoeffVector, velocity_quadrature
from ._grid import SpatialGrid, SpectralField

VELOCITY_RULES = ("coefficients", "quadrature")


def _check_exponent(p: float, name: str = "p"):
    if not p >= 1:
        raise ValueError(f"{name} must be at least 1, got {p}.")


def lp_norm_values(grid: SpatialGrid, values: np.ndarray, p: float) -> np.ndarray:
    """L^p_x norm of samples (..., *shape), taken separately for each leading index."""
    _check_exponent(p)
    magnitude = np.abs(values)
    if math.isinf(p):
        return np.max(magnitude, axis=grid.axes)
    return grid.integrate(magnitude**p) ** (1.0 / p)


def norm_Lp(field: Union[SpectralField, np.ndarray], p: float, grid=None) -> float:
    """L^p norm over the periodic box; vector fields use the pointwise Euclidean norm.

    Grid sums are exact for band-limited integrands only. For p outside {2, inf} and
    non-smooth integrands the equal-weight rule is a plain approximation.
    """
    if isinstance(field, SpectralField):
        grid, values = field.grid, field.physical()
    else:
        values = np.asarray(field)
        if grid is None:
            raise ValueError("A grid is required for raw sample arrays.")
    _check_exponent(p)
    leading = values.ndim - grid.dim
    if leading:
        values = np.sqrt(
            np.sum(np.abs(values) ** 2, axis=tuple(range(leading)))
        )
    return float(lp_norm_values(grid, values, p))


def norm_Zq(
    kinetic: HermiteCoeffVector,
    fluid: FluidState,
    q: float,
    grid: SpatialGrid,
    velocity_rule: str = "coefficients",
    quadrature_order: int = 0,
) -> float:
    """Mixed norm ||f||_{L^2_v(L^q_x)} + ||(rho, u, theta)||_{L^1_x}.

    Args:
        kinetic: Hermite coefficients with trailing grid shape.
        fluid: fluid perturbation on the same grid.
        q: spatial exponent, at least 1.
        grid: spatial grid.
        velocity_rule: "coefficients" takes the l^2 sum over Hermite coefficients of
            their L^q_x norms; "quadrature" evaluates f(., v) at Gauss-Hermite nodes
            and integrates ||f(., v)||_{L^q_x}^2 over v.
        quadrature_order: nodes per velocity axis for the quadrature rule. Defaults
            to truncation + 4.
    """
    _check_exponent(q, "q")
    grid.check_shape(kinetic.values, "kinetic coefficients")
    if velocity_rule == "coefficients":
        per_coefficient = lp_norm_values(grid, kinetic.values, q)
        kinetic_part = float(np.sqrt(np.sum(per_coefficient**2)))
    elif velocity_rule == "quadrature":
        order = quadrature_order or kinetic.basis.truncation + 4
        quadrature = velocity_quadrature(order)
        psi = kinetic.basis.evaluate(quadrature.nodes)
        samples = np.tensordot(psi, kinetic.values, axes=(0, 0))
        per_node = lp_norm_values(grid, samples, q)
        kinetic_part = float(np.sqrt(quadrature.integrate(per_node**2)))
    else:
        raise ValueError(
            f"Unknown velocity rule {velocity_rule!r}; use one of {VELOCITY_RULES}."
        )
    speed = np.sqrt(np.sum(np.abs(fluid.u) ** 2, axis=0))
    fluid_part = float(
        grid.integrate(np.abs(fluid.rho) + speed + np.abs(fluid.theta))
    )
    return kinetic_part + fluid_part
