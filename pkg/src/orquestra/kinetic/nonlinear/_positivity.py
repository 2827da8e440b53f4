################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import numpy as np

from ..hermite import maxwellian, velocity_quadrature
from ._state import KineticFluidState

CHUNK_POINTS = 4096


def positivity_min(state: KineticFluidState, quadrature_order: int = 0) -> float:
    """min of F = M + sqrt(M) f over grid points and Gauss-Hermite velocity nodes.

    Since sqrt(M) psi_alpha = M h_alpha, F = M (1 + sum_alpha c_alpha h_alpha).

    Args:
        state: state whose kinetic part is sampled.
        quadrature_order: Gauss-Hermite nodes per velocity axis; 0 selects N + 4.
    """
    order = quadrature_order or state.basis.truncation + 4
    if order < 1:
        raise ValueError(f"quadrature_order must be positive, got {order}.")
    nodes = velocity_quadrature(order).nodes
    polynomials = state.basis.polynomials(nodes)
    weight = maxwellian(nodes)
    flat = state.coefficients.reshape(state.n_herm, -1)
    smallest = np.inf
    for start in range(0, flat.shape[1], CHUNK_POINTS):
        block = flat[:, start : start + CHUNK_POINTS].T @ polynomials
        smallest = min(smallest, float(np.min(weight * (1.0 + block))))
    return smallest
