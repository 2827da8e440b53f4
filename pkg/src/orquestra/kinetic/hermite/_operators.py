################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Coefficient-space realizations of the velocity operators.

With RAISE_i = -d/dv_i + v_i/2 and LOWER_i = d/dv_i + v_i/2 acting on the weighted
basis psi_alpha,

    LOWER_i psi_alpha = sqrt(alpha_i) psi_{alpha - e_i},
    RAISE_i psi_alpha = sqrt(alpha_i + 1) psi_{alpha + e_i},

multiplication by v_i is LOWER_i + RAISE_i and d/dv_i is (LOWER_i - RAISE_i) / 2. The
Fokker-Planck operator is diagonal with eigenvalue -|alpha| and the Laplacian-type
term (1/sqrt(M)) Delta_v (sqrt(M) f) equals sum_i RAISE_i^2.
"""
import math
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import sparse

from ._basis import HermiteBasis, HermiteCoeffVector, MultiIndex, hermite_basis

SQRT2 = math.sqrt(2.0)


class LadderKind(Enum):
    MULT_V = "mult_v"
    D_V = "d_v"
    LOWER = "lower"
    RAISE = "raise"


def _check_kind(kind) -> LadderKind:
    if isinstance(kind, LadderKind):
        return kind
    if isinstance(kind, str):
        try:
            return LadderKind(kind.lower())
        except ValueError:
            raise ValueError(f"Unknown ladder kind {kind!r}.")
    raise TypeError(f"Ladder kind must be a LadderKind, got {type(kind).__name__}.")


def _check_axis(axis: int):
    if axis not in (0, 1, 2):
        raise ValueError(f"Velocity axis must be 0, 1 or 2, got {axis}.")


@lru_cache(maxsize=None)
def _shift_matrix(
    truncation: int, axis: int, step: int, target_truncation: int
) -> sparse.csr_matrix:
    """Matrix of psi_alpha -> w(alpha) psi_{alpha + step e_axis}, step in {-1, 1, 2}.

    Images with degree above `target_truncation` are discarded.
    """
    source = hermite_basis(truncation)
    target = hermite_basis(target_truncation)
    rows, cols, data = [], [], []
    for column, alpha in enumerate(source.indices):
        degree = alpha[axis]
        if step == -1:
            if degree == 0:
                continue
            weight = math.sqrt(degree)
        elif step == 1:
            weight = math.sqrt(degree + 1)
        elif step == 2:
            weight = math.sqrt((degree + 1) * (degree + 2))
        else:
            raise ValueError(f"Unsupported shift {step}.")
        image = alpha.shifted(axis, step)
        if image.order > target_truncation:
            continue
        rows.append(target.index(image))
        cols.append(column)
        data.append(weight)
    return sparse.csr_matrix(
        (data, (rows, cols)), shape=(target.size, source.size), dtype=float
    )


@lru_cache(maxsize=None)
def ladder_matrix(
    kind: LadderKind,
    axis: int,
    truncation: int,
    target_truncation: Optional[int] = None,
) -> sparse.csr_matrix:
    """Sparse matrix of a ladder operator from degree <= N to degree <= target.

    Args:
        kind: which operator.
        axis: velocity axis 0, 1 or 2.
        truncation: degree N of the source basis.
        target_truncation: degree of the target basis. Defaults to N, which is the
            Galerkin closure. N + 1 keeps every image exactly.
    """
    kind = _check_kind(kind)
    _check_axis(axis)
    if target_truncation is None:
        target_truncation = truncation
    lower = _shift_matrix(truncation, axis, -1, target_truncation)
    raise_ = _shift_matrix(truncation, axis, 1, target_truncation)
    if kind is LadderKind.LOWER:
        return lower
    if kind is LadderKind.RAISE:
        return raise_
    if kind is LadderKind.MULT_V:
        return (lower + raise_).tocsr()
    return (0.5 * (lower - raise_)).tocsr()


@lru_cache(maxsize=None)
def velocity_laplacian_matrix(truncation: int) -> sparse.csr_matrix:
    """sum_i RAISE_i^2 restricted to degree <= N."""
    matrix = _shift_matrix(truncation, 0, 2, truncation)
    for axis in (1, 2):
        matrix = matrix + _shift_matrix(truncation, axis, 2, truncation)
    return matrix.tocsr()


def collision_diagonal(basis: HermiteBasis) -> np.ndarray:
    """Eigenvalues -|alpha| of the linearized Fokker-Planck operator."""
    return -basis.orders.astype(float)


def apply_matrix(matrix: sparse.spmatrix, values: np.ndarray) -> np.ndarray:
    """Applies a coefficient operator along the first axis of `values`."""
    trailing = values.shape[1:]
    flat = values.reshape(values.shape[0], -1)
    return np.asarray(matrix @ flat).reshape((matrix.shape[0],) + trailing)


def apply_collision_L(c: HermiteCoeffVector) -> HermiteCoeffVector:
    diagonal = collision_diagonal(c.basis)
    return c.with_values(
        diagonal.reshape((-1,) + (1,) * len(c.trailing_shape)) * c.values
    )


def apply_ladder(
    kind: Union[LadderKind, str], axis: int, c: HermiteCoeffVector, extend: bool = False
) -> HermiteCoeffVector:
    """Applies a ladder operator to a coefficient vector.

    Args:
        kind: MULT_V, D_V, LOWER or RAISE.
        axis: velocity axis.
        c: coefficients.
        extend: if True, the result lives in the basis of degree N + 1 and no
            coefficient is discarded.

    Raises:
        ValueError: for an unknown kind name or axis.
        TypeError: for a kind that is neither a LadderKind nor a string.
    """
    kind = _check_kind(kind)
    target = c.basis.truncation + 1 if extend else c.basis.truncation
    matrix = ladder_matrix(kind, axis, c.basis.truncation, target)
    return HermiteCoeffVector(hermite_basis(target), apply_matrix(matrix, c.values))


def apply_velocity_laplacian(c: HermiteCoeffVector) -> HermiteCoeffVector:
    return c.with_values(
        apply_matrix(velocity_laplacian_matrix(c.basis.truncation), c.values)
    )


def add_fluid_sources(
    values: np.ndarray, basis: HermiteBasis, u: np.ndarray, theta: np.ndarray
) -> np.ndarray:
    """Adds u.v sqrt(M) + theta (|v|^2 - 3) sqrt(M) to coefficients in place."""
    for axis, position in enumerate(basis.unit_positions):
        values[position] += u[axis]
    for position in basis.second_shell_diagonal_positions:
        values[position] += SQRT2 * theta
    return values


def kinetic_linear_terms(
    c: HermiteCoeffVector, u: np.ndarray, theta: np.ndarray
) -> HermiteCoeffVector:
    """Velocity-side terms of the kinetic equation other than transport and L.

    The result is the tendency u.RAISE(c) + u.v sqrt(M) + theta (|v|^2 - 3) sqrt(M)
    + theta D(c), evaluated pointwise when `c` carries trailing axes. The drift
    u.grad_v f - u.v f / 2 sits on the left of the kinetic equation, hence the plus
    sign in front of u.RAISE.

    Args:
        c: coefficients with trailing shape S.
        u: velocity perturbation of shape (3, *S).
        theta: temperature perturbation of shape S.
    """
    u = np.asarray(u)
    theta = np.asarray(theta)
    trailing = c.trailing_shape
    if u.shape != (3,) + trailing or theta.shape != trailing:
        raise ValueError(
            f"u and theta must have shapes {(3,) + trailing} and {trailing}, got "
            f"{u.shape} and {theta.shape}."
        )
    dtype = np.result_type(c.values, u, theta)
    result = np.zeros(c.values.shape, dtype=dtype)
    truncation = c.basis.truncation
    for axis in range(3):
        result += u[axis] * apply_matrix(
            ladder_matrix(LadderKind.RAISE, axis, truncation), c.values
        )
    result += theta * apply_matrix(velocity_laplacian_matrix(truncation), c.values)
    add_fluid_sources(result, c.basis, u, theta)
    return c.with_values(result)


@lru_cache(maxsize=None)
def nu_gram_matrix(truncation: int) -> np.ndarray:
    """Gram matrix of the nu-weighted norm |grad_v f|^2 + (1 + |v|^2)|f|^2.

    Ladders map into degree N + 1 so that the quadratic form is exact on the
    truncated span.
    """
    basis = hermite_basis(truncation)
    gram = np.eye(basis.size)
    for axis in range(3):
        for kind in (LadderKind.MULT_V, LadderKind.D_V):
            matrix = ladder_matrix(kind, axis, truncation, truncation + 1).toarray()
            gram += matrix.T @ matrix
    return gram


def nu_norm(c: HermiteCoeffVector) -> float:
    """Squared nu-norm |f|_nu^2, summed over any trailing axes."""
    gram = nu_gram_matrix(c.basis.truncation)
    flat = c.values.reshape(c.basis.size, -1)
    return float(np.real(np.sum(np.conj(flat) * (gram @ flat))))
