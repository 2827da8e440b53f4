################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh, null_space

from ._basis import HermiteBasis, HermiteCoeffVector, MultiIndex, hermite_basis
from ._operators import collision_diagonal, nu_gram_matrix

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


@dataclass(frozen=True, eq=False)
class MacroMoments:
    """Moments of a kinetic perturbation, pointwise over any trailing axes.

    `gamma` (3, 3, ...) and `upsilon` (3, ...) are None when they were not requested.
    """

    a: np.ndarray
    b: np.ndarray
    omega: np.ndarray
    gamma: Optional[np.ndarray] = None
    upsilon: Optional[np.ndarray] = None


def macro_moments(c: HermiteCoeffVector, higher: bool = True) -> MacroMoments:
    """Extracts a, b, omega and, if `higher`, the moment tensors Gamma and Upsilon.

    Gamma_ij = <(v_i v_j - 1) sqrt(M), f> and
    Upsilon_i = <v_i (|v|^2 - 3) sqrt(M) / sqrt(6), f>.

    Raises:
        ValueError: if `higher` is set and the truncation is below 3.
    """
    basis = c.basis
    if higher and basis.truncation < 3:
        raise ValueError(
            "Upsilon reads degree-3 coefficients; truncation must be at least 3."
        )
    a = c.values[0]
    b = c.values[list(basis.unit_positions)]
    diagonal = c.values[list(basis.second_shell_diagonal_positions)]
    omega = diagonal.sum(axis=0) / SQRT3
    if not higher:
        return MacroMoments(a=a, b=b, omega=omega)

    gamma = np.empty((3, 3) + c.trailing_shape, dtype=c.values.dtype)
    for i in range(3):
        gamma[i, i] = math.sqrt(2.0) * diagonal[i]
        for j in range(i + 1, 3):
            mixed = c[MultiIndex.unit(i).shifted(j, 1)] - a
            gamma[i, j] = mixed
            gamma[j, i] = mixed

    upsilon = np.empty((3,) + c.trailing_shape, dtype=c.values.dtype)
    for i in range(3):
        value = c[MultiIndex.unit(i, 3)] + (2.0 / SQRT6) * b[i]
        for j in range(3):
            if j != i:
                value = value + c[MultiIndex.unit(i).shifted(j, 2)] / SQRT3
        upsilon[i] = value
    return MacroMoments(a=a, b=b, omega=omega, gamma=gamma, upsilon=upsilon)


def macro_coefficients(
    basis: HermiteBasis,
    a: np.ndarray,
    b: np.ndarray,
    omega: np.ndarray,
) -> HermiteCoeffVector:
    """Coefficients of a sqrt(M) + b.v sqrt(M) + omega (|v|^2 - 3)/sqrt(6) sqrt(M)."""
    a = np.asarray(a)
    b = np.asarray(b)
    omega = np.asarray(omega)
    dtype = np.result_type(a, b, omega)
    values = np.zeros((basis.size,) + a.shape, dtype=dtype)
    values[0] = a
    for axis, position in enumerate(basis.unit_positions):
        values[position] = b[axis]
    for position in basis.second_shell_diagonal_positions:
        values[position] = omega / SQRT3
    return HermiteCoeffVector(basis, values)


def decompose_macro_micro(
    c: HermiteCoeffVector,
) -> Tuple[HermiteCoeffVector, HermiteCoeffVector]:
    """Splits c into P c and (I - P) c, P being the orthogonal macro projection."""
    moments = macro_moments(c, higher=False)
    macro = macro_coefficients(c.basis, moments.a, moments.b, moments.omega)
    return macro, c - macro


@lru_cache(maxsize=None)
def macro_projection_matrix(truncation: int) -> np.ndarray:
    basis = hermite_basis(truncation)
    vectors = _macro_vectors(basis)
    return vectors @ vectors.T


def _macro_vectors(basis: HermiteBasis) -> np.ndarray:
    vectors = np.zeros((basis.size, 5))
    vectors[0, 0] = 1.0
    for column, position in enumerate(basis.unit_positions, start=1):
        vectors[position, column] = 1.0
    for position in basis.second_shell_diagonal_positions:
        vectors[position, 4] = 1.0 / SQRT3
    return vectors


@lru_cache(maxsize=None)
def micro_subspace(truncation: int) -> np.ndarray:
    """Orthonormal columns spanning the range of I - P on degree <= N."""
    return null_space(_macro_vectors(hermite_basis(truncation)).T)


def dissipation_form(c: HermiteCoeffVector) -> float:
    """-<f, L f> = sum |alpha| |c_alpha|^2, summed over trailing axes."""
    weights = -collision_diagonal(c.basis)
    flat = c.values.reshape(c.basis.size, -1)
    return float(np.sum(weights[:, None] * np.abs(flat) ** 2))


def macro_coercivity_floor(c: HermiteCoeffVector) -> float:
    """|b|^2 + 2|omega|^2, the macro part of the coercivity bound."""
    moments = macro_moments(c, higher=False)
    omega_part = 2 * np.sum(np.abs(moments.omega) ** 2)
    return float(np.sum(np.abs(moments.b) ** 2) + omega_part)


@lru_cache(maxsize=None)
def micro_coercivity_constant(truncation: int) -> float:
    """Largest lambda with -<f, Lf> >= lambda |f|_nu^2 for every micro f of degree <= N.

    Computed as the smallest generalized eigenvalue of (-L, nu Gram) on the micro
    subspace.
    """
    basis = hermite_basis(truncation)
    micro = micro_subspace(truncation)
    dissipation = micro.T @ np.diag(-collision_diagonal(basis)) @ micro
    gram = micro.T @ nu_gram_matrix(truncation) @ micro
    return float(eigh(dissipation, gram, eigvals_only=True)[0])
