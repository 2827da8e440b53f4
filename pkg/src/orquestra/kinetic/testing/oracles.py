################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Independent Gauss-Hermite evaluations of the velocity operators.

A truncated velocity function is f = P sqrt(M) with P a polynomial. Every operator
in `orquestra.kinetic.hermite` maps it to Q sqrt(M) for another polynomial Q, and
the Hermite coefficients of the image are the Gaussian moments E[Q h_beta]. The
oracles below compute P and its derivatives from `numpy.polynomial.hermite_e`
series and the moments from `hermegauss` nodes, without touching the ladder
matrices they are compared with.

The direct convolution at the end plays the same role for dealiased products.
"""
import math
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import hermite_e
from scipy.linalg import expm

from ..hermite import (
    HermiteBasis,
    HermiteCoeffVector,
    LadderKind,
    apply_collision_L,
    apply_velocity_laplacian,
    hermite_basis,
    ladder_matrix,
    macro_moments,
    nu_norm,
)
from ..fourier import SpatialGrid
from ..linear import ModeGenerator


@lru_cache(maxsize=None)
def gaussian_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Tensor nodes (n, 3) and weights of the standard Gaussian measure on R^3."""
    points, weights = hermite_e.hermegauss(order)
    weights = weights / math.sqrt(2.0 * math.pi)
    nodes = np.stack(np.meshgrid(points, points, points, indexing="ij"), axis=-1)
    product = np.einsum("i,j,k->ijk", weights, weights, weights)
    return nodes.reshape(-1, 3), product.reshape(-1)


def _axis_table(max_degree: int, x: np.ndarray, derivative: int) -> np.ndarray:
    table = []
    for n in range(max_degree + 1):
        series = np.zeros(n + 1)
        series[n] = 1.0 / math.sqrt(math.factorial(n))
        table.append(hermite_e.hermeval(x, hermite_e.hermeder(series, derivative)))
    return np.stack(table)


def polynomial_parts(
    basis: HermiteBasis, nodes: np.ndarray
) -> Dict[Tuple[int, int], np.ndarray]:
    """d^m h_alpha / dv_axis^m at the nodes, keyed by (axis, m) with m in {0, 1, 2}.

    Key (axis, 0) holds h_alpha itself for every axis; entries have shape
    (basis.size, n_nodes).
    """
    tables = {
        (axis, m): _axis_table(basis.truncation, nodes[:, axis], m)
        for axis in range(3)
        for m in range(3)
    }
    plain = [tables[(axis, 0)] for axis in range(3)]
    parts = {}
    for axis in range(3):
        for m in range(3):
            factors = list(plain)
            factors[axis] = tables[(axis, m)]
            parts[(axis, m)] = np.stack(
                [
                    factors[0][a1] * factors[1][a2] * factors[2][a3]
                    for a1, a2, a3 in basis.exponents
                ]
            )
    return parts


class GaussianOracle:
    """Quadrature evaluation of the velocity operators on one truncation.

    Args:
        truncation: degree N of the inputs.
        extra_nodes: nodes per axis beyond N + 2.
    """

    def __init__(self, truncation: int, extra_nodes: int = 2):
        self.basis = hermite_basis(truncation)
        self.target = hermite_basis(truncation + 2)
        self.nodes, self.weights = gaussian_rule(truncation + 2 + extra_nodes)
        self._source = polynomial_parts(self.basis, self.nodes)
        self._target = polynomial_parts(self.target, self.nodes)[(0, 0)]

    def _derivatives(self, c: np.ndarray, axis: int, m: int) -> np.ndarray:
        return c @ self._source[(axis, m)]

    def project(self, q: np.ndarray, truncation: Optional[int] = None) -> np.ndarray:
        """Coefficients E[Q h_beta] for every beta of degree <= truncation."""
        truncation = self.basis.truncation if truncation is None else truncation
        size = hermite_basis(truncation).size
        return self._target[:size] @ (self.weights * q)

    def mult_v(self, c: np.ndarray, axis: int) -> np.ndarray:
        return self.nodes[:, axis] * self._derivatives(c, axis, 0)

    def d_v(self, c: np.ndarray, axis: int) -> np.ndarray:
        p = self._derivatives(c, axis, 0)
        return self._derivatives(c, axis, 1) - 0.5 * self.nodes[:, axis] * p

    def lower(self, c: np.ndarray, axis: int) -> np.ndarray:
        return self._derivatives(c, axis, 1)

    def raise_(self, c: np.ndarray, axis: int) -> np.ndarray:
        p = self._derivatives(c, axis, 0)
        return self.nodes[:, axis] * p - self._derivatives(c, axis, 1)

    def velocity_laplacian(self, c: np.ndarray) -> np.ndarray:
        """sum_i RAISE_i^2 f."""
        total = np.zeros(len(self.weights))
        p = self._derivatives(c, 0, 0)
        for axis in range(3):
            v = self.nodes[:, axis]
            total += (
                self._derivatives(c, axis, 2)
                - p
                - 2.0 * v * self._derivatives(c, axis, 1)
                + v**2 * p
            )
        return total

    def collision(self, c: np.ndarray) -> np.ndarray:
        """(1 / sqrt(M)) div_v (M grad_v (f / sqrt(M)))."""
        return sum(
            self._derivatives(c, axis, 2)
            - self.nodes[:, axis] * self._derivatives(c, axis, 1)
            for axis in range(3)
        )

    def nu_norm_squared(self, c: np.ndarray) -> float:
        p = self._derivatives(c, 0, 0)
        integrand = (1.0 + np.sum(self.nodes**2, axis=1)) * p**2
        for axis in range(3):
            integrand = integrand + self.d_v(c, axis) ** 2
        return float(self.weights @ integrand)

    def macro(self, c: np.ndarray) -> Dict[str, np.ndarray]:
        """a, b, omega, Gamma and Upsilon as Gaussian moments of P."""
        p = self._derivatives(c, 0, 0)
        v = self.nodes
        speed = np.sum(v**2, axis=1)
        gamma = np.array(
            [
                [self.weights @ ((v[:, i] * v[:, j] - 1.0) * p) for j in range(3)]
                for i in range(3)
            ]
        )
        return {
            "a": np.array(self.weights @ p),
            "b": np.array([self.weights @ (v[:, i] * p) for i in range(3)]),
            "omega": np.array(self.weights @ ((speed - 3.0) * p) / math.sqrt(6.0)),
            "gamma": gamma,
            "upsilon": np.array(
                [
                    self.weights @ (v[:, i] * (speed - 3.0) * p) / math.sqrt(6.0)
                    for i in range(3)
                ]
            ),
        }


def random_low_degree_coefficients(
    basis: HermiteBasis, rng: np.random.Generator, max_degree: int
) -> np.ndarray:
    """Gaussian coefficients supported on degrees <= max_degree."""
    values = rng.standard_normal(basis.size)
    values[basis.orders > max_degree] = 0.0
    return values


def hermite_oracle_errors(
    truncation: int = 8, samples: int = 100, seed: int = 0
) -> Dict[str, float]:
    """Largest deviation of every velocity operator from its quadrature oracle.

    Inputs are random coefficient vectors supported on degrees <= N - 2, so that no
    image leaves the truncation.
    """
    if truncation < 2:
        raise ValueError("The oracle suite needs truncation >= 2.")
    oracle = GaussianOracle(truncation)
    basis = oracle.basis
    rng = np.random.default_rng(seed)
    errors = {
        name: 0.0
        for name in ("mult_v", "d_v", "lower", "raise", "laplacian", "collision")
    }
    errors.update(nu_norm=0.0, macro=0.0)
    methods = {
        LadderKind.MULT_V: ("mult_v", oracle.mult_v),
        LadderKind.D_V: ("d_v", oracle.d_v),
        LadderKind.LOWER: ("lower", oracle.lower),
        LadderKind.RAISE: ("raise", oracle.raise_),
    }
    for _ in range(samples):
        c = random_low_degree_coefficients(basis, rng, truncation - 2)
        vector = HermiteCoeffVector(basis, c)
        for kind, (name, method) in methods.items():
            for axis in range(3):
                exact = ladder_matrix(kind, axis, truncation) @ c
                error = np.max(np.abs(exact - oracle.project(method(c, axis))))
                errors[name] = max(errors[name], float(error))
        laplacian = apply_velocity_laplacian(vector).values
        errors["laplacian"] = max(
            errors["laplacian"],
            float(
                np.max(np.abs(laplacian - oracle.project(oracle.velocity_laplacian(c))))
            ),
        )
        collision = apply_collision_L(vector).values
        errors["collision"] = max(
            errors["collision"],
            float(np.max(np.abs(collision - oracle.project(oracle.collision(c))))),
        )
        errors["nu_norm"] = max(
            errors["nu_norm"], abs(nu_norm(vector) - oracle.nu_norm_squared(c))
        )
        moments = macro_moments(vector, higher=truncation >= 3)
        for name, expected in oracle.macro(c).items():
            computed = getattr(moments, name)
            if computed is not None:
                deviation = float(np.max(np.abs(np.asarray(computed) - expected)))
                errors["macro"] = max(errors["macro"], deviation)
    return errors


def expm_propagator(gen: ModeGenerator, t: float) -> np.ndarray:
    """exp(t A(k)), the dense reference for the mode integrators."""
    return expm(t * gen.matrix)


def truncated_convolution_oracle(
    grid: SpatialGrid, first_hat: np.ndarray, second_hat: np.ndarray
) -> np.ndarray:
    """Direct O(n^2) convolution of 1D coefficient arrays under the 2/3 rule."""
    if grid.dim != 1:
        raise ValueError("The direct convolution oracle is implemented for dim=1.")
    mask = grid.dealias_mask
    modes = grid.integer_modes[0].astype(int)
    position = {m: index for index, m in enumerate(modes)}
    first_hat = first_hat * mask
    second_hat = second_hat * mask
    result = np.zeros(grid.n, dtype=complex)
    for i, m in enumerate(modes):
        for j, l in enumerate(modes):
            target = m + l
            if target in position:
                result[position[target]] += first_hat[i] * second_hat[j]
    # convolution of continuous coefficients carries 1 / volume
    return result * mask / grid.volume
