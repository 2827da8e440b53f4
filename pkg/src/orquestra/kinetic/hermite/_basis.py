################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Weighted Hermite basis of L^2 in three velocity dimensions.

The basis functions are

    psi_alpha(v) = prod_i He_{alpha_i}(v_i) / sqrt(alpha_i!) * sqrt(M(v)),

where He_n are the probabilists' Hermite polynomials and M is the standard
Maxwellian. They are orthonormal in L^2_v, the collision operator is diagonal in
them and the macroscopic projection coincides with the degree shells 0, 1 and 2.
"""
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.special import eval_hermitenorm, roots_hermitenorm

SQRT_MAXWELLIAN_NORMALIZATION = (2.0 * np.pi) ** -0.75


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Three non-negative integers indexing a tensor-product Hermite function."""

    components: Tuple[int, int, int]

    def __post_init__(self):
        components = tuple(int(c) for c in self.components)
        if len(components) != 3:
            raise ValueError("A velocity multi-index has exactly three components.")
        if any(c < 0 for c in components):
            raise ValueError(f"Multi-index components must be >= 0, got {components}.")
        object.__setattr__(self, "components", components)

    @classmethod
    def of(cls, *components: int) -> "MultiIndex":
        return cls(tuple(components))  # type: ignore

    @classmethod
    def unit(cls, axis: int, times: int = 1) -> "MultiIndex":
        components = [0, 0, 0]
        components[axis] = times
        return cls(tuple(components))  # type: ignore

    @property
    def order(self) -> int:
        return sum(self.components)

    def __getitem__(self, axis: int) -> int:
        return self.components[axis]

    def shifted(self, axis: int, step: int) -> "MultiIndex":
        components = list(self.components)
        components[axis] += step
        return MultiIndex(tuple(components))  # type: ignore


MultiIndexLike = Union[MultiIndex, Sequence[int]]


def as_multi_index(alpha: MultiIndexLike) -> MultiIndex:
    if isinstance(alpha, MultiIndex):
        return alpha
    return MultiIndex(tuple(alpha))  # type: ignore


@dataclass(frozen=True)
class HermiteBasisSpec:
    """Truncation and quadrature settings of the velocity discretization.

    Args:
        truncation: maximal total degree N of retained basis functions.
        quadrature_order: number Q of Gauss-Hermite nodes per velocity axis. Defaults
            to N + 4, which integrates every product used by the operators exactly.
    """

    truncation: int = 8
    quadrature_order: int = 0

    def __post_init__(self):
        if self.truncation < 2:
            raise ValueError("truncation must be at least 2 to hold the macro shells.")
        if self.quadrature_order == 0:
            object.__setattr__(self, "quadrature_order", self.truncation + 4)
        if self.quadrature_order < self.truncation + 4:
            raise ValueError(
                f"quadrature_order must be at least truncation + 4 = "
                f"{self.truncation + 4}, got {self.quadrature_order}."
            )

    def to_dict(self) -> Dict[str, int]:
        return {
            "truncation": self.truncation,
            "quadrature_order": self.quadrature_order,
        }

    @classmethod
    def from_dict(cls, item: Mapping[str, int]) -> "HermiteBasisSpec":
        unknown = set(item) - {"truncation", "quadrature_order"}
        if unknown:
            raise ValueError(f"Unknown basis settings: {sorted(unknown)}.")
        return cls(**{key: int(value) for key, value in item.items()})


class HermiteBasis:
    def __init__(self, truncation: int):
        """Ordered set of multi-indices with total degree at most `truncation`.

        Indices are graded by degree and sorted in decreasing lexicographic order
        inside a shell, so that positions 1, 2, 3 hold e_1, e_2, e_3.

        Args:
            truncation: maximal total degree N.
        """
        if truncation < 0:
            raise ValueError("truncation must be non-negative.")
        self.truncation = truncation
        self.indices: List[MultiIndex] = [
            MultiIndex(components)  # type: ignore
            for degree in range(truncation + 1)
            for components in sorted(
                (
                    c
                    for c in itertools.product(range(degree + 1), repeat=3)
                    if sum(c) == degree
                ),
                reverse=True,
            )
        ]
        self._positions: Dict[MultiIndex, int] = {
            alpha: position for position, alpha in enumerate(self.indices)
        }
        self.exponents = np.array([alpha.components for alpha in self.indices])
        self.orders = self.exponents.sum(axis=1)

    def __repr__(self) -> str:
        return f"HermiteBasis(truncation={self.truncation})"

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    def __contains__(self, alpha) -> bool:
        return as_multi_index(alpha) in self._positions

    def index(self, alpha: MultiIndexLike) -> int:
        """Position of `alpha` in the coefficient ordering."""
        alpha = as_multi_index(alpha)
        try:
            return self._positions[alpha]
        except KeyError:
            raise ValueError(
                f"Multi-index {alpha.components} is outside the truncation "
                f"N={self.truncation}."
            )

    def extended(self, extra: int) -> "HermiteBasis":
        return hermite_basis(self.truncation + extra)

    @property
    def unit_positions(self) -> Tuple[int, int, int]:
        return tuple(  # type: ignore
            self.index(MultiIndex.unit(axis)) for axis in range(3)
        )

    @property
    def second_shell_diagonal_positions(self) -> Tuple[int, int, int]:
        return tuple(  # type: ignore
            self.index(MultiIndex.unit(axis, 2)) for axis in range(3)
        )

    def polynomials(self, velocities: np.ndarray) -> np.ndarray:
        """Normalized Hermite polynomials h_alpha = psi_alpha / sqrt(M).

        Args:
            velocities: array of shape (..., 3).

        Returns:
            array of shape (size, ...).
        """
        velocities = np.asarray(velocities, dtype=float)
        per_axis = [
            _normalized_hermite_table(self.truncation, velocities[..., axis])
            for axis in range(3)
        ]
        return np.stack(
            [
                per_axis[0][a1] * per_axis[1][a2] * per_axis[2][a3]
                for a1, a2, a3 in self.exponents
            ]
        )

    def evaluate(self, velocities: np.ndarray) -> np.ndarray:
        """Values psi_alpha(v) for every retained alpha, shape (size, ...)."""
        velocities = np.asarray(velocities, dtype=float)
        return self.polynomials(velocities) * sqrt_maxwellian(velocities)


@lru_cache(maxsize=None)
def hermite_basis(truncation: int) -> HermiteBasis:
    return HermiteBasis(truncation)


def _normalized_hermite_table(max_degree: int, x: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            eval_hermitenorm(n, x) / math.sqrt(math.factorial(n))
            for n in range(max_degree + 1)
        ]
    )


def maxwellian(velocities: np.ndarray) -> np.ndarray:
    velocities = np.asarray(velocities, dtype=float)
    return (2.0 * np.pi) ** -1.5 * np.exp(-0.5 * np.sum(velocities**2, axis=-1))


def sqrt_maxwellian(velocities: np.ndarray) -> np.ndarray:
    velocities = np.asarray(velocities, dtype=float)
    return SQRT_MAXWELLIAN_NORMALIZATION * np.exp(
        -0.25 * np.sum(velocities**2, axis=-1)
    )


def eval_basis(
    alpha: MultiIndexLike, v: np.ndarray, spec: HermiteBasisSpec = None
) -> np.ndarray:
    """Evaluates the weighted Hermite function psi_alpha at velocities `v`.

    Args:
        alpha: velocity multi-index.
        v: velocity of shape (3,) or an array of velocities of shape (..., 3).
        spec: if given, `alpha` is checked against its truncation.

    Raises:
        ValueError: if `alpha` exceeds the truncation of `spec`.
    """
    alpha = as_multi_index(alpha)
    if spec is not None and alpha.order > spec.truncation:
        raise ValueError(
            f"Multi-index {alpha.components} is outside the truncation "
            f"N={spec.truncation}."
        )
    v = np.asarray(v, dtype=float)
    value = sqrt_maxwellian(v)
    for axis, degree in enumerate(alpha.components):
        value = value * eval_hermitenorm(degree, v[..., axis])
        value = value / math.sqrt(math.factorial(degree))
    return value


@dataclass(frozen=True, eq=False)
class VelocityQuadrature:
    """Tensor Gauss-Hermite rule for integrals over R^3 in velocity.

    `weights` already include the factor exp(|v|^2 / 2), so that
    sum(weights * F(nodes)) approximates the plain integral of F.
    """

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrates samples of shape (n_nodes, ...) over velocity."""
        return np.tensordot(self.weights, values, axes=(0, 0))


@lru_cache(maxsize=None)
def velocity_quadrature(order: int) -> VelocityQuadrature:
    points, gaussian_weights = roots_hermitenorm(order)
    grid = np.stack(
        np.meshgrid(points, points, points, indexing="ij"), axis=-1
    ).reshape(-1, 3)
    weights = np.prod(
        np.stack(
            np.meshgrid(
                gaussian_weights, gaussian_weights, gaussian_weights, indexing="ij"
            ),
            axis=-1,
        ).reshape(-1, 3),
        axis=1,
    ) * np.exp(0.5 * np.sum(grid**2, axis=1))
    return VelocityQuadrature(nodes=grid, weights=weights)


@dataclass(frozen=True, eq=False)
class HermiteCoeffVector:
    """Coefficients of a velocity function in the weighted Hermite basis.

    `values` has shape (basis.size, *trailing). Trailing axes carry spatial grid
    points or any other batch dimension, so the same type stores a single velocity
    function and a whole kinetic field c_alpha(x).
    """

    basis: HermiteBasis
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim == 0 or values.shape[0] != self.basis.size:
            raise ValueError(
                f"Expected {self.basis.size} coefficients along the first axis, "
                f"got shape {values.shape}."
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(
        cls, basis: HermiteBasis, trailing_shape: Tuple[int, ...] = (), dtype=float
    ) -> "HermiteCoeffVector":
        return cls(basis, np.zeros((basis.size,) + tuple(trailing_shape), dtype=dtype))

    @classmethod
    def from_mapping(
        cls,
        basis: HermiteBasis,
        coefficients: Mapping[Tuple[int, int, int], complex],
        dtype=float,
    ) -> "HermiteCoeffVector":
        values = np.zeros(basis.size, dtype=dtype)
        for alpha, value in coefficients.items():
            values[basis.index(alpha)] = value
        return cls(basis, values)

    @property
    def trailing_shape(self) -> Tuple[int, ...]:
        return self.values.shape[1:]

    def __getitem__(self, alpha: MultiIndexLike) -> np.ndarray:
        return self.values[self.basis.index(alpha)]

    def with_values(self, values: np.ndarray) -> "HermiteCoeffVector":
        return HermiteCoeffVector(self.basis, values)

    def __add__(self, other: "HermiteCoeffVector") -> "HermiteCoeffVector":
        _check_same_basis(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "HermiteCoeffVector") -> "HermiteCoeffVector":
        _check_same_basis(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, factor) -> "HermiteCoeffVector":
        return self.with_values(self.values * factor)

    __rmul__ = __mul__

    def norm_squared(self) -> float:
        """Squared L^2_v norm (summed over trailing axes), by Parseval."""
        return float(np.sum(np.abs(self.values) ** 2))

    def truncated(self, basis: HermiteBasis) -> "HermiteCoeffVector":
        """Re-expresses the coefficients in `basis`, dropping indices it lacks."""
        values = np.zeros((basis.size,) + self.trailing_shape, dtype=self.values.dtype)
        for position, alpha in enumerate(self.basis.indices):
            if alpha.order <= basis.truncation:
                values[basis.index(alpha)] = self.values[position]
        return HermiteCoeffVector(basis, values)


def _check_same_basis(first: HermiteCoeffVector, second: HermiteCoeffVector):
    if first.basis.truncation != second.basis.truncation:
        raise ValueError("Coefficient vectors live in different truncations.")


def project_function(
    samples_or_callable: Union[Callable[[np.ndarray], np.ndarray], np.ndarray],
    spec: HermiteBasisSpec,
) -> HermiteCoeffVector:
    """Galerkin projection of a velocity function onto the retained basis.

    Args:
        samples_or_callable: either a vectorized callable mapping velocities of shape
            (n, 3) to values of shape (n,), or samples at the nodes of
            `velocity_quadrature(spec.quadrature_order)`.
        spec: basis specification.

    Returns:
        coefficients c_alpha = <f, psi_alpha> computed by tensor Gauss-Hermite
        quadrature.

    Raises:
        ValueError: if any sample is not finite.
    """
    quadrature = velocity_quadrature(spec.quadrature_order)
    if callable(samples_or_callable):
        samples = np.asarray(samples_or_callable(quadrature.nodes))
    else:
        samples = np.asarray(samples_or_callable)
    if samples.shape[0] != quadrature.size:
        raise ValueError(
            f"Expected {quadrature.size} samples, got {samples.shape[0]}."
        )
    if not np.all(np.isfinite(samples)):
        raise ValueError("Velocity samples must be finite.")
    basis = hermite_basis(spec.truncation)
    psi = basis.evaluate(quadrature.nodes)
    return HermiteCoeffVector(basis, psi @ (quadrature.weights * samples))


def multi_indices_of_order(order: int, axes: Iterable[int] = (0, 1, 2)):
    """All multi-indices of the given total order supported on `axes`."""
    axes = tuple(axes)
    result = []
    for combination in itertools.combinations_with_replacement(axes, order):
        components = [0, 0, 0]
        for axis in combination:
            components[axis] += 1
        result.append(tuple(components))
    return result
