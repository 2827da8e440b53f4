################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Energy, dissipation and cross functionals of torus states.

Every functional is evaluated in Fourier space through Plancherel,

    int d^alpha g d^alpha h dx = V^-1 sum_k k^(2 alpha) Re(g_hat conj(h_hat)),

where sums over |alpha| = m visit each multi-index once. Velocity derivatives of the
micro part use the ladder realization of d/dv on extended bases, so every
velocity integral is exact.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from ..fourier import FrequencySplitSpec, SpatialGrid
from ..hermite import (
    HermiteCoeffVector,
    LadderKind,
    decompose_macro_micro,
    hermite_basis,
    ladder_matrix,
    macro_moments,
    multi_indices_of_order,
    nu_gram_matrix,
)
from ..nonlinear import KineticFluidState

N_TAU = 11
TAU_RANGE = (0.0, 0.1)
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


class FunctionalKind(Enum):
    ENERGY_E = "energy_e"
    DISSIPATION_D = "dissipation_d"
    DISSIPATION_TORUS = "dissipation_torus"
    HIGH_H = "high_h"
    HIGH_M = "high_m"
    CROSS_E0 = "cross_e0"
    CROSS_E0_PRIME = "cross_e0_prime"
    CROSS_E0_HIGH = "cross_e0_high"
    E1_SECOND = "e1_second"
    D1_SECOND = "d1_second"
    SOBOLEV_PLAIN = "sobolev_plain"


def as_functional_kind(kind: Union[FunctionalKind, str]) -> FunctionalKind:
    if isinstance(kind, FunctionalKind):
        return kind
    if isinstance(kind, str):
        try:
            return FunctionalKind[kind.upper()]
        except KeyError:
            raise ValueError(f"Unknown functional kind {kind!r}.")
    raise TypeError(
        f"Functional kind must be a FunctionalKind, got {type(kind).__name__}."
    )


@dataclass(frozen=True)
class FunctionalWeights:
    """Weights of the cross terms, tau[i] standing for tau_(i+1).

    Args:
        tau: eleven weights in [0, 0.1].
        c1: weight of the first-order velocity derivative sums.
        c2: weight of the second-order velocity derivative sums.
        cutoff: r0 of the sharp low/high frequency split.
    """

    tau: Tuple[float, ...] = (0.01,) * N_TAU
    c1: float = 1.0
    c2: float = 1.0
    cutoff: float = 2.0

    def __post_init__(self):
        tau = tuple(float(value) for value in self.tau)
        if len(tau) != N_TAU:
            raise ValueError(f"Expected {N_TAU} tau weights, got {len(tau)}.")
        low, high = TAU_RANGE
        for index, value in enumerate(tau, start=1):
            if not low <= value <= high:
                raise ValueError(f"tau_{index}={value} outside [{low}, {high}].")
        if not (self.c1 >= 0 and self.c2 >= 0):
            raise ValueError("c1 and c2 must be non-negative.")
        object.__setattr__(self, "tau", tau)
        FrequencySplitSpec(cutoff=self.cutoff)

    @classmethod
    def default(cls) -> "FunctionalWeights":
        return cls()

    @classmethod
    def uniform(cls, value: float) -> "FunctionalWeights":
        return cls(tau=(value,) * N_TAU)

    def tau_(self, index: int) -> float:
        return self.tau[index - 1]

    @property
    def split(self) -> FrequencySplitSpec:
        return FrequencySplitSpec(cutoff=self.cutoff)

    def to_dict(self) -> Dict:
        return {
            "tau": list(self.tau),
            "c1": self.c1,
            "c2": self.c2,
            "cutoff": self.cutoff,
        }

    @classmethod
    def from_dict(cls, item: Mapping) -> "FunctionalWeights":
        unknown = set(item) - {"tau", "c1", "c2", "cutoff"}
        if unknown:
            raise ValueError(f"Unknown weight settings: {sorted(unknown)}.")
        defaults = cls()
        tau = item.get("tau", defaults.tau)
        if isinstance(tau, (int, float)):
            tau = (float(tau),) * N_TAU
        return cls(
            tau=tuple(tau),
            c1=float(item.get("c1", defaults.c1)),
            c2=float(item.get("c2", defaults.c2)),
            cutoff=float(item.get("cutoff", defaults.cutoff)),
        )


@lru_cache(maxsize=None)
def shell_weight(grid: SpatialGrid, order: int) -> np.ndarray:
    """sum over |alpha| = order of k^(2 alpha)."""
    k = grid.wavenumbers
    total = np.zeros(grid.shape)
    for alpha in multi_indices_of_order(order):
        term = np.ones(grid.shape)
        for axis, power in enumerate(alpha):
            if power:
                term = term * k[axis] ** (2 * power)
        total += term
    return total


def _velocity_derivative_matrices(truncation: int, order: int):
    """d_v^beta for |beta| = order, each from degree N to degree N + order."""
    matrices = []
    for beta in multi_indices_of_order(order):
        matrix = None
        degree = truncation
        for axis, power in enumerate(beta):
            for _ in range(power):
                step = ladder_matrix(LadderKind.D_V, axis, degree, degree + 1).toarray()
                matrix = step if matrix is None else step @ matrix
                degree += 1
        matrices.append(matrix)
    return matrices


@lru_cache(maxsize=None)
def velocity_derivative_gram(
    truncation: int, order: int, nu: bool = False
) -> np.ndarray:
    """Gram matrix of sum_{|beta| = order} ||d_v^beta g||^2 (nu-weighted if `nu`)."""
    size = hermite_basis(truncation).size
    gram = np.zeros((size, size))
    inner = nu_gram_matrix(truncation + order) if nu else None
    for matrix in _velocity_derivative_matrices(truncation, order):
        gram += matrix.T @ (inner @ matrix if nu else matrix)
    return gram


class SpectralSnapshot:
    """Fourier coefficients of a state and of the moments the functionals need."""

    def __init__(self, state: KineticFluidState, weights: FunctionalWeights):
        self.state = state
        self.grid = state.grid
        self.basis = state.basis
        self.weights = weights
        self.values = self.grid.forward(state.values)
        n = state.n_herm
        self.c = self.values[:n]
        self.rho = self.values[n]
        self.u = self.values[n + 1 : n + 4]
        self.theta = self.values[n + 4]

    @cached_property
    def k(self) -> np.ndarray:
        return self.grid.wavenumbers

    @cached_property
    def high_mask(self) -> np.ndarray:
        return ~self.weights.split.low_mask(self.grid)

    @cached_property
    def _split_kinetic(self):
        macro, micro = decompose_macro_micro(HermiteCoeffVector(self.basis, self.c))
        return macro, micro

    @cached_property
    def micro(self) -> np.ndarray:
        return self._split_kinetic[1].values

    @cached_property
    def moments(self):
        return macro_moments(HermiteCoeffVector(self.basis, self.c), higher=False)

    @cached_property
    def micro_moments(self):
        if self.basis.truncation < 3:
            raise ValueError(
                "Cross functionals read degree-3 moments; truncation must be >= 3."
            )
        return macro_moments(self._split_kinetic[1], higher=True)

    def sq(self, values: np.ndarray, weight) -> float:
        return float(np.sum(weight * np.abs(values) ** 2)) / self.grid.volume

    def pair(self, first: np.ndarray, second: np.ndarray, weight) -> float:
        total = np.sum(weight * np.real(first * np.conj(second)))
        return float(total) / self.grid.volume

    def hermite_form(self, coefficients: np.ndarray, gram: np.ndarray, weight) -> float:
        flat = coefficients.reshape(coefficients.shape[0], -1)
        density = np.real(np.sum(np.conj(flat) * (gram @ flat), axis=0))
        return float(np.sum(np.ravel(weight * np.ones(self.grid.shape)) * density)) / (
            self.grid.volume
        )

    def w(self, *orders: int) -> np.ndarray:
        return sum(shell_weight(self.grid, order) for order in orders)

    def derivative(self, values: np.ndarray, axis: int) -> np.ndarray:
        return 1j * self.k[axis] * values

    def divergence(self, vector: np.ndarray) -> np.ndarray:
        return sum(self.derivative(vector[axis], axis) for axis in range(3))

    def cross_e0(self, weight: np.ndarray, high_only: bool = False) -> float:
        """Gamma, Upsilon and a pairings of the macro-moment system."""
        moments = self.moments
        micro = self.micro_moments
        mask = self.high_mask if high_only else 1.0
        a, b, omega = moments.a * mask, moments.b * mask, moments.omega * mask
        gamma, upsilon = micro.gamma * mask, micro.upsilon * mask

        total = 0.0
        for i in range(3):
            for j in range(3):
                strain = self.derivative(b[i], j) + self.derivative(b[j], i)
                total += self.pair(strain, gamma[i, j], weight)
            total += self.pair(self.derivative(omega, i), upsilon[i], weight)
        flux = (SQRT6 / 5.0) * self.divergence(upsilon) - self.divergence(b)
        total += (2.0 / 21.0) * self.pair(a, flux, weight)
        return total

    def weighted_cross(self, tau: float, weight: np.ndarray, high_only: bool = False):
        return tau * self.cross_e0(weight, high_only) if tau else 0.0

    def velocity_pairing(self, weight: np.ndarray) -> float:
        """sum_j int u_j d_j rho with the given derivative weight."""
        return sum(
            self.pair(self.u[axis], self.derivative(self.rho, axis), weight)
            for axis in range(3)
        )

    def mixed_derivatives(self, order: int, weight, nu: bool = False) -> float:
        gram = velocity_derivative_gram(self.basis.truncation, order, nu)
        return self.hermite_form(self.micro, gram, weight)

    def exchange(self) -> Tuple[np.ndarray, np.ndarray]:
        """b - u and sqrt(2) omega - sqrt(3) theta."""
        return self.moments.b - self.u, SQRT2 * self.moments.omega - SQRT3 * self.theta

    def macro_fields(self) -> np.ndarray:
        moments = self.moments
        return np.concatenate(
            [moments.a[None], moments.b, self.rho[None], moments.omega[None]]
        )


def _energy(snap: SpectralSnapshot) -> float:
    weights = snap.weights
    w01, w012 = snap.w(0, 1), snap.w(0, 1, 2)
    return (
        snap.sq(snap.values, w012)
        + snap.weighted_cross(weights.tau_(1), w01)
        + weights.tau_(2) * snap.velocity_pairing(w01)
        + weights.tau_(3)
        * (
            weights.c1 * snap.mixed_derivatives(1, w01)
            + weights.c2 * snap.mixed_derivatives(2, snap.w(0))
        )
    )


def _dissipation(snap: SpectralSnapshot) -> float:
    w012 = snap.w(0, 1, 2)
    b_minus_u, heat_exchange = snap.exchange()
    nu = nu_gram_matrix(snap.basis.truncation)
    return (
        snap.sq(snap.macro_fields(), snap.w(1, 2))
        + snap.hermite_form(snap.micro, nu, w012)
        + snap.sq(np.stack([*snap.u, snap.theta]), snap.grid.k_squared * w012)
        + snap.sq(b_minus_u, w012)
        + snap.sq(heat_exchange, w012)
        + snap.mixed_derivatives(1, snap.w(0, 1), nu=True)
        + snap.mixed_derivatives(2, snap.w(0), nu=True)
    )


def _dissipation_torus(snap: SpectralSnapshot) -> float:
    weights = snap.weights
    moments = snap.moments
    w0 = snap.w(0)
    return (
        _dissipation(snap)
        + weights.tau_(9) * (snap.sq(moments.a, w0) + snap.sq(snap.rho, w0))
        + weights.tau_(10) * snap.sq(moments.b + snap.u, w0)
        + weights.tau_(11) * snap.sq(SQRT6 / 2.0 * moments.omega + snap.theta, w0)
    )


def _high_energy(snap: SpectralSnapshot) -> float:
    weights = snap.weights
    w1 = snap.w(1)
    return (
        snap.sq(snap.values, snap.w(1, 2))
        + snap.weighted_cross(weights.tau_(4), w1)
        + weights.tau_(5) * snap.velocity_pairing(w1)
        + weights.tau_(6) * weights.c1 * snap.mixed_derivatives(1, snap.w(0, 1))
    )


def _high_dissipation(snap: SpectralSnapshot) -> float:
    w1, w12 = snap.w(1), snap.w(1, 2)
    b_minus_u, heat_exchange = snap.exchange()
    nu = nu_gram_matrix(snap.basis.truncation)
    k_squared = snap.grid.k_squared
    return (
        snap.hermite_form(snap.micro, nu, w12)
        + snap.sq(b_minus_u, w12)
        + snap.sq(heat_exchange, w12)
        + snap.sq(np.stack([*snap.u, snap.theta]), k_squared * w12)
        + snap.sq(snap.macro_fields(), k_squared * w1)
        + snap.mixed_derivatives(1, w1, nu=True)
    )


def _second_energy(snap: SpectralSnapshot) -> float:
    weights = snap.weights
    rho_high = snap.rho * snap.high_mask
    k = snap.k
    pairing = 0.0
    for i in range(3):
        for j in range(3):
            pairing += snap.pair(
                snap.derivative(snap.u[j], i), -k[i] * k[j] * rho_high, 1.0
            )
    return (
        snap.sq(snap.values, snap.w(2))
        + snap.weighted_cross(weights.tau_(7), snap.w(1), high_only=True)
        + weights.tau_(8) * pairing
    )


def _second_dissipation(snap: SpectralSnapshot) -> float:
    w2 = snap.w(2)
    b_minus_u, heat_exchange = snap.exchange()
    moments = snap.moments
    high = snap.high_mask
    high_fields = np.concatenate(
        [moments.a[None], moments.b, moments.omega[None], snap.rho[None]]
    )
    return (
        snap.hermite_form(snap.micro, nu_gram_matrix(snap.basis.truncation), w2)
        + snap.sq(b_minus_u, w2)
        + snap.sq(heat_exchange, w2)
        + snap.sq(np.stack([*snap.u, snap.theta]), snap.w(3))
        + snap.sq(high_fields * high, w2)
    )


_EVALUATORS = {
    FunctionalKind.ENERGY_E: _energy,
    FunctionalKind.DISSIPATION_D: _dissipation,
    FunctionalKind.DISSIPATION_TORUS: _dissipation_torus,
    FunctionalKind.HIGH_H: _high_energy,
    FunctionalKind.HIGH_M: _high_dissipation,
    FunctionalKind.CROSS_E0: lambda snap: snap.cross_e0(snap.w(0, 1)),
    FunctionalKind.CROSS_E0_PRIME: lambda snap: snap.cross_e0(snap.w(1)),
    FunctionalKind.CROSS_E0_HIGH: lambda snap: snap.cross_e0(snap.w(1), high_only=True),
    FunctionalKind.E1_SECOND: _second_energy,
    FunctionalKind.D1_SECOND: _second_dissipation,
    FunctionalKind.SOBOLEV_PLAIN: lambda snap: snap.sq(snap.values, snap.w(0, 1, 2)),
}


def evaluate_functionals(
    kinds: Iterable[Union[FunctionalKind, str]],
    state: KineticFluidState,
    weights: Optional[FunctionalWeights] = None,
) -> Dict[FunctionalKind, float]:
    """Evaluates several functionals on one state, sharing the transforms."""
    snapshot = SpectralSnapshot(state, weights or FunctionalWeights())
    result = {}
    for kind in kinds:
        kind = as_functional_kind(kind)
        result[kind] = float(_EVALUATORS[kind](snapshot))
    return result


def evaluate_functional(
    kind: Union[FunctionalKind, str],
    state: KineticFluidState,
    weights: Optional[FunctionalWeights] = None,
) -> float:
    """Exact grid-spectral value of the named functional.

    Raises:
        ValueError: for an unknown kind name, or a cross functional on a basis of
            truncation below 3.
    """
    kind = as_functional_kind(kind)
    return evaluate_functionals([kind], state, weights)[kind]
