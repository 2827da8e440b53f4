################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
"""Per-wavenumber linearized system.

A mode is stored as one complex vector laid out as

    [c_alpha for alpha in basis] + [rho, u_1, u_2, u_3, theta].
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..api import PhysicalParams
from ..hermite import (
    HermiteBasis,
    HermiteBasisSpec,
    HermiteCoeffVector,
    LadderKind,
    collision_diagonal,
    hermite_basis,
    ladder_matrix,
)

SQRT2 = math.sqrt(2.0)
FLUID_SIZE = 5


def _as_wavevector(k: Sequence[float]) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.shape != (3,):
        raise ValueError(f"Wave vector must have 3 components, got shape {k.shape}.")
    return k


@dataclass(frozen=True, eq=False)
class ModeLayout:
    """Index bookkeeping for mode vectors over a given Hermite basis."""

    basis: HermiteBasis

    @property
    def n_herm(self) -> int:
        return self.basis.size

    @property
    def size(self) -> int:
        return self.basis.size + FLUID_SIZE

    @property
    def rho(self) -> int:
        return self.n_herm

    @property
    def u(self) -> slice:
        return slice(self.n_herm + 1, self.n_herm + 4)

    @property
    def theta(self) -> int:
        return self.n_herm + 4

    @property
    def f(self) -> slice:
        return slice(0, self.n_herm)


@dataclass(frozen=True, eq=False)
class ModeState:
    """Fourier coefficients (f_hat, rho_hat, u_hat, theta_hat) at one wave vector."""

    k: np.ndarray
    f_hat: HermiteCoeffVector
    rho: complex
    u: np.ndarray
    theta: complex

    def __post_init__(self):
        object.__setattr__(self, "k", _as_wavevector(self.k))
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (3,):
            raise ValueError(f"u_hat must have 3 components, got shape {u.shape}.")
        object.__setattr__(self, "u", u)
        if self.f_hat.trailing_shape:
            raise ValueError(
                "A mode state carries a single Hermite coefficient vector."
            )
        if not np.all(np.isfinite(self.to_vector())):
            raise ValueError("Mode state entries must be finite.")

    @property
    def layout(self) -> ModeLayout:
        return ModeLayout(self.f_hat.basis)

    @classmethod
    def zeros(cls, k: Sequence[float], basis: HermiteBasis) -> "ModeState":
        return cls(
            k=np.asarray(k, dtype=float),
            f_hat=HermiteCoeffVector.zeros(basis, dtype=complex),
            rho=0.0,
            u=np.zeros(3, dtype=complex),
            theta=0.0,
        )

    @classmethod
    def from_vector(
        cls, k: Sequence[float], basis: HermiteBasis, vector: np.ndarray
    ) -> "ModeState":
        layout = ModeLayout(basis)
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (layout.size,):
            raise ValueError(
                f"Expected a mode vector of length {layout.size}, got {vector.shape}."
            )
        return cls(
            k=k,
            f_hat=HermiteCoeffVector(basis, vector[layout.f].copy()),
            rho=vector[layout.rho],
            u=vector[layout.u].copy(),
            theta=vector[layout.theta],
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [
                np.asarray(self.f_hat.values, dtype=complex),
                [self.rho],
                self.u,
                [self.theta],
            ]
        )

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.to_vector()) ** 2))

    def scaled(self, factor: complex) -> "ModeState":
        vector = factor * self.to_vector()
        return ModeState.from_vector(self.k, self.f_hat.basis, vector)


@dataclass(frozen=True, eq=False)
class ModeGenerator:
    """Matrix A(k) with dU/dt = A(k) U for the source-free linearized system."""

    k: np.ndarray
    matrix: np.ndarray
    params: PhysicalParams
    basis: HermiteBasis

    @property
    def layout(self) -> ModeLayout:
        return ModeLayout(self.basis)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, state: ModeState) -> ModeState:
        vector = self.matrix @ state.to_vector()
        return ModeState.from_vector(self.k, self.basis, vector)

    def restricted(self, indices: Sequence[int]) -> np.ndarray:
        """Sub-block of A(k) on the given coordinates."""
        indices = np.asarray(indices)
        return self.matrix[np.ix_(indices, indices)]


def assemble_generator(
    k: Sequence[float],
    params: Optional[PhysicalParams] = None,
    spec: Optional[HermiteBasisSpec] = None,
) -> ModeGenerator:
    """Builds A(k) for the Fourier-transformed linearized system.

    Kinetic rows: -i v.k f + L f + u.v sqrt(M) + theta (|v|^2 - 3) sqrt(M).
    Fluid rows:

        rho'   = -i k.u
        u'     = -mu1 |k|^2 u - (mu1 + mu2) k (k.u) - i k theta - i k rho - (u - b)
        theta' = -kappa |k|^2 theta - i k.u - sqrt(3)(sqrt(3) theta - sqrt(2) omega)

    Raises:
        ValueError: if the truncation is below 3.
    """
    params = params or PhysicalParams()
    spec = spec or HermiteBasisSpec()
    if spec.truncation < 3:
        raise ValueError("The linearized mode system needs truncation >= 3.")
    k = _as_wavevector(k)
    basis = hermite_basis(spec.truncation)
    layout = ModeLayout(basis)
    matrix = np.zeros((layout.size, layout.size), dtype=complex)

    transport = sum(
        k[axis]
        * ladder_matrix(LadderKind.MULT_V, axis, spec.truncation).toarray()
        for axis in range(3)
    )
    matrix[layout.f, layout.f] = -1j * transport + np.diag(collision_diagonal(basis))

    u_columns = np.arange(layout.u.start, layout.u.stop)
    b_rows = np.array(basis.unit_positions)
    second_shell = np.array(basis.second_shell_diagonal_positions)
    matrix[b_rows, u_columns] += 1.0
    matrix[second_shell, layout.theta] += SQRT2

    matrix[layout.rho, u_columns] = -1j * k

    k_squared = float(k @ k)
    u_block = -params.mu1 * k_squared * np.eye(3)
    u_block = u_block - (params.mu1 + params.mu2) * np.outer(k, k)
    matrix[layout.u, layout.u] = u_block - np.eye(3)
    matrix[u_columns, b_rows] += 1.0
    matrix[u_columns, layout.theta] = -1j * k
    matrix[u_columns, layout.rho] = -1j * k

    matrix[layout.theta, layout.theta] = -params.kappa * k_squared - 3.0
    matrix[layout.theta, u_columns] = -1j * k
    matrix[layout.theta, second_shell] += SQRT2
    return ModeGenerator(k=k, matrix=matrix, params=params, basis=basis)
