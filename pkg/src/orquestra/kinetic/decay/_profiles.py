################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..hermite import (
    HermiteBasis,
    HermiteCoeffVector,
    LadderKind,
    apply_matrix,
    ladder_matrix,
    macro_moments,
    velocity_quadrature,
)
from ..linear import ModeLayout

FLUID_COMPONENTS = ("rho", "u1", "u2", "u3", "theta")


def _gaussian_hat(sigma: float, k_norm: np.ndarray) -> np.ndarray:
    return (2 * math.pi * sigma**2) ** 1.5 * np.exp(-0.5 * sigma**2 * k_norm**2)


def gaussian_lq_norm(sigma: float, q: float) -> float:
    """||exp(-|x|^2 / (2 sigma^2))||_{L^q(R^3)}."""
    if not q >= 1:
        raise ValueError(f"q must be at least 1, got {q}.")
    return (2 * math.pi * sigma**2 / q) ** (1.5 / q)


@dataclass(frozen=True)
class InitialProfile:
    """U0(x) = g(x) d with an isotropic Gaussian envelope g of width `sigma`.

    Args:
        sigma: width of the envelope exp(-|x|^2 / (2 sigma^2)).
        fluid: amplitudes of (rho, u1, u2, u3, theta) in d.
        kinetic: amplitudes of Hermite coefficients of f in d, keyed by
            multi-index.
    """

    sigma: float = 1.0
    fluid: Tuple[float, float, float, float, float] = (1.0, 0.0, 0.0, 0.0, 1.0)
    kinetic: Tuple[Tuple[Tuple[int, int, int], float], ...] = (((0, 0, 0), 1.0),)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive.")
        if len(self.fluid) != 5:
            raise ValueError("fluid amplitudes are (rho, u1, u2, u3, theta).")

    @classmethod
    def default(cls) -> "InitialProfile":
        return cls()

    def to_dict(self) -> Dict:
        return {
            "sigma": self.sigma,
            "fluid": dict(zip(FLUID_COMPONENTS, self.fluid)),
            "kinetic": [[list(alpha), value] for alpha, value in self.kinetic],
        }

    @classmethod
    def from_dict(cls, item: Mapping) -> "InitialProfile":
        unknown = set(item) - {"sigma", "fluid", "kinetic"}
        if unknown:
            raise ValueError(f"Unknown profile settings: {sorted(unknown)}.")
        defaults = cls()
        fluid = defaults.fluid
        if "fluid" in item:
            extra = set(item["fluid"]) - set(FLUID_COMPONENTS)
            if extra:
                raise ValueError(f"Unknown fluid components: {sorted(extra)}.")
            fluid = tuple(
                float(item["fluid"].get(name, 0.0)) for name in FLUID_COMPONENTS
            )
        kinetic = defaults.kinetic
        if "kinetic" in item:
            kinetic = tuple(
                (tuple(int(c) for c in alpha), float(value))
                for alpha, value in item["kinetic"]
            )
        return cls(
            sigma=float(item.get("sigma", defaults.sigma)),
            fluid=fluid,  # type: ignore
            kinetic=kinetic,  # type: ignore
        )

    def direction(self, basis: HermiteBasis) -> np.ndarray:
        layout = ModeLayout(basis)
        vector = np.zeros(layout.size, dtype=complex)
        for alpha, value in self.kinetic:
            vector[basis.index(alpha)] = value
        vector[layout.n_herm :] = self.fluid
        return vector

    def envelope_hat(self, k_norm) -> np.ndarray:
        return _gaussian_hat(self.sigma, np.asarray(k_norm, dtype=float))

    def envelope_l2_norm_squared(self) -> float:
        return (math.pi * self.sigma**2) ** 1.5

    def z2_norm(self, basis: HermiteBasis) -> float:
        """Exact ||U0||_{Z_2}."""
        direction = self.direction(basis)
        return math.sqrt(
            float(np.sum(np.abs(direction) ** 2)) * self.envelope_l2_norm_squared()
        )


@dataclass(frozen=True, eq=False)
class DuhamelSource:
    """Kinetic forcing div_v G - v.G / 2 + h with a Gaussian spatial envelope.

    The forcing acts on the window [t_on, t_off) with unit amplitude.

    Args:
        g: three coefficient vectors G_1, G_2, G_3 with P_0 G = P_1 G = 0.
        h: coefficient vector with P h = 0.
        sigma: width of the spatial envelope.
        t_on: start of the forcing window.
        t_off: end of the forcing window, or None for a constant source.
    """

    g: Tuple[HermiteCoeffVector, HermiteCoeffVector, HermiteCoeffVector]
    h: HermiteCoeffVector
    sigma: float = 1.0
    t_on: float = 0.0
    t_off: Optional[float] = None

    def __post_init__(self):
        if len(self.g) != 3:
            raise ValueError("G has exactly three velocity components.")
        truncation = self.h.basis.truncation
        if any(component.basis.truncation != truncation for component in self.g):
            raise ValueError("G and h must share a Hermite truncation.")
        if self.t_off is not None and self.t_off <= self.t_on:
            raise ValueError("t_off must exceed t_on.")

    @property
    def basis(self) -> HermiteBasis:
        return self.h.basis

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(t for t in (self.t_on, self.t_off) if t is not None and t > 0)

    def check_orthogonality(self, tolerance: float = 1e-12):
        """Raises ValueError unless P_0 G = P_1 G = 0 and P h = 0."""
        for axis, component in enumerate(self.g):
            moments = macro_moments(component, higher=False)
            if abs(moments.a) > tolerance or np.max(np.abs(moments.b)) > tolerance:
                raise ValueError(
                    f"G_{axis + 1} has a non-zero P_0 or P_1 component."
                )
        moments = macro_moments(self.h, higher=False)
        if (
            abs(moments.a) > tolerance
            or np.max(np.abs(moments.b)) > tolerance
            or abs(moments.omega) > tolerance
        ):
            raise ValueError("h has a non-zero macroscopic component.")

    def time_profile(self, t: float) -> float:
        if t < self.t_on:
            return 0.0
        if self.t_off is not None and t >= self.t_off:
            return 0.0
        return 1.0

    def kinetic_direction(self) -> np.ndarray:
        """Coefficients of div_v G - v.G / 2 + h = -sum_i RAISE_i G_i + h."""
        truncation = self.basis.truncation
        values = np.array(self.h.values, dtype=complex)
        for axis, component in enumerate(self.g):
            values -= apply_matrix(
                ladder_matrix(LadderKind.RAISE, axis, truncation), component.values
            )
        return values

    def velocity_norm_squared(self, quadrature_order: int = 0) -> float:
        """sum_i ||G_i||^2 + ||nu^{-1/2} h||^2 over velocity."""
        total = sum(component.norm_squared() for component in self.g)
        order = quadrature_order or self.basis.truncation + 12
        quadrature = velocity_quadrature(order)
        nodes = quadrature.nodes
        samples = np.tensordot(self.h.values, self.basis.evaluate(nodes), axes=(0, 0))
        weight = 1.0 / (1.0 + np.sum(nodes**2, axis=1))
        return float(total + quadrature.integrate(weight * np.abs(samples) ** 2))

    def envelope_hat(self, k_norm) -> np.ndarray:
        return _gaussian_hat(self.sigma, np.asarray(k_norm, dtype=float))
