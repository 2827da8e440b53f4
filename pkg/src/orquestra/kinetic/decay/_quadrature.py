################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Tuple, Union

import numpy as np
from scipy.special import roots_legendre

ANGULAR_RULES = ("lebedev26", "lebedev50")


def _signed_permutations(point: Tuple[float, float, float]) -> np.ndarray:
    points = set()
    for permutation in itertools.permutations(point):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            points.add(tuple(s * p for s, p in zip(signs, permutation)))
    return np.array(sorted(points))


def _with_weight(points: np.ndarray, weight: float):
    return points, np.full(len(points), weight)


@lru_cache(maxsize=None)
def sphere_rule(name: str) -> Tuple[np.ndarray, np.ndarray]:
    """Octahedrally symmetric Lebedev directions with weights summing to 4 pi.

    Args:
        name: "lebedev26" (degree 7) or "lebedev50" (degree 11).
    """
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    inv_sqrt3 = 1.0 / math.sqrt(3.0)
    faces = _signed_permutations((1.0, 0.0, 0.0))
    edges = _signed_permutations((0.0, inv_sqrt2, inv_sqrt2))
    corners = _signed_permutations((inv_sqrt3, inv_sqrt3, inv_sqrt3))
    if name == "lebedev26":
        groups = [
            _with_weight(faces, 1.0 / 21.0),
            _with_weight(edges, 4.0 / 105.0),
            _with_weight(corners, 9.0 / 280.0),
        ]
    elif name == "lebedev50":
        l, m = 1.0 / math.sqrt(11.0), 3.0 / math.sqrt(11.0)
        groups = [
            _with_weight(faces, 0.0126984126984127),
            _with_weight(edges, 0.02257495590828924),
            _with_weight(corners, 0.02109375),
            _with_weight(_signed_permutations((l, l, m)), 0.02017333553791887),
        ]
    else:
        raise ValueError(f"Unknown angular rule {name!r}; use one of {ANGULAR_RULES}.")
    directions = np.concatenate([points for points, _ in groups])
    weights = np.concatenate([w for _, w in groups]) * 4.0 * math.pi
    return directions, weights


@dataclass(frozen=True)
class KQuadrature:
    """Product rule for integrals over k in R^3.

    Radial nodes are Gauss-Legendre in log k on [k_min, k_max], so the radial
    weights carry the factor k^3 = k^2 (dk / d log k).
    """

    k_min: float = 1e-3
    k_max: float = 20.0
    n_radial: int = 64
    angular: str = "lebedev26"

    def __post_init__(self):
        if not 0 < self.k_min < self.k_max:
            raise ValueError("Need 0 < k_min < k_max.")
        if self.n_radial < 2:
            raise ValueError("n_radial must be at least 2.")
        if self.angular not in ANGULAR_RULES:
            raise ValueError(
                f"Unknown angular rule {self.angular!r}; use one of {ANGULAR_RULES}."
            )

    def to_dict(self) -> Dict[str, Union[float, int, str]]:
        return {
            "k_min": self.k_min,
            "k_max": self.k_max,
            "n_radial": self.n_radial,
            "angular": self.angular,
        }

    @classmethod
    def from_dict(cls, item: Mapping[str, Union[float, int, str]]) -> "KQuadrature":
        unknown = set(item) - {"k_min", "k_max", "n_radial", "angular"}
        if unknown:
            raise ValueError(f"Unknown quadrature settings: {sorted(unknown)}.")
        defaults = cls()
        return cls(
            k_min=float(item.get("k_min", defaults.k_min)),
            k_max=float(item.get("k_max", defaults.k_max)),
            n_radial=int(item.get("n_radial", defaults.n_radial)),
            angular=str(item.get("angular", defaults.angular)),
        )

    def refined(self) -> "KQuadrature":
        """Twice the radial nodes and the 50-point angular set."""
        return KQuadrature(
            k_min=self.k_min,
            k_max=self.k_max,
            n_radial=2 * self.n_radial,
            angular="lebedev50",
        )

    def radial_rule(self) -> Tuple[np.ndarray, np.ndarray]:
        """Radii and weights w_r such that sum w_r g(r) ~ integral g(k) k^2 dk."""
        points, weights = roots_legendre(self.n_radial)
        low, high = math.log(self.k_min), math.log(self.k_max)
        half_width = 0.5 * (high - low)
        radii = np.exp(low + half_width * (points + 1.0))
        return radii, half_width * weights * radii**3

    def angular_rule(self) -> Tuple[np.ndarray, np.ndarray]:
        return sphere_rule(self.angular)

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """All wave vectors (n_nodes, 3) and weights, radial index varying slowest."""
        radii, radial_weights = self.radial_rule()
        directions, angular_weights = self.angular_rule()
        vectors = radii[:, None, None] * directions[None, :, :]
        weights = radial_weights[:, None] * angular_weights[None, :]
        return vectors.reshape(-1, 3), weights.reshape(-1)
