################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from dataclasses import asdict, dataclass
from typing import Any, Dict


@dataclass(frozen=True)
class PhysicalParams:
    """Transport coefficients of the normalized fluid equations.

    The specific heat and the gas constant are fixed to one by the normalization, so
    only the viscosities and the heat conductivity are free.

    Args:
        mu1: shear viscosity, must be positive.
        mu2: second viscosity coefficient, subject to mu2 + 2 * mu1 / 3 >= 0.
        kappa: heat conductivity, must be positive.
    """

    mu1: float = 1.0
    mu2: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.mu1 <= 0:
            raise ValueError("mu1 must be positive.")
        if self.mu2 + 2.0 * self.mu1 / 3.0 < 0:
            raise ValueError("mu2 + 2 * mu1 / 3 must be non-negative.")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive.")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, item: Dict[str, Any]) -> "PhysicalParams":
        unknown = set(item) - {"mu1", "mu2", "kappa"}
        if unknown:
            raise ValueError(f"Unknown physical parameters: {sorted(unknown)}.")
        return cls(**{key: float(value) for key, value in item.items()})
