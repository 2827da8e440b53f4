################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

from ._mode import ModeGenerator, ModeState

logger = logging.getLogger(__name__)

SUPPORTED_METHODS = ("DOP853", "RK45", "Radau", "BDF")
IMPLICIT_METHODS = ("Radau", "BDF")

Source = Callable[[float], Union[ModeState, np.ndarray]]


@dataclass(frozen=True)
class ModeIntegrationConfig:
    """Error control for `solve_ivp` on the mode system.

    Args:
        method: one of DOP853, RK45, Radau, BDF. Implicit methods receive the
            constant Jacobian A(k).
        rtol: relative tolerance.
        atol_scale: absolute tolerance as a fraction of rtol * |U0|.
    """

    method: str = "DOP853"
    rtol: float = 1e-10
    atol_scale: float = 1e-3

    def __post_init__(self):
        if self.method not in SUPPORTED_METHODS:
            raise ValueError(
                f"Unsupported method {self.method!r}; use one of {SUPPORTED_METHODS}."
            )
        if not 0 < self.rtol < 1:
            raise ValueError(f"rtol must lie in (0, 1), got {self.rtol}.")
        if not self.atol_scale > 0:
            raise ValueError("atol_scale must be positive.")

    def to_dict(self) -> Dict[str, Union[str, float]]:
        return {"method": self.method, "rtol": self.rtol, "atol_scale": self.atol_scale}

    @classmethod
    def from_dict(
        cls, item: Mapping[str, Union[str, float]]
    ) -> "ModeIntegrationConfig":
        unknown = set(item) - {"method", "rtol", "atol_scale"}
        if unknown:
            raise ValueError(f"Unknown integration settings: {sorted(unknown)}.")
        return cls(**item)  # type: ignore

    @classmethod
    def default(cls, stiff: bool = False) -> "ModeIntegrationConfig":
        return cls(method="Radau") if stiff else cls()


def _source_vector(source: Optional[Source], t: float, size: int) -> np.ndarray:
    if source is None:
        return np.zeros(size, dtype=complex)
    value = source(t)
    if isinstance(value, ModeState):
        return value.to_vector()
    return np.asarray(value, dtype=complex)


def _solve(
    gen: ModeGenerator,
    y0: np.ndarray,
    t_eval: np.ndarray,
    source: Optional[Source],
    config: ModeIntegrationConfig,
    breakpoints: Sequence[float],
) -> np.ndarray:
    matrix = gen.matrix
    size = gen.size

    def segment_rhs(start: float, stop: float):
        # the source is sampled strictly inside the segment, so jumps at the
        # edges take their one-sided limits
        low, high = np.nextafter(start, stop), np.nextafter(stop, start)

        def rhs(t, y):
            inner = min(max(t, low), high)
            return matrix @ y + _source_vector(source, inner, size)

        return rhs

    scale = max(float(np.linalg.norm(y0)), 1.0 if source is not None else 0.0)
    atol = config.rtol * config.atol_scale * (scale if scale > 0 else 1.0)
    options = {"method": config.method, "rtol": config.rtol, "atol": atol}
    if config.method in IMPLICIT_METHODS:
        options["jac"] = matrix

    final = float(t_eval[-1])
    edges = sorted({0.0, final, *(b for b in breakpoints if 0.0 < b < final)})
    states = np.empty((len(t_eval), size), dtype=complex)
    states[t_eval == 0.0] = y0
    current = y0.astype(complex)
    for start, stop in zip(edges[:-1], edges[1:]):
        inside = (t_eval > start) & (t_eval <= stop)
        segment_times = np.union1d(t_eval[inside], [stop])
        solution = solve_ivp(
            segment_rhs(start, stop),
            (start, stop),
            current,
            t_eval=segment_times,
            **options,
        )
        if not solution.success:
            raise RuntimeError(
                f"Mode integration failed at |k|={np.linalg.norm(gen.k):.3g}: "
                f"{solution.message}"
            )
        logger.debug(
            "Integrated |k|=%.3g on [%g, %g] with %d evaluations",
            np.linalg.norm(gen.k),
            start,
            stop,
            solution.nfev,
        )
        lookup = np.searchsorted(segment_times, t_eval[inside])
        states[inside] = solution.y.T[lookup]
        current = solution.y[:, -1]
    return states


def evolve_mode_trajectory(
    gen: ModeGenerator,
    state0: ModeState,
    t_grid: Sequence[float],
    source: Optional[Source] = None,
    config: Optional[ModeIntegrationConfig] = None,
    breakpoints: Sequence[float] = (),
) -> np.ndarray:
    """Mode vectors at every time of `t_grid`, shape (len(t_grid), size).

    Args:
        gen: generator A(k).
        state0: state at t = 0.
        t_grid: non-decreasing non-negative times.
        source: optional forcing S(t), returned as a ModeState or a raw vector.
        config: integration settings.
        breakpoints: times where the source is not smooth. Integration restarts
            there instead of stepping across the kink.
    """
    config = config or ModeIntegrationConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValueError("t_grid must be a non-empty 1D array.")
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0):
        raise ValueError("Times must be non-negative and non-decreasing.")
    y0 = state0.to_vector()
    if len(y0) != gen.size:
        raise ValueError(
            f"State of size {len(y0)} does not match a generator of size {gen.size}."
        )
    if t_grid[-1] == 0.0:
        return np.tile(y0, (len(t_grid), 1))
    return _solve(gen, y0, t_grid, source, config, breakpoints)


def evolve_mode(
    gen: ModeGenerator,
    state0: ModeState,
    t: float,
    source: Optional[Source] = None,
    config: Optional[ModeIntegrationConfig] = None,
    breakpoints: Sequence[float] = (),
) -> ModeState:
    """Solves dU/dt = A(k) U + S(t) up to time t.

    Raises:
        ValueError: if t < 0.
        RuntimeError: if the integrator does not meet the tolerance.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}.")
    if t == 0:
        return state0
    vector = evolve_mode_trajectory(
        gen, state0, [t], source=source, config=config, breakpoints=breakpoints
    )[-1]
    return ModeState.from_vector(gen.k, gen.basis, vector)
