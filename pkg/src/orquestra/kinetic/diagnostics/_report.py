################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from overrides import overrides

from ..decay import ExponentialFit, fit_exponential
from ..nonlinear import KineticFluidState, Observer, positivity_min
from ._conservation import ConservationResiduals, conservation_residuals
from ._functionals import (
    FunctionalKind,
    FunctionalWeights,
    as_functional_kind,
    evaluate_functionals,
)

logger = logging.getLogger(__name__)

TORUS_KINDS = (
    FunctionalKind.ENERGY_E,
    FunctionalKind.DISSIPATION_D,
    FunctionalKind.HIGH_H,
    FunctionalKind.HIGH_M,
)


@dataclass
class FunctionalReport:
    """Time series of functionals, conservation integrals and positivity minima.

    Recorders attached to the same run share one report. Each stamps the
    observation time first, so all series line up with `times`.
    """

    times: List[float] = field(default_factory=list)
    functionals: Dict[FunctionalKind, List[float]] = field(default_factory=dict)
    conservation: List[ConservationResiduals] = field(default_factory=list)
    positivity: List[float] = field(default_factory=list)

    def stamp(self, t: float):
        if not self.times or t > self.times[-1]:
            self.times.append(float(t))
        elif t < self.times[-1]:
            raise ValueError(
                f"Observation at t={t} precedes the last one at t={self.times[-1]}."
            )

    def series(self, kind: Union[FunctionalKind, str]) -> np.ndarray:
        return np.array(self.functionals[as_functional_kind(kind)])

    def conservation_drift(self) -> np.ndarray:
        """|residual(t) - residual(0)| per observation, shape (n, 4)."""
        if not self.conservation:
            return np.zeros((0, 4))
        reference = self.conservation[0]
        return np.stack([entry.drift(reference) for entry in self.conservation])

    def fit_rate(
        self,
        kind: Union[FunctionalKind, str],
        start: Optional[float] = None,
        stop: Optional[float] = None,
    ) -> ExponentialFit:
        """Exponential decay fit of one series over [start, stop]."""
        times = np.array(self.times)
        values = self.series(kind)
        inside = np.ones(len(times), dtype=bool)
        if start is not None:
            inside &= times >= start
        if stop is not None:
            inside &= times <= stop
        fit = fit_exponential(times[inside], values[inside])
        logger.info(
            "Fitted rate %.6g (residual %.3g) for %s",
            fit.rate,
            fit.residual,
            as_functional_kind(kind).name,
        )
        return fit


class FunctionalRecorder(Observer):
    def __init__(
        self,
        report: FunctionalReport,
        kinds: Sequence[Union[FunctionalKind, str]] = TORUS_KINDS,
        weights: Optional[FunctionalWeights] = None,
    ):
        self.report = report
        self.kinds = [as_functional_kind(kind) for kind in kinds]
        self.weights = weights or FunctionalWeights()
        for kind in self.kinds:
            report.functionals.setdefault(kind, [])

    @overrides
    def observe(self, state: KineticFluidState) -> None:
        self.report.stamp(state.t)
        values = evaluate_functionals(self.kinds, state, self.weights)
        for kind, value in values.items():
            self.report.functionals[kind].append(value)
        logger.info(
            "t=%.6g %s",
            state.t,
            " ".join(f"{kind.name}={value:.6e}" for kind, value in values.items()),
        )


class ConservationRecorder(Observer):
    def __init__(self, report: FunctionalReport):
        self.report = report

    @overrides
    def observe(self, state: KineticFluidState) -> None:
        self.report.stamp(state.t)
        self.report.conservation.append(conservation_residuals(state))


class PositivityRecorder(Observer):
    def __init__(self, report: FunctionalReport, quadrature_order: int = 0):
        self.report = report
        self.quadrature_order = quadrature_order

    @overrides
    def observe(self, state: KineticFluidState) -> None:
        self.report.stamp(state.t)
        self.report.positivity.append(positivity_min(state, self.quadrature_order))

    @overrides
    def finalize(self) -> None:
        if self.report.positivity and min(self.report.positivity) <= 0:
            logger.warning(
                "F = M + sqrt(M) f lost positivity (min %.3g)",
                min(self.report.positivity),
            )


def torus_recorders(
    report: FunctionalReport,
    weights: Optional[FunctionalWeights] = None,
    quadrature_order: int = 0,
) -> List[Observer]:
    """Functional, conservation and positivity recorders writing into `report`."""
    return [
        FunctionalRecorder(report, TORUS_KINDS, weights),
        ConservationRecorder(report),
        PositivityRecorder(report, quadrature_order),
    ]
