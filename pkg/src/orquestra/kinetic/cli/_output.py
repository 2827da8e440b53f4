################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
import io
import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
import rapidjson as json

from ..diagnostics import FunctionalReport, TORUS_KINDS

logger = logging.getLogger(__name__)

AnyPath = Union[str, Path]

DECAY_COLUMNS = ("t", "norm_m0", "norm_m1", "norm_m2")
TORUS_COLUMNS = (
    "t",
    "E",
    "D",
    "H",
    "M",
    "cons_mass_f",
    "cons_mass_rho",
    "cons_momentum",
    "cons_energy",
    "positivity_min",
)
COLUMN_NOTES = {
    "t": "time, nondimensional",
    "norm_m0": "Z_2 norm of the linear solution",
    "norm_m1": "Z_2 norm of its first spatial derivatives",
    "norm_m2": "Z_2 norm of its second spatial derivatives",
    "value": "sampled quantity",
    "fitted_envelope": "fitted envelope evaluated at t",
    "E": "instant energy functional",
    "D": "dissipation functional",
    "H": "high-frequency energy functional",
    "M": "high-frequency dissipation functional",
    "cons_mass_f": "integral of a",
    "cons_mass_rho": "integral of rho",
    "cons_momentum": "Euclidean norm of the integral of b + (1 + rho) u",
    "cons_energy": "integral of the total energy density",
    "positivity_min": "minimum of M + sqrt(M) f over grid and velocity nodes",
}
MANIFEST_NAME = "manifest.json"


def _atomic_write(path: AnyPath, text: str):
    """Writes the file through a temporary sibling and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(handle, "w") as f:
            f.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def write_table(
    path: AnyPath,
    columns: Sequence[str],
    rows: np.ndarray,
    comments: Sequence[str] = (),
) -> Path:
    """Writes a CSV table with '#'-prefixed header comments.

    Raises:
        ValueError: if the table is empty, holds NaN, or its width does not match
            `columns`.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size == 0:
        raise ValueError("Refusing to write an empty table.")
    if rows.shape[1] != len(columns):
        raise ValueError(
            f"Table has {rows.shape[1]} columns, expected {len(columns)}: {columns}."
        )
    if np.any(np.isnan(rows)):
        raise ValueError("Refusing to write a table holding NaN.")
    header = list(comments)
    header += [f"{name}: {COLUMN_NOTES.get(name, '')}".rstrip(": ") for name in columns]
    header.append(",".join(columns))
    buffer = io.StringIO()
    np.savetxt(buffer, rows, fmt="%.17g", delimiter=",", header="\n".join(header))
    _atomic_write(path, buffer.getvalue())
    logger.info("Wrote %d rows to %s", len(rows), path)
    return Path(path)


def read_table(path: AnyPath) -> Tuple[List[str], np.ndarray]:
    """Column names (last header line) and rows of a table written by `write_table`."""
    header = ""
    with open(path, "r") as f:
        for line in f:
            if not line.startswith("#"):
                break
            header = line
    columns = [name.strip() for name in header.lstrip("#").split(",")]
    rows = np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#", ndmin=2))
    return columns, rows


def emit_plot_data(report: FunctionalReport, target: AnyPath) -> Path:
    """Writes the torus columns of a report as a plotting table.

    Raises:
        ValueError: if the report is empty, misses one of the series or holds NaN.
    """
    if not report.times:
        raise ValueError("The report holds no observations.")
    count = len(report.times)
    missing = [kind.name for kind in TORUS_KINDS if kind not in report.functionals]
    if missing:
        raise ValueError(f"The report misses the functionals {missing}.")
    if len(report.conservation) != count or len(report.positivity) != count:
        raise ValueError("Conservation and positivity series must cover every row.")
    columns = [np.array(report.times)]
    columns += [report.series(kind) for kind in TORUS_KINDS]
    conservation = np.array([entry.scalars() for entry in report.conservation])
    columns += list(conservation.T)
    columns.append(np.array(report.positivity))
    return write_table(target, TORUS_COLUMNS, np.column_stack(columns))


def emit_decay_table(
    times: Sequence[float], norms: Mapping[int, np.ndarray], target: AnyPath
) -> Path:
    """Writes t and the Z_2 norms for every available derivative order."""
    columns = ["t"] + [f"norm_m{m}" for m in sorted(norms)]
    rows = np.column_stack([np.asarray(times)] + [norms[m] for m in sorted(norms)])
    return write_table(target, columns, rows)


def emit_envelope_table(
    times: Sequence[float], values: Sequence[float], envelope, target: AnyPath
) -> Path:
    """Writes (t, value, fitted_envelope) for one fitted series."""
    times = np.asarray(times, dtype=float)
    rows = np.column_stack([times, np.asarray(values), envelope(times)])
    return write_table(target, ("t", "value", "fitted_envelope"), rows)


def _to_builtin(value):
    """JSON fallback for numpy scalars and arrays left in fitted parameters."""
    if isinstance(value, (np.generic, np.ndarray)):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable.")


@dataclass
class RunManifest:
    """Record of one experiment run.

    `checks` maps acceptance check names to pass/fail; `fits` holds the fitted
    parameters needed to recompute every envelope column.
    """

    experiment: str
    config: Dict[str, Any]
    version: str
    wall_time: float = 0.0
    outputs: List[str] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)
    fits: Dict[str, Any] = field(default_factory=dict)
    error: str = ""
    created: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    @property
    def passed(self) -> bool:
        return not self.error and all(self.checks.values())

    def add_output(self, path: AnyPath):
        self.outputs.append(str(path))

    def missing_outputs(self) -> List[str]:
        return [
            output
            for output in self.outputs
            if not os.path.isfile(output) or os.path.getsize(output) == 0
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "created": self.created,
            "version": self.version,
            "wall_time": self.wall_time,
            "config": self.config,
            "outputs": list(self.outputs),
            "checks": {name: bool(passed) for name, passed in self.checks.items()},
            "fits": self.fits,
            "error": self.error,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, item: Mapping[str, Any]) -> "RunManifest":
        return cls(
            experiment=item["experiment"],
            config=dict(item["config"]),
            version=item["version"],
            wall_time=float(item.get("wall_time", 0.0)),
            outputs=list(item.get("outputs", [])),
            checks={key: bool(value) for key, value in item.get("checks", {}).items()},
            fits=dict(item.get("fits", {})),
            error=item.get("error", ""),
            created=item.get("created", ""),
        )

    def write(self, directory: AnyPath) -> Path:
        path = Path(directory) / MANIFEST_NAME
        text = json.dumps(
            self.to_dict(), indent=2, sort_keys=True, default=_to_builtin
        )
        _atomic_write(path, text)
        return path


def load_manifest(path: AnyPath) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    with open(path, "r") as f:
        return RunManifest.from_dict(json.load(f))
