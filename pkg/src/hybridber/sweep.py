"""Parameter sweeps and the CSV layout shared by the command line tools."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .combine import BerBreakdown
from .config import ConfigError, Scenario, Vector3
from .optimize import ber_profile

CSV_SCHEMA_VERSION = 1
BER_COLUMNS = ("p_mol", "p_in2on", "p_on", "p_off", "p_e2e")

# sweep variable -> CSV column name (carries the unit of the sweep values)
VARIABLES = {
    "threshold_dest": "threshold_dest",
    "relay_y": "relay_y_um",
    "drift_y": "drift_y_um_per_s",
    "t_dmc": "t_dmc_ms",
}


@dataclass(frozen=True)
class SweepSpec:
    """Sweep of one variable over ``n_points`` evenly spaced values.

    Units: threshold_dest in molecules, relay_y in um, drift_y in um/s, t_dmc in ms.
    """

    variable: str
    start: float
    stop: float
    n_points: int
    overrides: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ConfigError(f"must be one of {sorted(VARIABLES)}", "variable")
        if not self.start < self.stop:
            raise ConfigError("start must be < stop", "range")
        if self.n_points < 2:
            raise ConfigError("need at least 2 points", "n_points")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n_points)


def apply_variable(scenario: Scenario, variable: str, value: float) -> Scenario:
    m = scenario.molecular
    if variable == "threshold_dest":
        return replace(scenario, molecular=replace(m, threshold_dest=float(value)))
    if variable == "relay_y":
        pos = Vector3(m.relay_pos.x, value / 10 ** 6, m.relay_pos.z)
        return replace(scenario, molecular=replace(m, relay_pos=pos))
    if variable == "drift_y":
        drift = Vector3(m.drift.x, value / 10 ** 6, m.drift.z)
        return replace(scenario, molecular=replace(m, drift=drift))
    if variable == "t_dmc":
        return scenario.with_t_dmc(value / 10 ** 3)
    raise ConfigError(f"unknown sweep variable {variable!r}", "variable")


def run_sweep(scenario: Scenario, spec: SweepSpec) -> list[tuple[float, BerBreakdown]]:
    rows = []
    for v in spec.values():
        sc = apply_variable(scenario, spec.variable, float(v))
        rows.append((float(v), ber_profile(sc.slot.t_dmc, sc)))
    return rows


def format_value(x: float) -> str:
    return f"{x:.9g}"


def rows_to_csv(first_column: str, rows: Iterable[tuple[float, BerBreakdown]]) -> str:
    buf = io.StringIO()
    buf.write(f"# hybridber csv v{CSV_SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([first_column, *BER_COLUMNS])
    for v, bd in rows:
        writer.writerow([format_value(v)] + [format_value(getattr(bd, c)) for c in BER_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Parse a file written by :func:`rows_to_csv` into (header, values)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    data = np.array([[float(x) for x in row] for row in reader])
    return header, data
