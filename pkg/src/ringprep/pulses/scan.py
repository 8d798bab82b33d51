"""Robustness scans over (delta, eps) error grids with CSV/JSON output."""

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .composite import CompositePulse
from .fidelity import gate_infidelity
from .shaped import ShapedPulse, selective_composite_unitary


@dataclass(frozen=True)
class FidelityScan:
    """Grid of infidelities over detuning (rows) and amplitude (columns)."""

    delta_grid: np.ndarray
    eps_grid: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "delta_grid", np.asarray(self.delta_grid, float))
        object.__setattr__(self, "eps_grid", np.asarray(self.eps_grid, float))
        object.__setattr__(self, "values", np.asarray(self.values, float))
        if self.values.shape != (len(self.delta_grid), len(self.eps_grid)):
            raise ValueError("scan values must be (n_delta, n_eps)")

    def worst(self):
        return float(self.values.max())

    def to_csv(self):
        """Header row of eps values, first column of delta values."""
        buf = io.StringIO()
        buf.write("delta\\eps," + ",".join(f"{e:.10g}" for e in self.eps_grid) + "\n")
        for d, row in zip(self.delta_grid, self.values):
            buf.write(f"{d:.10g}," + ",".join(f"{v:.12e}" for v in row) + "\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        eps = np.array([float(x) for x in lines[0].split(",")[1:]])
        deltas, rows = [], []
        for ln in lines[1:]:
            cells = ln.split(",")
            deltas.append(float(cells[0]))
            rows.append([float(x) for x in cells[1:]])
        return FidelityScan(np.array(deltas), eps, np.array(rows))

    def to_json(self):
        return json.dumps(
            {
                "delta": self.delta_grid.tolist(),
                "eps": self.eps_grid.tolist(),
                "infidelity": self.values.tolist(),
                "metadata": self.metadata,
            }
        )


def parse_range(spec):
    """'lo:hi:n' inclusive grid, or a plain number for a single point."""
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    lo, hi, n = spec.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def robustness_scan(pulse, target, delta_range, eps_range, broadband=None, metadata=None):
    """Infidelity grid of a pulse against a target unitary.

    `pulse` is a CompositePulse, a ShapedPulse (evaluated as the full
    selective rotation), or a callable (delta, eps) -> unitary supporting
    array arguments.
    """
    deltas = parse_range(delta_range) if isinstance(delta_range, str) else np.asarray(delta_range, float)
    epss = parse_range(eps_range) if isinstance(eps_range, str) else np.asarray(eps_range, float)
    dmesh, emesh = np.meshgrid(deltas, epss, indexing="ij")
    if isinstance(pulse, CompositePulse):
        u = pulse.unitary(dmesh, emesh)
    elif isinstance(pulse, ShapedPulse):
        u = selective_composite_unitary(pulse, dmesh, emesh, broadband=broadband)
    else:
        u = pulse(dmesh, emesh)
    values = gate_infidelity(u, target)
    return FidelityScan(deltas, epss, values, metadata=dict(metadata or {}))
