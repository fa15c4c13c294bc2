"""Phase-sweep engine: evaluates the full pipeline over a grid of phases.

A sweep point builds the prepared state, pushes it through the four context
circuits, and either reports the exact probabilities (analytic mode) or
draws multinomial counts and reports estimates with uncertainties (sampled
mode).  Sweep points are independent; with ``jobs > 1`` they are evaluated
in a thread pool, and output order is fixed by the phase grid, never by
completion order.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import analysis
from .analysis import ContextProbabilities, InequalityReport
from .chips import (
    CONTEXTS,
    DeviceConfig,
    context_unitaries,
    outcome_probabilities,
    prepare_state_circuit,
    prepare_state_direct,
)
from .errors import ConsistencyError
from .optics import TransferMatrix, is_unitary
from .sampling import CountRecord, derive_seed, estimate_expectation, estimate_s, sample_counts

SWEEP_CSV_COLUMNS = (
    "phi", "E_XX", "E_XZ", "E_ZX", "E_ZZ", "S", "epsilon", "bound", "sigma_S", "significance",
)

FIGURE3_CSV_COLUMNS = ("phi", "S_ideal", "S_device", "epsilon_device", "bound_device")


@dataclass(frozen=True)
class SweepSpec:
    """Grid and evaluation mode of one sweep."""

    phi_start: float
    phi_end: float
    steps: int
    mode: str = "analytic"  # or "sampled"
    shots: int = 100_000
    master_seed: int = 0
    device: DeviceConfig = field(default_factory=DeviceConfig.ideal)
    bootstrap: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.phi_start) and math.isfinite(self.phi_end)):
            raise ValueError("phase limits must be finite")
        if not self.phi_start < self.phi_end:
            raise ValueError(f"phi_start must be below phi_end, got {self.phi_start} >= {self.phi_end}")
        if self.steps < 2:
            raise ValueError(f"steps must be at least 2, got {self.steps}")
        if self.mode not in ("analytic", "sampled"):
            raise ValueError(f"mode must be 'analytic' or 'sampled', got {self.mode!r}")
        if self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be positive, got {self.jobs}")

    def phis(self) -> np.ndarray:
        return np.linspace(self.phi_start, self.phi_end, self.steps)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated sweep point, with the sampled counts when present."""

    phi: float
    report: InequalityReport
    counts: tuple[CountRecord, ...] | None = None


def _prepared_state(device: DeviceConfig, phi: float) -> np.ndarray:
    if device.preparation is None:
        return prepare_state_direct(phi)
    return prepare_state_circuit(replace(device.preparation, phi=phi))


def _checked_unitaries(device: DeviceConfig) -> dict[str, TransferMatrix]:
    unitaries = context_unitaries(device)
    for ctx, u in unitaries.items():
        if not is_unitary(u):
            raise ConsistencyError(f"assembled circuit for context {ctx} is not unitary")
    return unitaries


def context_probability_map(
    device: DeviceConfig, phi: float, unitaries: dict[str, TransferMatrix] | None = None
) -> dict[str, np.ndarray]:
    """Exact outcome probabilities of every context at one phase."""
    if unitaries is None:
        unitaries = _checked_unitaries(device)
    state = _prepared_state(device, phi)
    return {ctx: outcome_probabilities(state, unitaries[ctx]) for ctx in CONTEXTS}


def evaluate_point(
    spec: SweepSpec,
    index: int,
    unitaries: dict[str, TransferMatrix],
) -> SweepRow:
    """Evaluate one grid point of a sweep."""
    phi = float(spec.phis()[index])
    probs = context_probability_map(spec.device, phi, unitaries)
    if spec.mode == "analytic":
        cps = [ContextProbabilities(ctx, tuple(probs[ctx])) for ctx in CONTEXTS]
        return SweepRow(phi=phi, report=analysis.report_from_probabilities(cps))

    records = []
    for ctx_index, ctx in enumerate(CONTEXTS):
        seed = derive_seed(spec.master_seed, index, ctx_index)
        records.append(sample_counts(probs[ctx], spec.shots, seed, context=ctx))
    report = report_from_counts(records, bootstrap=spec.bootstrap)
    return SweepRow(phi=phi, report=report, counts=tuple(records))


def report_from_counts(
    records: Sequence[CountRecord], bootstrap: int | None = None
) -> InequalityReport:
    """Estimate the inequality report from one count record per context."""
    s, sigma_s = estimate_s(records, bootstrap=bootstrap)
    cps = [ContextProbabilities(rec.context, tuple(rec.fractions())) for rec in records]
    eps = analysis.epsilon(cps)
    expectations = {rec.context: estimate_expectation(rec).value for rec in records}
    sig = analysis.significance(s, eps, sigma_s) if sigma_s > 0.0 else None
    return InequalityReport(
        expectations=expectations, s=s, epsilon=eps, bound=2.0 + eps,
        sigma_s=sigma_s, significance=sig,
    )


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate every grid point, in grid order."""
    unitaries = _checked_unitaries(spec.device)
    indices = range(spec.steps)
    if spec.jobs > 1:
        with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(lambda i: evaluate_point(spec, i, unitaries), indices))
    return [evaluate_point(spec, i, unitaries) for i in indices]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_sweep_csv(path: str | Path, rows: Iterable[SweepRow]) -> None:
    """Write sweep rows; the significance cell is empty when undefined."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_CSV_COLUMNS)
        for row in rows:
            rep = row.report
            sig = "" if rep.significance is None else _fmt(rep.significance)
            writer.writerow([
                _fmt(row.phi),
                _fmt(rep.expectations["XX"]), _fmt(rep.expectations["XZ"]),
                _fmt(rep.expectations["ZX"]), _fmt(rep.expectations["ZZ"]),
                _fmt(rep.s), _fmt(rep.epsilon), _fmt(rep.bound), _fmt(rep.sigma_s), sig,
            ])


def counts_rows(rows: Iterable[SweepRow]) -> list[tuple[float, CountRecord]]:
    """Flatten sampled sweep rows into (phi, record) pairs for the counts CSV."""
    out: list[tuple[float, CountRecord]] = []
    for row in rows:
        if row.counts is None:
            continue
        for rec in row.counts:
            out.append((row.phi, rec))
    return out


def write_figure_curves_csv(
    path: str | Path, spec: SweepSpec, device: DeviceConfig
) -> None:
    """Write the ideal curve and a device curve side by side (analytic mode).

    Columns: phi, S of the ideal pipeline, S of the device pipeline, the
    device epsilon and the corrected bound 2 + epsilon.
    """
    ideal_spec = replace(spec, mode="analytic", device=DeviceConfig.ideal())
    device_spec = replace(spec, mode="analytic", device=device)
    ideal_rows = run_sweep(ideal_spec)
    device_rows = run_sweep(device_spec)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIGURE3_CSV_COLUMNS)
        for ideal_row, device_row in zip(ideal_rows, device_rows):
            writer.writerow([
                _fmt(ideal_row.phi),
                _fmt(ideal_row.report.s),
                _fmt(device_row.report.s),
                _fmt(device_row.report.epsilon),
                _fmt(device_row.report.bound),
            ])
