"""Preparation and measurement circuit models, ideal and physical.

The preparation chip is a binary tree of three directional couplers.  The
photon enters mode 1; C1 splits the left/right halves over modes (1, 3), the
tunable phase R1 sits on the left branch (mode 1) so that both left-half
output modes inherit exp(i*phi), C2 splits modes (1, 2), C3 splits modes
(3, 4), and three trim phases R2..R4 on modes 2..4 set the relative output
phases.  With the default transmissivities and trim phases the circuit output
equals the direct state constructor exactly.

Each measurement context is a separate physical circuit.  A Z measurement on
a qubit is a straight pass-through; an X measurement is a balanced coupler on
the qubit's mode pairs, preceded by per-mode input phases that make the
coupler's outcome statistics identical to those of a Hadamard.  The letter
qubit couples non-adjacent modes, so its couplers are wrapped in a pair of
waveguide crossings.  In the physical model the digit section precedes the
letter section; for exact tensor-product circuits the order is irrelevant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CalibrationError
from .optics import (
    CouplerSpec,
    ModeVector,
    TransferMatrix,
    basis_state,
    compose,
    coupler,
    crossing,
    phase_shifter,
    probabilities,
)

CONTEXTS = ("XX", "XZ", "ZX", "ZZ")

_SQRT2 = math.sqrt(2.0)

# Preparation defaults derived from the target amplitude ratios
# 1 : (1+sqrt 2) on the left half and (1+sqrt 2) : 1 on the right.
DEFAULT_PREPARATION_TS = (0.5, (2.0 - _SQRT2) / 4.0, (2.0 + _SQRT2) / 4.0)
DEFAULT_PREPARATION_PHASES = (-math.pi / 2.0, -math.pi / 2.0, 0.0)

# Coupler slots per context.  Digit couplers act on mode pairs (1,2)/(3,4),
# letter couplers on (1,3)/(2,4).
MEASUREMENT_COUPLER_SLOTS: dict[str, tuple[str, ...]] = {
    "XX": ("digit_12", "digit_34", "letter_13", "letter_24"),
    "XZ": ("digit_12", "digit_34"),
    "ZX": ("letter_13", "letter_24"),
    "ZZ": (),
}

# Input phases that make balanced couplers outcome-equivalent to Hadamards:
# -pi/2 on the second mode of every coupled pair, summed per qubit.
DEFAULT_MEASUREMENT_PHASES: dict[str, tuple[float, float, float, float]] = {
    "XX": (0.0, -math.pi / 2.0, -math.pi / 2.0, -math.pi),
    "XZ": (0.0, -math.pi / 2.0, 0.0, -math.pi / 2.0),
    "ZX": (0.0, 0.0, -math.pi / 2.0, -math.pi / 2.0),
    "ZZ": (0.0, 0.0, 0.0, 0.0),
}

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / _SQRT2
_EYE2 = np.eye(2, dtype=np.complex128)


def _check_context(context: str) -> str:
    if context not in CONTEXTS:
        raise ValueError(f"unknown context {context!r}, expected one of {CONTEXTS}")
    return context


@dataclass(frozen=True)
class PreparationConfig:
    """Preparation-chip parameters.

    Attributes:
        phi: Tunable phase applied by R1, radians.
        coupler_ts: Transmissivities of (C1, C2, C3).
        calibration_phases: Trim phases (R2, R3, R4) on modes (2, 3, 4).
    """

    phi: float = 0.0
    coupler_ts: tuple[float, float, float] = DEFAULT_PREPARATION_TS
    calibration_phases: tuple[float, float, float] = DEFAULT_PREPARATION_PHASES

    def __post_init__(self):
        if not math.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi!r}")
        ts = tuple(float(t) for t in self.coupler_ts)
        if len(ts) != 3 or any(not (0.0 <= t <= 1.0) for t in ts):
            raise ValueError(f"coupler_ts must be three values in [0, 1], got {self.coupler_ts!r}")
        phases = tuple(float(p) for p in self.calibration_phases)
        if len(phases) != 3 or any(not math.isfinite(p) for p in phases):
            raise ValueError(f"calibration_phases must be three finite values, got {self.calibration_phases!r}")
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "coupler_ts", ts)
        object.__setattr__(self, "calibration_phases", phases)

    def to_json_dict(self) -> dict:
        return {
            "phi": self.phi,
            "coupler_Ts": list(self.coupler_ts),
            "calibration_phases": list(self.calibration_phases),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "PreparationConfig":
        kwargs = {}
        if "phi" in data:
            kwargs["phi"] = data["phi"]
        if "coupler_Ts" in data:
            kwargs["coupler_ts"] = tuple(data["coupler_Ts"])
        if "calibration_phases" in data:
            kwargs["calibration_phases"] = tuple(data["calibration_phases"])
        return cls(**kwargs)


@dataclass(frozen=True)
class MeasurementConfig:
    """One measurement context, ideal or physical.

    Attributes:
        context: "XX", "XZ", "ZX" or "ZZ"; first letter is the digit
            measurement, second the letter measurement.
        mode: "ideal" uses exact Hadamard/identity tensor products;
            "physical" composes couplers, crossings and input phases.
        coupler_ts: Transmissivity per coupler slot (physical mode only);
            missing slots default to the balanced value 0.5.
        calibration_phases: Input phase per mode (physical mode only).
    """

    context: str
    mode: str = "ideal"
    coupler_ts: Mapping[str, float] = field(default_factory=dict)
    calibration_phases: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        _check_context(self.context)
        if self.mode not in ("ideal", "physical"):
            raise ValueError(f"mode must be 'ideal' or 'physical', got {self.mode!r}")
        slots = MEASUREMENT_COUPLER_SLOTS[self.context]
        ts = dict(self.coupler_ts)
        for name, t in ts.items():
            if name not in slots:
                raise ValueError(f"context {self.context} has no coupler slot {name!r}")
            if not (math.isfinite(t) and 0.0 <= t <= 1.0):
                raise ValueError(f"transmissivity for {name!r} must lie in [0, 1], got {t!r}")
        object.__setattr__(self, "coupler_ts", ts)
        if self.calibration_phases is not None:
            phases = tuple(float(p) for p in self.calibration_phases)
            if len(phases) != 4 or any(not math.isfinite(p) for p in phases):
                raise ValueError(f"calibration_phases must be four finite values, got {self.calibration_phases!r}")
            object.__setattr__(self, "calibration_phases", phases)

    def slot_t(self, slot: str) -> float:
        return float(self.coupler_ts.get(slot, 0.5))

    def phases(self) -> tuple[float, float, float, float]:
        if self.calibration_phases is not None:
            return self.calibration_phases
        return DEFAULT_MEASUREMENT_PHASES[self.context]

    def to_json_dict(self) -> dict:
        out: dict = {"context": self.context, "mode": self.mode}
        if self.coupler_ts:
            out["coupler_Ts"] = dict(self.coupler_ts)
        if self.calibration_phases is not None:
            out["calibration_phases"] = list(self.calibration_phases)
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "MeasurementConfig":
        if "context" not in data:
            raise ValueError("measurement config requires a 'context' field")
        return cls(
            context=data["context"],
            mode=data.get("mode", "ideal"),
            coupler_ts=dict(data.get("coupler_Ts", {})),
            calibration_phases=(
                tuple(data["calibration_phases"]) if "calibration_phases" in data else None
            ),
        )


@dataclass(frozen=True)
class DeviceConfig:
    """Full device: one preparation chip plus four measurement circuits.

    ``preparation=None`` selects the direct state constructor instead of the
    circuit model (used by the ideal device).
    """

    preparation: PreparationConfig | None = None
    measurements: Mapping[str, MeasurementConfig] = field(default_factory=dict)

    def __post_init__(self):
        meas = dict(self.measurements)
        for ctx in CONTEXTS:
            cfg = meas.get(ctx, MeasurementConfig(context=ctx))
            if cfg.context != ctx:
                raise ValueError(f"measurement entry {ctx!r} carries context {cfg.context!r}")
            meas[ctx] = cfg
        object.__setattr__(self, "measurements", meas)

    @classmethod
    def ideal(cls) -> "DeviceConfig":
        return cls()

    def to_json_dict(self) -> dict:
        out: dict = {"measurements": {c: m.to_json_dict() for c, m in self.measurements.items()}}
        if self.preparation is not None:
            out["preparation"] = self.preparation.to_json_dict()
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "DeviceConfig":
        prep = None
        if "preparation" in data:
            prep = PreparationConfig.from_json_dict(data["preparation"])
        meas = {}
        for ctx, entry in data.get("measurements", {}).items():
            entry = dict(entry)
            entry.setdefault("context", ctx)
            meas[ctx] = MeasurementConfig.from_json_dict(entry)
        return cls(preparation=prep, measurements=meas)


def load_device_config(path: str | Path) -> DeviceConfig:
    """Read a device configuration JSON document from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid device config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"device config {path} must be a JSON object")
    return DeviceConfig.from_json_dict(data)


def prepare_state_direct(phi: float) -> ModeVector:
    """Target superposition over the four modes for a given phase.

    Amplitudes (exp(i*phi), (1+sqrt 2)*exp(i*phi), 1+sqrt 2, -1) over modes
    1..4, normalized by 2*sqrt(2+sqrt 2).
    """
    if not math.isfinite(phi):
        raise ValueError(f"phi must be finite, got {phi!r}")
    k = 1.0 + _SQRT2
    amps = np.array([np.exp(1j * phi), k * np.exp(1j * phi), k, -1.0], dtype=np.complex128)
    return amps / (2.0 * math.sqrt(2.0 + _SQRT2))


def preparation_unitary(config: PreparationConfig) -> TransferMatrix:
    """Transfer matrix of the full preparation chip."""
    t1, t2, t3 = config.coupler_ts
    r2, r3, r4 = config.calibration_phases
    sections = [
        coupler(CouplerSpec((1, 3), t1)),
        phase_shifter({1}, config.phi),
        coupler(CouplerSpec((1, 2), t2)),
        coupler(CouplerSpec((3, 4), t3)),
        np.diag(np.exp(1j * np.array([0.0, r2, r3, r4]))),
    ]
    return compose(sections)


def prepare_state_circuit(config: PreparationConfig) -> ModeVector:
    """Propagate a photon injected in mode 1 through the preparation chip."""
    return preparation_unitary(config) @ basis_state(1)


def _ideal_unitary(context: str) -> TransferMatrix:
    digit_meas, letter_meas = context[0], context[1]
    letter_op = _HADAMARD if letter_meas == "X" else _EYE2
    digit_op = _HADAMARD if digit_meas == "X" else _EYE2
    return np.kron(letter_op, digit_op)


def measurement_unitary(config: MeasurementConfig) -> TransferMatrix:
    """Transfer matrix of one measurement context.

    Ideal mode returns the exact (letter op) kron (digit op) tensor product
    with H for X and the identity for Z.  Physical mode composes the input
    calibration phases, the digit couplers and the crossing-wrapped letter
    couplers.
    """
    _check_context(config.context)
    if config.mode == "ideal":
        return _ideal_unitary(config.context)
    digit_meas, letter_meas = config.context[0], config.context[1]
    sections: list[TransferMatrix] = [
        np.diag(np.exp(1j * np.asarray(config.phases(), dtype=float)))
    ]
    if digit_meas == "X":
        sections.append(coupler(CouplerSpec((1, 2), config.slot_t("digit_12"))))
        sections.append(coupler(CouplerSpec((3, 4), config.slot_t("digit_34"))))
    if letter_meas == "X":
        sections.append(crossing((2, 3)))
        sections.append(coupler(CouplerSpec((1, 2), config.slot_t("letter_13"))))
        sections.append(coupler(CouplerSpec((3, 4), config.slot_t("letter_24"))))
        sections.append(crossing((2, 3)))
    return compose(sections)


def context_unitaries(device: DeviceConfig) -> dict[str, TransferMatrix]:
    """All four context matrices of a device, keyed by context tag."""
    return {ctx: measurement_unitary(device.measurements[ctx]) for ctx in CONTEXTS}


def align_global_phase(state: ModeVector, reference: ModeVector) -> ModeVector:
    """Rotate ``state`` so its largest-|reference| component is phase-aligned."""
    ref = np.asarray(reference, dtype=np.complex128)
    k = int(np.argmax(np.abs(ref)))
    target_arg = np.angle(ref[k])
    current_arg = np.angle(np.asarray(state, dtype=np.complex128)[k])
    return np.asarray(state, dtype=np.complex128) * np.exp(1j * (target_arg - current_arg))


# --- phase calibration ------------------------------------------------------


@dataclass(frozen=True)
class PhaseSkeleton:
    """A circuit with free single-mode phases at fixed locations.

    Attributes:
        n_phases: Number of free phases.
        build: Maps a phase vector to the circuit's transfer matrix.
        seed_phases: Optional analytic starting point for the optimizer.
    """

    n_phases: int
    build: Callable[[Sequence[float]], TransferMatrix]
    seed_phases: tuple[float, ...] | None = None


def preparation_skeleton(
    coupler_ts: Sequence[float] = DEFAULT_PREPARATION_TS, phi: float = 0.0
) -> PhaseSkeleton:
    """Preparation chip with the three trim phases R2..R4 left free."""
    ts = tuple(float(t) for t in coupler_ts)

    def build(phases: Sequence[float]) -> TransferMatrix:
        cfg = PreparationConfig(phi=phi, coupler_ts=ts, calibration_phases=tuple(phases))
        return preparation_unitary(cfg)

    return PhaseSkeleton(n_phases=3, build=build, seed_phases=DEFAULT_PREPARATION_PHASES)


def measurement_skeleton(
    context: str, coupler_ts: Mapping[str, float] | None = None
) -> PhaseSkeleton:
    """Physical measurement circuit with the four input phases left free."""
    _check_context(context)
    ts = dict(coupler_ts or {})

    def build(phases: Sequence[float]) -> TransferMatrix:
        cfg = MeasurementConfig(
            context=context, mode="physical", coupler_ts=ts,
            calibration_phases=tuple(phases),
        )
        return measurement_unitary(cfg)

    return PhaseSkeleton(
        n_phases=4, build=build, seed_phases=DEFAULT_MEASUREMENT_PHASES[context]
    )


def two_mode_skeleton(transmissivity: float = 0.5) -> PhaseSkeleton:
    """A single (1, 2) coupler with pre and post phases on both modes.

    Small helper used to check diagonal equivalence of a coupler against a
    2x2 target embedded in modes (1, 2).
    """

    def build(phases: Sequence[float]) -> TransferMatrix:
        pre1, pre2, post1, post2 = phases
        return compose([
            np.diag(np.exp(1j * np.array([pre1, pre2, 0.0, 0.0]))),
            coupler(CouplerSpec((1, 2), transmissivity)),
            np.diag(np.exp(1j * np.array([post1, post2, 0.0, 0.0]))),
        ])

    return PhaseSkeleton(n_phases=4, build=build)


def _probe_states(n_probe: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_probe, 4)) + 1j * rng.normal(size=(n_probe, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _probability_residual(u: TransferMatrix, target: TransferMatrix, probes: np.ndarray) -> np.ndarray:
    out = np.abs(probes @ u.T) ** 2 - np.abs(probes @ np.asarray(target).T) ** 2
    return out.ravel()


def _state_residual(u: TransferMatrix, target: ModeVector, input_mode: int) -> np.ndarray:
    produced = align_global_phase(u @ basis_state(input_mode), target)
    diff = produced - np.asarray(target, dtype=np.complex128)
    return np.concatenate([diff.real, diff.imag])


def calibrate_phases(
    target: np.ndarray,
    skeleton: PhaseSkeleton,
    *,
    tol: float = 1e-9,
    n_probe: int = 100,
    probe_seed: int = 20260101,
    input_mode: int = 1,
    seed_phases: Sequence[float] | None = None,
    max_restarts: int = 12,
) -> np.ndarray:
    """Find free phases that reproduce a target circuit or target state.

    For a 4x4 ``target`` the calibrated circuit must produce the same outcome
    probabilities as the target on every probe state (equality up to output
    phases and a global phase).  For a length-4 ``target`` the circuit output
    from ``input_mode`` must match the state up to a global phase.

    Least-squares minimization over the free phases, seeded from
    ``seed_phases``, then the skeleton's analytic seed, then zeros; restarts
    from deterministic pseudo-random points if the residual stays above
    ``tol``.

    Args:
        target: 4x4 unitary or length-4 state vector.
        skeleton: Circuit with free phases.
        tol: Maximum accepted residual (probability deviation for matrix
            targets, amplitude deviation for state targets).
        n_probe: Number of random probe states for matrix targets.
        probe_seed: Seed of the probe-state generator.
        input_mode: Injection mode for state targets.
        seed_phases: Optional explicit starting point.
        max_restarts: Additional randomized starts before giving up.

    Returns:
        Array of calibrated phases, one per free parameter.

    Raises:
        CalibrationError: If no start reaches the tolerance; carries the best
            residual achieved.
    """
    from scipy.optimize import least_squares

    target = np.asarray(target, dtype=np.complex128)
    if target.shape == (4, 4):
        probes = _probe_states(n_probe, probe_seed)

        def residual(phases: np.ndarray) -> np.ndarray:
            return _probability_residual(skeleton.build(phases), target, probes)

    elif target.shape == (4,):

        def residual(phases: np.ndarray) -> np.ndarray:
            return _state_residual(skeleton.build(phases), target, input_mode)

    else:
        raise ValueError(f"target must be a 4x4 matrix or a length-4 state, got shape {target.shape}")

    starts: list[np.ndarray] = []
    if seed_phases is not None:
        starts.append(np.asarray(seed_phases, dtype=float))
    if skeleton.seed_phases is not None:
        starts.append(np.asarray(skeleton.seed_phases, dtype=float))
    starts.append(np.zeros(skeleton.n_phases))
    restart_rng = np.random.default_rng(probe_seed + 1)
    for _ in range(max_restarts):
        starts.append(restart_rng.uniform(-math.pi, math.pi, size=skeleton.n_phases))

    best_phases: np.ndarray | None = None
    best_residual = math.inf
    for start in starts:
        if len(start) != skeleton.n_phases:
            raise ValueError(
                f"seed has {len(start)} phases, skeleton expects {skeleton.n_phases}"
            )
        fit = least_squares(residual, start, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        achieved = float(np.max(np.abs(residual(fit.x))))
        if achieved < best_residual:
            best_residual = achieved
            best_phases = fit.x
        if achieved <= tol:
            return fit.x
    raise CalibrationError("calibration did not reach tolerance", best_residual)


def calibration_residual(
    phases: Sequence[float],
    target: np.ndarray,
    skeleton: PhaseSkeleton,
    *,
    n_probe: int = 100,
    probe_seed: int = 20260101,
    input_mode: int = 1,
) -> float:
    """Maximum deviation of a calibrated skeleton from its target."""
    target = np.asarray(target, dtype=np.complex128)
    u = skeleton.build(np.asarray(phases, dtype=float))
    if target.shape == (4, 4):
        probes = _probe_states(n_probe, probe_seed)
        return float(np.max(np.abs(_probability_residual(u, target, probes))))
    return float(np.max(np.abs(_state_residual(u, target, input_mode))))


def ideal_context_unitary(context: str) -> TransferMatrix:
    """Ideal (tensor-product) unitary for one context tag."""
    return _ideal_unitary(_check_context(context))


def outcome_probabilities(state: ModeVector, unitary: TransferMatrix) -> np.ndarray:
    """Detector-click probabilities after a circuit section."""
    return probabilities(np.asarray(unitary) @ np.asarray(state))


__all__ = [
    "CONTEXTS",
    "DEFAULT_MEASUREMENT_PHASES",
    "DEFAULT_PREPARATION_PHASES",
    "DEFAULT_PREPARATION_TS",
    "MEASUREMENT_COUPLER_SLOTS",
    "DeviceConfig",
    "MeasurementConfig",
    "PhaseSkeleton",
    "PreparationConfig",
    "align_global_phase",
    "calibrate_phases",
    "calibration_residual",
    "context_unitaries",
    "ideal_context_unitary",
    "load_device_config",
    "measurement_skeleton",
    "measurement_unitary",
    "outcome_probabilities",
    "preparation_skeleton",
    "preparation_unitary",
    "prepare_state_circuit",
    "prepare_state_direct",
    "two_mode_skeleton",
]
