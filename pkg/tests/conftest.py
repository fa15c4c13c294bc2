"""Shared test helpers.

The oracle functions here are written from first principles with raw numpy
so they stay independent of the package implementation they check.
"""

import numpy as np
import pytest

SQRT2 = np.sqrt(2.0)
K = 1.0 + SQRT2                 # amplitude ratio of the target state
NORM = 2.0 * np.sqrt(2.0 + SQRT2)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / SQRT2
EYE2 = np.eye(2, dtype=complex)

# Ideal context unitaries in (letter x digit) ordering, index = 2*letter+digit.
ORACLE_CONTEXT_UNITARIES = {
    "XX": np.kron(HADAMARD, HADAMARD),
    "XZ": np.kron(EYE2, HADAMARD),
    "ZX": np.kron(HADAMARD, EYE2),
    "ZZ": np.eye(4, dtype=complex),
}


def oracle_state(phi: float) -> np.ndarray:
    """Target amplitudes evaluated directly from their closed form."""
    return np.array([np.exp(1j * phi), K * np.exp(1j * phi), K, -1.0], dtype=complex) / NORM


def oracle_s(phi: float) -> float:
    """Closed form of the ideal pipeline's S."""
    return float(SQRT2 * (1.0 + np.cos(phi)))


def oracle_pipeline_s(phi: float) -> float:
    """S via a raw matrix simulation, independent of the package."""
    state = oracle_state(phi)
    e = {}
    for ctx, u in ORACLE_CONTEXT_UNITARIES.items():
        p = np.abs(u @ state) ** 2
        e[ctx] = p[0] - p[1] - p[2] + p[3]
    return e["XX"] + e["XZ"] + e["ZX"] - e["ZZ"]


def random_states(n: int, seed: int) -> np.ndarray:
    """n normalized complex 4-vectors, rows of the returned array."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
