"""Expectations, marginals, the CHSH-like quantity S and its classical bounds.

Outcome signs follow the detector formula E = p1 - p2 - p3 + p4: the product
of the two measurement outcomes is +1 on modes 1 and 4 and -1 on modes 2 and
3.  That product factorizes as letter outcome +1 on the left half (modes 1
and 2) and digit outcome +1 on the odd modes (1 and 3); any consistent
factorization leaves S and epsilon unchanged.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

CONTEXTS = ("XX", "XZ", "ZX", "ZZ")

# Product outcome per mode, fixed by E = p1 - p2 - p3 + p4.
OUTCOME_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])

# Input probability vectors may come from empirically normalized counts, so
# the sum check is looser than the internal 1e-12 unitarity tolerance.
PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ContextProbabilities:
    """Outcome probabilities of the four detectors in one context."""

    context: str
    p: tuple[float, float, float, float]

    def __post_init__(self):
        if self.context not in CONTEXTS:
            raise ValueError(f"unknown context {self.context!r}, expected one of {CONTEXTS}")
        p = tuple(float(x) for x in self.p)
        if len(p) != 4:
            raise ValueError(f"need exactly four probabilities, got {len(p)}")
        if any(x < -PROB_SUM_TOL or x > 1.0 + PROB_SUM_TOL for x in p):
            raise ValueError(f"probabilities must lie in [0, 1], got {p!r}")
        if abs(sum(p) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities must sum to 1 within {PROB_SUM_TOL}, got sum {sum(p)!r}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class InequalityReport:
    """One complete evaluation of the inequality.

    ``sigma_s`` is zero for analytic inputs; ``significance`` is None
    whenever ``sigma_s`` is not positive.
    """

    expectations: Mapping[str, float]
    s: float
    epsilon: float
    bound: float
    sigma_s: float = 0.0
    significance: float | None = None

    def __post_init__(self):
        for ctx, e in self.expectations.items():
            if ctx not in CONTEXTS:
                raise ValueError(f"unknown context {ctx!r} in expectations")
            if abs(e) > 1.0 + PROB_SUM_TOL:
                raise ValueError(f"expectation for {ctx} out of [-1, 1]: {e!r}")
        if abs(self.s) > 4.0 + PROB_SUM_TOL:
            raise ValueError(f"|S| cannot exceed 4, got {self.s!r}")
        if self.epsilon < -PROB_SUM_TOL:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon!r}")
        if self.sigma_s < 0.0:
            raise ValueError(f"sigma_s must be non-negative, got {self.sigma_s!r}")
        object.__setattr__(self, "expectations", dict(self.expectations))

    def to_json_dict(self) -> dict:
        return {
            "expectations": {c: self.expectations[c] for c in CONTEXTS if c in self.expectations},
            "S": self.s,
            "epsilon": self.epsilon,
            "bound": self.bound,
            "sigma_S": self.sigma_s,
            "significance": self.significance,
        }


def expectation(cp: ContextProbabilities) -> float:
    """Product expectation p1 - p2 - p3 + p4 of one context."""
    p = cp.p
    return p[0] - p[1] - p[2] + p[3]


def marginals(cp: ContextProbabilities) -> tuple[float, float]:
    """Single-measurement marginals (letter, digit) of one context.

    Letter outcome +1 on the left half, digit outcome +1 on the odd modes,
    consistent with the product signs of :func:`expectation`.
    """
    p = cp.p
    m_letter = (p[0] + p[1]) - (p[2] + p[3])
    m_digit = (p[0] + p[2]) - (p[1] + p[3])
    return m_letter, m_digit


def _by_context(cps: Iterable[ContextProbabilities]) -> dict[str, ContextProbabilities]:
    seen: dict[str, ContextProbabilities] = {}
    for cp in cps:
        if cp.context in seen:
            raise ValueError(f"duplicate probabilities for context {cp.context}")
        seen[cp.context] = cp
    missing = [c for c in CONTEXTS if c not in seen]
    if missing:
        raise ValueError(f"missing probabilities for context(s) {missing}")
    return seen


def chsh_s(cps: Iterable[ContextProbabilities]) -> float:
    """S = E_XX + E_XZ + E_ZX - E_ZZ from one probability vector per context."""
    by_ctx = _by_context(cps)
    e = {c: expectation(by_ctx[c]) for c in CONTEXTS}
    return e["XX"] + e["XZ"] + e["ZX"] - e["ZZ"]


def epsilon(cps: Iterable[ContextProbabilities]) -> float:
    """Compatibility correction: summed marginal shifts across partner swaps.

    For each single measurement, the marginal taken in the context whose
    partner is X is compared with the one whose partner is Z; the four
    absolute differences are summed.
    """
    by_ctx = _by_context(cps)
    letter = {c: marginals(by_ctx[c])[0] for c in CONTEXTS}
    digit = {c: marginals(by_ctx[c])[1] for c in CONTEXTS}
    return (
        abs(digit["XX"] - digit["XZ"])      # digit X measurement
        + abs(digit["ZX"] - digit["ZZ"])    # digit Z measurement
        + abs(letter["XX"] - letter["ZX"])  # letter X measurement
        + abs(letter["XZ"] - letter["ZZ"])  # letter Z measurement
    )


def significance(s: float, eps: float, sigma_s: float) -> float:
    """Violation z-score (s - (2 + eps)) / sigma_s; negative means no violation."""
    if not (sigma_s > 0.0) or not math.isfinite(sigma_s):
        raise ValueError(f"sigma_s must be positive, got {sigma_s!r}")
    return (s - (2.0 + eps)) / sigma_s


def assignment_values() -> np.ndarray:
    """S evaluated on all 16 deterministic +-1 outcome assignments."""
    values = []
    for x12, z12, xab, zab in itertools.product((1, -1), repeat=4):
        values.append(x12 * xab + x12 * zab + z12 * xab - z12 * zab)
    return np.array(values, dtype=float)


def classical_bound_enumeration() -> float:
    """Maximum of S over every deterministic outcome assignment (equals 2)."""
    return float(np.max(assignment_values()))


def report_from_probabilities(
    cps: Iterable[ContextProbabilities], sigma_s: float = 0.0
) -> InequalityReport:
    """Bundle expectations, S, epsilon, bound and significance into a report."""
    by_ctx = _by_context(cps)
    expectations = {c: expectation(by_ctx[c]) for c in CONTEXTS}
    s = expectations["XX"] + expectations["XZ"] + expectations["ZX"] - expectations["ZZ"]
    eps = epsilon(by_ctx.values())
    sig = significance(s, eps, sigma_s) if sigma_s > 0.0 else None
    return InequalityReport(
        expectations=expectations,
        s=s,
        epsilon=eps,
        bound=2.0 + eps,
        sigma_s=sigma_s,
        significance=sig,
    )
