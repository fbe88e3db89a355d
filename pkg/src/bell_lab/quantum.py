"""Quantum predictions: phased Fourier measurements on the maximally entangled state.

Each party measures in a basis of Fourier vectors with a per-setting phase
offset.  On the maximally entangled state of two d-level systems the joint
outcome probabilities depend only on the outcome sum m + n and the phase sum,
which makes the closed form below possible and concentrates the Bell
expression into a single spin-projection distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    JointProbabilityTable,
    OutcomeMapping,
    SETTING_PAIRS,
    check_dimension,
    mapped_spin_distribution,
)
from .errors import SingularAngleError

# sin factors smaller than this are treated as an exact zero of the closed form
SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class MeasurementSettings:
    """Phase offsets (in outcome units) for the two settings of each party."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha1, self.alpha2, self.beta1, self.beta2)

    def phases(self, i: int, j: int) -> tuple[float, float]:
        alpha = self.alpha1 if i == 1 else self.alpha2
        beta = self.beta1 if j == 1 else self.beta2
        return alpha, beta

    @classmethod
    def from_iterable(cls, values) -> "MeasurementSettings":
        vals = [float(v) for v in values]
        if len(vals) != 4:
            raise ValueError(f"need exactly 4 phases (alpha1, alpha2, beta1, beta2), got {len(vals)}")
        return cls(*vals)


# Phases that maximize the Bell expression over this measurement family.
CANONICAL_PHASES = MeasurementSettings(0.0, 0.5, 0.25, -0.25)


def max_entangled_state(d) -> np.ndarray:
    """Coefficient matrix of (1/sqrt d) sum_l |l, l>, shape (d, d)."""
    d = check_dimension(d)
    return np.eye(d, dtype=complex) / np.sqrt(d)


def measurement_basis(d, phase: float) -> np.ndarray:
    """Orthonormal Fourier basis with phase offset; row m is the outcome-m vector.

    U[m, l] = exp(i 2 pi l (m + phase) / d) / sqrt(d).
    """
    d = check_dimension(d)
    l = np.arange(d)
    return np.exp(2j * np.pi * np.outer(np.arange(d) + phase, l) / d) / np.sqrt(d)


def born_table(d, settings: MeasurementSettings | None = None) -> JointProbabilityTable:
    """Joint outcome probabilities via inner products with the entangled state."""
    d = check_dimension(d)
    settings = settings or CANONICAL_PHASES
    p = np.empty((2, 2, d, d))
    for i, j in SETTING_PAIRS:
        alpha, beta = settings.phases(i, j)
        ua = measurement_basis(d, alpha)
        ub = measurement_basis(d, beta)
        amp = np.conj(ua) @ np.conj(ub).T / np.sqrt(d)
        p[i - 1, j - 1] = np.abs(amp) ** 2
    return JointProbabilityTable.from_array(p)


def closed_form_table(d, settings: MeasurementSettings | None = None) -> JointProbabilityTable:
    """Same probabilities in closed form.

    p_ij(m, n) = sin^2(pi (alpha_i + beta_j)) / (d^3 sin^2(pi (m + n + alpha_i + beta_j) / d)).

    At the canonical phases every numerator equals 1/2.  A vanishing
    denominator (phase sum congruent to -(m+n) mod d) has no finite closed
    form and raises ``SingularAngleError`` naming the entry.
    """
    d = check_dimension(d)
    settings = settings or CANONICAL_PHASES
    m, n = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    p = np.empty((2, 2, d, d))
    for i, j in SETTING_PAIRS:
        alpha, beta = settings.phases(i, j)
        den = np.sin(np.pi * (m + n + alpha + beta) / d)
        bad = np.abs(den) < SINGULAR_TOL
        if bad.any():
            bm, bn = np.argwhere(bad)[0]
            raise SingularAngleError(i, j, int(bm), int(bn))
        p[i - 1, j - 1] = np.sin(np.pi * (alpha + beta)) ** 2 / (d ** 3 * den ** 2)
    return JointProbabilityTable.from_array(p)


def shift_symmetry_deviation(t: JointProbabilityTable) -> float:
    """Largest violation of p(m, n) = p(m + c, n - c) over all cyclic shifts c.

    Zero (to rounding) for any table whose entries depend only on the outcome
    sum mod d, as the entangled-state tables do.
    """
    worst = 0.0
    for c in range(1, t.d):
        shifted = np.roll(t.p, (-c, c), axis=(2, 3))
        worst = max(worst, float(np.abs(t.p - shifted).max()))
    return worst


def outcome_sum_distribution(t: JointProbabilityTable, i: int, j: int, sig: int = 1) -> np.ndarray:
    """Distribution of the outcome sum: entry k is P(m + n congruent to sig * k mod d)."""
    return mapped_spin_distribution(t, i, j, OutcomeMapping.sum_mapping(t.d), sig)


def spin_projection_distribution(d) -> np.ndarray:
    """Spin-projection distribution of the canonical table, indexed by k = S - S_z.

    q[k] = 1 / (2 d^2 sin^2(pi (k + 1/4) / d)); equals the outcome-sum
    distribution of any canonical setting pair and sums to 1.
    """
    d = check_dimension(d)
    k = np.arange(d)
    return 1.0 / (2 * d ** 2 * np.sin(np.pi * (k + 0.25) / d) ** 2)


def canonical_correlation(d) -> float:
    """Correlation value Q shared (up to sign) by all four canonical setting pairs."""
    d = check_dimension(d)
    s = (d - 1) / 2.0
    q = spin_projection_distribution(d)
    return float(((s - np.arange(d)) * q).sum() / s)


def quantum_bell_value(d) -> float:
    """Bell expression of the canonical table: all four pairs contribute equally."""
    return 4.0 * canonical_correlation(d)


def correlation_matrix(d) -> np.ndarray:
    """Matrix of canonical correlations Q_ij: [[Q, Q], [-Q, Q]]."""
    q = canonical_correlation(d)
    return np.array([[q, q], [-q, q]])
