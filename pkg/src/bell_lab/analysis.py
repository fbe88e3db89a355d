"""Noise robustness, phase optimization, consistency checks, and dimension scans."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    JointProbabilityTable,
    bell_expression,
    cglmp_expression,
    check_dimension,
)
from .lhv import EXHAUSTIVE_LIMIT, enumerate_strategies
from .quantum import (
    CANONICAL_PHASES,
    MeasurementSettings,
    born_table,
    canonical_correlation,
    quantum_bell_value,
)

SCAN_COLUMNS = ("d", "Q_d", "I_d_QM", "p_threshold", "cglmp_value", "lhv_max")
# exhaustive strategy scans stay cheap in this range; larger d leave the column empty
SCAN_LHV_LIMIT = 16


def noisy_table(d, visibility: float, settings: MeasurementSettings | None = None) -> JointProbabilityTable:
    """Entangled-state table mixed with uniform noise at the given visibility.

    visibility 1 returns the quantum table, 0 the uniform table; the Bell
    expression is linear in the visibility because the uniform part has zero
    correlation.
    """
    d = check_dimension(d)
    v = float(visibility)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    quantum = born_table(d, settings)
    p = v * quantum.p + (1.0 - v) / d ** 2
    return JointProbabilityTable.from_array(p)


def noise_threshold(d) -> float:
    """Visibility where the noisy Bell value crosses the local bound 2."""
    return 2.0 / quantum_bell_value(check_dimension(d))


def noise_threshold_bisect(d, tol: float = 1e-10, settings: MeasurementSettings | None = None) -> float:
    """Threshold located by bisection on the evaluated noisy table."""
    d = check_dimension(d)

    def margin(v: float) -> float:
        return bell_expression(noisy_table(d, v, settings)).approx - 2.0

    lo, hi = 0.0, 1.0
    if margin(hi) < 0:
        raise ValueError(f"no violation at full visibility for d={d}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OptimizationResult:
    start: MeasurementSettings
    start_value: float
    settings: MeasurementSettings
    value: float
    evaluations: int
    final_step: float


def random_settings(rng: np.random.Generator) -> MeasurementSettings:
    """Uniform random phases in [-1/2, 1/2), one per setting."""
    return MeasurementSettings(*rng.uniform(-0.5, 0.5, size=4))


def optimize_phases(
    d,
    start: MeasurementSettings | None = None,
    step: float = 0.05,
    halvings: int = 12,
) -> OptimizationResult:
    """Maximize the Bell value over the four phases by coordinate descent.

    One coordinate move of +-step at a time, keeping strict improvements;
    when a full sweep yields none the step is halved, ``halvings`` times in
    total.  Deterministic for a fixed start.
    """
    d = check_dimension(d)
    start = start or CANONICAL_PHASES

    def value_at(phases) -> float:
        return bell_expression(born_table(d, MeasurementSettings(*phases))).approx

    x = list(start.as_tuple())
    best = value_at(x)
    start_value = best
    evaluations = 1
    width = float(step)
    for _ in range(int(halvings)):
        improved = True
        while improved:
            improved = False
            for coord in range(4):
                for delta in (width, -width):
                    cand = list(x)
                    cand[coord] += delta
                    v = value_at(cand)
                    evaluations += 1
                    if v > best + 1e-12:
                        x, best = cand, v
                        improved = True
        width *= 0.5
    return OptimizationResult(
        start=start,
        start_value=start_value,
        settings=MeasurementSettings(*x),
        value=best,
        evaluations=evaluations,
        final_step=width,
    )


def cglmp_crosscheck(d) -> dict:
    """Evaluate the Bell value through the kernel and the probability-difference form.

    The difference form reads outcomes in the complementary convention for
    the second party (n -> -n mod d), which is the convention its
    probability-difference terms are built for; both paths then measure the
    same behaviour and must agree.
    """
    d = check_dimension(d)
    table = born_table(d)
    kernel_value = bell_expression(table).approx
    cglmp_value = cglmp_expression(table.conjugate_second_party())
    return {
        "kernel_value": kernel_value,
        "cglmp_value": cglmp_value,
        "delta": abs(kernel_value - cglmp_value),
    }


@dataclass(frozen=True)
class ScanRow:
    d: int
    q_correlation: float
    bell_quantum: float
    p_threshold: float
    cglmp_value: float
    lhv_max: Fraction | None


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    bell_increasing: bool
    threshold_decreasing: bool


def scan_dimensions(d_max, lhv_limit: int = SCAN_LHV_LIMIT) -> ScanResult:
    """One summary row per dimension from 2 to d_max, plus monotonicity flags."""
    d_max = check_dimension(d_max)
    lhv_limit = min(int(lhv_limit), EXHAUSTIVE_LIMIT)
    rows = []
    for d in range(2, d_max + 1):
        lhv_max = enumerate_strategies(d).max_value if d <= lhv_limit else None
        rows.append(
            ScanRow(
                d=d,
                q_correlation=canonical_correlation(d),
                bell_quantum=quantum_bell_value(d),
                p_threshold=noise_threshold(d),
                cglmp_value=cglmp_crosscheck(d)["cglmp_value"],
                lhv_max=lhv_max,
            )
        )
    bells = [r.bell_quantum for r in rows]
    thresholds = [r.p_threshold for r in rows]
    return ScanResult(
        rows=tuple(rows),
        bell_increasing=all(b2 > b1 for b1, b2 in zip(bells, bells[1:])),
        threshold_decreasing=all(t2 < t1 for t1, t2 in zip(thresholds, thresholds[1:])),
    )


def _fmt10(x: float) -> str:
    return f"{float(x):.10g}"


def scan_to_csv(result: ScanResult) -> str:
    lines = ["# schema_version=1", ",".join(SCAN_COLUMNS)]
    for r in result.rows:
        lines.append(
            ",".join(
                (
                    str(r.d),
                    _fmt10(r.q_correlation),
                    _fmt10(r.bell_quantum),
                    _fmt10(r.p_threshold),
                    _fmt10(r.cglmp_value),
                    "" if r.lhv_max is None else str(r.lhv_max),
                )
            )
        )
    return "\n".join(lines) + "\n"


def scan_to_json(result: ScanResult) -> dict:
    rows = []
    for r in result.rows:
        rows.append(
            {
                "d": r.d,
                "Q_d": float(_fmt10(r.q_correlation)),
                "I_d_QM": float(_fmt10(r.bell_quantum)),
                "p_threshold": float(_fmt10(r.p_threshold)),
                "cglmp_value": float(_fmt10(r.cglmp_value)),
                "lhv_max": None if r.lhv_max is None else str(r.lhv_max),
            }
        )
    return {
        "schema_version": 1,
        "rows": rows,
        "bell_value_increasing": result.bell_increasing,
        "threshold_decreasing": result.threshold_decreasing,
    }
