"""Command line interface.

Subcommands: quantum, lhv, scan, noise, optimize, cglmp, check.  Reports are
deterministic for a fixed argument vector: floats are printed with 10
significant digits, exact rationals as "p/q", and every JSON report carries a
schema_version field.  Exit codes: 0 success, 1 failed checks, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import analysis, core, lhv, quantum
from .errors import BellLabError

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    return f"{float(x):.10g}"


def _round10(x) -> float:
    return float(_fmt(x))


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(obj) -> None:
    _emit(json.dumps(obj, indent=2))


def _parse_phases(text: str) -> quantum.MeasurementSettings:
    parts = text.split(",")
    try:
        return quantum.MeasurementSettings.from_iterable(float(p) for p in parts)
    except ValueError as exc:
        raise BellLabError(f"--phases expects 'a1,a2,b1,b2' as numbers: {exc}")


def _table_payload(table: core.JointProbabilityTable) -> dict:
    # table entries keep full precision so a re-read reproduces the Bell value
    return table.to_json_dict()["tables"]


def _correlations_payload(table: core.JointProbabilityTable) -> dict:
    return {
        key: float(core.correlation(table, i, j).approx)
        for (i, j), key in zip(core.SETTING_PAIRS, core.PAIR_KEYS)
    }


def cmd_quantum(args) -> int:
    if args.input_file:
        table = core.load_table(args.input_file)
        report = {
            "schema_version": SCHEMA_VERSION,
            "d": table.d,
            "source": args.input_file,
            "summary": {
                "bell_value": float(core.bell_expression(table).approx),
                "correlations": _correlations_payload(table),
            },
        }
        _emit_json(report)
        return 0
    d = core.check_dimension(args.d)
    settings = _parse_phases(args.phases) if args.phases else quantum.CANONICAL_PHASES
    table = quantum.born_table(d, settings)
    # the closed form must agree; it also guards against singular phase choices
    closed = quantum.closed_form_table(d, settings)
    agreement = float(np.abs(table.p - closed.p).max())
    report = {
        "schema_version": SCHEMA_VERSION,
        "d": d,
        "phases": [float(x) for x in settings.as_tuple()],
        "tables": _table_payload(table),
        "summary": {
            "d": d,
            "Q_d": _round10(quantum.canonical_correlation(d)),
            "I_d_QM": _round10(quantum.quantum_bell_value(d)),
            "bell_value": float(core.bell_expression(table).approx),
            "correlations": _correlations_payload(table),
            "closed_form_agreement": _round10(agreement),
        },
    }
    _emit_json(report)
    return 0


def _lhv_summary(args) -> lhv.EnumerationSummary:
    d = core.check_dimension(args.d)
    mapping = (
        core.OutcomeMapping.difference_mapping(d)
        if args.mapping == "difference"
        else core.OutcomeMapping.sum_mapping(d)
    )
    if args.samples is not None:
        if args.seed is None:
            raise BellLabError("--samples requires --seed for a reproducible draw")
        return lhv.sample_strategies(d, args.samples, args.seed, mapping)
    return lhv.enumerate_strategies(d, mapping, threads=args.threads)


def cmd_lhv(args) -> int:
    summary = _lhv_summary(args)
    if args.format == "json":
        _emit_json(summary.to_json_dict())
        return 0
    exact = summary.max_value
    lines = [
        f"d = {summary.d}  mapping = {summary.mapping}  method = {summary.method}"
        f"  strategies = {summary.n_strategies}",
        f"max = {exact} (exact)",
        "histogram: " + "  ".join(f"{v} x{c}" for v, c in summary.histogram.items()),
        "cases: " + "  ".join(f"{k}={v}" for k, v in summary.case_counts.items()),
        f"argmax count = {summary.argmax_count}",
    ]
    if summary.d == 2:
        lines.append("note: case labels are degenerate for d = 2")
    if summary.seed is not None:
        lines.append(f"seed = {summary.seed}")
    _emit("\n".join(lines))
    return 0


def cmd_scan(args) -> int:
    result = analysis.scan_dimensions(core.check_dimension(args.dmax))
    if args.format == "json":
        _emit_json(analysis.scan_to_json(result))
    else:
        _emit(analysis.scan_to_csv(result))
    return 0


def cmd_noise(args) -> int:
    d = core.check_dimension(args.d)
    closed = analysis.noise_threshold(d)
    bisected = analysis.noise_threshold_bisect(d)
    delta = abs(closed - bisected)
    if args.format == "json":
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "d": d,
                "I_d_QM": _round10(quantum.quantum_bell_value(d)),
                "p_threshold": _round10(closed),
                "p_threshold_bisect": _round10(bisected),
                "delta": float(f"{delta:.3g}"),
            }
        )
    else:
        _emit(
            "\n".join(
                (
                    f"d = {d}",
                    f"I_d_QM = {_fmt(quantum.quantum_bell_value(d))}",
                    f"p_threshold = {_fmt(closed)}",
                    f"p_threshold_bisect = {_fmt(bisected)}  (delta {delta:.3g})",
                )
            )
        )
    return 0


def cmd_optimize(args) -> int:
    d = core.check_dimension(args.d)
    if args.seed is not None:
        start = analysis.random_settings(np.random.default_rng(args.seed))
    else:
        start = quantum.CANONICAL_PHASES
    result = analysis.optimize_phases(d, start, step=args.step, halvings=args.halvings)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "d": d,
        "seed": args.seed,
        "start_phases": [_round10(x) for x in result.start.as_tuple()],
        "start_value": _round10(result.start_value),
        "best_phases": [_round10(x) for x in result.settings.as_tuple()],
        "best_value": _round10(result.value),
        "evaluations": result.evaluations,
    }
    if args.format == "json":
        _emit_json(payload)
    else:
        _emit(
            "\n".join(
                (
                    f"d = {d}  seed = {args.seed}",
                    f"start phases = {tuple(payload['start_phases'])}  value = {payload['start_value']}",
                    f"best phases  = {tuple(payload['best_phases'])}  value = {payload['best_value']}",
                    f"evaluations = {result.evaluations}",
                )
            )
        )
    return 0


def cmd_cglmp(args) -> int:
    d = core.check_dimension(args.d)
    result = analysis.cglmp_crosscheck(d)
    if args.format == "json":
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "d": d,
                "kernel_value": _round10(result["kernel_value"]),
                "cglmp_value": _round10(result["cglmp_value"]),
                "delta": float(f"{result['delta']:.3g}"),
            }
        )
    else:
        _emit(
            "\n".join(
                (
                    f"d = {d}",
                    f"kernel_value = {_fmt(result['kernel_value'])}",
                    f"cglmp_value = {_fmt(result['cglmp_value'])}",
                    f"delta = {result['delta']:.3g}",
                )
            )
        )
    return 0


def _random_rational_table(d: int, rng: np.random.Generator) -> core.JointProbabilityTable:
    nested = []
    for _ in range(2):
        row = []
        for _ in range(2):
            weights = rng.integers(1, 10, size=(d, d))
            total = int(weights.sum())
            row.append(
                tuple(tuple(Fraction(int(w), total) for w in line) for line in weights)
            )
        nested.append(tuple(row))
    return core.JointProbabilityTable.from_fractions(tuple(nested))


def _check_battery(d: int) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(12345 + d)
    results = []

    def record(name: str, ok: bool, detail: str) -> None:
        results.append((name, bool(ok), detail))

    kern = core.correlation_kernel(d)
    zero = max(abs(int(kern.numerators[i - 1, j - 1].sum())) for i, j in core.SETTING_PAIRS)
    record("kernel-zero-sum", zero == 0, f"largest pair numerator sum {zero}")

    expect = np.sort(d - 1 - 2 * np.arange(d))
    rows_ok = all(
        (np.sort(kern.numerators[i - 1, j - 1][m]) == expect).all()
        for i, j in core.SETTING_PAIRS
        for m in range(d)
    )
    record("kernel-row-multiset", rows_ok, "each row is a permutation of the weight set")

    table = quantum.born_table(d)
    closed = quantum.closed_form_table(d)
    dev = float(np.abs(table.p - closed.p).max())
    worst = dev
    for _ in range(3):
        settings = analysis.random_settings(rng)
        m = np.arange(d)
        grid = m[:, None] + m[None, :]
        singular = min(
            float(np.abs(np.sin(np.pi * (grid + a + b) / d)).min())
            for a, b in (settings.phases(i, j) for i, j in core.SETTING_PAIRS)
        )
        if singular < 1e-3:
            continue
        t2 = quantum.born_table(d, settings)
        c2 = quantum.closed_form_table(d, settings)
        worst = max(worst, float(np.abs(t2.p - c2.p).max()))
    record("born-vs-closed-form", worst < 1e-12, f"max entry deviation {worst:.3e}")

    basis = quantum.measurement_basis(d, 0.25)
    gram_dev = float(np.abs(basis @ basis.conj().T - np.eye(d)).max())
    record("basis-orthonormality", gram_dev < 1e-12, f"gram deviation {gram_dev:.3e}")

    shift_dev = quantum.shift_symmetry_deviation(table)
    record("shift-symmetry", shift_dev < 1e-12, f"max deviation {shift_dev:.3e}")

    sum_dist = quantum.outcome_sum_distribution(table, 1, 1, 1)
    direct = d * table.p[0, 0, :, 0]
    qdist = quantum.spin_projection_distribution(d)
    marg_dev = float(max(np.abs(sum_dist - direct).max(), np.abs(sum_dist - qdist).max()))
    record("sum-distribution-identity", marg_dev < 1e-12, f"max deviation {marg_dev:.3e}")

    q = quantum.canonical_correlation(d)
    corr = {key: core.correlation(table, i, j).approx
            for (i, j), key in zip(core.SETTING_PAIRS, core.PAIR_KEYS)}
    sign_dev = max(
        abs(corr["11"] - q), abs(corr["12"] - q), abs(corr["21"] + q), abs(corr["22"] - q)
    )
    record("correlation-sign-pattern", sign_dev < 1e-12, f"max deviation {sign_dev:.3e}")

    bell = core.bell_expression(table).approx
    record("quantum-violation", bell > 2.8, f"bell value {bell:.10g}")

    mapping = core.OutcomeMapping.sum_mapping(d)
    assembled = core.bell_from_spin_correlations(table, mapping).approx
    rational = _random_rational_table(d, rng)
    exact_match = (
        core.bell_from_spin_correlations(rational, mapping).exact
        == core.bell_expression(rational).exact
    )
    assembly_dev = abs(assembled - bell)
    record(
        "spin-assembly-consistency",
        assembly_dev < 1e-12 and exact_match,
        f"float deviation {assembly_dev:.3e}, exact match {exact_match}",
    )

    cross = analysis.cglmp_crosscheck(d)
    record("cglmp-consistency", cross["delta"] < 1e-10, f"delta {cross['delta']:.3e}")

    thr = analysis.noise_threshold(d)
    identity_dev = abs(thr * bell - 2.0)
    bis_dev = abs(analysis.noise_threshold_bisect(d) - thr)
    record(
        "noise-threshold",
        identity_dev < 1e-10 and bis_dev < 1e-9,
        f"identity deviation {identity_dev:.3e}, bisection deviation {bis_dev:.3e}",
    )

    worst_gain = -np.inf
    for coord in range(4):
        for delta in (1e-4, -1e-4):
            phases = list(quantum.CANONICAL_PHASES.as_tuple())
            phases[coord] += delta
            perturbed = core.bell_expression(
                quantum.born_table(d, quantum.MeasurementSettings(*phases))
            ).approx
            worst_gain = max(worst_gain, perturbed - bell)
    record("phase-stationarity", worst_gain <= 1e-8, f"largest gain {worst_gain:.3e}")

    if d <= 16:
        summary = lhv.enumerate_strategies(d)
        values_ok = set(summary.histogram) <= lhv.lhv_value_set(d)
        record(
            "lhv-bound",
            summary.max_value == Fraction(2) and values_ok,
            f"max {summary.max_value}, {len(summary.histogram)} distinct values",
        )
        strategies = (
            [s for s in np.ndindex(d, d, d, d)]
            if d <= 6
            else [tuple(row) for row in rng.integers(0, d, size=(200, 4))]
        )
        cross_ok = all(
            lhv.strategy_bell_value(s, d).exact
            == core.bell_expression(lhv.strategy_to_table(s, d)).exact
            for s in strategies
        )
        case_ok = all(
            lhv.strategy_bell_value(s, d).exact
            in lhv.case_value_set(lhv.classify_strategy(s, d), d)
            for s in strategies
        )
        record(
            "lhv-cross-identity",
            cross_ok and case_ok,
            f"{len(strategies)} strategies, closed form vs table path",
        )

    if d == 2:
        chsh_dev = 0.0
        for _ in range(20):
            x = rng.random((2, 2, 2, 2))
            x /= x.sum(axis=(2, 3), keepdims=True)
            t2 = core.JointProbabilityTable.from_array(x)
            direct = 0.0
            for (i, j), s in zip(core.SETTING_PAIRS, core.PAIR_SIGNS):
                e = sum(
                    (-1) ** (m + n) * x[i - 1, j - 1, m, n] for m in range(2) for n in range(2)
                )
                direct += s * e
            chsh_dev = max(chsh_dev, abs(core.bell_expression(t2).approx - direct))
        record("two-outcome-reduction", chsh_dev < 1e-12, f"max deviation {chsh_dev:.3e}")

    if d == 3:
        tri_dev = 0.0
        for _ in range(20):
            x = rng.random((2, 2, 3, 3))
            x /= x.sum(axis=(2, 3), keepdims=True)
            t3 = core.JointProbabilityTable.from_array(x)
            for i, j in core.SETTING_PAIRS:
                _, recombined = core.qutrit_complex_correlation(t3, i, j)
                tri_dev = max(tri_dev, abs(recombined - core.correlation(t3, i, j).approx))
        record("three-outcome-complex-form", tri_dev < 1e-12, f"max deviation {tri_dev:.3e}")

    return results


def cmd_check(args) -> int:
    d = core.check_dimension(args.d)
    results = _check_battery(d)
    failures = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        _emit(f"{status} {name}: {detail}")
    _emit(f"{len(results) - failures}/{len(results)} checks passed for d = {d}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bell-lab",
        description=(
            "Bell correlation toolkit for two d-outcome measurements per side: "
            "quantum tables, local-strategy scans, noise thresholds, and checks."
        ),
        epilog="BELL_LAB_THREADS caps enumeration workers; BELL_LAB_NO_NUMBA=1 forces the numpy backend.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_d(p, required=True):
        p.add_argument("--d", type=int, required=required, help="outcome count per measurement (>= 2)")

    def add_format(p, choices, default):
        p.add_argument("--format", choices=choices, default=default)

    p = sub.add_parser("quantum", help="emit the entangled-state table and its Bell value")
    add_d(p, required=False)
    p.add_argument("--phases", help="comma-separated alpha1,alpha2,beta1,beta2")
    p.add_argument("--input-file", help="evaluate a table read from this JSON file instead")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("lhv", help="scan deterministic local strategies")
    add_d(p)
    p.add_argument("--mapping", choices=("sum", "difference"), default="sum")
    add_format(p, ("text", "json"), "text")
    p.add_argument("--samples", type=int, help="sample size for d beyond the exhaustive limit")
    p.add_argument("--seed", type=int, help="seed for --samples")
    p.add_argument("--threads", type=int, help="worker threads (default BELL_LAB_THREADS or 1)")
    p.set_defaults(func=cmd_lhv)

    p = sub.add_parser("scan", help="per-dimension summary table")
    p.add_argument("--dmax", type=int, required=True)
    add_format(p, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("noise", help="visibility threshold against uniform noise")
    add_d(p)
    add_format(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("optimize", help="coordinate-descent phase search")
    add_d(p)
    p.add_argument("--seed", type=int, help="random start (canonical start if omitted)")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--halvings", type=int, default=12)
    add_format(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("cglmp", help="kernel vs probability-difference consistency")
    add_d(p)
    add_format(p, ("text", "json"), "text")
    p.set_defaults(func=cmd_cglmp)

    p = sub.add_parser("check", help="run the invariant battery for one dimension")
    add_d(p)
    p.set_defaults(func=cmd_check)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "quantum" and not args.input_file and args.d is None:
        sys.stderr.write("error: quantum needs --d or --input-file\n")
        return 2
    try:
        return args.func(args)
    except BellLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
