"""Correlation kernel and Bell expression for two d-outcome measurements per side.

Two parties each pick one of two settings; every measurement has outcomes in
{0, ..., d-1}.  A behaviour is a table of four d x d joint distributions, one
per setting pair (i, j).  Each setting pair gets a correlation value

    Q_ij = (1/S) * sum_{m,n} f_ij(m, n) * p_ij(m, n),    S = (d - 1) / 2,

with kernel f_ij(m, n) = S - ((m + n) mod d) for pairs (1,1), (2,1), (2,2)
and f_12(m, n) = S - ((-(m + n)) mod d) for the reversed pair.  The Bell
expression is I = Q_11 + Q_12 - Q_21 + Q_22.

All kernel weights are rationals with denominator d - 1 (after doubling), so
correlations of exactly-represented tables can be evaluated in exact rational
arithmetic alongside the floating-point path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational
from pathlib import Path

import numpy as np

from .errors import DimensionError, MappingError, NormalizationError, TableFormatError

SETTING_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))
PAIR_KEYS = ("11", "12", "21", "22")
# Coefficients of Q_11, Q_12, Q_21, Q_22 in the Bell expression.
PAIR_SIGNS = (1, 1, -1, 1)

# Tables built in memory must be normalized to near machine precision;
# tables parsed from text files get a looser gate.
INTERNAL_TOL = 1e-12
FILE_TOL = 1e-9


def check_dimension(d) -> int:
    if not isinstance(d, Integral) or isinstance(d, bool):
        raise DimensionError(f"outcome count must be an integer, got {d!r}")
    d = int(d)
    if d < 2:
        raise DimensionError(f"outcome count must be at least 2, got {d}")
    return d


def _check_setting(i) -> int:
    if i not in (1, 2):
        raise ValueError(f"setting index must be 1 or 2, got {i!r}")
    return int(i)


def spin(d) -> Fraction:
    """Effective spin S = (d - 1) / 2 of a d-outcome measurement."""
    return Fraction(check_dimension(d) - 1, 2)


def modular_residue(x, d) -> int:
    """Least non-negative residue of x modulo d."""
    return int(x) % check_dimension(d)


def sign(x) -> int:
    """+1 for x >= 0, -1 otherwise (zero counts as positive)."""
    return 1 if x >= 0 else -1


def weight_direct(x, d) -> Fraction:
    """Kernel weight (S - (x mod d)) / S as a function of the outcome sum x."""
    d = check_dimension(d)
    return Fraction(d - 1 - 2 * (int(x) % d), d - 1)


def weight_reversed(x, d) -> Fraction:
    """Kernel weight ((x mod d) - S - 1) / S used for the reversed setting pair.

    Valid whenever x is not a multiple of d; at multiples of d the reversed
    kernel takes the value 1 instead (its argument -(m + n) wraps to 0).
    """
    d = check_dimension(d)
    return Fraction(2 * (int(x) % d) - d - 1, d - 1)


@dataclass(frozen=True)
class CorrelationKernel:
    """Kernel weights for all four setting pairs, stored exactly.

    ``numerators[i-1, j-1, m, n]`` holds 2 * f_ij(m, n); dividing by the
    common denominator d - 1 gives the weight f_ij / S.
    """

    d: int
    numerators: np.ndarray

    @property
    def denominator(self) -> int:
        return self.d - 1

    def weight(self, i: int, j: int, m: int, n: int) -> Fraction:
        return Fraction(int(self.numerators[i - 1, j - 1, m, n]), self.denominator)

    def weights(self) -> np.ndarray:
        """Floating-point weights, shape (2, 2, d, d)."""
        return self.numerators / float(self.denominator)


@lru_cache(maxsize=None)
def correlation_kernel(d) -> CorrelationKernel:
    d = check_dimension(d)
    m, n = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    num = np.empty((2, 2, d, d), dtype=np.int64)
    for i, j in SETTING_PAIRS:
        residue = (sign(i - j) * (m + n)) % d
        num[i - 1, j - 1] = (d - 1) - 2 * residue
    num.setflags(write=False)
    return CorrelationKernel(d, num)


@dataclass(frozen=True)
class BellValue:
    """A correlation or Bell value: float approximation plus optional exact rational."""

    approx: float
    exact: Fraction | None = None

    @classmethod
    def from_exact(cls, value) -> "BellValue":
        value = Fraction(value)
        return cls(float(value), value)

    def __float__(self) -> float:
        return self.approx


@dataclass(frozen=True)
class OutcomeMapping:
    """A map g(a, b) of outcome pairs onto {0, ..., d-1}, bijective in each argument.

    Stored as a d x d integer table with ``table[a, b] = g(a, b)``.  The
    bijectivity requirement makes the table a Latin square.
    """

    d: int
    table: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        d = check_dimension(self.d)
        table = np.asarray(self.table, dtype=np.int64)
        if table.shape != (d, d):
            raise MappingError(f"mapping table must be {d}x{d}, got {table.shape}")
        expect = np.arange(d)
        if not (np.sort(table, axis=1) == expect).all():
            raise MappingError("mapping is not bijective in the second argument")
        if not (np.sort(table, axis=0) == expect[:, None]).all():
            raise MappingError("mapping is not bijective in the first argument")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __call__(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @classmethod
    def sum_mapping(cls, d) -> "OutcomeMapping":
        d = check_dimension(d)
        a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        return cls(d, (a + b) % d, name="sum")

    @classmethod
    def difference_mapping(cls, d) -> "OutcomeMapping":
        d = check_dimension(d)
        a, b = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        return cls(d, (a - b) % d, name="difference")


def _as_fraction(value) -> Fraction:
    if isinstance(value, (Fraction, Integral)) or isinstance(value, Rational):
        return Fraction(value)
    raise TypeError(f"exact entries must be rational, got {type(value).__name__}")


def _validate_float_table(p: np.ndarray, d: int, tol: float) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (2, 2, d, d):
        raise TableFormatError(f"expected shape (2, 2, {d}, {d}), got {p.shape}")
    if not np.isfinite(p).all():
        raise NormalizationError("table contains non-finite entries")
    if p.min() < -tol:
        raise NormalizationError(f"table contains negative entries (min {p.min():.3e})")
    sums = p.sum(axis=(2, 3))
    worst = np.abs(sums - 1.0).max()
    if worst > tol:
        raise NormalizationError(
            f"each setting pair must sum to 1 (worst deviation {worst:.3e}, tolerance {tol:.0e})"
        )
    p = p.copy()
    p.setflags(write=False)
    return p


@dataclass(frozen=True)
class JointProbabilityTable:
    """Joint outcome distributions for the four setting pairs.

    ``p[i-1, j-1, m, n]`` is the probability that the first party gets m and
    the second gets n when settings (i, j) are used.  ``p_exact`` optionally
    mirrors the table as nested tuples of ``Fraction`` so that correlations of
    exactly-known behaviours (point masses, uniform noise, rational mixtures)
    can be computed without rounding.
    """

    d: int
    p: np.ndarray
    p_exact: tuple | None = None

    @classmethod
    def from_array(cls, p, tol: float = INTERNAL_TOL) -> "JointProbabilityTable":
        p = np.asarray(p, dtype=float)
        if p.ndim != 4:
            raise TableFormatError(f"expected a 4-axis array, got {p.ndim} axes")
        d = check_dimension(p.shape[-1])
        return cls(d, _validate_float_table(p, d, tol))

    @classmethod
    def from_subtables(cls, tables: dict, tol: float = INTERNAL_TOL) -> "JointProbabilityTable":
        missing = [k for k in PAIR_KEYS if k not in tables]
        if missing:
            raise TableFormatError(f"missing setting pairs: {missing}")
        stack = np.array([np.asarray(tables[k], dtype=float) for k in PAIR_KEYS])
        d = check_dimension(stack.shape[-1])
        return cls.from_array(stack.reshape(2, 2, d, d), tol=tol)

    @classmethod
    def from_fractions(cls, tables) -> "JointProbabilityTable":
        """Build an exactly-represented table from nested rationals.

        ``tables`` is indexed [i-1][j-1][m][n] with rational entries; each
        setting pair must sum to exactly 1.
        """
        exact = tuple(
            tuple(
                tuple(tuple(_as_fraction(q) for q in row) for row in tables[si][sj])
                for sj in range(2)
            )
            for si in range(2)
        )
        d = check_dimension(len(exact[0][0]))
        for si in range(2):
            for sj in range(2):
                sub = exact[si][sj]
                if len(sub) != d or any(len(row) != d for row in sub):
                    raise TableFormatError(f"setting pair ({si + 1},{sj + 1}) is not {d}x{d}")
                if any(q < 0 for row in sub for q in row):
                    raise NormalizationError("exact table contains negative entries")
                total = sum(q for row in sub for q in row)
                if total != 1:
                    raise NormalizationError(
                        f"setting pair ({si + 1},{sj + 1}) sums to {total}, expected 1"
                    )
        p = np.array([[[[float(q) for q in row] for row in exact[si][sj]]
                       for sj in range(2)] for si in range(2)])
        p.setflags(write=False)
        return cls(d, p, exact)

    @classmethod
    def uniform(cls, d) -> "JointProbabilityTable":
        d = check_dimension(d)
        cell = Fraction(1, d * d)
        sub = tuple(tuple(cell for _ in range(d)) for _ in range(d))
        return cls.from_fractions(((sub, sub), (sub, sub)))

    @classmethod
    def point_mass(cls, d, m: int, n: int) -> "JointProbabilityTable":
        """Table concentrated on outcomes (m, n) for every setting pair."""
        d = check_dimension(d)
        sub = tuple(
            tuple(Fraction(1 if (mm, nn) == (m, n) else 0) for nn in range(d))
            for mm in range(d)
        )
        return cls.from_fractions(((sub, sub), (sub, sub)))

    @property
    def is_exact(self) -> bool:
        return self.p_exact is not None

    def subtable(self, i: int, j: int) -> np.ndarray:
        return self.p[_check_setting(i) - 1, _check_setting(j) - 1]

    def exact_subtable(self, i: int, j: int):
        if self.p_exact is None:
            return None
        return self.p_exact[_check_setting(i) - 1][_check_setting(j) - 1]

    def relabel(self, a_shift: int, b_shift: int) -> "JointProbabilityTable":
        """Cyclically relabel outcomes: m -> m + a_shift, n -> n + b_shift (mod d)."""
        d = self.d
        a_shift, b_shift = int(a_shift) % d, int(b_shift) % d
        p = np.roll(self.p, (a_shift, b_shift), axis=(2, 3))
        p.setflags(write=False)
        exact = None
        if self.p_exact is not None:
            exact = tuple(
                tuple(
                    tuple(
                        tuple(self.p_exact[si][sj][(m - a_shift) % d][(n - b_shift) % d]
                              for n in range(d))
                        for m in range(d)
                    )
                    for sj in range(2)
                )
                for si in range(2)
            )
        return JointProbabilityTable(d, p, exact)

    def conjugate_second_party(self) -> "JointProbabilityTable":
        """Relabel the second party's outcomes n -> -n (mod d).

        This swaps the outcome-sum and outcome-difference conventions: sums of
        the relabeled table are distributed like differences of the original.
        """
        d = self.d
        idx = (-np.arange(d)) % d
        p = self.p[:, :, :, idx].copy()
        p.setflags(write=False)
        exact = None
        if self.p_exact is not None:
            exact = tuple(
                tuple(
                    tuple(
                        tuple(self.p_exact[si][sj][m][(-n) % d] for n in range(d))
                        for m in range(d)
                    )
                    for sj in range(2)
                )
                for si in range(2)
            )
        return JointProbabilityTable(d, p, exact)

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "tables": {
                key: [[float(x) for x in row] for row in self.p[si, sj]]
                for (si, sj), key in zip(((0, 0), (0, 1), (1, 0), (1, 1)), PAIR_KEYS)
            },
        }

    @classmethod
    def from_json_dict(cls, obj, tol: float = FILE_TOL) -> "JointProbabilityTable":
        if not isinstance(obj, dict):
            raise TableFormatError("table document must be a JSON object")
        if "d" not in obj or "tables" not in obj:
            raise TableFormatError('table document needs keys "d" and "tables"')
        d = obj["d"]
        if not isinstance(d, int) or d < 2:
            raise TableFormatError(f'"d" must be an integer >= 2, got {d!r}')
        tables = obj["tables"]
        if not isinstance(tables, dict):
            raise TableFormatError('"tables" must be an object keyed by setting pair')
        arrays = {}
        for key in PAIR_KEYS:
            if key not in tables:
                raise TableFormatError(f'missing setting pair "{key}"')
            sub = tables[key]
            try:
                arr = np.asarray(sub, dtype=float)
            except (TypeError, ValueError) as exc:
                raise TableFormatError(f'setting pair "{key}" is not numeric') from exc
            if arr.shape != (d, d):
                raise TableFormatError(
                    f'setting pair "{key}" has shape {arr.shape}, expected ({d}, {d})'
                )
            arrays[key] = arr
        return cls.from_subtables(arrays, tol=tol)


def load_table(path, tol: float = FILE_TOL) -> JointProbabilityTable:
    """Read a probability table from a JSON file."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableFormatError(f"{path}: not valid JSON ({exc})") from exc
    return JointProbabilityTable.from_json_dict(obj, tol=tol)


def _check_pair_normalization(p: np.ndarray, i: int, j: int) -> None:
    dev = abs(float(p.sum()) - 1.0)
    if dev > FILE_TOL:
        raise NormalizationError(
            f"setting pair ({i},{j}) sums to 1{dev:+.3e}; refuse to evaluate"
        )


def _exact_weighted_sum(numerators: np.ndarray, denominator: int, exact_sub) -> Fraction:
    total = Fraction(0)
    for m, row in enumerate(exact_sub):
        for n, q in enumerate(row):
            if q:
                total += q * Fraction(int(numerators[m, n]), denominator)
    return total


def correlation(t: JointProbabilityTable, i: int, j: int) -> BellValue:
    """Kernel-weighted correlation Q_ij of one setting pair."""
    i, j = _check_setting(i), _check_setting(j)
    kern = correlation_kernel(t.d)
    p = t.subtable(i, j)
    _check_pair_normalization(p, i, j)
    num = kern.numerators[i - 1, j - 1]
    exact_sub = t.exact_subtable(i, j)
    if exact_sub is not None:
        exact = _exact_weighted_sum(num, kern.denominator, exact_sub)
        return BellValue.from_exact(exact)
    return BellValue(float((num * p).sum()) / kern.denominator)


def bell_expression(t: JointProbabilityTable) -> BellValue:
    """Bell expression I = Q_11 + Q_12 - Q_21 + Q_22."""
    parts = [correlation(t, i, j) for i, j in SETTING_PAIRS]
    if all(part.exact is not None for part in parts):
        exact = sum(s * part.exact for s, part in zip(PAIR_SIGNS, parts))
        return BellValue.from_exact(exact)
    return BellValue(float(sum(s * part.approx for s, part in zip(PAIR_SIGNS, parts))))


def qutrit_complex_correlation(t: JointProbabilityTable, i: int, j: int):
    """Three-outcome correlation as a complex moment plus its real recombination.

    For d = 3 the kernel correlation can be packaged as the complex moment
    Qbar = sum_{m,n} alpha^(m+n) p(m, n) with alpha = exp(2 pi i / 3).  The
    recombination Re(Qbar) + s * Im(Qbar) / sqrt(3), with s = -1 for the
    reversed pair (1, 2) and s = +1 otherwise, equals the kernel value.

    Returns (complex moment, recombined real value).
    """
    if t.d != 3:
        raise DimensionError(f"complex correlation is specific to 3 outcomes, got d={t.d}")
    i, j = _check_setting(i), _check_setting(j)
    p = t.subtable(i, j)
    _check_pair_normalization(p, i, j)
    alpha = np.exp(2j * np.pi / 3)
    m, n = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    moment = complex((alpha ** (m + n) * p).sum())
    s = -1.0 if (i, j) == (1, 2) else 1.0
    return moment, moment.real + s * moment.imag / np.sqrt(3.0)


def mapped_spin_distribution(
    t: JointProbabilityTable, i: int, j: int, mapping: OutcomeMapping, sig: int = 1
) -> np.ndarray:
    """Distribution of the mapped outcome value, indexed by k = S - S_z.

    Entry k is the probability that g(m, n) is congruent to sig * k mod d,
    i.e. that the synthetic spin projection S_z = S - k is observed (spin
    values run from +S at k = 0 down to -S at k = d - 1).
    """
    i, j = _check_setting(i), _check_setting(j)
    if sig not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sig!r}")
    if mapping.d != t.d:
        raise MappingError(f"mapping is for d={mapping.d}, table has d={t.d}")
    p = t.subtable(i, j)
    _check_pair_normalization(p, i, j)
    classes = (sig * mapping.table) % t.d
    return np.bincount(classes.ravel(), weights=p.ravel(), minlength=t.d)


def _exact_spin_distribution(t, i, j, mapping, sig):
    d = t.d
    exact_sub = t.exact_subtable(i, j)
    buckets = [Fraction(0) for _ in range(d)]
    for m in range(d):
        for n in range(d):
            q = exact_sub[m][n]
            if q:
                buckets[(sig * int(mapping.table[m, n])) % d] += q
    return buckets


def spin_correlation(
    t: JointProbabilityTable, i: int, j: int, mapping: OutcomeMapping, sig: int = 1
) -> float:
    """Expectation of the synthetic spin projection, sum_k (S - k) * P(k)."""
    dist = mapped_spin_distribution(t, i, j, mapping, sig)
    s = (t.d - 1) / 2.0
    return float(((s - np.arange(t.d)) * dist).sum())


def bell_from_spin_correlations(t: JointProbabilityTable, mapping: OutcomeMapping) -> BellValue:
    """Bell expression assembled from mapped spin correlations.

    Uses the positive spin convention for pairs (1,1), (2,1), (2,2) and the
    negative convention for the reversed pair (1,2):

        I = (1/S) * [C+(1,1) + C-(1,2) - C+(2,1) + C+(2,2)].

    With the outcome-sum mapping this reproduces ``bell_expression`` exactly.
    """
    if t.p_exact is not None:
        s = spin(t.d)
        pieces = []
        for (i, j), sig in zip(SETTING_PAIRS, (1, -1, 1, 1)):
            dist = _exact_spin_distribution(t, i, j, mapping, sig)
            pieces.append(sum((s - k) * q for k, q in enumerate(dist)))
        exact = (pieces[0] + pieces[1] - pieces[2] + pieces[3]) / s
        return BellValue.from_exact(exact)
    s = (t.d - 1) / 2.0
    total = (
        spin_correlation(t, 1, 1, mapping, 1)
        + spin_correlation(t, 1, 2, mapping, -1)
        - spin_correlation(t, 2, 1, mapping, 1)
        + spin_correlation(t, 2, 2, mapping, 1)
    )
    return BellValue(total / s)


def difference_probability(t: JointProbabilityTable, i: int, j: int, c: int) -> float:
    """P(first outcome minus second outcome is congruent to c mod d)."""
    p = t.subtable(i, j)
    rows = np.arange(t.d)
    return float(p[rows, (rows - c) % t.d].sum())


def cglmp_correlation(t: JointProbabilityTable, i: int, j: int) -> float:
    """Probability-difference correlation over outcome differences.

    Q_ij = sum_{k=0}^{floor(d/2)-1} (1 - 2k/(d-1)) *
           [P(A - B = k * e) - P(A - B = (-k - 1) * e)]   (mod d),

    where e = +1 except for the reversed pair (1,2) where e = -1.  This is
    the folded form of the spin correlation built on outcome differences.
    """
    i, j = _check_setting(i), _check_setting(j)
    _check_pair_normalization(t.subtable(i, j), i, j)
    d = t.d
    e = sign(i - j)
    total = 0.0
    for k in range(d // 2):
        coeff = 1.0 - 2.0 * k / (d - 1)
        total += coeff * (
            difference_probability(t, i, j, k * e)
            - difference_probability(t, i, j, (-k - 1) * e)
        )
    return total


def cglmp_expression(t: JointProbabilityTable) -> float:
    """Bell expression assembled from the probability-difference correlations."""
    return (
        cglmp_correlation(t, 1, 1)
        + cglmp_correlation(t, 1, 2)
        - cglmp_correlation(t, 2, 1)
        + cglmp_correlation(t, 2, 2)
    )
