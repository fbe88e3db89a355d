"""Hot kernel for strategy enumeration: numba-compiled loop with a numpy fallback.

The exhaustive scan visits d**4 deterministic strategies.  Both backends fill
the same pair of flat output arrays (scaled Bell numerators and case codes)
over a half-open range of first-party outcomes, so callers can split the work
across threads.  Set ``BELL_LAB_NO_NUMBA=1`` to force the pure-numpy path.
"""

from __future__ import annotations

import os

import numpy as np


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


FORCE_FALLBACK = _env_flag("BELL_LAB_NO_NUMBA")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

USING_NUMBA = HAS_NUMBA and not FORCE_FALLBACK

# case_code[n1, n2] where n1 counts how many of the sums a1+b1, a2+b2 reach d
# and n2 does the same for a1+b2, a2+b1; -1 marks infeasible combinations.
CASE_CODE = np.array(
    [
        [0, 1, -1],
        [2, 3, 4],
        [-1, 6, 5],
    ],
    dtype=np.int8,
)


def _fill_numpy(d, g, gneg, reach, case_code, out_num, out_case, a1_lo, a1_hi):
    # axes ordered (a1, a2, b1, b2); gneg holds (-g) mod d
    num = (
        (d - 1)
        + g[None, :, :, None]
        - g[a1_lo:a1_hi, None, :, None]
        - g[None, :, None, :]
        - gneg[a1_lo:a1_hi, None, None, :]
    )
    n1 = reach[a1_lo:a1_hi, None, :, None] + reach[None, :, None, :]
    n2 = reach[a1_lo:a1_hi, None, None, :] + reach[None, :, :, None]
    block = d * d * d
    lo, hi = a1_lo * block, a1_hi * block
    out_num[lo:hi] = num.reshape(-1)
    out_case[lo:hi] = case_code[n1.reshape(-1), n2.reshape(-1)]


def _fill_loops(d, g, gneg, reach, case_code, out_num, out_case, a1_lo, a1_hi):
    for a1 in range(a1_lo, a1_hi):
        off1 = a1 * d * d * d
        for a2 in range(d):
            off2 = off1 + a2 * d * d
            for b1 in range(d):
                off3 = off2 + b1 * d
                head = (d - 1) + g[a2, b1] - g[a1, b1]
                n1_head = reach[a1, b1]
                n2_head = reach[a2, b1]
                for b2 in range(d):
                    out_num[off3 + b2] = head - g[a2, b2] - gneg[a1, b2]
                    n1 = n1_head + reach[a2, b2]
                    n2 = n2_head + reach[a1, b2]
                    out_case[off3 + b2] = case_code[n1, n2]


if HAS_NUMBA:
    _fill_numba = njit(cache=True, nogil=True)(_fill_loops)


def fill_strategy_arrays(d, g, out_num, out_case, a1_lo, a1_hi):
    """Fill Bell numerators and case codes for strategies with a1 in [a1_lo, a1_hi).

    ``out_num[s]`` receives (d-1)*I(s)/2 for the strategy with lexicographic
    index s = ((a1*d + a2)*d + b1)*d + b2; ``out_case[s]`` receives the case
    code of the sum structure (see CASE_CODE).
    """
    g = np.ascontiguousarray(g, dtype=np.int64)
    gneg = (d - g) % d
    a = np.arange(d, dtype=np.int64)
    reach = ((a[:, None] + a[None, :]) >= d).astype(np.int8)
    if USING_NUMBA:
        _fill_numba(d, g, gneg, reach, CASE_CODE, out_num, out_case, a1_lo, a1_hi)
    else:
        _fill_numpy(d, g, gneg, reach, CASE_CODE, out_num, out_case, a1_lo, a1_hi)
