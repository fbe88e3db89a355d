"""Benchmark the strategy-enumeration kernel: jit backend vs numpy fallback.

Fills the value and case arrays for all d**4 deterministic strategies with
both implementations and reports wall times plus the speedup.  Run as

    python benchmarks/bench_enumeration.py [--dims 16,24,32] [--repeats 3]
"""

import argparse
import time

import numpy as np

from bell_lab import _accel


def build_inputs(d):
    g = np.add.outer(np.arange(d), np.arange(d)) % d
    gneg = (d - g) % d
    reach = (np.add.outer(np.arange(d), np.arange(d)) >= d).astype(np.int8)
    return g, gneg, reach


def run_once(fill, d, g, gneg, reach):
    num = np.empty(d**4, np.int16)
    case = np.empty(d**4, np.int8)
    t0 = time.perf_counter()
    fill(d, g, gneg, reach, _accel.CASE_CODE, num, case, 0, d)
    return time.perf_counter() - t0, num, case


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="16,24,32")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    dims = [int(x) for x in args.dims.split(",")]

    backends = [("numpy", _accel._fill_numpy)]
    if _accel.HAS_NUMBA:
        backends.append(("numba", _accel._fill_numba))
        # trigger compilation outside the timed region
        g, gneg, reach = build_inputs(4)
        run_once(_accel._fill_numba, 4, g, gneg, reach)
    else:
        print("numba unavailable; timing the numpy backend only")

    print(f"{'d':>4} {'strategies':>12} " + " ".join(f"{n:>12}" for n, _ in backends)
          + ("  speedup" if len(backends) == 2 else ""))
    for d in dims:
        g, gneg, reach = build_inputs(d)
        times = []
        arrays = []
        for _, fill in backends:
            best = min(run_once(fill, d, g, gneg, reach)[0] for _ in range(args.repeats))
            times.append(best)
            arrays.append(run_once(fill, d, g, gneg, reach)[1:])
        if len(arrays) == 2:
            assert np.array_equal(arrays[0][0], arrays[1][0]), "backend value mismatch"
            assert np.array_equal(arrays[0][1], arrays[1][1]), "backend case mismatch"
        row = f"{d:>4} {d**4:>12} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:>6.2f}x"
        print(row)


if __name__ == "__main__":
    main()
