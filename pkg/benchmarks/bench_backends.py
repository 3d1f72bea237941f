"""Timing comparison of the chain kernel backends.

Runs the same defect sweep through the compiled backend and the pure
Python reference, reports cells per second for each, and cross-checks
that the two agree on every cell.
"""

import argparse
import math
import time

from closurelab._kernels import OK, get_backend


def sweep(kern, word: str, nr: int, nd: int) -> list:
    out = []
    for i in range(nr):
        r = (i + 1.0) / (nr + 1.0)
        for j in range(nd):
            d = j / nd
            out.append(kern.chain_defect(1.0, r, d, word, 0.3, 1))
    return out


def time_sweep(kern, word: str, nr: int, nd: int, reps: int):
    best = math.inf
    results = None
    for _ in range(reps):
        t0 = time.perf_counter()
        results = sweep(kern, word, nr, nd)
        best = min(best, time.perf_counter() - t0)
    return best, results


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--word", default="cscs")
    ap.add_argument("--nr", type=int, default=96)
    ap.add_argument("--nd", type=int, default=96)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    cells = args.nr * args.nd
    timings = {}
    defects = {}
    for name in ("python", "compiled"):
        try:
            kern = get_backend(name)
        except ImportError:
            print(f"{name:>8}: unavailable")
            continue
        reps = args.reps if name == "python" else 4 * args.reps
        best, results = time_sweep(kern, args.word, args.nr, args.nd, reps)
        timings[name] = best
        defects[name] = results
        print(f"{name:>8}: {best:8.3f} s  ({cells / best:10.0f} cells/s)")

    if len(defects) == 2:
        gap = 0.0
        for a, b in zip(defects["python"], defects["compiled"]):
            if a[0] != b[0]:
                raise SystemExit(f"status mismatch: {a} vs {b}")
            if a[0] == OK:
                gap = max(gap, abs(a[1] - b[1]))
        print(f"speedup: {timings['python'] / timings['compiled']:.1f}x, "
              f"max defect gap {gap:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
