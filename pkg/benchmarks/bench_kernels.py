"""Time the compiled and pure-Python search kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row runs one counter through both backends, checks that counts and node
totals agree, and reports the speedup.
"""
import argparse
import time

from rainbowap import _backend
from rainbowap.counting import (
    ap_system, bruteforce_histogram, canonical_counts, inclusion_exclusion_count, pruned_count,
)
from rainbowap.ground import interval

CASES = [
    ("bruteforce", bruteforce_histogram, 9, 4, 3),
    ("pruned", pruned_count, 11, 4, 3),
    ("pruned", pruned_count, 10, 5, 4),
    ("symmetry", canonical_counts, 12, 5, 4),
    ("inclusion_exclusion", inclusion_exclusion_count, 8, 4, 3),
]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _backend.compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")

    print(f"{'method':<20} {'case':<16} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, fn, n, r, k in CASES:
        system = ap_system(interval(n), k)
        tp, out_p = best_of(lambda: fn(system, r, backend="python"), args.repeat)
        tc, out_c = best_of(lambda: fn(system, r, backend="compiled"), args.repeat)
        assert out_p == out_c, (name, out_p, out_c)
        case = f"[{n}] r={r} k={k}"
        print(f"{name:<20} {case:<16} {tp:>10.3f} {tc:>11.4f} {tp / tc:>7.0f}x")


if __name__ == "__main__":
    main()
