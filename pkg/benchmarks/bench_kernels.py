"""Compare the compiled kernel core against the pure numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from avgshadow import _core_py

try:
    from avgshadow import _core
except ImportError:
    _core = None


def best_of(func, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = [
        ("running_averages L=1e6", "running_averages", rng.random(1_000_000)),
        ("window_max_sums  L=2000", "window_max_sums", rng.random(2000)),
        ("window_max_sums  L=8192", "window_max_sums", rng.random(8192)),
    ]

    print(f"{'case':<26} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}")
    for label, name, data in cases:
        pure = best_of(getattr(_core_py, name), (data,), args.repeat)
        if _core is None:
            print(f"{label:<26} {pure * 1e3:>10.2f} {'n/a':>14} {'n/a':>8}")
            continue
        compiled = best_of(getattr(_core, name), (data,), args.repeat)
        ref = getattr(_core_py, name)(data)
        got = getattr(_core, name)(data)
        assert np.allclose(ref, got, atol=1e-9), f"backend mismatch in {name}"
        print(
            f"{label:<26} {pure * 1e3:>10.2f} {compiled * 1e3:>14.2f} "
            f"{pure / compiled:>7.1f}x"
        )


if __name__ == "__main__":
    main()
