"""Compare the compiled and pure-python Metropolis kernels.

Runs the same seeded anneals through both backends, asserts bitwise
identical sample sets, and reports wall-clock timings.

Usage: python3 benchmarks/bench_kernels.py [--reads N] [--sweeps N]
"""

import argparse
import time

import numpy as np

from embednoise import AnnealSchedule, generate_random_qubo, qubo_to_ising, simulated_anneal
from embednoise._kernels import get_kernel


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reads", type=int, default=500)
    parser.add_argument("--sweeps", type=int, default=128)
    parser.add_argument("--sizes", type=int, nargs="+", default=[20, 50, 100, 200])
    args = parser.parse_args()

    try:
        get_kernel("cython")
    except RuntimeError:
        print("compiled kernel not available; nothing to compare")
        return 1

    schedule = AnnealSchedule(sweeps=args.sweeps)
    print(f"reads={args.reads} sweeps={args.sweeps}")
    print(f"{'n':>6} {'python (s)':>12} {'cython (s)':>12} {'speedup':>9}  identical")
    for n in args.sizes:
        model = qubo_to_ising(generate_random_qubo(n, 0.5, seed=n))
        results = {}
        times = {}
        for backend in ("python", "cython"):
            t0 = time.perf_counter()
            results[backend] = simulated_anneal(model, args.reads, schedule,
                                                seed=7, backend=backend)
            times[backend] = time.perf_counter() - t0
        same = np.array_equal(results["python"].spins, results["cython"].spins)
        assert same, f"backend mismatch at n={n}"
        print(f"{n:>6} {times['python']:>12.3f} {times['cython']:>12.3f} "
              f"{times['python'] / times['cython']:>8.1f}x  {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
