"""Benchmark the jitted match kernels against the pure-Python fallback.

Runs identical seeded batches through both backends, checks the outputs are
bit-for-bit equal, and reports throughput. Usage:

    python benchmarks/bench_kernels.py [--matches 20000] [--setting 40,3]
"""

import argparse
import time

import numpy as np

from bmn import _kernels
from bmn.engine import Settings


def run(label, fn, n_matches, settings, seed, max_tricks):
    durations = np.empty(n_matches, dtype=np.int32)
    winners = np.empty(n_matches, dtype=np.int8)
    t0 = time.perf_counter()
    fn(0, n_matches, settings.n_total, settings.max_rank, seed, max_tricks,
       durations, winners)
    dt = time.perf_counter() - t0
    rate = n_matches / dt
    print(f"{label:<18} {dt:8.3f} s   {rate:12,.0f} matches/s")
    return durations, winners, dt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--matches", type=int, default=20_000)
    ap.add_argument("--setting", default="40,3")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--max-tricks", type=int, default=100_000)
    args = ap.parse_args()
    settings = Settings.parse(args.setting)

    print(f"batch of {args.matches} matches, setting {settings}, seed {args.seed}")
    py = run("python fallback", _kernels._py_batch, args.matches, settings,
             args.seed, args.max_tricks)

    if _kernels.numba is None:
        print("numba not importable; only the fallback was measured")
        return

    seed_u = np.uint64(args.seed & _kernels.MASK64)

    def jit_serial(lo, hi, n, r, _seed, cap, d, w):
        _kernels._jit_batch(lo, hi, n, r, seed_u, cap, d, w)

    def jit_par(lo, hi, n, r, _seed, cap, d, w):
        _kernels._jit_batch_par(lo, hi, n, r, seed_u, cap, d, w)

    for fn in (jit_serial, jit_par):  # warm the JIT before timing
        fn(0, 10, settings.n_total, settings.max_rank, None, args.max_tricks,
           np.empty(10, np.int32), np.empty(10, np.int8))
    js = run("numba serial", jit_serial, args.matches, settings, args.seed,
             args.max_tricks)
    jp = run("numba parallel", jit_par, args.matches, settings, args.seed,
             args.max_tricks)

    same = (np.array_equal(py[0], js[0]) and np.array_equal(py[1], js[1])
            and np.array_equal(py[0], jp[0]) and np.array_equal(py[1], jp[1]))
    print(f"outputs identical across backends: {same}")
    print(f"speedup (serial jit vs python): {py[2] / js[2]:.1f}x")


if __name__ == "__main__":
    main()
