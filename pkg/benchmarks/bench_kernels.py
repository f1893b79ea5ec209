"""Compare the compiled and numpy transform kernels.

Times ``dft_rows`` on each backend for a few row lengths (radix-2 and
Bluestein paths), the raw direct-sum kernels for short odd lengths, and one
full loss evaluation, and prints a table.

    python benchmarks/bench_kernels.py [--repeat 5] [--rows 64]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from focalfreq import kernels
from focalfreq.loss import LossConfig, evaluate

SIZES = (8, 32, 64, 256, 33, 63, 100)


def best_time(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_rows(backends, rows, repeat):
    rng = np.random.default_rng(0)
    print(f"{'length':>7} {'path':>9} " + " ".join(f"{b + ' (us)':>14}" for b in backends) + "  speedup")
    for n in SIZES:
        data = rng.normal(size=(rows, n)) + 1j * rng.normal(size=(rows, n))
        if kernels.is_power_of_two(n):
            path = "radix-2"
        elif n <= kernels.DIRECT_MAX:
            path = "direct"
        else:
            path = "bluestein"
        if path == "direct":
            # raw kernels; dft_rows itself always takes the BLAS product here
            roots = kernels._roots(n)
            times = [best_time(lambda b=b: kernels._impl("dft_direct", b)(data, roots, False), repeat, 20) for b in backends]
        else:
            times = [best_time(lambda b=b: kernels.dft_rows(data, False, b), repeat, 20) for b in backends]
        speed = f"{times[-1] / times[0]:7.1f}x" if len(times) == 2 else ""
        print(f"{n:7d} {path:>9} " + " ".join(f"{t * 1e6:14.1f}" for t in times) + "  " + speed)


def bench_loss(backends, repeat):
    rng = np.random.default_rng(1)
    reals = rng.uniform(-1, 1, (16, 32, 32, 1))
    fakes = rng.uniform(-1, 1, (16, 32, 32, 1))
    saved = kernels.BACKEND
    results = []
    for b in backends:
        kernels.BACKEND = b
        results.append(best_time(lambda: evaluate(reals, fakes, LossConfig()), repeat, 5))
    kernels.BACKEND = saved
    print("\nloss value+grad, batch 16 of 32x32: " + ", ".join(f"{b} {t * 1e3:.2f} ms" for b, t in zip(backends, results)))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--rows", type=int, default=64, help="rows transformed per call")
    args = parser.parse_args()
    backends = ["cython", "python"] if kernels.BACKEND == "cython" else ["python"]
    if len(backends) == 1:
        print("compiled kernels unavailable; timing the numpy fallback only")
    bench_rows(backends, args.rows, args.repeat)
    bench_loss(backends, args.repeat)


if __name__ == "__main__":
    main()
