"""Time the compiled and numpy spin-bath factor kernels on the 32-spin table.

    python benchmarks/bench_kernel.py [--points 20000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from deutsch_noise import kernels
from deutsch_noise.environment import nv_bath


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    bath = nv_bath(0.1, 0.1)
    times = np.linspace(0.0, 20.0, args.points)
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    results = {}
    for name in backends:
        def call(name=name):
            return kernels.bath_factor_grid(bath.couplings, bath.bias, bath.zeeman, times, backend=name)

        best = min(timeit.repeat(call, number=1, repeat=args.repeat))
        results[name] = (best, call())
        print(f"{name:>7s}: {best * 1e3:8.2f} ms for {args.points} times x {len(bath)} spins")
    if len(results) == 2:
        (tp, (cp, dp)), (tc, (cc, dc)) = results["python"], results["cython"]
        diff = max(np.max(np.abs(cp - cc)), np.max(np.abs(dp - dc)))
        print(f"speedup {tp / tc:.1f}x, max |difference| {diff:.1e}")
    else:
        print("compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
