"""Benchmark the compiled event-loop kernel against the pure-Python one.

Both backends are exercised on identical inputs and their outputs are
compared for exact equality while timing.  Run directly:

    python benchmarks/bench_kernel.py [--trials 200] [--light-cycles 20]
"""

import argparse
import random
import statistics
import time

from fluidlight import kernel
from fluidlight.rates import ArrivalConfig, generate_arrival


def make_cases(n_trials, horizon, seed=2024):
    rng = random.Random(seed)
    cfg = ArrivalConfig(4.1, 0.3, 0.02, 0.063)
    cases = []
    for _ in range(n_trials):
        arr = generate_arrival(cfg, horizon, rng.getrandbits(32))
        cases.append((
            rng.uniform(0.0, 1.0),
            rng.choice([0.62, 5.0, 62.0, float("inf")]),
            rng.choice([0.0, 1.3]),
            arr,
        ))
    return cases


def bench(impl, cases, N):
    times = []
    results = []
    for theta, ramp, x0, arr in cases:
        t0 = time.perf_counter()
        out = kernel.integrate(theta, 1.0, N, x0, 5.0, ramp,
                               arr.bounds, arr.rates, impl=impl)
        times.append(time.perf_counter() - t0)
        results.append(out)
    return times, results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--light-cycles", type=int, default=20)
    args = ap.parse_args()

    backends = kernel.available_backends()
    print(f"selected backend: {kernel.BACKEND}")
    print(f"available backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled kernel not built; nothing to compare")
        return

    N = args.light_cycles
    cases = make_cases(args.trials, float(N))
    # warm-up
    bench(backends["python"], cases[:5], N)
    bench(backends["cython"], cases[:5], N)

    t_py, r_py = bench(backends["python"], cases, N)
    t_cy, r_cy = bench(backends["cython"], cases, N)

    mismatches = sum(a != b for a, b in zip(r_py, r_cy))
    total_py, total_cy = sum(t_py), sum(t_cy)
    print(f"trials: {args.trials} (N={N} light cycles each)")
    print(f"python : total {total_py*1e3:8.2f} ms   "
          f"median {statistics.median(t_py)*1e6:8.1f} us/path")
    print(f"cython : total {total_cy*1e3:8.2f} ms   "
          f"median {statistics.median(t_cy)*1e6:8.1f} us/path")
    print(f"speedup: {total_py / total_cy:.1f}x")
    print(f"output mismatches: {mismatches} (must be 0)")


if __name__ == "__main__":
    main()
