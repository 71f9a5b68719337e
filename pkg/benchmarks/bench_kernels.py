"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import timeit

import numpy as np

from parafvp import kernels


def scan_case(n_modes, M, rng):
    decay = np.exp(-rng.uniform(0, 3, size=n_modes))
    return (decay, rng.uniform(size=n_modes), rng.uniform(size=n_modes),
            rng.normal(size=n_modes).astype(complex),
            rng.normal(size=(M + 1, n_modes)) + 0j)


def cn_case(n_points, steps, rng):
    n = n_points - 2
    h = math.pi / (n_points - 1)
    dt = 1e-3
    return (rng.normal(size=n), dt / h**2, dt, np.zeros(steps + 1), np.zeros(steps + 1),
            rng.normal(size=(steps + 1, n)))


def bench(fn, args, backend, repeat):
    return min(timeit.repeat(lambda: fn(*args, backend=backend), number=1, repeat=repeat))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    cases = [
        ("duhamel_scan 16 modes x 4096 steps", kernels.duhamel_scan, scan_case(16, 4096, rng)),
        ("duhamel_scan 256 modes x 1024 steps", kernels.duhamel_scan, scan_case(256, 1024, rng)),
        ("cn_march 201 points x 1000 steps", kernels.cn_march, cn_case(201, 1000, rng)),
        ("cn_march 1001 points x 1000 steps", kernels.cn_march, cn_case(1001, 1000, rng)),
    ]
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    print(f"{'case':40s} " + " ".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn, a in cases:
        times = [bench(fn, a, b, args.repeat) for b in backends]
        speed = f"{times[0] / times[-1]:10.1f}x" if len(times) > 1 else ""
        print(f"{name:40s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times) + " " + speed)


if __name__ == "__main__":
    main()
