"""Time the compiled kernels against the NumPy kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20] [--sizes 15 2000]

Prints the median time per call for each kernel, backend and array size,
and the largest relative difference between the two backends. Size 15 is
what the Gauss-Kronrod panels request; the large size shows throughput.
"""

import argparse
import statistics
import time

import numpy as np

from leakywire import _kernels_py as py_kernels

try:
    from leakywire import _kernels as c_kernels
except ImportError:
    c_kernels = None


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def cases(size, rng):
    x = rng.uniform(0.05, 40.0, size) * np.exp(1j * rng.uniform(-1.5, 1.5, size))
    p = np.linspace(0.0, 30.0, size)
    z = -1.2 - 0.03j
    tstar = z + 2.25
    return {
        "bessel_k01": (lambda m: m.bessel_k01(x)[0]),
        "line_integrand": (lambda m: m.line_integrand(p, 3.0, 4.0, 1.6, 0.5)),
        "continued_integrand": (lambda m: m.continued_integrand(p, z, 3.0, 2.0, tstar, 0.1 + 0.2j)),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--sizes", type=int, nargs="+", default=[15, 2000])
    args = parser.parse_args(argv)
    if c_kernels is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1
    rng = np.random.default_rng(7)
    print(f"{'kernel':22s} {'size':>6s} {'numpy [us]':>11s} {'cython [us]':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for size in args.sizes:
        for name, call in cases(size, rng).items():
            t_py = median_time(lambda: call(py_kernels), args.repeat)
            t_c = median_time(lambda: call(c_kernels), args.repeat)
            a, b = call(py_kernels), call(c_kernels)
            diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
            print(f"{name:22s} {size:6d} {1e6 * t_py:11.1f} {1e6 * t_c:12.1f} {t_py / t_c:8.1f} {diff:13.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
