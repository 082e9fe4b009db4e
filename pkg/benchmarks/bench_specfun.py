"""Time the compiled and pure-Python special-function kernels side by side.

    python3 benchmarks/bench_specfun.py [--repeat N]

Both backends are called on the same inputs; the script also reports the
largest disagreement between them.
"""

import argparse
import math
import timeit

import numpy as np

from gaussqi.specfun import backend_module


def workloads(rng):
    xs = rng.uniform(0.0, 12.0, 200)
    ys = rng.uniform(0.0, 15.0, 200)
    zs = rng.uniform(-5.0, 60.0, 2000)
    return {
        "log_erfc": (lambda k: [k.log_erfc(z) for z in zs]),
        "i0e": (lambda k: [k.i0e(abs(z)) for z in zs]),
        "marcum_upper": (lambda k: [k.marcum_upper(x, y) for x, y in zip(xs, ys)]),
        "marcum_lower": (lambda k: [k.marcum_lower(x, y) for x, y in zip(xs, ys)]),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    py = backend_module("python")
    try:
        cy = backend_module("cython")
    except ImportError:
        print("compiled extension not built; only the Python backend is available")
        cy = None
    rng = np.random.default_rng(20261014)
    print(f"{'kernel':<14}{'python [s]':>12}{'cython [s]':>12}{'speed-up':>10}{'max diff':>12}")
    for name, work in workloads(rng).items():
        t_py = min(timeit.repeat(lambda: work(py), number=1, repeat=args.repeat))
        if cy is None:
            print(f"{name:<14}{t_py:12.4f}")
            continue
        t_cy = min(timeit.repeat(lambda: work(cy), number=1, repeat=args.repeat))
        diff = max(abs(a - b) for a, b in zip(work(py), work(cy))
                   if math.isfinite(a) and math.isfinite(b))
        print(f"{name:<14}{t_py:12.4f}{t_cy:12.4f}{t_py / t_cy:10.1f}{diff:12.2e}")


if __name__ == "__main__":
    main()
