"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from qpl import _pykernels

try:
    from qpl import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(n, rng):
    factors = 1.0 - 0.5 * rng.random(n) ** 4
    num = 1.0 - 0.3 * rng.random(n)
    den = 1.0 - 0.3 * rng.random(n)
    coeffs = rng.uniform(-1, 1, 65)
    x = 0.81 ** np.arange(n)
    return {
        "product_recursion": lambda m: m.product_recursion(factors, 1.0, 1e-9),
        "ratio_recursion": lambda m: m.ratio_recursion(num, den, 1.0, 1e-9),
        "q_integral_sums": lambda m: m.q_integral_sums(factors, 0.5, 0.81),
        "horner (degree 64)": lambda m: m.horner(coeffs, x),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"array length {args.size}, best of {args.repeat}")
    print(f"{'kernel':<22}{'python (ms)':>14}{'cython (ms)':>14}{'speed-up':>10}")
    for name, call in cases(args.size, rng).items():
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<22}{t_py * 1e3:>14.3f}{'n/a':>14}{'':>10}")
            continue
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:<22}{t_py * 1e3:>14.3f}{t_c * 1e3:>14.3f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
