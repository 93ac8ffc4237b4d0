"""Compiled versus pure-Python kernels.

Times ``radius_scan`` and ``riccati_fixed_point`` from both backends on the
same random inputs and checks that they agree::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 2 4 6]
"""

import argparse
import sys
import timeit

import numpy as np

from icap import _kernels_py

try:
    from icap import _kernels
except ImportError:
    _kernels = None

GRID, ANGLE_TOL, PEAKS = 720, 1e-11, 4


def _cgauss(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)


def _cases(sizes, seed):
    rng = np.random.default_rng(seed)
    out = []
    for n in sizes:
        X = np.ascontiguousarray(_cgauss(rng, n, n))
        A1, A2 = _cgauss(rng, n, n), _cgauss(rng, n, n)
        A1 *= 0.4 / np.linalg.norm(A1, 2)
        A2 *= 0.4 / np.linalg.norm(A2, 2)
        out.append((n, X, A1, A2))
    return out


def _time(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=20)
    p.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 6])
    p.add_argument("--seed", type=int, default=20240611)
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; reinstall with Cython available", file=sys.stderr)
        return 1

    print(f"{'kernel':<22}{'n':>3}{'cython ms':>12}{'python ms':>12}{'speedup':>9}  agree")
    for n, X, A1, A2 in _cases(args.sizes, args.seed):
        runs = (
            ("radius_scan", lambda m: m.radius_scan(X, GRID, ANGLE_TOL, PEAKS),
             lambda a, b: abs(a[0] - b[0]) <= 1e-12 * (1 + abs(b[0]))),
            ("riccati_fixed_point", lambda m: m.riccati_fixed_point(A1, A2, 20000, 1e-12),
             lambda a, b: a[4] == b[4] and np.allclose(a[0], b[0], atol=1e-9)),
        )
        for name, call, same in runs:
            tc = _time(lambda: call(_kernels), args.repeat, args.number)
            tp = _time(lambda: call(_kernels_py), args.repeat, args.number)
            ok = same(call(_kernels), call(_kernels_py))
            print(f"{name:<22}{n:>3}{tc * 1e3:>12.3f}{tp * 1e3:>12.3f}{tp / tc:>8.1f}x  {ok}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
