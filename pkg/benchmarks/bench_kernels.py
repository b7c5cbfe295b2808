"""Compare the numba and numpy builders of the Fock-space operators.

    python3 benchmarks/bench_kernels.py [--modes 9 11 13 15] [--repeat 5]

Times the COO assembly of a dense one-body operator sum K[a,b] c_a^dag c_b
and a full Schwinger-term evaluation for each backend, after one warm-up
call so numba compilation is excluded.
"""

import argparse
import time

import numpy as np

from thermoweyl import _kernels
from thermoweyl import lattice as lat
from thermoweyl.testfn import Gaussian, PolyGaussian


def best_of(func, repeat):
    func()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func()
        times.append(time.perf_counter() - start)
    return min(times)


def run_backend(use_numba: bool, repeat: int, modes):
    """Time a backend; the lattice check flips the module switch temporarily."""
    rows = []
    rng = np.random.default_rng(0)
    for m in modes:
        kernel = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        t = best_of(lambda: _kernels.bilinear_coo(kernel, m, use_numba=use_numba), repeat)
        rows.append((m, t))
    saved = _kernels.USE_NUMBA
    _kernels.USE_NUMBA = use_numba
    try:
        f, g = Gaussian(0.0, 2.0), PolyGaussian((0.0, 1.0), 0.0, 2.0)
        cfg = lat.LatticeConfig(20.0, 7, 5.0)
        full = best_of(lambda: lat.schwinger_check(f, g, cfg), max(1, repeat // 2))
    finally:
        _kernels.USE_NUMBA = saved
    return rows, full


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, nargs="+", default=[9, 11, 13, 15])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    fast, fast_full = run_backend(True, args.repeat, args.modes)
    slow, slow_full = run_backend(False, args.repeat, args.modes)
    print(f"{'modes':>5} {'dim':>7} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8}")
    for (m, tf), (_, ts) in zip(fast, slow):
        print(f"{m:5d} {1 << m:7d} {tf:11.4f} {ts:11.4f} {ts / tf:8.2f}")
    print(f"schwinger_check M=7 (2^15 states): numba {fast_full:.3f} s, "
          f"numpy {slow_full:.3f} s, speedup {slow_full / fast_full:.2f}")


if __name__ == "__main__":
    main()
