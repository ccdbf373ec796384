"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run with the default environment to get both flavours; with
ORLICZGEO_DISABLE_NUMBA=1 only the numpy path is available and only it is
timed.  Both flavours are also checked for agreement.
"""

import time

import numpy as np

from orliczgeo import _kernels


def _time(fn, *args, repeat=5):
    fn(*args)  # warm up (jit compilation)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"numba path enabled: {_kernels.USE_NUMBA}")
    for n in (1024, 4096, 16384):
        x = np.sort(rng.uniform(-1.0, 1.0, n))
        fx = np.sin(5.0 * x) + 0.1 * rng.normal(size=n)
        y = np.linspace(-5.0, 5.0, n)

        t_np_scan = _time(_kernels._legendre_scan_np, x, fx, y)
        t_np_hull = _time(_kernels._hull_np, x, fx)
        line = (f"n={n:6d}  scan numpy {t_np_scan * 1e3:8.2f} ms"
                f"   hull numpy {t_np_hull * 1e3:8.2f} ms")
        if _kernels.USE_NUMBA:
            t_jit_scan = _time(_kernels._legendre_scan_jit, x, fx, y)
            t_jit_hull = _time(_kernels._hull_jit, x, fx)
            scan_dev = float(np.max(np.abs(
                _kernels._legendre_scan_np(x, fx, y)
                - _kernels._legendre_scan_jit(x, fx, y))))
            hull_dev = float(np.max(np.abs(
                _kernels._hull_np(x, fx) - _kernels._hull_jit(x, fx))))
            line += (f"   scan jit {t_jit_scan * 1e3:8.2f} ms"
                     f" ({t_np_scan / t_jit_scan:5.1f}x)"
                     f"   hull jit {t_jit_hull * 1e3:8.2f} ms"
                     f" ({t_np_hull / t_jit_hull:5.1f}x)"
                     f"   max dev {max(scan_dev, hull_dev):.2e}")
        print(line)


if __name__ == "__main__":
    main()
