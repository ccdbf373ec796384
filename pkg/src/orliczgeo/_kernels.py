"""Hot numeric kernels.

The discrete Legendre transform and the lower convex hull dominate the
runtime of envelope and geodesic computations.  Both are provided in two
flavours: numba ``@njit`` loops (default) and pure-numpy fallbacks.  Set
``ORLICZGEO_DISABLE_NUMBA=1`` to force the numpy path; the benchmark in
``benchmarks/bench_kernels.py`` compares the two.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("ORLICZGEO_DISABLE_NUMBA", "0") != "1"

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _legendre_scan_np(x, fx, y):
    out = np.full(y.shape[0], -np.inf)
    # chunk the outer product to keep memory bounded
    step = max(1, 2 ** 22 // max(1, x.shape[0]))
    for i0 in range(0, y.shape[0], step):
        blk = y[i0:i0 + step, None] * x[None, :] - fx[None, :]
        out[i0:i0 + step] = blk.max(axis=1)
    return out


def _hull_np(x, fx):
    # exact lower convex hull via qhull: take the lower chain of the 2d hull
    from scipy.spatial import ConvexHull, QhullError
    try:
        hull = ConvexHull(np.column_stack([x, fx]))
    except QhullError:
        # all points collinear: the samples are their own hull
        return fx.copy()
    order = np.asarray(hull.vertices)          # counterclockwise
    order = np.roll(order, -int(np.argmin(x[order])))
    lower = order[: int(np.argmax(x[order])) + 1]
    return np.interp(x, x[lower], fx[lower])


if USE_NUMBA:

    @njit(cache=True)
    def _legendre_scan_jit(x, fx, y):  # pragma: no cover - jit
        n = x.shape[0]
        m = y.shape[0]
        out = np.empty(m)
        for i in range(m):
            best = -1e300
            for j in range(n):
                v = x[j] * y[i] - fx[j]
                if v > best:
                    best = v
            out[i] = best
        return out

    @njit(cache=True)
    def _hull_jit(x, fx):  # pragma: no cover - jit
        n = x.shape[0]
        # monotone chain on the sorted nodes: indices of hull vertices
        stack = np.empty(n, dtype=np.int64)
        top = 0
        for i in range(n):
            while top >= 2:
                a = stack[top - 2]
                b = stack[top - 1]
                # pop b if it lies above chord a--i
                if (fx[b] - fx[a]) * (x[i] - x[a]) >= (fx[i] - fx[a]) * (x[b] - x[a]):
                    top -= 1
                else:
                    break
            stack[top] = i
            top += 1
        out = np.empty(n)
        seg = 0
        for i in range(n):
            while seg < top - 2 and x[stack[seg + 1]] <= x[i]:
                seg += 1
            a = stack[seg]
            b = stack[seg + 1] if seg + 1 < top else a
            if a == b:
                out[i] = fx[a]
            else:
                t = (x[i] - x[a]) / (x[b] - x[a])
                out[i] = (1.0 - t) * fx[a] + t * fx[b]
        return out


def legendre_scan(x, fx, y):
    """max_j (x_j * y_i - fx_j) for each y_i (discrete Legendre transform)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    fx = np.ascontiguousarray(fx, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if USE_NUMBA:
        return _legendre_scan_jit(x, fx, y)
    return _legendre_scan_np(x, fx, y)


def lower_convex_hull(x, fx):
    """Greatest convex minorant of the samples, evaluated back at ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    fx = np.ascontiguousarray(fx, dtype=np.float64)
    if USE_NUMBA:
        return _hull_jit(x, fx)
    return _hull_np(x, fx)
