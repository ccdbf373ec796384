"""S1-invariant potentials on the projective line in dual coordinates.

A potential is stored as the difference v = g - g_ref between its symplectic
potential g on the moment interval P = (0, 1) and the reference symplectic
potential g_ref(y) = y log y + (1-y) log(1-y).  The boundary singularity of
g lives entirely in g_ref, so v is bounded and smooth; convexity of g is
positivity of the metric.  The fiber coordinate is s = g'(y), with reference
Kahler potential softplus(s) = log(1 + e^s).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import expit, logit, xlogy

from ._kernels import legendre_scan, lower_convex_hull
from .measure import DiscreteMeasure, midpoint_probability

__all__ = [
    "ToricError",
    "PolytopeGrid",
    "make_grid",
    "SymplecticPotential",
    "GeodesicSegment",
    "MomentMeasure",
    "legendre",
    "ma_pushforward",
    "rooftop",
    "max_potential",
    "ma_partition_check",
    "weak_geodesic",
    "softplus",
]

CONVEXITY_TOL = 1e-9
_Y_CLIP = 1e-15


class ToricError(ValueError):
    """Invalid potential construction or usage."""


def softplus(s):
    return np.logaddexp(0.0, s)


class PolytopeGrid:
    """Open midpoint grid on P = (0, 1) with its Lebesgue probability measure."""

    def __init__(self, n):
        if n < 64:
            raise ToricError("grid must have at least 64 nodes")
        self.n = int(n)
        self.lebesgue = midpoint_probability(self.n)
        self.y = self.lebesgue.nodes
        self.g_ref = xlogy(self.y, self.y) + xlogy(1.0 - self.y, 1.0 - self.y)
        self.s_ref = logit(self.y)
        self.gpp_ref = 1.0 / (self.y * (1.0 - self.y))

    def __repr__(self):
        return f"PolytopeGrid(n={self.n})"


@lru_cache(maxsize=32)
def make_grid(n):
    return PolytopeGrid(n)


class SymplecticPotential:
    """A potential as dual difference v = g - g_ref on the polytope grid."""

    def __init__(self, grid, values, validate=True):
        self.grid = grid
        self.values = np.asarray(values, dtype=np.float64)
        if self.values.shape != grid.y.shape:
            raise ToricError("value samples must match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ToricError("potential samples must be finite")
        if validate:
            g = self.dual
            d2 = g[2:] - 2.0 * g[1:-1] + g[:-2]
            worst = float(np.min(d2, initial=0.0))
            if worst < -CONVEXITY_TOL:
                raise ToricError(
                    f"dual potential is not convex: min second difference {worst:.3e}")
        self._spline = None

    @property
    def dual(self):
        """Samples of the symplectic potential g = g_ref + v."""
        return self.grid.g_ref + self.values

    @property
    def spline(self):
        if self._spline is None:
            self._spline = CubicSpline(self.grid.y, self.values)
        return self._spline

    @property
    def s_nodes(self):
        """Moment images s(y) = g'(y) at the grid nodes."""
        return self.grid.s_ref + self.spline(self.grid.y, 1)

    def _v(self, y):
        """v at arbitrary y in (0,1), linear beyond the grid ends."""
        g = self.grid
        sp = self.spline
        lo, hi = g.y[0], g.y[-1]
        yc = np.clip(y, lo, hi)
        out = sp(yc)
        slope_lo = float(sp(lo, 1))
        slope_hi = float(sp(hi, 1))
        out = np.where(y < lo, sp(lo) + slope_lo * (y - lo), out)
        out = np.where(y > hi, sp(hi) + slope_hi * (y - hi), out)
        return out

    def _vp(self, y):
        g = self.grid
        sp = self.spline
        yc = np.clip(y, g.y[0], g.y[-1])
        return sp(yc, 1)

    def _vpp(self, y):
        g = self.grid
        sp = self.spline
        inside = (y >= g.y[0]) & (y <= g.y[-1])
        yc = np.clip(y, g.y[0], g.y[-1])
        return np.where(inside, sp(yc, 2), 0.0)

    def moment_inverse(self, s):
        """y(s) solving g'(y) = s, by table lookup plus guarded Newton."""
        s = np.asarray(s, dtype=np.float64)
        table_s = self.s_nodes
        y = np.interp(s, table_s, self.grid.y)
        below = s < table_s[0]
        above = s > table_s[-1]
        if below.any() or above.any():
            # beyond the table, v' is frozen and g' = logit(y) + const
            y = np.where(below, expit(s - self._vp(self.grid.y[0])), y)
            y = np.where(above, expit(s - self._vp(self.grid.y[-1])), y)
        step_cap = 4.0 / self.grid.n
        for _ in range(6):
            y = np.clip(y, _Y_CLIP, 1.0 - _Y_CLIP)
            resid = logit(y) + self._vp(y) - s
            slope = 1.0 / (y * (1.0 - y)) + self._vpp(y)
            step = resid / np.maximum(slope, 1e-8)
            # on affine facets g'' degenerates; keep the table value there
            step = np.clip(step, -step_cap, step_cap)
            y = y - step
        return np.clip(y, _Y_CLIP, 1.0 - _Y_CLIP)

    def primal(self, s):
        """Kahler potential phi(s) = sup_y (s y - g(y))."""
        s = np.asarray(s, dtype=np.float64)
        y = self.moment_inverse(s)
        g = xlogy(y, y) + xlogy(1.0 - y, 1.0 - y) + self._v(y)
        return s * y - g

    def shifted(self, c):
        """The potential u + c (a constant added in primal coordinates)."""
        return SymplecticPotential(self.grid, self.values - c, validate=False)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("y,dual_value\n")
            for y, v in zip(self.grid.y, self.values):
                fh.write(f"{y:.17e},{v:.17e}\n")

    @classmethod
    def from_csv(cls, path):
        try:
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as exc:
            raise ToricError(f"{path}: malformed potential CSV ({exc})")
        n = data.shape[0]
        grid = make_grid(n)
        if not np.allclose(data[:, 0], grid.y, atol=1e-12, rtol=0.0):
            raise ToricError(f"{path}: nodes are not the midpoint grid of size {n}")
        return cls(grid, data[:, 1])

    def __repr__(self):
        return f"SymplecticPotential(n={self.grid.n})"


class MomentMeasure(DiscreteMeasure):
    """Lebesgue probability on the polytope, tagged with a moment map s(y).

    The Monge-Ampere measure of any potential pushes forward to this measure
    under its own moment map; fiber-coordinate functions F are integrated as
    F(s(y)) against the polytope weights.
    """

    def __init__(self, grid, s_nodes):
        super().__init__(grid.y, grid.lebesgue.weights, probability=True)
        self.grid = grid
        self.s_nodes = np.asarray(s_nodes, dtype=np.float64)

    def compose(self, f_fiber):
        """Samples of a fiber-coordinate function at the moment images."""
        return f_fiber(self.s_nodes)


def legendre(x, fx, target):
    """Discrete Legendre-Fenchel transform of samples onto a target grid."""
    return legendre_scan(np.asarray(x, float), np.asarray(fx, float),
                         np.asarray(target, float))


def ma_pushforward(u):
    """Normalized Monge-Ampere measure of u, as Lebesgue on the polytope."""
    return MomentMeasure(u.grid, u.s_nodes)


def _same_grid(u0, u1):
    if u0.grid.n != u1.grid.n:
        raise ToricError("potentials live on different grids")
    return u0.grid


def rooftop(u0, u1):
    """Largest potential below both inputs (dual: pointwise max of duals)."""
    grid = _same_grid(u0, u1)
    return SymplecticPotential(grid, np.maximum(u0.values, u1.values),
                               validate=False)


def max_potential(u0, u1):
    """The potential whose primal is max(u0, u1) (dual: convexified min)."""
    grid = _same_grid(u0, u1)
    g_min = np.minimum(u0.dual, u1.dual)
    hull = lower_convex_hull(grid.y, g_min)
    return SymplecticPotential(grid, hull - grid.g_ref, validate=False)


class GeodesicSegment:
    """Weak geodesic between two potentials: linear in dual coordinates."""

    def __init__(self, u0, u1):
        _same_grid(u0, u1)
        self.u0 = u0
        self.u1 = u1

    def evaluator(self, t):
        v = (1.0 - t) * self.u0.values + t * self.u1.values
        return SymplecticPotential(self.u0.grid, v, validate=False)

    def tangent(self, t):
        """u_t-moment-coordinate tangent; the fixed function g0 - g1 on P."""
        return self.u0.values - self.u1.values


def weak_geodesic(u0, u1):
    return GeodesicSegment(u0, u1)


def _cell_masses(phi, ds):
    """MA mass carried at interior nodes of a sampled convex function."""
    slopes = np.diff(phi) / ds
    return np.diff(slopes)


def ma_partition_check(u0, u1, n_s=4096, pad=4.0, contact_tol=1e-9):
    """Check the volume-form partition over the rooftop contact sets.

    In fiber coordinates the MA measure of the rooftop envelope must equal
    that of u0 on the contact set {u0 = P} and that of u1 on {u1 = P} minus
    the overlap; the switching region contributes O(one cell) of defect.
    """
    grid = _same_grid(u0, u1)
    s_lo = min(u0.s_nodes[0], u1.s_nodes[0]) - pad
    s_hi = max(u0.s_nodes[-1], u1.s_nodes[-1]) + pad
    s = np.linspace(s_lo, s_hi, n_s)
    ds = s[1] - s[0]
    phi0 = legendre(grid.y, u0.dual, s)
    phi1 = legendre(grid.y, u1.dual, s)
    phi_p = legendre(grid.y, np.maximum(u0.dual, u1.dual), s)
    m0 = _cell_masses(phi0, ds)
    m1 = _cell_masses(phi1, ds)
    mp = _cell_masses(phi_p, ds)
    on0 = np.abs(phi0 - phi_p)[1:-1] <= contact_tol
    on1 = np.abs(phi1 - phi_p)[1:-1] <= contact_tol
    model = np.where(on0, m0, np.where(on1, m1, 0.0))
    defect = float(np.sum(np.abs(mp - model)))
    max_cell = float(np.max(mp, initial=0.0))
    return {
        "mass_defect": defect,
        "max_cell_mass": max_cell,
        "total_mass": float(np.sum(mp)),
        "covered_fraction": float(np.sum(np.where(on0 | on1, mp, 0.0)) /
                                  max(np.sum(mp), 1e-300)),
    }
