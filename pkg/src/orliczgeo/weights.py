"""Normalized Young weights and their calculus.

A normalized Young weight is an even convex function with ``chi(0) = 0``
and ``1`` in the subdifferential at ``l = 1``.  The growth certificate
``l * chi'(l) <= p * chi(l)`` (membership in the class W+_p) is what every
norm computation downstream relies on for bracketing.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "WeightError",
    "YoungWeight",
    "ConjugateWeight",
    "make_power_weight",
    "mollify",
    "conjugate",
    "check_growth_sandwich",
    "validate_weight",
    "weight_from_spec",
]

# fixed bump: c * (1 - x^2)^4 on (-1, 1), unit mass
_BUMP_C = 315.0 / 256.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


class WeightError(ValueError):
    """Invalid weight construction or usage."""


class YoungWeight:
    """A normalized Young weight with derivative and growth certificate."""

    def __init__(self, evaluate, derivative, growth_exponent, smooth, chi_one, spec):
        self._eval = evaluate
        self._deriv = derivative
        self.growth_exponent = float(growth_exponent)
        self.smooth = bool(smooth)
        self.chi_one = float(chi_one)
        self.spec = dict(spec)

    def evaluate(self, l):
        return self._eval(np.asarray(l, dtype=np.float64))

    def derivative(self, l):
        return self._deriv(np.asarray(l, dtype=np.float64))

    def __repr__(self):
        return f"YoungWeight({self.spec})"


class ConjugateWeight:
    """Legendre transform of a Young weight.

    ``weight`` is itself usable wherever a Young weight is expected; for the
    conjugate of the absolute-value weight it is indicator-type (zero on
    [-1, 1], +inf outside) and norm evaluation reduces to the sup norm.
    """

    def __init__(self, base, weight, closed_form=None):
        self.base = base
        self.weight = weight
        self.closed_form = closed_form

    def evaluate(self, h):
        return self.weight.evaluate(h)


def make_power_weight(p):
    """The weight |l|^p / p, the generator of the L^p norm."""
    p = float(p)
    if p < 1.0:
        raise WeightError(f"power weight requires p >= 1, got {p}")

    def _eval(l):
        return np.abs(l) ** p / p

    if p == 1.0:
        def _deriv(l):
            return np.sign(l)
    else:
        def _deriv(l):
            return np.sign(l) * np.abs(l) ** (p - 1.0)

    return YoungWeight(_eval, _deriv, p, p >= 2.0, 1.0 / p,
                       {"kind": "power", "p": p})


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------

def _power_moment(wlo, whi, m, q):
    """Integral of sign(w)^m |w|^q over [wlo, whi] (elementwise arrays)."""
    def anti(w):
        return np.sign(w) ** (m + 1) * np.abs(w) ** (q + 1.0) / (q + 1.0)
    return anti(whi) - anti(wlo)


def _conv_power_closed(x, p, k, deriv):
    """Exact bump convolution of |l|^p/p at |x| <= 2/k (kink handled)."""
    r = 1.0 / k
    wlo = x - r
    whi = x + r
    out = np.zeros_like(x)
    for j in range(5):
        bj = _BUMP_C * math.comb(4, j) * (-1.0) ** j * k ** (2 * j + 1)
        for i in range(2 * j + 1):
            c = math.comb(2 * j, i) * (-x) ** (2 * j - i)
            if deriv:
                mom = _power_moment(wlo, whi, i + 1, i + p - 1.0)
            else:
                mom = _power_moment(wlo, whi, i, i + p) / p
            out += bj * c * mom
    return out


def _conv_power_gl(x, p, k, deriv):
    """Gauss-Legendre bump convolution, valid away from the kink."""
    u = _GL_NODES[None, :] / k
    w = _GL_WEIGHTS[None, :] / k
    bump = _BUMP_C * k * (1.0 - (k * u) ** 2) ** 4
    arg = x[:, None] + u
    if deriv:
        vals = np.sign(arg) * np.abs(arg) ** (p - 1.0)
    else:
        vals = np.abs(arg) ** p / p
    return np.sum(w * bump * vals, axis=1)


def _conv_power(x, p, k, deriv=False):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(x)
    near = np.abs(x) <= 2.0 / k
    if near.any():
        out[near] = _conv_power_closed(x[near], p, k, deriv)
    if (~near).any():
        out[~near] = _conv_power_gl(x[~near], p, k, deriv)
    return out


def _conv_generic(x, chi, chi_prime, k, deriv=False):
    """Bump convolution by split Gauss-Legendre; assumes a kink only at 0."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    fn = chi_prime if deriv else chi
    out = np.empty_like(x)
    r = 1.0 / k

    def gl(a, b):
        # a, b arrays of interval ends; integrate bump(u)*fn(x+u) du
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        u = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        w = half[:, None] * _GL_WEIGHTS[None, :]
        bump = _BUMP_C * k * np.clip(1.0 - (k * u) ** 2, 0.0, None) ** 4
        return np.sum(w * bump * fn(x[:, None] + u), axis=1)

    lo = np.full_like(x, -r)
    hi = np.full_like(x, r)
    split = np.clip(-x, lo, hi)
    out = gl(lo, split) + gl(split, hi)
    return out


def mollify(w, k):
    """Smooth, renormalized approximation of ``w`` at mollification level ``k``.

    Convolves with a bump of radius 1/k and rescales the argument by a factor
    ``h_k`` (root-found) so the result is again normalized.  The growth
    exponent of the output is re-estimated by sampling.
    """
    k = int(k)
    if k < 1:
        raise WeightError("mollification level must be a positive integer")
    if not np.isfinite(w.evaluate(np.array([1.0]))[0]):
        raise WeightError("can only mollify finite-valued weights")

    if w.spec.get("kind") == "power":
        p = w.spec["p"]

        def conv(x):
            return _conv_power(x, p, k, deriv=False)

        def conv_d(x):
            return _conv_power(x, p, k, deriv=True)
    else:
        def conv(x):
            return _conv_generic(x, w.evaluate, w.derivative, k, deriv=False)

        def conv_d(x):
            return _conv_generic(x, w.evaluate, w.derivative, k, deriv=True)

    def slope(h):
        # d/dl conv(h*l) at l=1
        return h * conv_d(np.array([h]))[0]

    lo, hi = max(1e-6, 1.0 - 1.0 / k - 0.25), 1.0 + 1.0 / k + 0.25
    flo, fhi = slope(lo) - 1.0, slope(hi) - 1.0
    if flo * fhi > 0:
        raise WeightError(
            f"failed to bracket the normalization scale h_k on [{lo}, {hi}]: "
            f"slope({lo})={flo + 1.0:.6g}, slope({hi})={fhi + 1.0:.6g}")
    h_k = brentq(lambda h: slope(h) - 1.0, lo, hi, xtol=1e-14, rtol=1e-15)
    c0 = conv(np.array([0.0]))[0]

    def _eval(l):
        return conv(h_k * np.abs(l)) - c0

    def _deriv(l):
        return np.sign(l) * h_k * conv_d(h_k * np.abs(l))

    # growth certificate by sampling; any upper bound is a valid certificate
    ls = np.geomspace(1e-4, 1e4, 257)
    vals = _eval(ls)
    ders = _deriv(ls)
    ok = vals > 1e-300
    p_k = float(np.max(ls[ok] * ders[ok] / vals[ok])) * (1.0 + 1e-12) + 1e-12
    p_k = max(p_k, 1.0)

    out = YoungWeight(_eval, _deriv, p_k, True, _eval(np.array([1.0]))[0],
                      {"kind": "mollified", "base": w.spec, "k": k})
    out.mollify_scale = h_k
    return out


# ---------------------------------------------------------------------------
# conjugation
# ---------------------------------------------------------------------------

def _indicator_weight():
    def _eval(h):
        h = np.asarray(h, dtype=np.float64)
        return np.where(np.abs(h) <= 1.0, 0.0, np.inf)

    def _deriv(h):
        h = np.asarray(h, dtype=np.float64)
        return np.where(np.abs(h) < 1.0, 0.0, np.sign(h) * np.inf)

    return YoungWeight(_eval, _deriv, 1.0, False, 0.0, {"kind": "indicator"})


class _NumericConjugate:
    """sup_l (l*h - chi(l)) from a dense parametric Legendre table.

    The envelope identity chi*(chi'(l)) = l chi'(l) - chi(l) gives the exact
    conjugate at every table node; between nodes linear interpolation of the
    convex conjugate errs on the high side by O(table spacing^2), which keeps
    Holder right-hand sides conservative.
    """

    def __init__(self, base, l_max=1e8, n_grid=400_000):
        self.base = base
        l = np.geomspace(1e-8, l_max, n_grid)
        slopes = np.empty(n_grid)
        vals = np.empty(n_grid)
        chunk = 65536
        for a in range(0, n_grid, chunk):
            b = min(a + chunk, n_grid)
            slopes[a:b] = base.derivative(l[a:b])
            vals[a:b] = base.evaluate(l[a:b])
        slopes = np.maximum.accumulate(slopes)
        conj = np.maximum.accumulate(np.maximum(l * slopes - vals, 0.0))
        self.l_grid = np.concatenate([[0.0], l])
        self.slope_grid = np.concatenate([[0.0], slopes])
        self.value_grid = np.concatenate([[0.0], conj])
        self.slope_sup = float(slopes[-1])

    def argmax(self, a):
        """l achieving the sup for |h| = a (a >= 0)."""
        return np.interp(a, self.slope_grid, self.l_grid)

    def __call__(self, h):
        h = np.atleast_1d(np.asarray(h, dtype=np.float64))
        a = np.abs(h)
        out = np.interp(a, self.slope_grid, self.value_grid)
        return np.where(a <= self.slope_sup * (1.0 + 1e-12), out, np.inf)

    def prime(self, h):
        h = np.atleast_1d(np.asarray(h, dtype=np.float64))
        a = np.abs(h)
        out = np.interp(a, self.slope_grid, self.l_grid)
        out = np.where(a <= self.slope_sup * (1.0 + 1e-12), out, np.inf)
        return np.sign(h) * out


def conjugate(w, l_max=1e8, n_grid=400_000):
    """Legendre transform of ``w``; closed form for power weights."""
    kind = w.spec.get("kind")
    if kind == "power":
        p = w.spec["p"]
        if p == 1.0:
            return ConjugateWeight(w, _indicator_weight(), closed_form="indicator")
        q = p / (p - 1.0)
        return ConjugateWeight(w, make_power_weight(q), closed_form=f"power:{q}")

    num = _NumericConjugate(w, l_max=l_max, n_grid=n_grid)

    def _eval(h):
        return num(h)

    def _deriv(h):
        return num.prime(h)

    # growth certificate for the conjugate, sampled where it is positive
    a = np.geomspace(1e-4, min(10.0 * num.slope_sup, 1e4), 257)
    a = a[a < num.slope_sup]
    q_est = 2.0
    if a.size:
        vals = num(a)
        ders = np.abs(num.prime(a))
        ok = (vals > 1e-300) & np.isfinite(vals) & np.isfinite(ders)
        if ok.any():
            q_est = float(np.max(a[ok] * ders[ok] / vals[ok])) * (1.0 + 1e-10)
    q_est = min(max(q_est, 1.0), 256.0)

    cw = YoungWeight(_eval, _deriv, q_est, w.smooth, float(num(np.array([1.0]))[0]),
                     {"kind": "conjugate", "base": w.spec})
    return ConjugateWeight(w, cw, closed_form=None)


# ---------------------------------------------------------------------------
# property checks
# ---------------------------------------------------------------------------

def check_growth_sandwich(w, eps, samples):
    """eps^p * chi(l) <= chi(eps*l) <= eps * chi(l) on the given samples."""
    if not 0.0 < eps < 1.0:
        raise WeightError("eps must lie in (0, 1)")
    l = np.asarray(samples, dtype=np.float64)
    l = l[l > 0]
    chi_l = w.evaluate(l)
    chi_el = w.evaluate(eps * l)
    p = w.growth_exponent
    low_violation = np.max(eps ** p * chi_l - chi_el, initial=0.0)
    high_violation = np.max(chi_el - eps * chi_l, initial=0.0)
    return {
        "eps": eps,
        "growth_exponent": p,
        "lower_violation": float(low_violation),
        "upper_violation": float(high_violation),
        "max_violation": float(max(low_violation, high_violation)),
    }


def validate_weight(w, grid=None):
    """Max violations of the Young-weight axioms on a sample grid."""
    if grid is None:
        grid = np.linspace(-10.0, 10.0, 2001)
    l = np.asarray(grid, dtype=np.float64)
    vals = w.evaluate(l)
    even = float(np.max(np.abs(vals - w.evaluate(-l))))
    zero = float(abs(w.evaluate(np.array([0.0]))[0]))
    # midpoint convexity over all pairs of a thinned grid
    sub = l[:: max(1, len(l) // 256)]
    a, b = np.meshgrid(sub, sub)
    convexity = float(np.max(
        w.evaluate(0.5 * (a + b)) - 0.5 * (w.evaluate(a) + w.evaluate(b)),
        initial=0.0))
    dl = 1e-7
    d_left = (w.evaluate(np.array([1.0])) - w.evaluate(np.array([1.0 - dl])))[0] / dl
    d_right = (w.evaluate(np.array([1.0 + dl])) - w.evaluate(np.array([1.0])))[0] / dl
    normalization = float(max(d_left - 1.0, 1.0 - d_right, 0.0))
    pos = np.geomspace(1e-3, 10.0, 200)
    growth = float(np.max(
        pos * w.derivative(pos) - w.growth_exponent * w.evaluate(pos),
        initial=0.0))
    return {
        "evenness": even,
        "zero_at_zero": zero,
        "convexity": convexity,
        "normalization": max(normalization - 2e-7, 0.0),
        "growth": growth,
    }


def weight_from_spec(spec):
    """Rebuild a weight from its JSON specification."""
    kind = spec.get("kind")
    if kind == "power":
        return make_power_weight(spec["p"])
    if kind == "mollified":
        return mollify(weight_from_spec(spec["base"]), spec["k"])
    raise WeightError(f"unknown weight kind: {kind!r}")
