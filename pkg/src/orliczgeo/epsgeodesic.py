"""Elliptic eps-geodesic boundary-value solver and path-length integrator.

The S1-reduced geodesic equation on the space-time strip [0,1] x R in the
fiber coordinate s is

    Phi_tt * Phi_ss - Phi_ts^2 = eps * phi_ref''(s),   Phi = phi_ref + u,

with Dirichlet data u0, u1 at t = 0, 1 and lateral data given by the linear
interpolation of the endpoint tails plus the exact flat-space correction
eps * t(t-1)/2.  Solved by damped Newton on the space-time grid; the warm
start is the dual-linear weak geodesic, which is the eps -> 0 limit.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve
from scipy.special import expit

from .measure import DiscreteMeasure
from .metrics import relative_primal
from .orlicz import gauge_norm
from .toric import softplus, weak_geodesic

__all__ = [
    "SolverError",
    "SpaceTimeField",
    "solve_eps_geodesic",
    "chi_length",
    "laplacian_bound_probe",
    "sup_distance_to_geodesic",
    "t_convexity_defect",
    "tangent_integral_report",
]


class SolverError(RuntimeError):
    """Newton iteration failed to converge."""


class SpaceTimeField:
    """Solved eps-geodesic: u(t, s) samples on the space-time grid."""

    def __init__(self, t, s, values, epsilon, u0, u1, residual_history):
        self.t = t
        self.s = s
        self.values = values
        self.epsilon = float(epsilon)
        self.u0 = u0
        self.u1 = u1
        self.residual_history = residual_history

    @property
    def phi_ref_pp(self):
        return expit(self.s) * (1.0 - expit(self.s))

    def u_ss(self):
        """Central second s-derivative, one-sided at the lateral columns."""
        u = self.values
        ds = self.s[1] - self.s[0]
        out = np.empty_like(u)
        out[:, 1:-1] = (u[:, 2:] - 2.0 * u[:, 1:-1] + u[:, :-2]) / ds ** 2
        out[:, 0] = out[:, 1]
        out[:, -1] = out[:, -2]
        return out

    def u_dot(self):
        """Time derivative, central inside and second-order one-sided at ends."""
        u = self.values
        dt = self.t[1] - self.t[0]
        out = np.empty_like(u)
        out[1:-1] = (u[2:] - u[:-2]) / (2.0 * dt)
        out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dt)
        out[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dt)
        return out

    def ma_weights(self, i):
        """Normalized MA quadrature weights on the s-grid at time node i."""
        ds = self.s[1] - self.s[0]
        dens = np.clip(self.phi_ref_pp + self.u_ss()[i], 0.0, None) * ds
        total = float(np.sum(dens))
        if total <= 0:
            raise SolverError("degenerate MA density along the path")
        return dens / total


def _primal_u(u, s):
    """Primal potential difference phi_u - phi_ref at fiber points s."""
    return u.primal(s) - softplus(s)


def _residual(u, ref_pp, eps, dt, ds):
    utt = (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / dt ** 2
    uss = (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / ds ** 2
    uts = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4.0 * dt * ds)
    phi_ss = ref_pp[None, 1:-1] + uss
    return utt * phi_ss - uts ** 2 - eps * ref_pp[None, 1:-1], utt, phi_ss, uts


def solve_eps_geodesic(u0, u1, eps, nt=64, ns=384, pad=12.0, tol=1e-10,
                       max_newton=60):
    """Solve the eps-geodesic Dirichlet problem between two potentials."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps < 1e-6:
        warnings.warn("eps below 1e-6: the Newton system may be ill-conditioned "
                      "at this grid resolution")
    s_lo = min(u0.s_nodes[0], u1.s_nodes[0]) - pad
    s_hi = max(u0.s_nodes[-1], u1.s_nodes[-1]) + pad
    s = np.linspace(s_lo, s_hi, ns)
    t = np.linspace(0.0, 1.0, nt)
    dt = t[1] - t[0]
    ds = s[1] - s[0]
    ref_pp = expit(s) * (1.0 - expit(s))

    geod = weak_geodesic(u0, u1)
    u = np.empty((nt, ns))
    row0 = _primal_u(u0, s)
    row1 = _primal_u(u1, s)
    u[0] = row0
    u[-1] = row1
    for i in range(1, nt - 1):
        u[i] = _primal_u(geod.evaluator(t[i]), s) + eps * t[i] * (t[i] - 1.0) / 2.0
    # lateral Dirichlet columns: linear endpoint interpolation + flat correction
    for j in (0, ns - 1):
        u[1:-1, j] = ((1.0 - t[1:-1]) * row0[j] + t[1:-1] * row1[j]
                      + eps * t[1:-1] * (t[1:-1] - 1.0) / 2.0)

    ni, nj = nt - 2, ns - 2
    idx = np.arange(ni * nj).reshape(ni, nj)

    def interior_index(di, dj):
        # flattened unknown index of the (i+di, j+dj) neighbor, -1 if boundary
        ii = np.arange(ni)[:, None] + di
        jj = np.arange(nj)[None, :] + dj
        valid = (ii >= 0) & (ii < ni) & (jj >= 0) & (jj < nj)
        out = np.where(valid, idx[np.clip(ii, 0, ni - 1), np.clip(jj, 0, nj - 1)], -1)
        return out, valid

    stencil = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)]
    neighbor = {off: interior_index(*off) for off in stencil}

    history = []
    res, utt, phi_ss, uts = _residual(u, ref_pp, eps, dt, ds)
    norm = float(np.linalg.norm(res))
    history.append(norm)
    for _ in range(max_newton):
        if float(np.max(np.abs(res))) <= tol:
            return SpaceTimeField(t, s, u, eps, u0, u1, history)
        rows, cols, data = [], [], []
        coeff = {
            (0, 0): -2.0 * phi_ss / dt ** 2 - 2.0 * utt / ds ** 2,
            (-1, 0): phi_ss / dt ** 2,
            (1, 0): phi_ss / dt ** 2,
            (0, -1): utt / ds ** 2,
            (0, 1): utt / ds ** 2,
            (1, 1): -2.0 * uts / (4.0 * dt * ds),
            (-1, -1): -2.0 * uts / (4.0 * dt * ds),
            (1, -1): 2.0 * uts / (4.0 * dt * ds),
            (-1, 1): 2.0 * uts / (4.0 * dt * ds),
        }
        for off, c in coeff.items():
            nb, valid = neighbor[off]
            rows.append(idx[valid])
            cols.append(nb[valid])
            data.append(c[valid])
        jac = sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(ni * nj, ni * nj))
        delta = spsolve(jac, -res.ravel()).reshape(ni, nj)
        alpha = 1.0
        for _bt in range(30):
            cand = u.copy()
            cand[1:-1, 1:-1] += alpha * delta
            c_res, c_utt, c_pss, c_uts = _residual(cand, ref_pp, eps, dt, ds)
            c_norm = float(np.linalg.norm(c_res))
            if c_norm <= (1.0 - 1e-4 * alpha) * norm or c_norm <= tol:
                break
            alpha *= 0.5
        else:
            raise SolverError(f"line search stalled; residual history {history}")
        u, res, utt, phi_ss, uts = cand, c_res, c_utt, c_pss, c_uts
        norm = c_norm
        history.append(norm)
    if float(np.max(np.abs(res))) <= tol:
        return SpaceTimeField(t, s, u, eps, u0, u1, history)
    raise SolverError(f"Newton did not converge; residual history {history}")


def chi_length(path, w, nt_segment=17):
    """Path length: trapezoid over t of the gauge norm of the speed."""
    if isinstance(path, SpaceTimeField):
        udot = path.u_dot()
        speeds = np.empty(path.t.shape[0])
        for i in range(path.t.shape[0]):
            mu = DiscreteMeasure(path.s, path.ma_weights(i), probability=True)
            speeds[i] = gauge_norm(udot[i], w, mu)
        return float(np.trapezoid(speeds, path.t))
    # weak geodesic segment: numeric speeds along the dual-linear path
    from .metrics import geodesic_speed
    ts = np.linspace(0.0, 1.0, nt_segment)
    dt = 1e-5
    speeds = [geodesic_speed(path, w, max(min(t, 1.0 - 2 * dt), 2 * dt))
              for t in ts]
    return float(np.trapezoid(speeds, ts))


def laplacian_bound_probe(field, floor=1e-4):
    """max |u_ss| / phi_ref'' over nodes where the reference density >= floor.

    Beyond the floor the reference volume density vanishes exponentially and
    the ratio amplifies discretization noise of order machine-epsilon-times-
    curvature into arbitrary values, so those nodes carry no information.
    """
    ratio = np.abs(field.u_ss()) / field.phi_ref_pp[None, :]
    mask = field.phi_ref_pp >= floor
    return float(np.max(ratio[:, mask]))


def sup_distance_to_geodesic(field, segment=None):
    """sup over the grid of |u_eps - u_geodesic| (dual-linear comparison)."""
    if segment is None:
        segment = weak_geodesic(field.u0, field.u1)
    diff = 0.0
    for i, ti in enumerate(field.t):
        lin = _primal_u(segment.evaluator(ti), field.s)
        diff = max(diff, float(np.max(np.abs(field.values[i] - lin))))
    return diff


def t_convexity_defect(field):
    """Most negative discrete second t-difference (zero for convex paths)."""
    u = field.values
    d2 = u[2:] - 2.0 * u[1:-1] + u[:-2]
    return float(min(np.min(d2), 0.0))


def tangent_integral_report(field, w):
    """Compare int chi(u_dot) dw_{u_t} with the endpoint-difference integrals."""
    udot = field.u_dot()
    vals = []
    for i in range(field.t.shape[0]):
        wts = field.ma_weights(i)
        vals.append(float(np.dot(w.evaluate(udot[i]), wts)))
    e0 = float(np.mean(w.evaluate(relative_primal(field.u1, field.u0))))
    e1 = float(np.mean(w.evaluate(relative_primal(field.u0, field.u1))))
    deficit = max(e0, e1) - min(vals)
    return {
        "min_along_path": float(min(vals)),
        "endpoint_integrals": (e0, e1),
        "deficit": float(deficit),
    }
