"""Deterministic random test data: potentials and sampled functions."""

from __future__ import annotations

import numpy as np

from ._kernels import lower_convex_hull
from .toric import SymplecticPotential, softplus

__all__ = ["random_potential", "random_function"]


def random_potential(grid, seed, index=0, amplitude=0.5, n_bumps=4, even=False):
    """Reference potential plus a random convexified perturbation.

    The perturbation is a sum of softplus ramps with controlled amplitude;
    the dual potential is convexified by a lower convex hull.  Deterministic
    in (seed, index).
    """
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    y = grid.y
    v = np.zeros_like(y)
    if amplitude > 0:
        for _ in range(int(n_bumps)):
            a = rng.uniform(-1.0, 1.0) * amplitude / n_bumps
            c = rng.uniform(0.0, 1.0)
            wd = rng.uniform(0.05, 0.3)
            v = v + a * wd * softplus((y - c) / wd)
        hull = lower_convex_hull(y, grid.g_ref + v)
        v = hull - grid.g_ref
    if even:
        v = 0.5 * (v + v[::-1])
    return SymplecticPotential(grid, v, validate=False)


def random_function(mu, seed, index=0, modes=6, rough=0.0):
    """Random bounded sample function on the nodes of a measure."""
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, 1 + int(index)])
    x = mu.nodes
    span = x[-1] - x[0]
    f = np.zeros_like(x)
    for k in range(1, modes + 1):
        f = f + rng.normal() / k * np.sin(np.pi * k * (x - x[0]) / span)
        f = f + rng.normal() / k * np.cos(np.pi * k * (x - x[0]) / span)
    if rough > 0:
        f = f + rough * rng.normal(size=x.shape)
    return f
