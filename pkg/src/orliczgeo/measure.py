"""Discrete quadrature measures on an interval.

Unit-mass measures back every norm and energy integral in the package.
Polytope grids use midpoint nodes at half-cell offsets so that boundary
singularities of symplectic potentials never enter the quadrature.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "MeasureError",
    "DiscreteMeasure",
    "midpoint_probability",
    "integrate",
    "pushforward",
]


class MeasureError(ValueError):
    """Invalid measure construction or usage."""


class DiscreteMeasure:
    """Nonnegative weights on sorted nodes; optionally tagged probability."""

    def __init__(self, nodes, weights, probability=False):
        nodes = np.asarray(nodes, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise MeasureError("nodes and weights must be 1d arrays of equal length")
        if np.any(np.diff(nodes) < 0):
            raise MeasureError("nodes must be sorted ascending")
        if np.any(weights < 0):
            raise MeasureError("weights must be nonnegative")
        self.nodes = nodes
        self.weights = weights
        self.total_mass = float(np.sum(weights))
        self.probability = bool(probability)
        if probability and abs(self.total_mass - 1.0) > 1e-12:
            raise MeasureError(
                f"probability measure has total mass {self.total_mass!r}")

    def __len__(self):
        return self.nodes.shape[0]

    def integrate(self, f):
        """Integral of the node samples ``f`` against the measure."""
        f = np.asarray(f, dtype=np.float64)
        if f.shape != self.nodes.shape:
            raise MeasureError(
                f"sample length {f.shape} does not match nodes {self.nodes.shape}")
        return float(np.dot(f, self.weights))

    def pushforward(self, t_samples):
        """Image measure under a strictly monotone map sampled at the nodes."""
        t = np.asarray(t_samples, dtype=np.float64)
        if t.shape != self.nodes.shape:
            raise MeasureError("map samples must match the nodes")
        dt = np.diff(t)
        if np.all(dt > 0):
            nodes, weights = t, self.weights
        elif np.all(dt < 0):
            nodes, weights = t[::-1], self.weights[::-1]
        else:
            raise MeasureError("pushforward requires a strictly monotone map")
        return DiscreteMeasure(nodes, weights, probability=self.probability)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("node,weight\n")
            for x, w in zip(self.nodes, self.weights):
                fh.write(f"{x:.17e},{w:.17e}\n")

    @classmethod
    def from_csv(cls, path, probability=None):
        """Load node,weight CSV; probability=None infers the tag from mass."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if probability is None:
            probability = abs(float(np.sum(data[:, 1])) - 1.0) <= 1e-12
        return cls(data[:, 0], data[:, 1], probability=probability)

    def __repr__(self):
        return (f"DiscreteMeasure({len(self)} nodes, mass={self.total_mass:.6g}, "
                f"probability={self.probability})")


def midpoint_probability(n, a=0.0, b=1.0):
    """Uniform probability measure on n midpoint nodes of (a, b)."""
    if n < 1:
        raise MeasureError("need at least one node")
    nodes = a + (b - a) * (np.arange(n) + 0.5) / n
    weights = np.full(n, 1.0 / n)
    return DiscreteMeasure(nodes, weights, probability=True)


def integrate(f, mu):
    """Module-level alias for DiscreteMeasure.integrate."""
    return mu.integrate(f)


def pushforward(mu, t_samples):
    """Module-level alias for DiscreteMeasure.pushforward."""
    return mu.pushforward(t_samples)
