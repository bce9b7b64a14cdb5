"""Model parameters and time grids.

The grid constructor can force a set of interior times (jump times of the
target, fixing dates) onto the grid exactly, so downstream code never has to
deal with a discontinuity sitting strictly inside a step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError


@dataclass(frozen=True)
class ModelParams:
    """Static parameters of the tracking problem.

    Parameters
    ----------
    kappa : float
        Temporary impact parameter, the weight on the squared trading rate.
        Must be strictly positive.
    horizon : float
        Trading horizon T. Must be strictly positive and finite.
    initial_position : float, optional
        Position held at time 0.
    """

    kappa: float
    horizon: float
    initial_position: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise ValueError(f"kappa must be finite and > 0, got {self.kappa}")
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise ValueError(f"horizon must be finite and > 0, got {self.horizon}")
        if not math.isfinite(self.initial_position):
            raise ValueError("initial_position must be finite")

    @property
    def sqrt_kappa(self) -> float:
        return math.sqrt(self.kappa)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing grid of times.

    Attributes
    ----------
    nodes : numpy.ndarray
        1-D float array, strictly increasing, nodes[0] >= 0. Scenario grids
        start at 0; sub-simulations launched mid-horizon start later. The
        last node is the horizon of the grid.
    """

    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes in a 1-D array")
        if nodes[0] < 0.0:
            raise ValueError("grid must not start before t = 0")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("grid nodes must be finite")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, horizon: float, n_steps: int, boundaries=()) -> "TimeGrid":
        """Uniform grid on [0, horizon] with `boundaries` forced onto it.

        The interval is split at the requested interior boundaries and each
        block receives a share of `n_steps` proportional to its length (at
        least one step per block), so every boundary is a node exactly and the
        step size stays as uniform as the split allows.
        """
        if n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not (math.isfinite(horizon) and horizon > 0.0):
            raise ValueError("horizon must be finite and > 0")
        interior = sorted({float(b) for b in boundaries if 0.0 < float(b) < horizon})
        edges = [0.0] + interior + [horizon]
        lengths = np.diff(edges)
        n_blocks = len(lengths)
        if n_steps < n_blocks:
            raise ValueError(
                f"n_steps={n_steps} too small for {n_blocks} blocks of the split"
            )
        # largest-remainder allocation of steps to blocks, one step minimum
        raw = lengths / lengths.sum() * n_steps
        counts = np.maximum(np.floor(raw).astype(int), 1)
        while counts.sum() > n_steps:
            j = int(np.argmax(counts - raw))
            counts[j] -= 1
        while counts.sum() < n_steps:
            j = int(np.argmax(raw - counts))
            counts[j] += 1
        pieces = [
            np.linspace(edges[i], edges[i + 1], counts[i] + 1)[:-1]
            for i in range(n_blocks)
        ]
        nodes = np.concatenate(pieces + [np.array([horizon])])
        return cls(nodes=nodes)

    @property
    def horizon(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_steps(self) -> int:
        return self.nodes.size - 1

    @property
    def steps(self) -> np.ndarray:
        """Step lengths, one entry per interval."""
        return np.diff(self.nodes)

    def index_of(self, t: float, tol: float | None = None) -> int:
        """Index of the node equal to `t` within `tol` (default 1e-12 * T).

        Raises AlignmentError when no node matches.
        """
        if tol is None:
            tol = 1e-12 * self.horizon
        i = int(np.searchsorted(self.nodes, t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < self.nodes.size and abs(self.nodes[j] - t) <= tol:
                return j
        raise AlignmentError(f"time {t} is not a grid node (tol={tol})")

    def contains_time(self, t: float, tol: float | None = None) -> bool:
        try:
            self.index_of(t, tol=tol)
            return True
        except AlignmentError:
            return False
