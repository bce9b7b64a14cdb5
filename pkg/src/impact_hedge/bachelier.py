"""Arithmetic Brownian price model and the discretely monitored average-price call.

The underlying is ``S_t = s0 + sigma W_t`` and the claim pays
``((S_{T/2} + S_T)/2 - strike)^+``, the average being monitored at the two
fixing dates T/2 and T. Conditionally on the information at t the average is
Gaussian, so price and hedge ratio are elementary:

* for t < T/2 the average has mean ``S_t`` and standard deviation
  ``sigma sqrt(5T/8 - t)``;
* for T/2 <= t < T it has mean ``(S_{T/2} + S_t)/2`` and standard deviation
  ``sigma sqrt(T - t) / 2``.

The hedge ratio drops by ``Phi((S_{T/2}-K)/(sigma sqrt(T/8))) / 2`` at the
first fixing: half of the averaging weight freezes there.

Path simulation uses a counter-based generator keyed by (seed, path index), so
each path's draws are a pure function of that key. Ensembles generated in
chunks, in parallel, or path by path are bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from ._normal import norm_cdf, norm_pdf
from .errors import DomainError, StateError
from .timegrid import TimeGrid

_MAGIC = b"IHEN"
_FORMAT_VERSION = 1
_CHUNK = 256  # paths per worker block; results identical at any thread count


@dataclass(frozen=True)
class BachelierAsianSpec:
    """Average-price call on an arithmetic Brownian underlying.

    Parameters
    ----------
    sigma : float
        Absolute volatility of the underlying, > 0.
    strike : float
        Strike on the two-fixing average.
    s0 : float
        Spot at time 0.
    horizon : float
        Maturity T; the fixings are T/2 and T.
    """

    sigma: float
    strike: float
    s0: float
    horizon: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError("sigma must be finite and > 0")
        for name in ("strike", "s0", "horizon"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.horizon <= 0.0:
            raise ValueError("horizon must be > 0")

    @property
    def first_fixing(self) -> float:
        return 0.5 * self.horizon


def _require_time(spec: BachelierAsianSpec, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t >= spec.horizon):
        raise DomainError(f"time must lie in [0, {spec.horizon}), got {t}")
    return t


def _split_state(spec, t, s, s_half):
    late = np.asarray(t, dtype=float) >= spec.first_fixing
    if np.any(late):
        if s_half is None:
            raise StateError("state at the first fixing is required for t >= T/2")
        s_half = np.asarray(s_half, dtype=float)
    return late, s_half


def asian_price(spec: BachelierAsianSpec, t, s, s_half=None):
    """Value of the average-price call at time t given spot s.

    For t >= T/2 the realized first fixing `s_half` is required. Defined for
    0 <= t < T.
    """
    t = _require_time(spec, t)
    s = np.asarray(s, dtype=float)
    late, s_half = _split_state(spec, t, s, s_half)
    t_b, s_b = np.broadcast_arrays(t, s)
    out = np.empty(t_b.shape, dtype=float)
    early = ~late
    if np.any(early):
        sd = spec.sigma * np.sqrt(0.625 * spec.horizon - t_b[early])
        m = s_b[early] - spec.strike
        d = m / sd
        out[early] = m * norm_cdf(d) + sd * norm_pdf(d)
    if np.any(late):
        sh = np.broadcast_to(s_half, t_b.shape)[late]
        sd = 0.5 * spec.sigma * np.sqrt(spec.horizon - t_b[late])
        m = 0.5 * (sh + s_b[late]) - spec.strike
        d = (sh + s_b[late] - 2.0 * spec.strike) / (
            spec.sigma * np.sqrt(spec.horizon - t_b[late])
        )
        out[late] = m * norm_cdf(d) + sd * norm_pdf(d)
    return float(out[()]) if out.ndim == 0 else out


def asian_delta(spec: BachelierAsianSpec, t, s, s_half=None):
    """Hedge ratio (derivative of `asian_price` in the spot) at time t.

    The first branch covers 0 <= t <= T/2, so at exactly T/2 this returns the
    pre-jump value; `asian_delta_post_fixing` gives the other side.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t >= spec.horizon):
        raise DomainError(f"time must lie in [0, {spec.horizon}), got {t}")
    late = t > spec.first_fixing
    if np.any(late):
        if s_half is None:
            raise StateError("state at the first fixing is required for t > T/2")
        s_half = np.asarray(s_half, dtype=float)
    s = np.asarray(s, dtype=float)
    t_b, s_b = np.broadcast_arrays(t, s)
    out = np.empty(t_b.shape, dtype=float)
    early = ~late
    if np.any(early):
        sd = spec.sigma * np.sqrt(0.625 * spec.horizon - t_b[early])
        out[early] = norm_cdf((s_b[early] - spec.strike) / sd)
    if np.any(late):
        sh = np.broadcast_to(s_half, t_b.shape)[late]
        d = (sh + s_b[late] - 2.0 * spec.strike) / (
            spec.sigma * np.sqrt(spec.horizon - t_b[late])
        )
        out[late] = 0.5 * norm_cdf(d)
    return float(out[()]) if out.ndim == 0 else out


def asian_delta_post_fixing(spec: BachelierAsianSpec, s_half):
    """Right limit of the hedge ratio at the first fixing."""
    s_half = np.asarray(s_half, dtype=float)
    d = 2.0 * (s_half - spec.strike) / (spec.sigma * np.sqrt(0.5 * spec.horizon))
    out = np.asarray(0.5 * norm_cdf(d))
    return float(out[()]) if out.ndim == 0 else out


def asian_delta_jump(spec: BachelierAsianSpec, s_half):
    """Jump of the hedge ratio at the first fixing: ``-Phi(d)/2``.

    with ``d = (s_half - strike) / (sigma sqrt(T/8))``. Algebraically this is
    the right limit minus the left limit at T/2; the three expressions are
    coded so the identity holds exactly in floating point.
    """
    s_half = np.asarray(s_half, dtype=float)
    d = (s_half - spec.strike) / (spec.sigma * np.sqrt(spec.horizon / 8.0))
    out = np.asarray(-0.5 * norm_cdf(d))
    return float(out[()]) if out.ndim == 0 else out


def asian_delta_terminal(spec: BachelierAsianSpec, s_half, s_final):
    """Limit of the hedge ratio as t approaches maturity.

    Equals half the indicator that the average finishes in the money (1/4 on
    the boundary); used only to fill the final grid node of sampled paths.
    """
    m = 0.5 * (np.asarray(s_half, dtype=float) + np.asarray(s_final, dtype=float))
    out = np.where(m > spec.strike, 0.5, np.where(m < spec.strike, 0.0, 0.25))
    return float(out[()]) if out.ndim == 0 else out


@dataclass(frozen=True)
class PathEnsemble:
    """Simulated paths of one scalar process on a common grid.

    Attributes
    ----------
    grid : TimeGrid
    values : numpy.ndarray
        Shape (n_paths, n_nodes).
    seed : int
        Base seed of the counter-based generator; path i was drawn from the
        stream keyed by (seed, i).
    """

    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != self.grid.nodes.size:
            raise ValueError("values must have shape (n_paths, n_nodes)")
        object.__setattr__(self, "values", values)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    def to_binary(self, path) -> None:
        """Write the documented fixed layout.

        Header: magic ``IHEN``, uint32 version, uint64 n_paths, uint64
        n_nodes, int64 seed, little endian. Then the grid nodes as float64 and
        the path block row-major as float64.
        """
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(np.uint32(_FORMAT_VERSION).tobytes())
            fh.write(np.uint64(self.n_paths).tobytes())
            fh.write(np.uint64(self.grid.nodes.size).tobytes())
            fh.write(np.int64(self.seed).tobytes())
            fh.write(np.ascontiguousarray(self.grid.nodes, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def from_binary(cls, path) -> "PathEnsemble":
        with open(path, "rb") as fh:
            raw = fh.read()
        if raw[:4] != _MAGIC:
            raise ValueError("not an ensemble file (bad magic)")
        version = int(np.frombuffer(raw, dtype="<u4", count=1, offset=4)[0])
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported ensemble format version {version}")
        n_paths = int(np.frombuffer(raw, dtype="<u8", count=1, offset=8)[0])
        n_nodes = int(np.frombuffer(raw, dtype="<u8", count=1, offset=16)[0])
        seed = int(np.frombuffer(raw, dtype="<i8", count=1, offset=24)[0])
        off = 32
        nodes = np.frombuffer(raw, dtype="<f8", count=n_nodes, offset=off).copy()
        off += 8 * n_nodes
        values = (
            np.frombuffer(raw, dtype="<f8", count=n_paths * n_nodes, offset=off)
            .reshape(n_paths, n_nodes)
            .copy()
        )
        return cls(grid=TimeGrid(nodes=nodes), values=values, seed=seed)

    def to_csv(self, path) -> None:
        """Small-run export: one row per node, one column per path."""
        with open(path, "w") as fh:
            header = ["t"] + [f"path_{i}" for i in range(self.n_paths)]
            fh.write(",".join(header) + "\n")
            for k, t in enumerate(self.grid.nodes):
                row = [repr(float(t))] + [
                    repr(float(v)) for v in self.values[:, k]
                ]
                fh.write(",".join(row) + "\n")


def path_increments(grid: TimeGrid, n_steps: int, seed: int, path_index: int,
                    offset: int = 0) -> np.ndarray:
    """Standard normal draws for one path from the stream keyed by (seed, path)."""
    key = np.array([np.uint64(seed & (2**64 - 1)), np.uint64(path_index)],
                   dtype=np.uint64)
    gen = Generator(Philox(key=key))
    if offset:
        gen.standard_normal(offset)
    return gen.standard_normal(n_steps)


def simulate_paths(
    spec: BachelierAsianSpec,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    threads: int = 1,
    start_time: float = 0.0,
    start_value: float | None = None,
    path_offset: int = 0,
) -> PathEnsemble:
    """Simulate underlying paths on `grid` (shifted to start at `start_time`).

    Each path is driven by its own (seed, path index) stream, so the result
    does not depend on `threads` or on how paths are batched. `start_time`
    and `start_value` support sub-simulations launched from a later state;
    `path_offset` shifts the path keys so sub-ensembles stay independent.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    nodes = start_time + grid.nodes
    if nodes[-1] > spec.horizon * (1.0 + 1e-12):
        raise DomainError("grid extends past the maturity")
    s_start = spec.s0 if start_value is None else float(start_value)
    scales = spec.sigma * np.sqrt(grid.steps)
    n_steps = grid.n_steps
    values = np.empty((n_paths, n_steps + 1), dtype=float)
    values[:, 0] = s_start

    def fill(lo: int, hi: int) -> None:
        block = np.empty((hi - lo, n_steps), dtype=float)
        for i in range(lo, hi):
            block[i - lo] = path_increments(grid, n_steps, seed, i + path_offset)
        np.cumsum(block * scales, axis=1, out=block)
        values[lo:hi, 1:] = s_start + block

    if threads <= 1 or n_paths < 2 * _CHUNK:
        fill(0, n_paths)
    else:
        from concurrent.futures import ThreadPoolExecutor

        bounds = [(lo, min(lo + _CHUNK, n_paths)) for lo in range(0, n_paths, _CHUNK)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda b: fill(*b), bounds))
    return PathEnsemble(grid=TimeGrid(nodes=nodes), values=values, seed=seed)


def delta_paths(spec: BachelierAsianSpec, ensemble: PathEnsemble,
                side: str = "right") -> np.ndarray:
    """Hedge-ratio path for each simulated underlying path.

    Node values use the second branch from the first fixing on when
    ``side == "right"`` (the value the hedger sees going forward from the
    node); ``side == "left"`` evaluates the node at T/2 with the first branch
    instead. The final node carries the terminal limit of the hedge ratio.
    """
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    nodes = ensemble.grid.nodes
    s = ensemble.values
    half = spec.first_fixing
    i_half = ensemble.grid.index_of(half)
    s_half = s[:, i_half]
    out = np.empty_like(s)
    early = nodes < half if side == "right" else nodes <= half
    late = (~early) & (nodes < spec.horizon)
    if np.any(early):
        sd = spec.sigma * np.sqrt(0.625 * spec.horizon - nodes[early])
        out[:, early] = norm_cdf((s[:, early] - spec.strike) / sd)
    if np.any(late):
        d = (s_half[:, None] + s[:, late] - 2.0 * spec.strike) / (
            spec.sigma * np.sqrt(spec.horizon - nodes[late])
        )
        out[:, late] = 0.5 * norm_cdf(d)
    out[:, -1] = asian_delta_terminal(spec, s_half, s[:, -1])
    return out
