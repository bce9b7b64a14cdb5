"""Position integrators: optimal trackers and the myopic benchmark.

The optimal position relaxes toward the signal at a state-independent,
time-dependent speed. Over a step on which the signal is frozen the relaxation
has an exact solution, a ratio of hyperbolic functions of the rescaled time to
maturity, so the integrators here commit no ODE discretization error beyond
freezing the signal across each step. The constrained variant's step factor
vanishes on the final step, which lands the position exactly on the terminal
value; the myopic benchmark relaxes toward the current target value instead of
the signal and serves as the thing to beat.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kernels import (
    position_decay_constrained,
    position_decay_unconstrained,
    trading_rate_constrained,
    trading_rate_unconstrained,
)
from .targets import SignalPath
from .timegrid import ModelParams, TimeGrid


@dataclass(frozen=True)
class StrategyPath:
    """Positions and trading rates on a grid.

    Arrays are (n_nodes,) or (n_paths, n_nodes). The rate at the final node is
    zero for the unconstrained tracker (trading stops at maturity) and a
    backward difference for the constrained one, whose rate grows without
    bound as the deadline approaches. `terminal_gap` records how far the final
    position is from the terminal constraint, when there is one.
    """

    grid: TimeGrid
    positions: np.ndarray = field(repr=False)
    rates: np.ndarray = field(repr=False)
    flavor: str
    terminal_gap: np.ndarray | float | None = None

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        rates = np.asarray(self.rates, dtype=float)
        if positions.shape != rates.shape:
            raise ValueError("positions and rates must have the same shape")
        if positions.shape[-1] != self.grid.nodes.size:
            raise ValueError("strategy must cover every grid node")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "rates", rates)

    @property
    def n_paths(self) -> int:
        return 1 if self.positions.ndim == 1 else self.positions.shape[0]


def _as_2d(values: np.ndarray):
    if values.ndim == 1:
        return values[None, :], True
    return values, False


def _frozen_signal(values2: np.ndarray, k: int, freeze: str,
                   last_step: bool, pin_terminal: bool) -> np.ndarray:
    if freeze not in ("left", "midpoint"):
        raise ValueError("signal_freeze must be 'left' or 'midpoint'")
    if last_step and pin_terminal:
        # the vanishing step factor sends the position to the frozen value;
        # only the terminal limit itself keeps the constraint exact
        return values2[:, k + 1]
    if freeze == "left":
        return values2[:, k]
    return 0.5 * (values2[:, k] + values2[:, k + 1])


def integrate_unconstrained(params: ModelParams, signal: SignalPath,
                            initial_position: float | None = None,
                            signal_freeze: str = "left") -> StrategyPath:
    """Track a signal with a free terminal position.

    Each step applies the exact relaxation factor for a signal frozen at the
    left node ("left", adapted, the default) or at the step average
    ("midpoint", deterministic studies only: it peeks one node ahead).
    """
    if signal.flavor != "unconstrained":
        raise DomainError("signal flavor must be 'unconstrained'")
    grid = signal.grid
    _check_grid(params, grid)
    values2, squeeze = _as_2d(signal.values)
    n_paths, n_nodes = values2.shape
    x0 = params.initial_position if initial_position is None else float(initial_position)
    positions = np.empty((n_paths, n_nodes))
    positions[:, 0] = x0
    decay = np.asarray(
        position_decay_unconstrained(params, grid.nodes[:-1], grid.nodes[1:])
    )
    for k in range(n_nodes - 1):
        m = _frozen_signal(values2, k, signal_freeze, False, False)
        positions[:, k + 1] = m + (positions[:, k] - m) * decay[k]
    gain = np.asarray(trading_rate_unconstrained(params, grid.nodes))
    rates = gain[None, :] * (values2 - positions)
    rates[:, -1] = 0.0  # tanh(0) = 0: the optimal rate shuts off at maturity
    if squeeze:
        positions, rates = positions[0], rates[0]
    return StrategyPath(grid=grid, positions=positions, rates=rates,
                        flavor="unconstrained")


def integrate_constrained(params: ModelParams, signal: SignalPath,
                          initial_position: float | None = None,
                          signal_freeze: str = "left") -> StrategyPath:
    """Track a signal while finishing exactly at the terminal value.

    The final step factor is sinh(0)/sinh(tau) = 0, so the last position
    equals the signal's final node (the terminal constraint) with no rounding
    beyond the subtraction itself. The recorded final rate is the backward
    difference across the last step; the instantaneous rate diverges.
    """
    if signal.flavor != "constrained":
        raise DomainError("signal flavor must be 'constrained'")
    grid = signal.grid
    _check_grid(params, grid)
    values2, squeeze = _as_2d(signal.values)
    n_paths, n_nodes = values2.shape
    x0 = params.initial_position if initial_position is None else float(initial_position)
    positions = np.empty((n_paths, n_nodes))
    positions[:, 0] = x0
    decay = np.asarray(
        position_decay_constrained(params, grid.nodes[:-1], grid.nodes[1:])
    )
    for k in range(n_nodes - 1):
        m = _frozen_signal(values2, k, signal_freeze, k == n_nodes - 2, True)
        positions[:, k + 1] = m + (positions[:, k] - m) * decay[k]
    gain = np.asarray(
        trading_rate_constrained(params, grid.nodes[:-1], eps_t=0.0)
    )
    rates = np.empty((n_paths, n_nodes))
    rates[:, :-1] = gain[None, :] * (values2[:, :-1] - positions[:, :-1])
    rates[:, -1] = (positions[:, -1] - positions[:, -2]) / grid.steps[-1]
    gap = positions[:, -1] - values2[:, -1]
    if squeeze:
        positions, rates, gap = positions[0], rates[0], float(gap[0])
    return StrategyPath(grid=grid, positions=positions, rates=rates,
                        flavor="constrained", terminal_gap=gap)


def integrate_myopic(params: ModelParams, grid: TimeGrid, target_values,
                     rate_scale: float = 1.0,
                     initial_position: float | None = None) -> StrategyPath:
    """Relax toward the current target value, ignoring its future.

    The rate is rate_scale / sqrt(kappa) times the current tracking gap, the
    stationary gain of the optimal tracker far from maturity. Steps use the
    exact exponential decay for a target frozen at the left node.
    """
    if rate_scale <= 0.0:
        raise ValueError("rate_scale must be > 0")
    _check_grid(params, grid)
    values2, squeeze = _as_2d(np.asarray(target_values, dtype=float))
    if values2.shape[-1] != grid.nodes.size:
        raise ValueError("target values must cover every grid node")
    n_paths, n_nodes = values2.shape
    x0 = params.initial_position if initial_position is None else float(initial_position)
    positions = np.empty((n_paths, n_nodes))
    positions[:, 0] = x0
    decay = np.exp(-rate_scale * grid.steps / params.sqrt_kappa)
    for k in range(n_nodes - 1):
        m = values2[:, k]
        positions[:, k + 1] = m + (positions[:, k] - m) * decay[k]
    rates = (rate_scale / params.sqrt_kappa) * (values2 - positions)
    if squeeze:
        positions, rates = positions[0], rates[0]
    return StrategyPath(grid=grid, positions=positions, rates=rates,
                        flavor="myopic")


def _check_grid(params: ModelParams, grid: TimeGrid) -> None:
    if abs(grid.horizon - params.horizon) > 1e-12 * max(1.0, params.horizon):
        raise DomainError("grid horizon differs from the model horizon")
