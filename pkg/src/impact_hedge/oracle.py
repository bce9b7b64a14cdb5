"""Independent verification: discrete optimizers and optimality residuals.

Nothing here uses the hyperbolic closed forms. The deterministic oracle
solves the time-discretized control problem exactly, as the banded linear
system of its first-order conditions; the tree oracle runs dynamic
programming with quadratic value functions on a recombining lattice, which
handles stochastic targets. Both converge to the continuous optimum at first
order in the step, so agreement within the expected gap, shrinking under
refinement, is evidence that the closed forms solve the right problem.

The Gateaux check works directly on a candidate strategy: the derivative of
the cost along a perturbation direction is the inner product of the direction
with kappa * u_t + integral of the tracking gap from t to the horizon, which
must vanish at an optimum (or be constant, for perturbations that preserve a
terminal constraint).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solveh_banded

from ._normal import norm_cdf
from .bachelier import BachelierAsianSpec, asian_delta_post_fixing
from .errors import DomainError
from .strategies import StrategyPath
from .targets import PowerSingularity, TargetProcess
from .timegrid import ModelParams, TimeGrid


# ---------------------------------------------------------------------------
# deterministic discrete optimum: banded first-order conditions


@dataclass(frozen=True)
class DiscreteSolution:
    """Exact optimum of the time-discretized deterministic problem.

    The discrete objective freezes the tracking gap at the left node of each
    step: J = 1/2 sum_j h_j (X_j - xi_j)^2 + kappa/2 sum_k h_k u_k^2 with
    X_{k+1} = X_k + h_k u_k. `rates` holds the step rates at their left
    nodes; the final entry repeats the last step's rate for the constrained
    problem and is zero otherwise.
    """

    grid: TimeGrid
    positions: np.ndarray = field(repr=False)
    rates: np.ndarray = field(repr=False)
    objective: float
    foc_residual: float
    constrained: bool


def solve_lq_deterministic(params: ModelParams, grid: TimeGrid, target_values,
                           terminal_value: float | None = None,
                           initial_position: float | None = None) -> DiscreteSolution:
    """Solve the discretized problem by a direct SPD banded factorization.

    `target_values` are the node samples used on each step's left end; the
    final node's sample never enters the objective. A `terminal_value` pins
    X_N and prices the last step's forced trade.
    """
    xi = np.asarray(target_values, dtype=float)
    nodes = grid.nodes
    h = grid.steps
    n = grid.n_steps
    if xi.shape != (n + 1,):
        raise DomainError("need one target sample per grid node")
    x0 = params.initial_position if initial_position is None else float(initial_position)
    kappa = params.kappa
    constrained = terminal_value is not None

    # unknowns X_1..X_N (free) or X_1..X_{N-1} (pinned terminal)
    m = n if not constrained else n - 1
    if m < 1:
        raise DomainError("grid is too coarse for the discrete oracle")
    diag = np.empty(m)
    upper = np.zeros(m)
    rhs = np.empty(m)
    for i in range(1, m + 1):
        diag[i - 1] = kappa / h[i - 1] + (h[i] + kappa / h[i] if i < n else 0.0)
        if i < n:
            rhs[i - 1] = h[i] * xi[i]
        else:
            rhs[i - 1] = 0.0
        if i < m:
            upper[i] = -kappa / h[i]
    rhs[0] += kappa * x0 / h[0]
    if constrained:
        rhs[m - 1] += kappa * float(terminal_value) / h[m]
    if m == 1:
        # a single unknown has no band structure to factor
        interior = rhs / diag
    else:
        ab = np.vstack([upper, diag])
        interior = solveh_banded(ab, rhs, lower=False)

    positions = np.empty(n + 1)
    positions[0] = x0
    positions[1:m + 1] = interior
    if constrained:
        positions[n] = float(terminal_value)
    rates = np.empty(n + 1)
    rates[:-1] = np.diff(positions) / h
    rates[-1] = rates[-2] if constrained else 0.0

    tracking = 0.5 * float((h * (positions[:-1] - xi[:-1]) ** 2).sum())
    effort = 0.5 * kappa * float((h * rates[:-1] ** 2).sum())
    objective = tracking + effort

    # stationarity at the interior unknowns, scaled to rate units
    res = 0.0
    for i in range(1, m + 1):
        grad = kappa * (positions[i] - positions[i - 1]) / h[i - 1]
        if i < n:
            grad += h[i] * (positions[i] - xi[i])
            grad -= kappa * (positions[i + 1] - positions[i]) / h[i]
        res = max(res, abs(grad))
    return DiscreteSolution(
        grid=grid, positions=positions, rates=rates, objective=objective,
        foc_residual=res, constrained=constrained,
    )


def solve_lq_deterministic_dense(params: ModelParams, grid: TimeGrid,
                                 target_values,
                                 terminal_value: float | None = None,
                                 initial_position: float | None = None) -> DiscreteSolution:
    """Same optimum through a dense solve; cross-check for the banded route."""
    xi = np.asarray(target_values, dtype=float)
    h = grid.steps
    n = grid.n_steps
    x0 = params.initial_position if initial_position is None else float(initial_position)
    kappa = params.kappa
    constrained = terminal_value is not None
    m = n if not constrained else n - 1
    A = np.zeros((m, m))
    rhs = np.zeros(m)
    for i in range(1, m + 1):
        A[i - 1, i - 1] = kappa / h[i - 1]
        if i < n:
            A[i - 1, i - 1] += h[i] + kappa / h[i]
            rhs[i - 1] = h[i] * xi[i]
        if i < m:
            A[i - 1, i] = -kappa / h[i]
            A[i, i - 1] = -kappa / h[i]
    rhs[0] += kappa * x0 / h[0]
    if constrained:
        rhs[m - 1] += kappa * float(terminal_value) / h[m]
    interior = np.linalg.solve(A, rhs)
    positions = np.empty(n + 1)
    positions[0] = x0
    positions[1:m + 1] = interior
    if constrained:
        positions[n] = float(terminal_value)
    rates = np.empty(n + 1)
    rates[:-1] = np.diff(positions) / h
    rates[-1] = rates[-2] if constrained else 0.0
    tracking = 0.5 * float((h * (positions[:-1] - xi[:-1]) ** 2).sum())
    effort = 0.5 * kappa * float((h * rates[:-1] ** 2).sum())
    return DiscreteSolution(
        grid=grid, positions=positions, rates=rates,
        objective=tracking + effort, foc_residual=float("nan"),
        constrained=constrained,
    )


# ---------------------------------------------------------------------------
# stochastic discrete optimum: quadratic dynamic programming on a lattice


@dataclass(frozen=True)
class TreeLevel:
    """One time layer of a lattice: target values and branching."""

    xi: np.ndarray
    children: np.ndarray | None  # (n_states, n_branches) indices into the next level
    probs: np.ndarray | None  # matching branch probabilities


@dataclass(frozen=True)
class TreeSolution:
    """Expected optimal cost of the lattice problem from the root state."""

    value: float
    depth: int
    constrained: bool


def solve_lq_tree(params: ModelParams, grid: TimeGrid, levels,
                  terminal_value: float | None = None,
                  initial_position: float | None = None) -> TreeSolution:
    """Backward induction with value functions quadratic in the position.

    The quadratic coefficient is state-independent, so each sweep carries one
    scalar and two per-state arrays. Levels must match the grid's nodes; the
    grid must be uniform (one relaxation coefficient per sweep).
    """
    h = grid.steps
    if not np.allclose(h, h[0], rtol=0.0, atol=1e-12 * grid.horizon):
        raise DomainError("lattice oracle expects a uniform grid")
    dt = float(h[0])
    n = grid.n_steps
    if len(levels) != n + 1:
        raise DomainError("need one level per grid node")
    x0 = params.initial_position if initial_position is None else float(initial_position)
    kappa = params.kappa
    constrained = terminal_value is not None

    if constrained:
        last = n - 1
        xi = levels[last].xi
        alpha = 0.5 * dt + kappa / (2.0 * dt)
        beta = -dt * xi - kappa * float(terminal_value) / dt
        gamma = 0.5 * dt * xi ** 2 + kappa * float(terminal_value) ** 2 / (2.0 * dt)
    else:
        last = n
        alpha = 0.0
        beta = np.zeros(np.atleast_1d(levels[last].xi).size)
        gamma = np.zeros_like(beta)

    for k in range(last - 1, -1, -1):
        lvl = levels[k]
        xi = np.atleast_1d(lvl.xi)
        children = lvl.children
        probs = lvl.probs
        if children is None:
            b_bar = beta
            g_bar = gamma
        else:
            b_bar = (probs * beta[children]).sum(axis=1)
            g_bar = (probs * gamma[children]).sum(axis=1)
        D = kappa + 2.0 * alpha * dt
        gamma = 0.5 * dt * xi ** 2 - dt * b_bar ** 2 / (2.0 * D) + g_bar
        beta = -dt * xi + kappa * b_bar / D
        alpha = 0.5 * dt + kappa * alpha / D

    value = alpha * x0 ** 2 + float(beta[0]) * x0 + float(gamma[0])
    return TreeSolution(value=float(value), depth=n, constrained=constrained)


def deterministic_tree_levels(target_values) -> list:
    """Single-state levels for a deterministic target (lattice sanity check)."""
    xi = np.asarray(target_values, dtype=float)
    levels = []
    one = np.ones((1, 1))
    child = np.zeros((1, 1), dtype=np.intp)
    for k, v in enumerate(xi):
        last = k == xi.size - 1
        levels.append(TreeLevel(
            xi=np.array([v]),
            children=None if last else child,
            probs=None if last else one,
        ))
    return levels


def asian_tree_levels(spec: BachelierAsianSpec, depth: int) -> tuple:
    """Recombining binomial lattice for the average-price call's hedge ratio.

    The walk takes +-sigma*sqrt(dt) steps with probability one half. Before
    the first fixing a level's states are the up-move counts; after it the
    state must remember the price at the fixing as well, so levels carry
    (fixing up-moves, later up-moves) pairs. `depth` must be even so the
    fixing sits on a node. Returns (grid, levels).
    """
    if depth % 2 != 0:
        raise ValueError("depth must be even so the fixing lies on a node")
    if depth < 2:
        raise ValueError("need depth >= 2")
    half = depth // 2
    horizon = spec.horizon
    dt = horizon / depth
    step = spec.sigma * math.sqrt(dt)
    grid = TimeGrid(nodes=np.linspace(0.0, horizon, depth + 1))
    nodes = grid.nodes
    levels = []
    for k in range(half):
        j = np.arange(k + 1)
        s = spec.s0 + step * (2.0 * j - k)
        sd = spec.sigma * math.sqrt(0.625 * horizon - nodes[k])
        xi = norm_cdf((s - spec.strike) / sd)
        children = np.stack([j, j + 1], axis=1).astype(np.intp)
        probs = np.full((k + 1, 2), 0.5)
        levels.append(TreeLevel(xi=xi, children=children, probs=probs))
    # the fixing node: the hedge ratio has already jumped to its later branch
    j1 = np.arange(half + 1)
    s_half = spec.s0 + step * (2.0 * j1 - half)
    xi = asian_delta_post_fixing(spec, s_half)
    children = np.stack([2 * j1, 2 * j1 + 1], axis=1).astype(np.intp)
    probs = np.full((half + 1, 2), 0.5)
    levels.append(TreeLevel(xi=xi, children=children, probs=probs))
    for k in range(half + 1, depth + 1):
        width = k - half + 1
        j1 = np.repeat(np.arange(half + 1), width)
        j2 = np.tile(np.arange(width), half + 1)
        s_h = spec.s0 + step * (2.0 * j1 - half)
        s = s_h + step * (2.0 * j2 - (k - half))
        if k < depth:
            d = (s_h + s - 2.0 * spec.strike) / (
                spec.sigma * math.sqrt(horizon - nodes[k])
            )
            xi = 0.5 * norm_cdf(d)
            nxt = width + 1
            base = j1 * nxt + j2
            children = np.stack([base, base + 1], axis=1).astype(np.intp)
            probs = np.full((j1.size, 2), 0.5)
            levels.append(TreeLevel(xi=xi, children=children, probs=probs))
        else:
            avg = 0.5 * (s_h + s)
            xi = np.where(avg > spec.strike, 0.5,
                          np.where(avg == spec.strike, 0.25, 0.0))
            levels.append(TreeLevel(xi=xi, children=None, probs=None))
    return grid, levels


# ---------------------------------------------------------------------------
# first-order optimality of a strategy path


def _gap_step_integrals(grid: TimeGrid, positions: np.ndarray,
                        xi_right: np.ndarray, xi_left: np.ndarray,
                        singular: dict) -> np.ndarray:
    """Per-step integral of (X - xi), trapezoid with one-sided target views."""
    h = grid.steps
    left = positions[:-1] - xi_right[:-1]
    right = positions[1:] - xi_left[1:]
    out = 0.5 * h * (left + right)
    for k, shape in singular.items():
        t0, t1 = grid.nodes[k], grid.nodes[k + 1]
        out[k] = _gap_singular_step(t0, t1, positions[k], positions[k + 1], shape)
    return out


def _gap_singular_step(t0: float, t1: float, f0: float, f1: float,
                       shape: PowerSingularity) -> float:
    """Exact integral of (f - xi) over a step containing the singular center."""
    c, alpha, scale = shape.center, shape.exponent, shape.scale
    p1 = 1.0 - alpha
    total = 0.5 * (f0 + f1) * (t1 - t0)
    if t0 < c:
        b = min(t1, c)
        total -= shape.left_sign * scale * ((c - t0) ** p1 - (c - b) ** p1) / p1
    if t1 > c:
        a = max(t0, c)
        total -= shape.right_sign * scale * ((t1 - c) ** p1 - (a - c) ** p1) / p1
    return total


@dataclass(frozen=True)
class GateauxReport:
    """Normalized directional derivatives of the cost at a strategy."""

    derivatives: np.ndarray
    max_abs: float
    objective: float
    n_directions: int


def gateaux_check(params: ModelParams, strategy: StrategyPath,
                  target: TargetProcess | None = None,
                  target_values=None, target_values_left=None,
                  n_directions: int = 20, seed: int = 7,
                  preserve_terminal: bool | None = None) -> GateauxReport:
    """Directional derivatives of the cost at a candidate strategy.

    The gradient representer is G_t = kappa u_t plus the integral of the
    tracking gap over [t, T]. Directions are unit-mass sine modes plus seeded
    smooth random combinations; for a terminal constraint each direction is
    recentered so its time integral vanishes (the perturbation must not move
    the final position). Derivatives are reported relative to the objective.
    """
    from .costs import _singular_steps, cost_direct  # deferred: costs imports targets

    grid = strategy.grid
    nodes = grid.nodes
    if strategy.positions.ndim != 1:
        raise DomainError("the optimality check works on a single path")
    singular = {}
    if target is not None:
        if target.kind != "deterministic":
            raise DomainError("pass node arrays for stochastic targets")
        xi_r = target.value(nodes, side="right")
        xi_l = target.value(nodes, side="left")
        singular = _singular_steps(target, grid)
    else:
        if target_values is None:
            raise DomainError("need a target or its node values")
        xi_r = np.asarray(target_values, dtype=float)
        xi_l = (xi_r if target_values_left is None
                else np.asarray(target_values_left, dtype=float))
    steps = _gap_step_integrals(grid, strategy.positions, xi_r, xi_l, singular)
    tail = np.concatenate([steps[::-1].cumsum()[::-1], [0.0]])
    G = params.kappa * strategy.rates + tail

    if preserve_terminal is None:
        preserve_terminal = strategy.flavor == "constrained"
    horizon = grid.horizon
    rng = np.random.default_rng(seed)
    n_sine = min(n_directions, 8)
    derivs = np.empty(n_directions)
    h = grid.steps
    trap_w = np.empty(nodes.size)
    trap_w[0] = 0.5 * h[0]
    trap_w[-1] = 0.5 * h[-1]
    trap_w[1:-1] = 0.5 * (h[:-1] + h[1:])
    for i in range(n_directions):
        if i < n_sine:
            phi = np.sin((i + 1) * math.pi * nodes / horizon)
        else:
            coef = rng.standard_normal(6) / (1.0 + np.arange(6)) ** 2
            phi = sum(
                c * np.sin((m + 1) * math.pi * nodes / horizon)
                for m, c in enumerate(coef)
            )
        if preserve_terminal:
            phi = phi - float((trap_w * phi).sum()) / horizon
        norm = math.sqrt(float((trap_w * phi ** 2).sum()))
        phi = phi / norm
        derivs[i] = float((trap_w * phi * G).sum())

    objective = cost_direct(
        params, strategy, target=target,
        target_values=None if target is not None else xi_r,
        target_values_left=None if target is not None else xi_l,
    ).total
    return GateauxReport(
        derivatives=derivs,
        max_abs=float(np.max(np.abs(derivs))),
        objective=float(objective),
        n_directions=n_directions,
    )
