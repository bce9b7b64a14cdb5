"""Cost evaluation: direct discretization, closed forms, and reachability.

The performance criterion is half the time integral of the squared tracking
gap plus half kappa times the integral of the squared trading rate. The
direct evaluator integrates exactly that for a strategy path, using one-sided
target views at jump nodes and exact elementary integrals across steps that
contain a power singularity (an affine position against an exact power
integral), so that integrable spikes in the target do not poison the sum.

The closed forms evaluate the optimal cost without integrating the strategy:
an initial-gap term, the integrated squared distance between target and
signal, and a weighted quadratic variation of the signal. For a terminal
constraint the weight is coth of the rescaled maturity, which is integrable
against the signal's variation exactly when the constraint is reachable; the
reachability check integrates d E[Xi_t^2] / (T - t) over dyadic blocks
accumulating toward the deadline and reports convergence or divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ReachabilityError
from .kernels import scaled_time_to_maturity
from .strategies import StrategyPath
from .targets import (
    PowerSingularity,
    SignalPath,
    TargetProcess,
    TerminalConstraint,
    deterministic_signal_values,
)
from .timegrid import ModelParams, TimeGrid


@dataclass(frozen=True)
class DirectCost:
    """Realized cost of a strategy path, averaged over paths."""

    total: float
    tracking_term: float
    effort_term: float
    stderr: float | None = None
    per_path: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class ClosedFormCost:
    """Optimal cost from the closed form, averaged over paths.

    `initial_gap_term` prices the relaxation of the starting position toward
    the signal, `target_signal_term` the irreducible gap between target and
    signal, and `signal_variation_term` the cost of chasing the signal's
    innovations (zero for deterministic targets).
    """

    total: float
    initial_gap_term: float
    target_signal_term: float
    signal_variation_term: float
    stderr: float | None = None
    per_path: np.ndarray | None = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# elementary integrals against a power singularity


def _sq_gap_singular_step(t0: float, t1: float, f0: float, f1: float,
                          shape: PowerSingularity) -> float:
    """Exact integral over [t0, t1] of (f(t) - xi(t))^2, f affine.

    The step may contain the singular center; the target square has exponent
    -2*alpha < 1 so every piece is elementary.
    """
    c, alpha, scale = shape.center, shape.exponent, shape.scale
    b_slope = (f1 - f0) / (t1 - t0)

    def one_side(a: float, b: float, sign: float) -> float:
        if b <= a:
            return 0.0
        # ∫ f^2 with f affine: exact trapezoid-in-f^2 via Simpson on a quadratic
        fa = f0 + b_slope * (a - t0)
        fb = f0 + b_slope * (b - t0)
        fm = 0.5 * (fa + fb)
        quad_f2 = (b - a) / 6.0 * (fa * fa + 4.0 * fm * fm + fb * fb)
        # ∫ xi^2 = scale^2 ∫ |t-c|^(-2 alpha)
        p2 = 1.0 - 2.0 * alpha
        xi2 = scale * scale * (abs(b - c) ** p2 - abs(a - c) ** p2) / p2
        if b <= c:
            xi2 = scale * scale * (abs(a - c) ** p2 - abs(b - c) ** p2) / p2
        # ∫ f * xi = sign*scale ∫ (f0 + slope (t - t0)) |t-c|^(-alpha)
        p1 = 1.0 - alpha
        if a >= c:
            i0 = ((b - c) ** p1 - (a - c) ** p1) / p1
            i1 = ((b - c) ** (p1 + 1) - (a - c) ** (p1 + 1)) / (p1 + 1)
        else:
            i0 = ((c - a) ** p1 - (c - b) ** p1) / p1
            i1 = -(((c - a) ** (p1 + 1) - (c - b) ** (p1 + 1)) / (p1 + 1))
        # t - t0 = (t - c) + (c - t0)
        cross = sign * scale * ((f0 + b_slope * (c - t0)) * i0 + b_slope * i1)
        return quad_f2 + xi2 - 2.0 * cross

    total = one_side(t0, min(t1, c), shape.left_sign)
    total += one_side(max(t0, c), t1, shape.right_sign)
    return total


def _singular_steps(target: TargetProcess, grid: TimeGrid):
    """Map step index -> singular shape for steps whose closure meets a center."""
    out = {}
    if target.kind != "deterministic":
        return out
    nodes = grid.nodes
    for seg in target.segments:
        if not isinstance(seg.shape, PowerSingularity):
            continue
        c = seg.shape.center
        for k in range(grid.n_steps):
            if nodes[k] <= c <= nodes[k + 1]:
                out[k] = seg.shape
    return out


# ---------------------------------------------------------------------------
# tracking and effort integrals


def _tracking_integral(grid: TimeGrid, f: np.ndarray, xi_right: np.ndarray,
                       xi_left: np.ndarray, singular: dict) -> np.ndarray:
    """Per-path integral of (f - xi)^2, trapezoid with one-sided target views.

    f, xi_right, xi_left are (n_paths, n_nodes). Steps listed in `singular`
    are integrated exactly against an affine interpolation of f.
    """
    h = grid.steps
    left_sq = (f[:, :-1] - xi_right[:, :-1]) ** 2
    right_sq = (f[:, 1:] - xi_left[:, 1:]) ** 2
    contrib = 0.5 * h[None, :] * (left_sq + right_sq)
    for k, shape in singular.items():
        t0, t1 = grid.nodes[k], grid.nodes[k + 1]
        exact = np.array([
            _sq_gap_singular_step(t0, t1, f[i, k], f[i, k + 1], shape)
            for i in range(f.shape[0])
        ])
        contrib[:, k] = exact
    return contrib.sum(axis=1)


def _effort_integral(grid: TimeGrid, rates: np.ndarray) -> np.ndarray:
    h = grid.steps
    sq = rates ** 2
    return 0.5 * (h[None, :] * (sq[:, :-1] + sq[:, 1:])).sum(axis=1)


def _target_node_views(target: TargetProcess, grid: TimeGrid):
    right = target.value(grid.nodes, side="right")
    left = target.value(grid.nodes, side="left")
    return right[None, :], left[None, :]


def cost_direct(params: ModelParams, strategy: StrategyPath,
                target: TargetProcess | None = None,
                target_values=None, target_values_left=None,
                keep_per_path: bool = False) -> DirectCost:
    """Realized cost of a strategy against its target.

    Pass a deterministic `target` to get one-sided views and singular steps
    handled automatically, or explicit node arrays (`target_values` for the
    right limit, `target_values_left` for the left; they differ only at jump
    nodes) for stochastic targets.
    """
    grid = strategy.grid
    singular = {}
    if target is not None:
        if target.kind != "deterministic":
            raise DomainError("pass node arrays for stochastic targets")
        xi_r, xi_l = _target_node_views(target, grid)
        singular = _singular_steps(target, grid)
    else:
        if target_values is None:
            raise DomainError("need a target or its node values")
        xi_r = np.atleast_2d(np.asarray(target_values, dtype=float))
        xi_l = (xi_r if target_values_left is None
                else np.atleast_2d(np.asarray(target_values_left, dtype=float)))
    pos = strategy.positions
    rates = strategy.rates
    if pos.ndim == 1:
        pos, rates = pos[None, :], rates[None, :]
    n_paths = max(pos.shape[0], xi_r.shape[0])
    pos_b = np.broadcast_to(pos, (n_paths, pos.shape[1]))
    rates_b = np.broadcast_to(rates, (n_paths, rates.shape[1]))
    xi_rb = np.broadcast_to(xi_r, (n_paths, xi_r.shape[1]))
    xi_lb = np.broadcast_to(xi_l, (n_paths, xi_l.shape[1]))
    tracking = 0.5 * _tracking_integral(grid, pos_b, xi_rb, xi_lb, singular)
    effort = 0.5 * params.kappa * _effort_integral(grid, rates_b)
    per_path = tracking + effort
    stderr = None
    if n_paths > 1:
        stderr = float(per_path.std(ddof=1) / math.sqrt(n_paths))
    return DirectCost(
        total=float(per_path.mean()),
        tracking_term=float(tracking.mean()),
        effort_term=float(effort.mean()),
        stderr=stderr,
        per_path=per_path if keep_per_path else None,
    )


# ---------------------------------------------------------------------------
# closed forms


def _gain(params: ModelParams, t, flavor: str):
    tau = np.asarray(scaled_time_to_maturity(params, t), dtype=float)
    if flavor == "unconstrained":
        return params.sqrt_kappa * np.tanh(tau)
    with np.errstate(divide="ignore"):
        return params.sqrt_kappa / np.tanh(tau)


def _term2_deterministic(params: ModelParams, target: TargetProcess,
                         signal: SignalPath, constraint_value: float) -> float:
    """Integral of (xi - xi_hat)^2 via per-step Gauss-Legendre panels.

    The signal is evaluated in closed form at the quadrature points; steps
    containing a singular center instead use the exact elementary integral
    against an affine interpolation of the (smooth) signal.
    """
    from .targets import _GL_W, _GL_X  # shared 16-point rule

    grid = signal.grid
    nodes = grid.nodes
    h = grid.steps
    singular = _singular_steps(target, grid)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    pts = mid[:, None] + 0.5 * h[:, None] * _GL_X[None, :]
    pts = np.minimum(pts, np.nextafter(params.horizon, 0.0))
    flat = pts.ravel()
    sig, _ = deterministic_signal_values(
        params, target, flat, signal.flavor, constraint_value=constraint_value
    )
    xi = target.value(flat, side="right")
    gap_sq = (np.asarray(xi) - np.asarray(sig)) ** 2
    per_step = (gap_sq.reshape(pts.shape) * _GL_W[None, :]).sum(axis=1) * 0.5 * h
    for k, shape in singular.items():
        per_step[k] = _sq_gap_singular_step(
            nodes[k], nodes[k + 1], signal.values[k], signal.values[k + 1], shape
        )
    return float(per_step.sum())


def cost_closed_form(params: ModelParams, signal: SignalPath,
                     target: TargetProcess | None = None,
                     target_values=None, target_values_left=None,
                     initial_position: float | None = None,
                     keep_per_path: bool = False) -> ClosedFormCost:
    """Optimal cost from the closed form, for either flavor.

    Deterministic targets integrate the target-signal gap with high-order
    quadrature and have no variation term. Stochastic ones integrate the gap
    per path (trapezoid, one-sided target views) and add the realized
    variation of the signal weighted by the relaxation gain at the left node.
    """
    grid = signal.grid
    x0 = params.initial_position if initial_position is None else float(initial_position)
    flavor = signal.flavor
    cval = signal.terminal_value if signal.terminal_value is not None else 0.0
    gain0 = float(_gain(params, 0.0, flavor))

    if signal.values.ndim == 1:
        if target is None or target.kind != "deterministic":
            raise DomainError("deterministic signals need their deterministic target")
        term1 = 0.5 * gain0 * (x0 - float(signal.values[0])) ** 2
        term2 = 0.5 * _term2_deterministic(params, target, signal, cval)
        total = term1 + term2
        return ClosedFormCost(
            total=total, initial_gap_term=term1, target_signal_term=term2,
            signal_variation_term=0.0,
        )

    if target_values is None:
        raise DomainError("stochastic signals need the target's node values")
    xi_r = np.asarray(target_values, dtype=float)
    xi_l = (xi_r if target_values_left is None
            else np.asarray(target_values_left, dtype=float))
    vals = signal.values
    term1_pp = 0.5 * gain0 * (x0 - vals[:, 0]) ** 2
    term2_pp = 0.5 * _tracking_integral(grid, vals, xi_r, xi_l, {})
    weights = np.asarray(_gain(params, grid.nodes[:-1], flavor), dtype=float)
    incr = np.diff(vals, axis=1) ** 2
    term3_pp = 0.5 * (weights[None, :] * incr).sum(axis=1)
    per_path = term1_pp + term2_pp + term3_pp
    n = per_path.size
    return ClosedFormCost(
        total=float(per_path.mean()),
        initial_gap_term=float(term1_pp.mean()),
        target_signal_term=float(term2_pp.mean()),
        signal_variation_term=float(term3_pp.mean()),
        stderr=float(per_path.std(ddof=1) / math.sqrt(n)),
        per_path=per_path if keep_per_path else None,
    )


# ---------------------------------------------------------------------------
# reachability of a terminal constraint


@dataclass(frozen=True)
class ReachabilityResult:
    """Outcome of the reachability integral for a terminal constraint.

    `value` is the integral of d E[Xi_t^2] / (T - t) when it converges; when
    it does not, `converged` is False and `value` holds the diverging partial
    sum. A finite integral is what makes the constrained cost finite.
    """

    converged: bool
    value: float
    n_blocks: int
    message: str

    def require(self) -> "ReachabilityResult":
        if not self.converged:
            raise ReachabilityError(
                "terminal constraint is not reachable at finite cost: "
                f"{self.message}"
            )
        return self


def reachability_check(params: ModelParams, constraint: TerminalConstraint,
                       atol: float = 1e-6, max_blocks: int = 40) -> ReachabilityResult:
    """Integrate d E[Xi_t^2] / (T - t) over dyadic blocks toward the deadline.

    Each block [T (1 - 2^-j), T (1 - 2^-(j+1))] is integrated by a midpoint
    Stieltjes rule with doubling until the block stabilizes; the sum converges
    when blocks decay and is declared divergent when they stop decaying or the
    partial sum explodes. Deterministic constraints are trivially reachable.
    """
    horizon = params.horizon
    if constraint.kind in ("none", "deterministic"):
        return ReachabilityResult(True, 0.0, 0, "deterministic terminal value")
    sm = constraint.second_moment
    total = 0.0
    prev_contrib = None
    first_contrib = None
    for j in range(1, max_blocks + 1):
        a = horizon * (1.0 - 2.0 ** (-(j - 1)))
        b = horizon * (1.0 - 2.0 ** (-j))
        contrib = _stieltjes_block(sm, horizon, a, b, atol * 0.25 ** j)
        total += contrib
        if first_contrib is None:
            first_contrib = max(abs(contrib), atol)
        if total > 1e6 * first_contrib:
            return ReachabilityResult(
                False, total, j, "partial sums exceed a million times the first block"
            )
        if prev_contrib is not None and contrib <= atol * 0.5 ** j:
            if prev_contrib <= atol * 0.5 ** (j - 1):
                return ReachabilityResult(
                    True, total, j, "block contributions vanished"
                )
        prev_contrib = contrib
    if prev_contrib is not None and prev_contrib <= atol:
        return ReachabilityResult(True, total, max_blocks, "tail negligible")
    return ReachabilityResult(
        False, total, max_blocks,
        "block contributions do not decay toward the deadline"
    )


def _stieltjes_block(second_moment, horizon: float, a: float, b: float,
                     tol: float) -> float:
    """Midpoint Stieltjes integral of 1/(T - t) against E[Xi_t^2] on [a, b]."""
    n = 8
    prev = None
    for _ in range(24):
        edges = np.linspace(a, b, n + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        increments = np.diff(np.asarray(second_moment(edges), dtype=float))
        est = float((increments / (horizon - mids)).sum())
        if prev is not None and abs(est - prev) <= max(tol, 1e-15):
            return est
        prev = est
        n *= 2
    return prev
