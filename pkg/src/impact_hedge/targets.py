"""Target processes, terminal constraints, and the forward-looking signals.

A target is what the frictional trader would like to hold: a deterministic
piecewise shape, the hedge ratio of the two-fixing average-price call, or a
simulated ensemble of paths. The signal is the kernel-weighted conditional
average of the target's future values; tracking it (rather than the target
itself) is what makes the optimal strategy anticipate jumps instead of
chasing them.

Deterministic signals are evaluated segment by segment: constants through the
closed-form kernel masses, polynomials through a cosh/sinh integration
recurrence, and integrable power singularities through adaptive panel
quadrature after the substitution ``v = |u - c|^(1 - exponent)`` that removes
the singular factor. A slower pointwise-quadrature route exists as a
cross-check. Signals for the average-price call come from closed formulas;
an unbiased sub-simulation estimator backs them up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .bachelier import (
    BachelierAsianSpec,
    PathEnsemble,
    asian_delta_terminal,
    delta_paths,
    simulate_paths,
)
from ._normal import norm_cdf
from .errors import AlignmentError, DomainError
from .kernels import (
    kernel_constrained,
    kernel_constrained_mass,
    kernel_unconstrained,
    kernel_unconstrained_mass,
    terminal_weight,
)
from .timegrid import ModelParams, TimeGrid

_GL_ORDER = 16
_GL_X, _GL_W = leggauss(_GL_ORDER)
_QUAD_TOL = 1e-10
_QUAD_LIMIT = 60  # max interval subdivisions of the adaptive quadrature
_GEOM_LEVELS = 40  # geometric panels graded toward a singular endpoint
_SING_CHUNK = 4096  # rows integrated per block, bounds peak memory


def _graded_points_clipped(v_lo, v_hi):
    """Composite Gauss points on [v_lo, v_hi] graded geometrically toward 0.

    Panel fractions [2^-(j+1), 2^-j] of v_hi for j < _GEOM_LEVELS plus the
    stub [0, v_hi * 2^-L], each clipped from below at v_lo.  Every panel is
    self-similar with respect to the origin, so 16 points per panel resolve
    the fractional power left by the singular substitution to roundoff, and
    the clipped rule handles rows that start strictly above 0 for free.
    """
    halves = 2.0 ** -np.arange(1, _GEOM_LEVELS + 1)
    uppers = np.concatenate([[1.0], halves])
    lowers = np.concatenate([halves, [0.0]])
    pu = np.maximum(v_hi[:, None] * uppers[None, :], v_lo[:, None])
    pl = np.maximum(v_hi[:, None] * lowers[None, :], v_lo[:, None])
    mid = 0.5 * (pu + pl)
    half = 0.5 * (pu - pl)
    pts = (mid[:, :, None] + half[:, :, None] * _GL_X).reshape(len(v_hi), -1)
    wts = (half[:, :, None] * _GL_W).reshape(len(v_hi), -1)
    return pts, wts


# ---------------------------------------------------------------------------
# shapes and segments


@dataclass(frozen=True)
class Constant:
    level: float

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, float(self.level))
        return float(out[()]) if out.ndim == 0 else out


@dataclass(frozen=True)
class PolynomialShape:
    """Value ``sum_i coefficients[i] * t**i``."""

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(float(c) for c in self.coefficients)
        )
        if len(self.coefficients) == 0:
            raise ValueError("polynomial needs at least one coefficient")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        out = Polynomial(self.coefficients)(t)
        return float(out[()]) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PowerSingularity:
    """``sign * scale * |t - center|**(-exponent)`` with side-dependent sign.

    The exponent must lie in (0, 1/2) so that the square of the target stays
    integrable. The default signs give a downward spike followed by an upward
    one, the shape used by the singular demonstration scenario.
    """

    center: float
    exponent: float = 0.25
    left_sign: float = -1.0
    right_sign: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.exponent < 0.5:
            raise ValueError("exponent must lie in (0, 1/2)")
        if self.scale <= 0.0:
            raise ValueError("scale must be > 0")
        if abs(self.left_sign) != 1.0 or abs(self.right_sign) != 1.0:
            raise ValueError("signs must be +1 or -1")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        gap = t - self.center
        with np.errstate(divide="ignore"):
            mag = self.scale * np.abs(gap) ** (-self.exponent)
        sign = np.where(gap >= 0.0, self.right_sign, self.left_sign)
        out = sign * mag
        return float(out[()]) if out.ndim == 0 else out


@dataclass(frozen=True)
class TargetSegment:
    """Half-open piece [start, stop) of a deterministic target."""

    start: float
    stop: float
    shape: object

    def __post_init__(self):
        if not (self.stop > self.start):
            raise ValueError("segment needs stop > start")
        if isinstance(self.shape, PowerSingularity):
            if not (self.start <= self.shape.center <= self.stop):
                raise ValueError("singular center must lie inside its segment")


# ---------------------------------------------------------------------------
# target process


@dataclass(frozen=True)
class TargetProcess:
    """Union of the supported target kinds.

    Use the factory constructors: `deterministic`, `from_asian`, `from_paths`.
    """

    kind: str
    segments: tuple = ()
    asian: BachelierAsianSpec | None = None
    grid: TimeGrid | None = None
    paths: np.ndarray | None = field(default=None, repr=False)
    state: np.ndarray | None = field(default=None, repr=False)
    weights: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def deterministic(cls, segments) -> "TargetProcess":
        segments = tuple(segments)
        if not segments:
            raise ValueError("need at least one segment")
        if segments[0].start != 0.0:
            raise ValueError("segments must start at t = 0")
        for left, right in zip(segments, segments[1:]):
            if left.stop != right.start:
                raise ValueError("segments must tile the horizon without gaps")
        return cls(kind="deterministic", segments=segments)

    @classmethod
    def from_asian(cls, spec: BachelierAsianSpec) -> "TargetProcess":
        return cls(kind="asian", asian=spec)

    @classmethod
    def from_paths(cls, grid: TimeGrid, paths, state=None, weights=None) -> "TargetProcess":
        paths = np.asarray(paths, dtype=float)
        if paths.ndim != 2 or paths.shape[1] != grid.nodes.size:
            raise ValueError("paths must have shape (n_paths, n_nodes)")
        if state is not None:
            state = np.asarray(state, dtype=float)
            if state.shape != paths.shape:
                raise ValueError("state must match the shape of paths")
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (paths.shape[0],) or np.any(weights < 0):
                raise ValueError("weights must be nonnegative, one per path")
        return cls(kind="ensemble", grid=grid, paths=paths, state=state, weights=weights)

    @property
    def horizon(self) -> float:
        if self.kind == "deterministic":
            return self.segments[-1].stop
        if self.kind == "asian":
            return self.asian.horizon
        return self.grid.horizon

    def required_grid_times(self):
        """Interior times every grid must contain: jumps and singular centers."""
        times = []
        if self.kind == "deterministic":
            for seg in self.segments[:-1]:
                times.append(seg.stop)
            for seg in self.segments:
                if isinstance(seg.shape, PowerSingularity):
                    c = seg.shape.center
                    if 0.0 < c < self.horizon:
                        times.append(c)
        elif self.kind == "asian":
            times.append(self.asian.first_fixing)
        return sorted(set(times))

    def _segment_at(self, t: float, side: str) -> TargetSegment:
        for seg in self.segments:
            last = seg is self.segments[-1]
            if side == "right":
                if seg.start <= t < seg.stop or (last and t == seg.stop):
                    return seg
            else:
                if seg.start < t <= seg.stop:
                    return seg
        if side == "left" and t == 0.0:
            return self.segments[0]
        raise DomainError(f"time {t} outside the target's span")

    def value(self, t, side: str = "right"):
        """Deterministic value at `t`; `side` picks the limit at a jump."""
        if self.kind != "deterministic":
            raise DomainError("pointwise values exist for deterministic targets only")
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array(
            [float(self._segment_at(ti, side).shape.value(ti)) for ti in t_arr]
        )
        return float(out[0]) if np.ndim(t) == 0 else out

    def sample_on_grid(self, grid: TimeGrid, clip_singular: bool = True) -> np.ndarray:
        """Right-limit node values of a deterministic target.

        A node sitting exactly on a singular center is clipped to the segment
        evaluated half an outgoing step away, which is what the myopic
        integrator needs to stay finite.
        """
        vals = self.value(grid.nodes, side="right")
        if clip_singular:
            for seg in self.segments:
                if isinstance(seg.shape, PowerSingularity):
                    c = seg.shape.center
                    if grid.contains_time(c):
                        i = grid.index_of(c)
                        h = grid.steps[min(i, grid.n_steps - 1)]
                        vals[i] = seg.shape.value(c + 0.5 * h)
        return vals


# ---------------------------------------------------------------------------
# terminal constraint


@dataclass(frozen=True)
class TerminalConstraint:
    """Terminal requirement on the position.

    kind "none": free terminal position. kind "deterministic": the position
    must finish at `value`. kind "martingale": the terminal value is the limit
    of a closed martingale; `second_moment` maps t to the expected square of
    the martingale at t, which is what the reachability check integrates.
    """

    kind: str
    value: float | None = None
    second_moment: Callable | None = None
    label: str = ""

    @classmethod
    def none(cls) -> "TerminalConstraint":
        return cls(kind="none")

    @classmethod
    def deterministic(cls, value: float) -> "TerminalConstraint":
        return cls(kind="deterministic", value=float(value), label=f"const {value}")

    @classmethod
    def brownian_monitor(cls, monitor_time: float, scale: float = 1.0) -> "TerminalConstraint":
        """Terminal value ``scale * W(monitor_time)`` of the driving motion."""
        if monitor_time <= 0.0:
            raise ValueError("monitor_time must be > 0")
        s2 = float(scale) ** 2
        tm = float(monitor_time)
        return cls(
            kind="martingale",
            second_moment=lambda t: s2 * np.minimum(np.asarray(t, dtype=float), tm),
            label=f"{scale} * W({monitor_time})",
        )


# ---------------------------------------------------------------------------
# signal container


@dataclass(frozen=True)
class SignalPath:
    """Signal values on a grid.

    `values` is (n_nodes,) for deterministic signals or (n_paths, n_nodes)
    for stochastic ones. For the constrained flavor the final node carries the
    terminal-constraint limit. `qv_cumulative`, when present, is the mean
    cumulative realized quadratic variation of the signal, one entry per node.
    """

    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    flavor: str
    method: str
    terminal_value: float | None = None
    qv_cumulative: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape[-1] != self.grid.nodes.size:
            raise ValueError("signal values must cover every grid node")
        if self.flavor not in ("unconstrained", "constrained"):
            raise ValueError("flavor must be 'unconstrained' or 'constrained'")
        object.__setattr__(self, "values", values)

    @property
    def n_paths(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[0]


def signal_quadratic_variation(values, weights=None) -> np.ndarray:
    """Cumulative realized quadratic variation, averaged over paths.

    1-D input is a deterministic signal and reports zero by convention; a 2-D
    array (even with a single row) reports the realized sum of squared
    increments of its rows.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return np.zeros(values.size)
    sq = np.diff(values, axis=1) ** 2
    if weights is None:
        mean_sq = sq.mean(axis=0)
    else:
        weights = np.asarray(weights, dtype=float)
        mean_sq = (weights[:, None] * sq).sum(axis=0) / weights.sum()
    out = np.empty(values.shape[1])
    out[0] = 0.0
    np.cumsum(mean_sq, out=out[1:])
    return out


# ---------------------------------------------------------------------------
# deterministic signals: closed form + quadrature


def _check_alignment(target: TargetProcess, grid: TimeGrid) -> None:
    if abs(grid.horizon - target.horizon) > 1e-12 * max(1.0, target.horizon):
        raise AlignmentError("grid horizon differs from the target's span")
    for t in target.required_grid_times():
        if not grid.contains_time(t):
            raise AlignmentError(
                f"grid is missing the target's structural time {t}"
            )


def _mass(params, kind, t, a, b):
    if kind == "unconstrained":
        return kernel_unconstrained_mass(params, t, a, b)
    return kernel_constrained_mass(params, t, a, b)


def _kernel_pointwise(params, kind, t, u):
    if kind == "unconstrained":
        return kernel_unconstrained(params, t, u)
    return kernel_constrained(params, t, u)


def _poly_piece(params, kind, t, lo, hi, coefficients):
    """Exact kernel integral of a polynomial over [lo, hi], per node.

    Substituting the rescaled maturity turns the integral into moments of
    cosh/sinh, which obey the textbook two-term recurrence.
    """
    sk = params.sqrt_kappa
    horizon = params.horizon
    q = Polynomial(list(coefficients))(Polynomial([horizon, -sk]))
    qc = q.coef
    deg = len(qc) - 1
    w_lo = np.asarray((horizon - lo) / sk, dtype=float)
    # hi is the segment's stop, one scalar shared by every node
    w_hi = np.full(w_lo.shape, (horizon - hi) / sk)

    def moments(w):
        # H[m] = int w^m cosh w dw, G[m] = int w^m sinh w dw at the point w
        H = np.empty((deg + 1,) + w.shape)
        G = np.empty((deg + 1,) + w.shape)
        H[0] = np.sinh(w)
        G[0] = np.cosh(w)
        wm = np.ones_like(w)
        for m in range(1, deg + 1):
            wm = wm * w
            H[m] = wm * np.sinh(w) - m * G[m - 1]
            G[m] = wm * np.cosh(w) - m * H[m - 1]
        return H, G

    H_lo, G_lo = moments(np.asarray(w_lo, dtype=float))
    H_hi, G_hi = moments(np.asarray(w_hi, dtype=float))
    prim_lo, prim_hi = (H_lo, H_hi) if kind == "unconstrained" else (G_lo, G_hi)
    total = np.tensordot(qc, prim_lo - prim_hi, axes=(0, 0))
    tau_t = (horizon - np.asarray(t, dtype=float)) / sk
    if kind == "unconstrained":
        return total / np.sinh(tau_t)
    return total / (2.0 * np.sinh(0.5 * tau_t) ** 2)


def _singular_piece(params, kind, t, lo, hi, shape: PowerSingularity):
    """Kernel integral of a power singularity over [lo, hi], per node.

    `lo` varies per node (an array); the singular factor is removed by the
    substitution ``v = |u - center|**(1 - exponent)`` on each side of the
    center, then the v-integral is taken on Gauss-Legendre panels graded
    geometrically toward v = 0, a fixed rule accurate to roundoff.
    """
    t = np.asarray(t, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), t.shape)
    c = shape.center
    beta = 1.0 - shape.exponent
    total = np.zeros(t.shape)

    def one_side(v_lo, v_hi, sign, orientation):
        # integral over v in [v_lo, v_hi] of sign*scale*K(t, u(v))/beta dv
        # u(v) = c + orientation * v**(1/beta)
        v_lo = np.broadcast_to(np.asarray(v_lo, dtype=float), t.shape)
        v_hi = np.broadcast_to(np.asarray(v_hi, dtype=float), t.shape)
        live = np.nonzero(v_hi > v_lo)[0]
        out = np.zeros(t.shape)
        for start in range(0, live.size, _SING_CHUNK):
            rows = live[start:start + _SING_CHUNK]
            tl = t[rows]
            v, wts = _graded_points_clipped(v_lo[rows], v_hi[rows])
            u = c + orientation * v ** (1.0 / beta)
            # the substitution can round u a hair outside [t, horizon]
            u = np.clip(u, tl[:, None], params.horizon)
            kern = _kernel_pointwise(
                params, kind, np.broadcast_to(tl[:, None], u.shape), u
            )
            out[rows] = (kern * wts).sum(axis=1) * (sign * shape.scale / beta)
        return out

    # left of the center: u in [max(lo, seg start), min(hi, c)]
    left_hi = np.minimum(hi, c)
    left_lo = np.minimum(lo, left_hi)
    v_hi_l = np.maximum(c - left_lo, 0.0) ** beta
    v_lo_l = np.maximum(c - left_hi, 0.0) ** beta
    total += one_side(v_lo_l, v_hi_l, shape.left_sign, -1.0)
    # right of the center: u in [max(lo, c), hi]
    right_lo = np.maximum(lo, c)
    v_lo_r = np.maximum(right_lo - c, 0.0) ** beta
    v_hi_r = np.full(t.shape, max(hi - c, 0.0) ** beta)
    v_hi_r = np.maximum(v_hi_r, v_lo_r)
    total += one_side(v_lo_r, v_hi_r, shape.right_sign, 1.0)
    return total


def deterministic_signal_values(params: ModelParams, target: TargetProcess,
                                times, flavor: str = "unconstrained",
                                constraint_value: float = 0.0,
                                method: str = "closed_form"):
    """Signal of a deterministic target at arbitrary times strictly before T.

    The closed-form route integrates constants and polynomials exactly and
    falls back to the substitution quadrature on singular segments; the
    quadrature route integrates every segment pointwise (cross-check only).
    """
    if target.kind != "deterministic":
        raise DomainError("deterministic targets only")
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(t >= params.horizon):
        raise DomainError("signal values are defined strictly before the horizon")
    kind = flavor
    out = np.zeros(t.shape)
    used_quadrature = False
    for seg in target.segments:
        hi = seg.stop
        sees = t < hi
        if not np.any(sees):
            continue
        lo = np.maximum(t, seg.start)
        if method == "quadrature":
            used_quadrature = True
            vals = np.zeros(t.shape)
            for i in np.nonzero(sees)[0]:
                vals[i] = _pointwise_quad(params, kind, float(t[i]),
                                          float(lo[i]), hi, seg.shape)
            out += np.where(sees, vals, 0.0)
            continue
        if isinstance(seg.shape, Constant):
            mass = np.zeros(t.shape)
            mass[sees] = _mass(params, kind, t[sees], lo[sees], hi)
            out += seg.shape.level * mass
        elif isinstance(seg.shape, PolynomialShape):
            vals = np.zeros(t.shape)
            vals[sees] = _poly_piece(params, kind, t[sees], lo[sees], hi,
                                     seg.shape.coefficients)
            out += vals
        elif isinstance(seg.shape, PowerSingularity):
            used_quadrature = True
            vals = np.zeros(t.shape)
            vals[sees] = _singular_piece(params, kind, t[sees], lo[sees], hi,
                                         seg.shape)
            out += vals
        else:
            raise DomainError(f"unsupported shape {type(seg.shape).__name__}")
    if flavor == "constrained":
        w = np.asarray(terminal_weight(params, t), dtype=float)
        out = w * constraint_value + (1.0 - w) * out
    scalar = np.ndim(times) == 0
    return (float(out[0]) if scalar else out), used_quadrature


def _pointwise_quad(params, kind, t, lo, hi, shape):
    """Adaptive pointwise quadrature of shape * kernel over [lo, hi]."""
    if lo >= hi:
        return 0.0
    if isinstance(shape, PowerSingularity):
        c = shape.center
        beta = 1.0 - shape.exponent
        total = 0.0
        if lo < c:
            b = min(hi, c)

            def f_left(v):
                u = c - v ** (1.0 / beta)
                return _kernel_pointwise(params, kind, t, min(u, params.horizon))

            total += shape.left_sign * shape.scale / beta * integrate.quad(
                f_left, (c - b) ** beta, (c - lo) ** beta,
                epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=_QUAD_LIMIT,
            )[0]
        if hi > c:
            a = max(lo, c)

            def f_right(v):
                u = c + v ** (1.0 / beta)
                return _kernel_pointwise(params, kind, t, min(u, params.horizon))

            total += shape.right_sign * shape.scale / beta * integrate.quad(
                f_right, (a - c) ** beta, (hi - c) ** beta,
                epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=_QUAD_LIMIT,
            )[0]
        return total

    def f(u):
        return shape.value(u) * _kernel_pointwise(
            params, kind, t, min(u, params.horizon)
        )

    return integrate.quad(
        f, lo, hi, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=_QUAD_LIMIT
    )[0]


def signal_unconstrained(params: ModelParams, target: TargetProcess,
                         grid: TimeGrid, method: str = "closed_form") -> SignalPath:
    """Signal path of a deterministic or ensemble target, free terminal position.

    Deterministic targets use the closed-form route by default; ensemble
    targets go through `signal_from_paths` (Monte Carlo regression). The
    average-price call has its own closed-form and sub-simulation routines.
    """
    if target.kind == "ensemble":
        return signal_from_paths(params, target, flavor="unconstrained")
    if target.kind != "deterministic":
        raise DomainError(
            "use asian_signal_paths / asian_signal_mc for the average-price target"
        )
    _check_alignment(target, grid)
    body, quad = deterministic_signal_values(
        params, target, grid.nodes[:-1], "unconstrained", method=method
    )
    values = np.empty(grid.nodes.size)
    values[:-1] = body
    values[-1] = target.value(grid.horizon, side="left")
    return SignalPath(
        grid=grid,
        values=values,
        flavor="unconstrained",
        method="quadrature" if (quad or method == "quadrature") else "closed_form",
    )


def signal_constrained(params: ModelParams, target: TargetProcess,
                       constraint: TerminalConstraint, grid: TimeGrid,
                       method: str = "closed_form") -> SignalPath:
    """Signal path with the terminal position pinned to a deterministic value."""
    if constraint.kind != "deterministic":
        if constraint.kind == "none":
            raise DomainError("constrained signal needs a terminal constraint")
        raise DomainError(
            "closed-form constrained signals support deterministic terminal values"
        )
    if target.kind == "ensemble":
        return signal_from_paths(params, target, flavor="constrained",
                                 constraint=constraint)
    if target.kind != "deterministic":
        raise DomainError(
            "use asian_signal_paths for the average-price target"
        )
    _check_alignment(target, grid)
    body, quad = deterministic_signal_values(
        params, target, grid.nodes[:-1], "constrained",
        constraint_value=constraint.value, method=method,
    )
    values = np.empty(grid.nodes.size)
    values[:-1] = body
    values[-1] = constraint.value
    return SignalPath(
        grid=grid,
        values=values,
        flavor="constrained",
        method="quadrature" if (quad or method == "quadrature") else "closed_form",
        terminal_value=constraint.value,
    )


# ---------------------------------------------------------------------------
# signals for the average-price call


def _fixing_probability(spec: BachelierAsianSpec, t, s):
    """P(average finishes above the strike | S_t = s), for t < T/2."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    sd = spec.sigma * np.sqrt(2.5 * spec.horizon - 4.0 * t) * 0.5
    return norm_cdf((s - spec.strike) / sd)


def asian_signal(params: ModelParams, spec: BachelierAsianSpec, t, s,
                 s_half=None, flavor: str = "unconstrained",
                 constraint_value: float = 0.0):
    """Closed-form signal of the average-price call's hedge ratio at one state.

    Before the first fixing the signal multiplies the probability of finishing
    in the money by a deterministic kernel factor that discounts the frozen
    half of the averaging weight; from the first fixing on the unconstrained
    signal coincides with the hedge ratio itself (as of the node's right
    limit), and the constrained one blends it with the terminal value.
    """
    if abs(spec.horizon - params.horizon) > 1e-12 * max(1.0, params.horizon):
        raise DomainError("claim maturity must equal the model horizon")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t >= params.horizon):
        raise DomainError("signal is defined on [0, horizon)")
    s = np.asarray(s, dtype=float)
    t_b, s_b = np.broadcast_arrays(t, s)
    out = np.empty(t_b.shape)
    half = spec.first_fixing
    early = t_b < half
    late = ~early
    if np.any(early):
        p = _fixing_probability(spec, t_b[early], s_b[early])
        if flavor == "unconstrained":
            tail = kernel_unconstrained_mass(params, t_b[early], half, spec.horizon)
            out[early] = p * (1.0 - 0.5 * np.asarray(tail))
        else:
            w = np.asarray(terminal_weight(params, t_b[early]))
            tail = kernel_constrained_mass(params, t_b[early], half, spec.horizon)
            out[early] = w * constraint_value + (1.0 - w) * p * (
                1.0 - 0.5 * np.asarray(tail)
            )
    if np.any(late):
        if s_half is None:
            raise DomainError("state at the first fixing is required for t >= T/2")
        sh = np.broadcast_to(np.asarray(s_half, dtype=float), t_b.shape)[late]
        d = (sh + s_b[late] - 2.0 * spec.strike) / (
            spec.sigma * np.sqrt(spec.horizon - t_b[late])
        )
        delta = 0.5 * norm_cdf(d)
        if flavor == "unconstrained":
            out[late] = delta
        else:
            w = np.asarray(terminal_weight(params, t_b[late]))
            out[late] = w * constraint_value + (1.0 - w) * delta
    return float(out[()]) if out.ndim == 0 else out


def asian_signal_paths(params: ModelParams, spec: BachelierAsianSpec,
                       ensemble: PathEnsemble, flavor: str = "unconstrained",
                       constraint_value: float = 0.0) -> SignalPath:
    """Closed-form signal along each simulated underlying path."""
    nodes = ensemble.grid.nodes
    s = ensemble.values
    i_half = ensemble.grid.index_of(spec.first_fixing)
    values = np.empty_like(s)
    body = nodes[:-1]
    values[:, :-1] = asian_signal(
        params, spec, body[None, :], s[:, :-1],
        s_half=s[:, i_half][:, None], flavor=flavor,
        constraint_value=constraint_value,
    )
    if flavor == "unconstrained":
        values[:, -1] = asian_delta_terminal(spec, s[:, i_half], s[:, -1])
    else:
        values[:, -1] = constraint_value
    qv = signal_quadratic_variation(values)
    return SignalPath(
        grid=ensemble.grid, values=values, flavor=flavor, method="closed_form",
        terminal_value=constraint_value if flavor == "constrained" else None,
        qv_cumulative=qv,
    )


def asian_signal_mc(params: ModelParams, spec: BachelierAsianSpec,
                    grid: TimeGrid, t: float, s: float, n_paths: int,
                    seed: int, flavor: str = "unconstrained",
                    constraint_value: float = 0.0, s_half=None,
                    path_offset: int = 0):
    """Sub-simulation estimate of the signal at state (t, s).

    Freezes each path's hedge ratio at the left node of every remaining step
    and weighs it with the exact kernel mass of the step. Because the hedge
    ratio is a martingale between fixings, the estimator is unbiased for the
    closed-form signal at any step size. Returns (estimate, standard error).
    """
    i0 = grid.index_of(t)
    if grid.nodes[i0] >= grid.horizon:
        raise DomainError("sub-simulation needs t strictly before the horizon")
    sub_nodes = grid.nodes[i0:] - grid.nodes[i0]
    sub = simulate_paths(
        spec, TimeGrid(nodes=sub_nodes), n_paths, seed,
        start_time=grid.nodes[i0], start_value=s, path_offset=path_offset,
    )
    nodes = sub.grid.nodes
    half = spec.first_fixing
    if nodes[0] < half:
        deltas = delta_paths(spec, sub, side="right")
    else:
        if s_half is None:
            raise DomainError("state at the first fixing is required for t >= T/2")
        live = nodes < spec.horizon
        deltas = np.empty_like(sub.values)
        d = (s_half + sub.values[:, live] - 2.0 * spec.strike) / (
            spec.sigma * np.sqrt(spec.horizon - nodes[live])
        )
        deltas[:, live] = 0.5 * norm_cdf(d)
        deltas[:, -1] = asian_delta_terminal(spec, s_half, sub.values[:, -1])
    kind = flavor
    mass = _mass(params, kind, np.full(nodes.size - 1, nodes[0]),
                 nodes[:-1], nodes[1:])
    per_path = deltas[:, :-1] @ np.asarray(mass)
    if flavor == "constrained":
        w = terminal_weight(params, nodes[0])
        per_path = w * constraint_value + (1.0 - w) * per_path
    est = float(per_path.mean())
    stderr = float(per_path.std(ddof=1) / math.sqrt(n_paths))
    return est, stderr


# ---------------------------------------------------------------------------
# generic ensemble route: polynomial regression on a Markov state


def signal_from_paths(params: ModelParams, target: TargetProcess,
                      flavor: str = "unconstrained",
                      constraint: TerminalConstraint | None = None,
                      degree: int = 3) -> SignalPath:
    """Monte Carlo signal for an ensemble target, node by node.

    The conditional expectation of the kernel-weighted forward integral is
    estimated by regressing its pathwise value on a polynomial (degree <= 3)
    in the supplied Markov state. Accuracy is limited by how well that basis
    spans the true conditional expectation; prefer the closed forms when they
    exist.
    """
    if target.kind != "ensemble":
        raise DomainError("signal_from_paths needs an ensemble target")
    if target.state is None:
        raise DomainError(
            "ensemble route needs the Markov state the target depends on"
        )
    if degree > 3:
        raise ValueError("regression basis is capped at degree 3")
    cval = 0.0
    if flavor == "constrained":
        if constraint is None or constraint.kind != "deterministic":
            raise DomainError(
                "ensemble constrained signals support deterministic terminal values"
            )
        cval = constraint.value
    grid = target.grid
    nodes = grid.nodes
    xi = target.paths
    n_nodes = nodes.size
    values = np.empty_like(xi)
    kind = flavor
    for k in range(n_nodes - 1):
        mass = np.asarray(
            _mass(params, kind, np.full(n_nodes - 1 - k, nodes[k]),
                  nodes[k:-1], nodes[k + 1:])
        )
        y = xi[:, k:-1] @ mass
        if flavor == "constrained":
            w = terminal_weight(params, nodes[k])
            y = w * cval + (1.0 - w) * y
        z = target.state[:, k]
        spread = z.std()
        if spread < 1e-14:
            values[:, k] = y.mean()
            continue
        zs = (z - z.mean()) / spread
        basis = np.vander(zs, degree + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        # the polynomial extrapolates badly in the state's tails; a
        # conditional mean can never leave the response's range
        values[:, k] = np.clip(basis @ coef, y.min(), y.max())
    values[:, -1] = cval if flavor == "constrained" else xi[:, -1]
    return SignalPath(
        grid=grid, values=values, flavor=flavor, method="monte_carlo",
        terminal_value=cval if flavor == "constrained" else None,
        qv_cumulative=signal_quadratic_variation(values, target.weights),
    )


# ---------------------------------------------------------------------------
# JSON schema


def shape_to_json(shape) -> dict:
    if isinstance(shape, Constant):
        return {"constant": shape.level}
    if isinstance(shape, PolynomialShape):
        return {"polynomial": list(shape.coefficients)}
    if isinstance(shape, PowerSingularity):
        return {
            "power_singularity": {
                "center": shape.center,
                "exponent": shape.exponent,
                "left_sign": shape.left_sign,
                "right_sign": shape.right_sign,
                "scale": shape.scale,
            }
        }
    raise ValueError(f"unsupported shape {type(shape).__name__}")


def shape_from_json(obj: dict):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"shape must be a single-key object, got {obj!r}")
    (key, val), = obj.items()
    if key == "constant":
        return Constant(level=float(val))
    if key == "polynomial":
        return PolynomialShape(coefficients=tuple(float(c) for c in val))
    if key == "power_singularity":
        return PowerSingularity(
            center=float(val["center"]),
            exponent=float(val.get("exponent", 0.25)),
            left_sign=float(val.get("left_sign", -1.0)),
            right_sign=float(val.get("right_sign", 1.0)),
            scale=float(val.get("scale", 1.0)),
        )
    raise ValueError(f"unknown shape kind {key!r}")


def target_to_json(target: TargetProcess) -> dict:
    if target.kind == "deterministic":
        return {
            "segments": [
                {"from": seg.start, "to": seg.stop, "shape": shape_to_json(seg.shape)}
                for seg in target.segments
            ]
        }
    if target.kind == "asian":
        a = target.asian
        return {"asian": {"sigma": a.sigma, "strike": a.strike, "s0": a.s0}}
    raise ValueError("only deterministic and asian targets serialize to JSON")


def target_from_json(obj: dict, horizon: float) -> TargetProcess:
    if "segments" in obj:
        segments = [
            TargetSegment(
                start=float(seg["from"]),
                stop=float(seg["to"]),
                shape=shape_from_json(seg["shape"]),
            )
            for seg in obj["segments"]
        ]
        target = TargetProcess.deterministic(segments)
        if abs(target.horizon - horizon) > 1e-12 * max(1.0, horizon):
            raise ValueError("segments do not span the model horizon")
        return target
    if "asian" in obj:
        a = obj["asian"]
        return TargetProcess.from_asian(
            BachelierAsianSpec(
                sigma=float(a["sigma"]), strike=float(a["strike"]),
                s0=float(a["s0"]), horizon=horizon,
            )
        )
    raise ValueError("target must declare either 'segments' or 'asian'")
