"""Rescaled time-to-maturity and the two forward-looking averaging kernels.

Everything in the closed-form solution is driven by the rescaled time to
maturity ``(T - t) / sqrt(kappa)``. The unconstrained problem averages the
future target with a cosh-shaped kernel whose interval mass telescopes to a
sinh ratio; the terminally constrained problem uses a sinh-shaped kernel whose
mass telescopes to a cosh ratio. Interval masses therefore never need
pointwise quadrature.

For small impact parameters the rescaled horizon is large and naive cosh/sinh
ratios overflow, so every ratio here switches to log space once the rescaled
argument exceeds ``_LOG_SWITCH``. Differences of hyperbolic functions are
evaluated in product form (``sinh a - sinh b = 2 cosh((a+b)/2) sinh((a-b)/2)``
and the cosh analogue) to avoid cancellation for nearby arguments.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, SingularityError
from .timegrid import ModelParams

_LN2 = float(np.log(2.0))
_LOG_SWITCH = 30.0


def _as_array(x):
    return np.asarray(x, dtype=float)


def _log_sinh(z):
    """log(sinh(z)) for z > 0, stable for large z."""
    z = _as_array(z)
    small = np.minimum(z, _LOG_SWITCH)
    with np.errstate(divide="ignore"):
        direct = np.log(np.sinh(small))
    tail = z - _LN2 + np.log1p(-np.exp(-2.0 * np.minimum(z, 350.0)))
    return np.where(z <= _LOG_SWITCH, direct, tail)


def _log_cosh(z):
    """log(cosh(z)), stable for large z."""
    z = _as_array(z)
    small = np.minimum(z, _LOG_SWITCH)
    direct = np.log(np.cosh(small))
    tail = z - _LN2 + np.log1p(np.exp(-2.0 * np.minimum(z, 350.0)))
    return np.where(z <= _LOG_SWITCH, direct, tail)


def _check_time(params: ModelParams, t, allow_horizon: bool = True):
    t = _as_array(t)
    upper_ok = t <= params.horizon if allow_horizon else t < params.horizon
    if np.any(t < 0.0) or not np.all(upper_ok):
        raise DomainError(
            f"time must lie in [0, {params.horizon}"
            + ("]" if allow_horizon else ")")
            + f", got {t}"
        )
    return t


def scaled_time_to_maturity(params: ModelParams, t):
    """Rescaled time to maturity ``(T - t) / sqrt(kappa)``.

    Accepts scalars or arrays; times outside [0, T] raise DomainError.
    """
    t = _check_time(params, t)
    out = (params.horizon - t) / params.sqrt_kappa
    return out if out.ndim else float(out)


def trading_rate_unconstrained(params: ModelParams, t):
    """Relaxation speed ``tanh(scaled time left) / sqrt(kappa)`` toward the signal.

    Vanishes at maturity: with no terminal constraint it never pays to trade
    in the last instant.
    """
    tau = _as_array(scaled_time_to_maturity(params, t))
    out = np.tanh(tau) / params.sqrt_kappa
    return out if out.ndim else float(out)


def trading_rate_constrained(params: ModelParams, t, eps_t: float | None = None):
    """Relaxation speed ``coth(scaled time left) / sqrt(kappa)``.

    Diverges at maturity, which is what forces the terminal position onto the
    constraint. Evaluation within ``eps_t`` of the horizon (default
    ``T * 1e-9``) raises SingularityError; integrators must use the exact step
    rule there, never this raw rate.
    """
    if eps_t is None:
        eps_t = params.horizon * 1e-9
    t = _check_time(params, t)
    if np.any(params.horizon - t <= eps_t):
        raise SingularityError(
            f"constrained rate is singular within {eps_t} of the horizon"
        )
    tau = (params.horizon - t) / params.sqrt_kappa
    out = 1.0 / (np.tanh(tau) * params.sqrt_kappa)
    return out if out.ndim else float(out)


def terminal_weight(params: ModelParams, t):
    """Weight ``1 / cosh(scaled time left)`` put on the terminal target.

    The constrained signal is a convex combination of the terminal constraint
    and a kernel average of the running target; this is the terminal side.
    Increases from ``1/cosh(T/sqrt(kappa))`` at t = 0 to 1 at maturity.
    """
    tau = _as_array(scaled_time_to_maturity(params, t))
    small = 1.0 / np.cosh(np.minimum(tau, _LOG_SWITCH))
    e = np.exp(-np.minimum(tau, 350.0))
    tail = 2.0 * e / (1.0 + e * e)
    out = np.where(tau <= _LOG_SWITCH, small, tail)
    return out if out.ndim else float(out)


def _check_interval(params: ModelParams, t, a, b):
    t = _as_array(t)
    a = _as_array(a)
    b = _as_array(b)
    if np.any(t >= params.horizon):
        raise SingularityError("kernel is defined for t < horizon only")
    _check_time(params, t)
    _check_time(params, a)
    _check_time(params, b)
    if np.any(a < t) or np.any(b < a):
        raise DomainError("need t <= a <= b <= horizon")
    return t, a, b


def kernel_unconstrained(params: ModelParams, t, u):
    """Density ``cosh(tau(u)) / (sqrt(kappa) sinh(tau(t)))`` of the averaging kernel.

    Defined for t <= u <= T, t < T. Integrates to one over [t, T].
    """
    t, u, _ = _check_interval(params, t, u, u)
    tau_t = (params.horizon - t) / params.sqrt_kappa
    tau_u = (params.horizon - u) / params.sqrt_kappa
    big = np.maximum(tau_t, tau_u) > _LOG_SWITCH
    if np.any(big):
        out = np.exp(_log_cosh(tau_u) - _log_sinh(tau_t)) / params.sqrt_kappa
    else:
        out = np.cosh(tau_u) / (np.sinh(tau_t) * params.sqrt_kappa)
    out = _as_array(out)
    return out if out.ndim else float(out)


def kernel_constrained(params: ModelParams, t, u):
    """Density ``sinh(tau(u)) / (sqrt(kappa) (cosh(tau(t)) - 1))``.

    Defined for t <= u <= T, t < T. Integrates to one over [t, T].
    """
    t, u, _ = _check_interval(params, t, u, u)
    tau_t = (params.horizon - t) / params.sqrt_kappa
    tau_u = (params.horizon - u) / params.sqrt_kappa
    big = np.maximum(tau_t, tau_u) > _LOG_SWITCH
    if np.any(big):
        out = np.exp(
            _log_sinh(tau_u) - _LN2 - 2.0 * _log_sinh(0.5 * tau_t)
        ) / params.sqrt_kappa
        out = np.where(tau_u > 0.0, out, 0.0)
    else:
        # cosh(x) - 1 = 2 sinh(x/2)^2 avoids cancellation near maturity
        out = np.sinh(tau_u) / (
            2.0 * np.sinh(0.5 * tau_t) ** 2 * params.sqrt_kappa
        )
    out = _as_array(out)
    return out if out.ndim else float(out)


def kernel_unconstrained_mass(params: ModelParams, t, a, b):
    """Mass of the unconstrained kernel on [a, b] as seen from t.

    Equals ``(sinh(tau(a)) - sinh(tau(b))) / sinh(tau(t))``, evaluated in
    product form and, for large rescaled arguments, in log space. The result
    lies in [0, 1]; the mass of [t, T] is 1 up to rounding.
    """
    t, a, b = _check_interval(params, t, a, b)
    tau_t = (params.horizon - t) / params.sqrt_kappa
    tau_a = (params.horizon - a) / params.sqrt_kappa
    tau_b = (params.horizon - b) / params.sqrt_kappa
    s = 0.5 * (tau_a + tau_b)
    d = 0.5 * (tau_a - tau_b)
    if np.any(np.maximum(tau_t, s) > _LOG_SWITCH):
        with np.errstate(divide="ignore"):
            log_num = _LN2 + _log_cosh(s) + _log_sinh(np.maximum(d, 0.0))
        out = np.where(d > 0.0, np.exp(log_num - _log_sinh(tau_t)), 0.0)
    else:
        out = 2.0 * np.cosh(s) * np.sinh(d) / np.sinh(tau_t)
    out = _as_array(out)
    return out if out.ndim else float(out)


def kernel_constrained_mass(params: ModelParams, t, a, b):
    """Mass of the constrained kernel on [a, b] as seen from t.

    Equals ``(cosh(tau(a)) - cosh(tau(b))) / (cosh(tau(t)) - 1)`` evaluated as
    ``sinh((tau_a+tau_b)/2) sinh((tau_a-tau_b)/2) / sinh(tau_t/2)^2``.
    """
    t, a, b = _check_interval(params, t, a, b)
    tau_t = (params.horizon - t) / params.sqrt_kappa
    tau_a = (params.horizon - a) / params.sqrt_kappa
    tau_b = (params.horizon - b) / params.sqrt_kappa
    s = 0.5 * (tau_a + tau_b)
    d = 0.5 * (tau_a - tau_b)
    if np.any(np.maximum(tau_t, s) > _LOG_SWITCH):
        with np.errstate(divide="ignore"):
            log_num = _log_sinh(np.maximum(s, 0.0)) + _log_sinh(np.maximum(d, 0.0))
        out = np.where(
            (d > 0.0) & (s > 0.0),
            np.exp(log_num - 2.0 * _log_sinh(0.5 * tau_t)),
            0.0,
        )
    else:
        out = np.sinh(s) * np.sinh(d) / np.sinh(0.5 * tau_t) ** 2
    out = _as_array(out)
    return out if out.ndim else float(out)


def position_decay_unconstrained(params: ModelParams, t_from, t_to):
    """Exact one-step decay factor ``cosh(tau(t_to)) / cosh(tau(t_from))``.

    This is the integrating factor of the unconstrained tracking dynamics over
    [t_from, t_to]; it lies in (0, 1] for t_from <= t_to.
    """
    tau_1 = _as_array(scaled_time_to_maturity(params, t_from))
    tau_2 = _as_array(scaled_time_to_maturity(params, t_to))
    if np.any(tau_2 > tau_1):
        raise DomainError("need t_from <= t_to")
    if np.any(tau_1 > _LOG_SWITCH):
        out = np.exp(_log_cosh(tau_2) - _log_cosh(tau_1))
    else:
        out = np.cosh(tau_2) / np.cosh(tau_1)
    out = _as_array(out)
    return out if out.ndim else float(out)


def position_decay_constrained(params: ModelParams, t_from, t_to):
    """Exact one-step decay factor ``sinh(tau(t_to)) / sinh(tau(t_from))``.

    Vanishes when t_to reaches the horizon, which is how the constrained
    integrator lands exactly on the terminal value.
    """
    tau_1 = _as_array(scaled_time_to_maturity(params, t_from))
    tau_2 = _as_array(scaled_time_to_maturity(params, t_to))
    if np.any(tau_2 > tau_1):
        raise DomainError("need t_from <= t_to")
    if np.any(tau_1 <= 0.0):
        raise SingularityError("t_from must be strictly before the horizon")
    if np.any(tau_1 > _LOG_SWITCH):
        with np.errstate(divide="ignore"):
            out = np.where(
                tau_2 > 0.0, np.exp(_log_sinh(np.maximum(tau_2, 0.0)) - _log_sinh(tau_1)), 0.0
            )
    else:
        out = np.sinh(tau_2) / np.sinh(tau_1)
    out = _as_array(out)
    return out if out.ndim else float(out)
