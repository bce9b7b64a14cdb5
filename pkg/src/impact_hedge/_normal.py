"""Standard normal density and distribution function.

The distribution function is computed from a rational Chebyshev approximation
to the complementary error function (the classic three-branch scheme with the
exp(-x^2) factor split at a 1/16 grid so the argument of each exponential is
exactly representable). Absolute error of `norm_cdf` is below 1e-15 and the
relative error stays near machine precision far into the lower tail, so test
values frozen against it are stable across platforms and library versions,
which is the point of not delegating to an external special-function library.

Inputs can be scalars or arrays; scalars come back as floats.
"""

from __future__ import annotations

import numpy as np

_INV_SQRT_2PI = 0.3989422804014326779399460599343818684759
_INV_SQRT_PI = 0.5641895835477562869480794515607725858441
_INV_SQRT_2 = 0.7071067811865475244008443621048490392848

# Rational coefficients for erf on |x| <= 0.46875
_A = np.array(
    [
        3.16112374387056560e00,
        1.13864154151050156e02,
        3.77485237685302021e02,
        3.20937758913846947e03,
        1.85777706184603153e-1,
    ]
)
_B = np.array(
    [
        2.36012909523441209e01,
        2.44024637934444173e02,
        1.28261652607737228e03,
        2.84423683343917062e03,
    ]
)
# Rational coefficients for erfc on 0.46875 < x <= 4
_C = np.array(
    [
        5.64188496988670089e-1,
        8.88314979438837594e00,
        6.61191906371416295e01,
        2.98635138197400131e02,
        8.81952221241769090e02,
        1.71204761263407058e03,
        2.05107837782607147e03,
        1.23033935479799725e03,
        2.15311535474403846e-8,
    ]
)
_D = np.array(
    [
        1.57449261107098347e01,
        1.17693950891312499e02,
        5.37181101862009858e02,
        1.62138957456669019e03,
        3.29079923573345963e03,
        4.36261909014324716e03,
        3.43936767414372164e03,
        1.23033935480374942e03,
    ]
)
# Rational coefficients for x erfc(x) exp(x^2) on x > 4
_P = np.array(
    [
        3.05326634961232344e-1,
        3.60344899949804439e-1,
        1.25781726111229246e-1,
        1.60837851487422766e-2,
        6.58749161529837803e-4,
        1.63153871373020978e-2,
    ]
)
_Q = np.array(
    [
        2.56852019228982242e00,
        1.87295284992346047e00,
        5.27905102951428412e-1,
        6.05183413124413191e-2,
        2.33520497626869185e-3,
    ]
)

_ERFC_UNDERFLOW = 26.6  # erfc underflows to 0 beyond this


def _erf_small(y):
    """erf on |y| <= 0.46875 (y may carry sign)."""
    z = y * y
    num = _A[4] * z
    den = z
    for i in range(3):
        num = (num + _A[i]) * z
        den = (den + _B[i]) * z
    return y * (num + _A[3]) / (den + _B[3])


def _exp_msq(y):
    """exp(-y^2) with the argument split so the leading part is exact."""
    ysq = np.floor(y * 16.0) / 16.0
    rem = (y - ysq) * (y + ysq)
    return np.exp(-ysq * ysq) * np.exp(-rem)


def _erfc_mid(y):
    """erfc on 0.46875 < y <= 4."""
    num = _C[8] * y
    den = y
    for i in range(7):
        num = (num + _C[i]) * y
        den = (den + _D[i]) * y
    return _exp_msq(y) * (num + _C[7]) / (den + _D[7])


def _erfc_tail(y):
    """erfc on y > 4."""
    z = 1.0 / (y * y)
    num = _P[5] * z
    den = z
    for i in range(4):
        num = (num + _P[i]) * z
        den = (den + _Q[i]) * z
    r = z * (num + _P[4]) / (den + _Q[4])
    return _exp_msq(y) / y * (_INV_SQRT_PI - r)


def _erfc_positive(y):
    """erfc for y >= 0, array input."""
    out = np.empty_like(y)
    small = y <= 0.46875
    mid = (~small) & (y <= 4.0)
    tail = y > 4.0
    if np.any(small):
        out[small] = 1.0 - _erf_small(y[small])
    if np.any(mid):
        out[mid] = _erfc_mid(y[mid])
    if np.any(tail):
        yt = y[tail]
        vals = np.zeros_like(yt)
        live = yt < _ERFC_UNDERFLOW
        if np.any(live):
            vals[live] = _erfc_tail(yt[live])
        out[tail] = vals
    return out


def erfc(x):
    """Complementary error function, |relative error| ~ 1e-16 on each branch."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    pos = _erfc_positive(np.abs(x))
    out = np.where(x >= 0.0, pos, 2.0 - pos)
    return float(out[0]) if scalar else out


def norm_cdf(x):
    """Standard normal distribution function, absolute error < 1e-15."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    out = 0.5 * erfc(np.atleast_1d(-x * _INV_SQRT_2))
    return float(out[0]) if scalar else out


def norm_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out
