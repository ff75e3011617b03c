"""Scalar special-function kernels (compiled with numba when available).

Every kernel returns NaN instead of raising when an iteration limit is hit;
the public wrappers in :mod:`bercap.specfun` turn that into
:class:`~bercap.exceptions.ConvergenceError`.  Domain checks also live in the
wrappers so these loops stay branch-light.
"""

from __future__ import annotations

import math

import numpy as np

from .._accel import jit

EPS = 1e-16
# Lentz factors can settle one ulp away from 1, so allow two ulps there
CF_EPS = 4.5e-16
TINY = 1e-300
MAX_ITER = 200_000
MAX_ITER_2F1 = 5_000_000
EULER_GAMMA = 0.57721566490153286061
# Crossover between the positive-term series and the asymptotic expansion of
# the Dawson function.  The asymptotic least term is ~sqrt(2)*exp(-x*x).
DAWSON_ASYMPTOTIC_X = 6.0


@jit
def ln_gamma(x):
    return math.lgamma(x)


# Above this shape the prefix uses Stirling's series; s*log(x) - lgamma(s)
# cancels badly there (absolute error ~ s * eps in the exponent).
STIRLING_SHAPE = 10.0


@jit
def _log1pmx(t):
    # log(1 + t) - t for |t| < 1/2, where the two terms cancel
    power = t
    total = 0.0
    for k in range(2, 200):
        power *= -t
        term = power / k
        total += term
        if abs(term) < abs(total) * EPS:
            break
    return total


@jit
def _stirling_error(s):
    # lgamma(s) - ((s - 1/2) log s - s + log(2 pi)/2), valid for s >= 10
    r = 1.0 / s
    r2 = r * r
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))))


@jit
def _log_gamma_prefix(s, x):
    # log(x**s * exp(-x) / Gamma(s))
    if s < STIRLING_SHAPE:
        return s * math.log(x) - x - math.lgamma(s)
    t = (x - s) / s
    if abs(t) < 0.5:
        core = s * _log1pmx(t)
    else:
        core = s * math.log(x / s) - (x - s)
    return 0.5 * math.log(s / (2.0 * math.pi)) - _stirling_error(s) + core


@jit
def _lower_series(s, x):
    """P(s, x) from sum_n x**n / (s (s+1) ... (s+n)); use for x < s + 1."""
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * EPS:
            return total * math.exp(_log_gamma_prefix(s, x))
    return np.nan


@jit
def _upper_cfrac(s, x):
    """Q(s, x) by modified Lentz on the Legendre continued fraction; x >= s + 1."""
    b = x + 1.0 - s
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h * math.exp(_log_gamma_prefix(s, x))
    return np.nan


@jit
def reg_upper_gamma(s, x):
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return 1.0 - _lower_series(s, x)
    return _upper_cfrac(s, x)


@jit
def reg_lower_gamma(s, x):
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return _lower_series(s, x)
    return 1.0 - _upper_cfrac(s, x)


@jit
def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!)
    term = 1.0
    total = 0.0
    for n in range(1, MAX_ITER):
        term *= -x / n
        contrib = term / n
        total += contrib
        if abs(contrib) < abs(total) * EPS:
            return -EULER_GAMMA - math.log(x) - total
    return np.nan


@jit
def _e1_scaled_cfrac(x):
    # exp(x) E1(x), continued fraction (Lentz), good for x > 1
    b = x + 1.0
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER):
        an = -float(i) * i
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h
    return np.nan


@jit
def exp_integral_e1_scaled(x):
    """exp(x) * E1(x); finite for every x > 0."""
    if x <= 1.0:
        return math.exp(x) * _e1_series(x)
    if math.isinf(x):
        return 0.0
    return _e1_scaled_cfrac(x)


@jit
def exp_integral_e1(x):
    if x <= 1.0:
        return _e1_series(x)
    if x > 745.0:
        return 0.0
    return _e1_scaled_cfrac(x) * math.exp(-x)


@jit
def _dawson_series(x):
    # D(x) = x exp(-x^2) sum_n x^(2n) / (n! (2n+1)), all terms positive
    z = x * x
    term = 1.0
    total = 1.0
    for n in range(1, MAX_ITER):
        term *= z / n
        contrib = term / (2 * n + 1)
        total += contrib
        if contrib < total * EPS and n > z:
            return x * math.exp(-z) * total
    return np.nan


@jit
def _dawson_asymptotic_sum(x):
    # sum_{n>=1} (2n-1)!! / (2x^2)^n, truncated at convergence or the least term
    w = 0.5 / (x * x)
    term = 1.0
    total = 0.0
    for n in range(1, MAX_ITER):
        nxt = term * (2 * n - 1) * w
        if nxt > term:
            break
        term = nxt
        total += term
        if term < (1.0 + total) * EPS:
            break
    return total


@jit
def dawson(x):
    ax = abs(x)
    if math.isinf(ax):
        return 0.0
    if ax < DAWSON_ASYMPTOTIC_X:
        val = _dawson_series(ax)
    else:
        val = (1.0 + _dawson_asymptotic_sum(ax)) / (2.0 * ax)
    return math.copysign(val, x)


@jit
def dawson_residual(x):
    """1 - 2 x D(x) without the cancellation of the naive form.

    Below the crossover: exp(-x^2) (1 - sum_{n>=1} x^(2n) / (n! (2n-1))),
    i.e. Kummer's transformation of 1F1(1; 1/2; -x^2).  Above it the
    asymptotic expansion gives -sum_{n>=1} (2n-1)!! / (2x^2)^n directly.
    """
    ax = abs(x)
    if math.isinf(ax):
        return 0.0
    if ax >= DAWSON_ASYMPTOTIC_X:
        return -_dawson_asymptotic_sum(ax)
    z = ax * ax
    if z == 0.0:
        return 1.0
    term = 1.0
    total = 0.0
    for n in range(1, MAX_ITER):
        term *= z / n
        contrib = term / (2 * n - 1)
        total += contrib
        if contrib < total * EPS and n > z:
            return math.exp(-z) * (1.0 - total)
    return np.nan


@jit
def hyp2f1_slot(b2, c, z):
    """2F1(1, b2; c; z) by direct summation, 0 <= z < 1."""
    term = 1.0
    total = 1.0
    for n in range(MAX_ITER_2F1):
        ratio = (b2 + n) / (c + n) * z
        term *= ratio
        total += term
        if abs(term) <= EPS * abs(total):
            # later ratios stay below max(|ratio|, z) once n exceeds |c|, |b2|
            r = max(abs(ratio), z)
            if r < 1.0 and n > abs(c) and n > abs(b2):
                if abs(term) * r / (1.0 - r) <= EPS * abs(total):
                    return total
            elif term == 0.0:
                return total
    return np.nan


# -- array sweeps -----------------------------------------------------------


@jit
def reg_upper_gamma_array(s, x, out):
    for i in range(out.size):
        out[i] = reg_upper_gamma(s[i], x[i])


@jit
def reg_lower_gamma_array(s, x, out):
    for i in range(out.size):
        out[i] = reg_lower_gamma(s[i], x[i])


@jit
def exp_integral_e1_array(x, out):
    for i in range(out.size):
        out[i] = exp_integral_e1(x[i])


@jit
def exp_integral_e1_scaled_array(x, out):
    for i in range(out.size):
        out[i] = exp_integral_e1_scaled(x[i])


@jit
def dawson_array(x, out):
    for i in range(out.size):
        out[i] = dawson(x[i])


@jit
def dawson_residual_array(x, out):
    for i in range(out.size):
        out[i] = dawson_residual(x[i])


@jit
def hyp2f1_slot_array(b2, c, z, out):
    for i in range(out.size):
        out[i] = hyp2f1_slot(b2[i], c[i], z[i])


@jit
def ln_gamma_array(x, out):
    for i in range(out.size):
        out[i] = math.lgamma(x[i])
