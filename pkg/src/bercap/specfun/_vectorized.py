"""Pure-numpy implementations of the special-function kernels.

Same algorithms as :mod:`bercap.specfun._scalar`, but each iteration updates
the still-unconverged subset of a flat array at once.  Inputs are flat float64
arrays already broadcast and domain-checked by the caller.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from ._scalar import CF_EPS, DAWSON_ASYMPTOTIC_X, EPS, EULER_GAMMA, MAX_ITER, MAX_ITER_2F1, STIRLING_SHAPE, TINY


def ln_gamma(x):
    return gammaln(x)


def _log1pmx(t):
    power = t.copy()
    total = np.zeros(t.shape)
    for k in range(2, 200):
        power = power * -t
        term = power / k
        total += term
        if np.all(np.abs(term) <= np.abs(total) * EPS):
            break
    return total


def _stirling_error(s):
    r = 1.0 / s
    r2 = r * r
    return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))))


def _log_gamma_prefix(s, x):
    out = np.empty(s.shape)
    small = s < STIRLING_SHAPE
    out[small] = s[small] * np.log(x[small]) - x[small] - gammaln(s[small])
    big = ~small
    if big.any():
        sb = s[big]
        xb = x[big]
        t = (xb - sb) / sb
        near = np.abs(t) < 0.5
        core = sb * np.log(xb / sb) - (xb - sb)
        core[near] = sb[near] * _log1pmx(t[near])
        out[big] = 0.5 * np.log(sb / (2.0 * np.pi)) - _stirling_error(sb) + core
    return out


def _lower_series(s, x):
    ap = s.copy()
    term = 1.0 / s
    total = term.copy()
    out = np.full(s.shape, np.nan)
    active = np.arange(s.size)
    for _ in range(MAX_ITER):
        ap[active] += 1.0
        term[active] *= x[active] / ap[active]
        total[active] += term[active]
        done = term[active] < total[active] * EPS
        if done.any():
            idx = active[done]
            out[idx] = total[idx] * np.exp(_log_gamma_prefix(s[idx], x[idx]))
            active = active[~done]
        if active.size == 0:
            break
    return out


def _upper_cfrac(s, x):
    b = x + 1.0 - s
    c = np.full(s.shape, 1.0 / TINY)
    d = 1.0 / b
    h = d.copy()
    out = np.full(s.shape, np.nan)
    active = np.arange(s.size)
    for i in range(1, MAX_ITER):
        sa = s[active]
        an = -i * (i - sa)
        b[active] += 2.0
        dd = an * d[active] + b[active]
        dd = np.where(np.abs(dd) < TINY, TINY, dd)
        cc = b[active] + an / c[active]
        cc = np.where(np.abs(cc) < TINY, TINY, cc)
        dd = 1.0 / dd
        delta = dd * cc
        d[active] = dd
        c[active] = cc
        h[active] *= delta
        done = np.abs(delta - 1.0) < CF_EPS
        if done.any():
            idx = active[done]
            out[idx] = h[idx] * np.exp(_log_gamma_prefix(s[idx], x[idx]))
            active = active[~done]
        if active.size == 0:
            break
    return out


def _incomplete_gamma(s, x, upper):
    out = np.empty(s.shape)
    zero = x == 0.0
    inf = np.isinf(x)
    out[zero] = 1.0 if upper else 0.0
    out[inf] = 0.0 if upper else 1.0
    rest = ~(zero | inf)
    use_series = rest & (x < s + 1.0)
    use_cf = rest & ~use_series
    if use_series.any():
        p = _lower_series(s[use_series], x[use_series])
        out[use_series] = 1.0 - p if upper else p
    if use_cf.any():
        q = _upper_cfrac(s[use_cf], x[use_cf])
        out[use_cf] = q if upper else 1.0 - q
    return out


def reg_upper_gamma(s, x):
    return _incomplete_gamma(s, x, upper=True)


def reg_lower_gamma(s, x):
    return _incomplete_gamma(s, x, upper=False)


def _e1_series(x):
    term = np.ones(x.shape)
    total = np.zeros(x.shape)
    out = np.full(x.shape, np.nan)
    active = np.arange(x.size)
    for n in range(1, MAX_ITER):
        term[active] *= -x[active] / n
        contrib = term[active] / n
        total[active] += contrib
        done = np.abs(contrib) < np.abs(total[active]) * EPS
        if done.any():
            idx = active[done]
            out[idx] = -EULER_GAMMA - np.log(x[idx]) - total[idx]
            active = active[~done]
        if active.size == 0:
            break
    return out


def _e1_scaled_cfrac(x):
    b = x + 1.0
    c = np.full(x.shape, 1.0 / TINY)
    d = 1.0 / b
    h = d.copy()
    out = np.full(x.shape, np.nan)
    active = np.arange(x.size)
    for i in range(1, MAX_ITER):
        an = -float(i) * i
        b[active] += 2.0
        dd = 1.0 / (an * d[active] + b[active])
        cc = b[active] + an / c[active]
        delta = cc * dd
        d[active] = dd
        c[active] = cc
        h[active] *= delta
        done = np.abs(delta - 1.0) < CF_EPS
        if done.any():
            idx = active[done]
            out[idx] = h[idx]
            active = active[~done]
        if active.size == 0:
            break
    return out


def exp_integral_e1_scaled(x):
    out = np.empty(x.shape)
    small = x <= 1.0
    inf = np.isinf(x)
    big = ~small & ~inf
    out[small] = np.exp(x[small]) * _e1_series(x[small])
    out[inf] = 0.0
    out[big] = _e1_scaled_cfrac(x[big])
    return out


def exp_integral_e1(x):
    out = np.empty(x.shape)
    small = x <= 1.0
    huge = x > 745.0
    mid = ~small & ~huge
    out[small] = _e1_series(x[small])
    out[huge] = 0.0
    out[mid] = _e1_scaled_cfrac(x[mid]) * np.exp(-x[mid])
    return out


def _dawson_series(x):
    z = x * x
    term = np.ones(x.shape)
    total = np.ones(x.shape)
    out = np.full(x.shape, np.nan)
    active = np.arange(x.size)
    for n in range(1, MAX_ITER):
        term[active] *= z[active] / n
        contrib = term[active] / (2 * n + 1)
        total[active] += contrib
        done = (contrib < total[active] * EPS) & (n > z[active])
        if done.any():
            idx = active[done]
            out[idx] = x[idx] * np.exp(-z[idx]) * total[idx]
            active = active[~done]
        if active.size == 0:
            break
    return out


def _dawson_asymptotic_sum(x):
    w = 0.5 / (x * x)
    term = np.ones(x.shape)
    total = np.zeros(x.shape)
    active = np.arange(x.size)
    for n in range(1, MAX_ITER):
        nxt = term[active] * (2 * n - 1) * w[active]
        grow = nxt > term[active]
        keep = ~grow
        idx = active[keep]
        term[idx] = nxt[keep]
        total[idx] += nxt[keep]
        conv = term[idx] < (1.0 + total[idx]) * EPS
        active = idx[~conv]
        if active.size == 0:
            break
    return total


def dawson(x):
    ax = np.abs(x)
    out = np.zeros(x.shape)
    finite = ~np.isinf(ax)
    low = finite & (ax < DAWSON_ASYMPTOTIC_X)
    high = finite & ~low
    out[low] = _dawson_series(ax[low])
    out[high] = (1.0 + _dawson_asymptotic_sum(ax[high])) / (2.0 * ax[high])
    return np.copysign(out, x)


def dawson_residual(x):
    ax = np.abs(x)
    out = np.zeros(x.shape)
    finite = ~np.isinf(ax)
    high = finite & (ax >= DAWSON_ASYMPTOTIC_X)
    out[high] = -_dawson_asymptotic_sum(ax[high])
    zero = ax == 0.0
    out[zero] = 1.0
    low = finite & ~high & ~zero
    if low.any():
        z = ax[low] ** 2
        term = np.ones(z.shape)
        total = np.zeros(z.shape)
        res = np.full(z.shape, np.nan)
        active = np.arange(z.size)
        for n in range(1, MAX_ITER):
            term[active] *= z[active] / n
            contrib = term[active] / (2 * n - 1)
            total[active] += contrib
            done = (contrib < total[active] * EPS) & (n > z[active])
            if done.any():
                idx = active[done]
                res[idx] = np.exp(-z[idx]) * (1.0 - total[idx])
                active = active[~done]
            if active.size == 0:
                break
        out[low] = res
    return out


def hyp2f1_slot(b2, c, z):
    term = np.ones(z.shape)
    total = np.ones(z.shape)
    out = np.full(z.shape, np.nan)
    active = np.arange(z.size)
    for n in range(MAX_ITER_2F1):
        ratio = (b2[active] + n) / (c[active] + n) * z[active]
        term[active] *= ratio
        total[active] += term[active]
        t = np.abs(term[active])
        tot = np.abs(total[active])
        r = np.maximum(np.abs(ratio), z[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            tail_ok = (r < 1.0) & (n > np.abs(c[active])) & (n > np.abs(b2[active])) & (t * r / (1.0 - r) <= EPS * tot)
        done = (t <= EPS * tot) & (tail_ok | (t == 0.0))
        if done.any():
            idx = active[done]
            out[idx] = total[idx]
            active = active[~done]
        if active.size == 0:
            break
    return out
