"""Adaptive quadrature helpers on top of QUADPACK (``scipy.integrate.quad``).

Integrals over (0, inf) are split at caller-supplied breakpoints (density
mean, discontinuities); the last piece goes to QUADPACK's infinite-range
rule.  Convergence is judged on the summed error estimate against the
summed value, so a piece that contributes nothing does not fail the whole
integral.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import QuadratureError

# QUADPACK refuses epsrel below max(50 eps, 5e-29)
MIN_REL_TOL = 50 * np.finfo(float).eps
# A reported error this many times above the request is treated as failure.
SLACK = 10.0


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float


def _quad_piece(f, lo, hi, rel_tol, points=None, limit=500, abs_tol=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            f,
            lo,
            hi,
            epsabs=abs_tol,
            epsrel=max(rel_tol, MIN_REL_TOL),
            limit=limit,
            points=points,
            full_output=1,
        )
    return out[0], out[1]


def _check(value, error, rel_tol, what, abs_tol=0.0):
    if not (math.isfinite(value) and math.isfinite(error)):
        raise QuadratureError(f"{what}: non-finite result", value, error)
    if error > SLACK * max(rel_tol * abs(value), abs_tol) and error > 1e-300:
        raise QuadratureError(f"{what}: tolerance {rel_tol:g} not reached", value, error)
    return QuadResult(value, error)


def integrate_interval(f, lo, hi, *, rel_tol=1e-9, abs_tol=0.0, points=None, what="integral"):
    """Integrate ``f`` over the finite interval [lo, hi].

    ``abs_tol`` (default 0) lets pieces known to be negligible stop early.
    """
    inner = None
    if points is not None:
        inner = sorted(p for p in points if lo < p < hi) or None
    value, error = _quad_piece(f, lo, hi, rel_tol, points=inner, abs_tol=abs_tol)
    return _check(value, error, rel_tol, what, abs_tol)


def integrate_half_line(f, *, breakpoints=(), rel_tol=1e-9, what="integral"):
    """Integrate ``f`` over (0, inf), splitting at the positive ``breakpoints``."""
    cuts = sorted({float(p) for p in breakpoints if 0 < p < math.inf})
    if not cuts:
        cuts = [1.0]
    edges = [0.0, *cuts]
    total = 0.0
    error = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _quad_piece(f, lo, hi, rel_tol)
        total += v
        error += e
    v, e = _quad_piece(f, edges[-1], math.inf, rel_tol)
    total += v
    error += e
    return _check(total, error, rel_tol, what)


def integrate_log_axis(f, lo, hi, *, rel_tol=1e-9, abs_tol=0.0, points=(), what="integral"):
    """Integrate ``f(u) du`` over [lo, hi] (0 < lo < hi) in the variable t = ln u.

    ``points`` are u-values where the integrand changes character; they are
    mapped to t and handed to QUADPACK as breakpoints.
    """
    t_lo, t_hi = math.log(lo), math.log(hi)

    def g(t):
        u = math.exp(t)
        return f(u) * u

    t_points = [math.log(p) for p in points if lo < p < hi]
    return integrate_interval(g, t_lo, t_hi, rel_tol=rel_tol, abs_tol=abs_tol, points=t_points or None, what=what)
