"""Special functions used by the BER and capacity formulas.

All functions accept scalars or array-likes (broadcast numpy-style) and return
a Python ``float`` for scalar input, an ``ndarray`` otherwise.  Hot loops run
in numba-compiled kernels unless ``BERCAP_DISABLE_NUMBA`` is set, in which
case vectorized numpy code is used for arrays and the uncompiled scalar
kernels for scalars.
"""

from __future__ import annotations

import numpy as np

from .. import _accel
from ..exceptions import ConvergenceError, DomainError
from . import _scalar, _vectorized

__all__ = [
    "ln_gamma",
    "reg_upper_gamma",
    "reg_lower_gamma",
    "exp_integral_e1",
    "exp_integral_e1_scaled",
    "dawson",
    "dawson_residual",
    "gauss_2f1_slot",
]

# name -> (scalar kernel, numba array sweep, numpy vectorized)
_KERNELS = {
    "ln_gamma": (_scalar.ln_gamma, _scalar.ln_gamma_array, _vectorized.ln_gamma),
    "reg_upper_gamma": (_scalar.reg_upper_gamma, _scalar.reg_upper_gamma_array, _vectorized.reg_upper_gamma),
    "reg_lower_gamma": (_scalar.reg_lower_gamma, _scalar.reg_lower_gamma_array, _vectorized.reg_lower_gamma),
    "exp_integral_e1": (_scalar.exp_integral_e1, _scalar.exp_integral_e1_array, _vectorized.exp_integral_e1),
    "exp_integral_e1_scaled": (
        _scalar.exp_integral_e1_scaled,
        _scalar.exp_integral_e1_scaled_array,
        _vectorized.exp_integral_e1_scaled,
    ),
    "dawson": (_scalar.dawson, _scalar.dawson_array, _vectorized.dawson),
    "dawson_residual": (_scalar.dawson_residual, _scalar.dawson_residual_array, _vectorized.dawson_residual),
    "gauss_2f1_slot": (_scalar.hyp2f1_slot, _scalar.hyp2f1_slot_array, _vectorized.hyp2f1_slot),
}


_PLAIN = (float, int)


def _plain(*args):
    return all(type(a) in _PLAIN for a in args)


def _scalar_fn(name, backend):
    use_numba = _accel.USE_NUMBA if backend is None else backend == "numba"
    fn = _KERNELS[name][0]
    return fn if use_numba else _accel.py_func(fn)


def _call_scalar(name, args, backend):
    value = _scalar_fn(name, backend)(*args)
    if value != value and not any(a != a for a in args):
        raise ConvergenceError(f"{name}{tuple(args)} did not converge")
    return value


def _evaluate(name, *args, backend=None):
    _, sweep, vectorized = _KERNELS[name]
    use_numba = _accel.USE_NUMBA if backend is None else backend == "numba"
    if all(np.ndim(a) == 0 for a in args):
        return float(_call_scalar(name, tuple(float(a) for a in args), backend))

    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in args))
    shape = arrays[0].shape
    # broadcast views are read-only; the compiled sweeps want owned contiguous buffers
    flat = [np.array(a, dtype=np.float64).ravel() for a in arrays]
    if use_numba:
        out = np.empty(flat[0].size)
        sweep(*flat, out)
    else:
        out = np.asarray(vectorized(*flat), dtype=np.float64)
    bad = np.isnan(out) & ~np.any([np.isnan(a) for a in flat], axis=0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ConvergenceError(f"{name}{tuple(float(a[i]) for a in flat)} did not converge")
    return out.reshape(shape)


def _require(condition, message):
    if not np.all(condition):
        raise DomainError(message)


# Each public function takes a plain-float fast path (domain checks in Python,
# straight to the scalar kernel) because quadrature calls them one point at a time.


def ln_gamma(x, *, backend=None):
    """Natural log of the Gamma function for x > 0."""
    if _plain(x):
        if not x > 0:
            raise DomainError("ln_gamma requires x > 0")
        return _call_scalar("ln_gamma", (float(x),), backend)
    _require(np.asarray(x) > 0, "ln_gamma requires x > 0")
    return _evaluate("ln_gamma", x, backend=backend)


def _gamma_args(name, s, x):
    if _plain(s, x):
        if not (s > 0 and x >= 0):
            raise DomainError(f"{name} requires s > 0 and x >= 0")
        return True
    _require(np.asarray(s) > 0, f"{name} requires s > 0")
    _require(np.asarray(x) >= 0, f"{name} requires x >= 0")
    return False


def reg_upper_gamma(s, x, *, backend=None):
    """Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).

    Series for x < s + 1, Legendre continued fraction otherwise, both scaled
    in log space so extreme arguments neither overflow nor lose the tail.
    """
    if _gamma_args("reg_upper_gamma", s, x):
        return _call_scalar("reg_upper_gamma", (float(s), float(x)), backend)
    return _evaluate("reg_upper_gamma", s, x, backend=backend)


def reg_lower_gamma(s, x, *, backend=None):
    """Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x)."""
    if _gamma_args("reg_lower_gamma", s, x):
        return _call_scalar("reg_lower_gamma", (float(s), float(x)), backend)
    return _evaluate("reg_lower_gamma", s, x, backend=backend)


def exp_integral_e1(x, *, backend=None):
    """Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0."""
    if _plain(x):
        if not x > 0:
            raise DomainError("exp_integral_e1 requires x > 0")
        return _call_scalar("exp_integral_e1", (float(x),), backend)
    _require(np.asarray(x) > 0, "exp_integral_e1 requires x > 0")
    return _evaluate("exp_integral_e1", x, backend=backend)


def exp_integral_e1_scaled(x, *, backend=None):
    """exp(x) * E1(x), finite from x -> 0+ up to x = inf."""
    if _plain(x):
        if not x > 0:
            raise DomainError("exp_integral_e1_scaled requires x > 0")
        return _call_scalar("exp_integral_e1_scaled", (float(x),), backend)
    _require(np.asarray(x) > 0, "exp_integral_e1_scaled requires x > 0")
    return _evaluate("exp_integral_e1_scaled", x, backend=backend)


def dawson(x, *, backend=None):
    """Dawson's integral D(x) = exp(-x^2) int_0^x exp(t^2) dt.

    Odd in x; values are bounded by D(0.9241...) = 0.5410443.
    """
    if _plain(x):
        if x != x:
            raise DomainError("dawson: NaN input")
        return _call_scalar("dawson", (float(x),), backend)
    _require(~np.isnan(np.asarray(x, dtype=float)), "dawson: NaN input")
    return _evaluate("dawson", x, backend=backend)


def dawson_residual(x, *, backend=None):
    """1 - 2 x D(x), accurate where the two terms nearly cancel (x >> 1).

    Behaves like 1 - 2x^2 near zero and -1/(2x^2) for large x.
    """
    if _plain(x):
        if x != x:
            raise DomainError("dawson_residual: NaN input")
        return _call_scalar("dawson_residual", (float(x),), backend)
    _require(~np.isnan(np.asarray(x, dtype=float)), "dawson_residual: NaN input")
    return _evaluate("dawson_residual", x, backend=backend)


def gauss_2f1_slot(b2, c, z, *, backend=None):
    """Gauss hypergeometric 2F1(1, b2; c; z) for 0 <= z < 1."""
    if _plain(b2, c, z):
        if not 0 <= z < 1:
            raise DomainError("gauss_2f1_slot requires 0 <= z < 1")
        if c <= 0 and c == round(c):
            raise DomainError("gauss_2f1_slot: c must not be a nonpositive integer")
        return _call_scalar("gauss_2f1_slot", (float(b2), float(c), float(z)), backend)
    zz = np.asarray(z, dtype=float)
    cc = np.asarray(c, dtype=float)
    _require((zz >= 0) & (zz < 1), "gauss_2f1_slot requires 0 <= z < 1")
    _require(~((cc <= 0) & (cc == np.round(cc))), "gauss_2f1_slot: c must not be a nonpositive integer")
    return _evaluate("gauss_2f1_slot", b2, c, z, backend=backend)
