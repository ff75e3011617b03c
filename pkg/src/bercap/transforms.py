"""BER <-> ergodic capacity transforms.

Forward (average BER -> capacity):

    C(g) = int_0^inf Z(u) [1 - 2 E(u g)] du

with the kernel from :mod:`bercap.kernels`, evaluated by adaptive quadrature
in log u (:func:`ber_to_capacity`) or by a fixed Gauss-Chebyshev rule after
u = tan(s) (:func:`ber_to_capacity_gcq`).

Backward (imaginary part of capacity on the negative axis -> average BER):

    E(g) = 1/2 - int_0^inf Zhat(u) Im C(-u g) du

:func:`capacity_to_ber` evaluates it after the change of variable t = a/u,
which turns the kernel into a Gamma(b) weight, and in deficit form
(ceiling - Im C) so small BERs are not the difference of two numbers near 1/2.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import BerRangeError, DomainError, InconsistentInputError
from .kernels import DAWSON_RESIDUAL_ZERO, KernelContext, kernel_Z
from .modulation import BinaryModulation
from .quadrature import integrate_half_line, integrate_log_axis

__all__ = [
    "TransformConfig",
    "TransformResult",
    "GcqNodes",
    "ImCapacity",
    "make_gcq_nodes",
    "ber_to_capacity",
    "ber_to_capacity_gcq",
    "capacity_to_ber",
    "BER_RANGE_TOL",
]

LN2 = math.log(2.0)
BER_RANGE_TOL = 1e-12
RESULT_RANGE_TOL = 1e-9
_MONOTONE_GRID = 257


@dataclass(frozen=True)
class TransformConfig:
    bandwidth: float = 1.0
    rel_tol: float = 1e-9
    u_min: float = 1e-12
    u_max: float = 1e12
    gcq_nodes: int = 50
    auto_truncate: bool = True

    def __post_init__(self):
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")
        if not (0 < self.rel_tol < 1e-2):
            raise DomainError(f"rel_tol must lie in (0, 1e-2), got {self.rel_tol}")
        if not (0 < self.u_min < self.u_max < math.inf):
            raise DomainError(f"need 0 < u_min < u_max < inf, got {self.u_min}, {self.u_max}")
        if int(self.gcq_nodes) != self.gcq_nodes or self.gcq_nodes < 1:
            raise DomainError(f"gcq_nodes must be a positive integer, got {self.gcq_nodes}")


@dataclass(frozen=True)
class TransformResult:
    """Transform output with its error estimate and the span of arguments probed.

    ``probed_min``/``probed_max`` are the smallest and largest average-SNR
    arguments (linear) at which the input function was evaluated.
    ``kernel_mass_coverage`` is filled in by curve-based callers.
    """

    value: float
    error_estimate: float
    probed_min: float
    probed_max: float
    kernel_mass_coverage: float | None = None
    warnings: tuple[str, ...] = field(default=())

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class GcqNodes:
    abscissas: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return int(self.abscissas.size)


class ImCapacity:
    """``x -> Im C_avg(-x)`` with an optional exact complement.

    ``deficit(x)`` must equal ``ceiling - func(x)`` where ``ceiling = pi W / ln 2``;
    supplying it lets :func:`capacity_to_ber` resolve BERs far below 1/2.
    ``breakpoints`` are x-values where ``func`` jumps.
    """

    def __init__(self, func: Callable, bandwidth: float = 1.0, deficit: Callable | None = None, breakpoints=()):
        if not bandwidth > 0:
            raise DomainError("bandwidth must be positive")
        self.func = func
        self.bandwidth = float(bandwidth)
        self.ceiling = math.pi * self.bandwidth / LN2
        self._deficit = deficit
        self.breakpoints = tuple(float(p) for p in breakpoints)

    def __call__(self, x):
        return self.func(x)

    def deficit(self, x):
        if self._deficit is not None:
            return self._deficit(x)
        return self.ceiling - self.func(x)


class _Probe:
    """Wraps a BER function: range check and probed-argument bookkeeping."""

    def __init__(self, ber):
        self.ber = ber
        self.lo = math.inf
        self.hi = 0.0

    def __call__(self, x):
        if isinstance(x, float):
            e = float(self.ber(x))
            self.lo = min(self.lo, x)
            self.hi = max(self.hi, x)
            if not (-BER_RANGE_TOL < e <= 0.5 + BER_RANGE_TOL):
                raise BerRangeError(f"BER function returned {e} outside (0, 1/2] at average SNR {x}")
            return e
        arr = np.asarray(x, dtype=float)
        e = np.asarray(self.ber(x), dtype=float)
        if arr.size:
            self.lo = min(self.lo, float(arr.min()))
            self.hi = max(self.hi, float(arr.max()))
        bad = ~((e > -BER_RANGE_TOL) & (e <= 0.5 + BER_RANGE_TOL))
        if np.any(bad):
            where = arr[bad] if arr.ndim else arr
            raise BerRangeError(
                f"BER function returned {e[bad] if e.ndim else e} outside (0, 1/2] at average SNR {where}"
            )
        return e


# -- tail bounds for the forward kernel ----------------------------------------
#
# Low end: |Z(u)| <= (W/ln2)/u for both kernels (|1 - 2xD(x)| <= 1).  The
# average certainty at average SNR x is E[P(b, a x S)] with E[S] = 1, and
# P(b, .) is concave for b <= 1, so Jensen gives
# 1 - 2E(x) <= P(b, a x) <= (a x)^b / Gamma(b+1).
# Hence int_0^lo |Z| (1 - 2E(u g)) du <= (W/ln2) (a g lo)^b / (b Gamma(b+1)).
#
# High end, b = 1: int_hi^inf (W/ln2) e^{-au}/u du = (W/ln2) E1(a hi)
#                  <= (W/ln2) e^{-a hi} / (a hi).
# High end, b = 1/2: |1 - 2xD(x)| <= 1/x^2 for x >= 1, so |Z| <= (W/ln2)/(a u^2)
#                  and the tail is at most (W/ln2)/(a hi) once a hi >= 1.


def _lower_tail_bound(ctx, g, lo):
    a, b = ctx.mod.a, ctx.mod.b
    return ctx.bandwidth / LN2 * (a * g * lo) ** b / (b * math.gamma(b + 1.0))


def _upper_tail_bound(ctx, hi):
    a, b = ctx.mod.a, ctx.mod.b
    x = a * hi
    if b == 1.0:
        return ctx.bandwidth / LN2 * math.exp(-x) / x
    return ctx.bandwidth / LN2 / x if x >= 1.0 else math.inf


def _lower_cut(ctx, g, target):
    a, b = ctx.mod.a, ctx.mod.b
    return (target * LN2 / ctx.bandwidth * b * math.gamma(b + 1.0)) ** (1.0 / b) / (a * g)


def _upper_cut(ctx, target):
    a, b = ctx.mod.a, ctx.mod.b
    tau = target * LN2 / ctx.bandwidth
    if b == 1.0:
        # e^{-x}/x <= tau is implied by x >= max(1, ln(1/tau))
        return max(1.0, math.log(1.0 / tau)) / a
    return max(1.0, 1.0 / tau) / a


def _check_avg_snr(avg_snr):
    if not (avg_snr > 0 and math.isfinite(avg_snr)):
        raise DomainError(f"avg_snr must be positive and finite, got {avg_snr}")
    return float(avg_snr)


def _evaluate_on(fn, grid):
    # user functions may be scalar-only
    try:
        values = np.asarray(fn(grid), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != grid.shape:
        values = np.array([float(fn(float(x))) for x in grid])
    return values


def _monotonicity_warning(ber, lo, hi):
    if not (0 < lo < hi < math.inf):
        return None
    grid = np.geomspace(lo, hi, _MONOTONE_GRID)
    values = _evaluate_on(ber, grid)
    rise = np.diff(values)
    tol = BER_RANGE_TOL + 1e-9 * np.abs(values[:-1])
    if np.any(rise > tol):
        at = grid[1:][rise > tol][0]
        return f"BER function increases with SNR near {at:.6g}; an average BER should be nonincreasing"
    return None


def ber_to_capacity(ber: Callable, avg_snr: float, mod: BinaryModulation, cfg: TransformConfig | None = None) -> TransformResult:
    """Ergodic capacity at ``avg_snr`` from an average-BER function of average SNR.

    Integrates ``Z(u) (1 - 2 ber(u avg_snr))`` over [u_min, u_max] in log u.
    With ``cfg.auto_truncate`` the window is widened until the analytic tail
    bounds fall below ``rel_tol / 10`` of the result; the remaining bound is
    added to the reported error.
    """
    cfg = cfg or TransformConfig()
    g = _check_avg_snr(avg_snr)
    ctx = KernelContext(mod, cfg.bandwidth)
    probe = _Probe(ber)

    def f(u):
        return kernel_Z(ctx, u) * (1.0 - 2.0 * float(probe(u * g)))

    def segment(lo, hi, abs_tol=0.0):
        pts = [1.0 / mod.a, 1.0 / (mod.a * g), 1.0 / g]
        if mod.b == 0.5:
            pts.append(DAWSON_RESIDUAL_ZERO**2 / mod.a)
        return integrate_log_axis(
            f, lo, hi, rel_tol=cfg.rel_tol, abs_tol=abs_tol, points=pts, what="BER-to-capacity"
        )

    lo, hi = cfg.u_min, cfg.u_max
    main = segment(lo, hi)
    value, error = main.value, main.error
    if cfg.auto_truncate:
        target = cfg.rel_tol / 10.0 * abs(value)
        if target > 0:
            new_lo = _lower_cut(ctx, g, target)
            if new_lo < lo:
                piece = segment(new_lo, lo, target)
                value += piece.value
                error += piece.error
                lo = new_lo
            new_hi = _upper_cut(ctx, target)
            if new_hi > hi:
                piece = segment(hi, new_hi, target)
                value += piece.value
                error += piece.error
                hi = new_hi
    error += _lower_tail_bound(ctx, g, lo) + _upper_tail_bound(ctx, hi)

    notes = []
    msg = _monotonicity_warning(ber, probe.lo, probe.hi)
    if msg:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    return TransformResult(value, error, probe.lo, probe.hi, warnings=tuple(notes))


@functools.lru_cache(maxsize=64)
def _gcq_arrays(n):
    k = np.arange(1, n + 1)
    x = np.cos((2 * k - 1) * math.pi / (2 * n))
    theta = math.pi / 4.0 * (x + 1.0)
    s = np.tan(theta)
    w = math.pi**2 / (4.0 * n) * np.sqrt(1.0 - x * x) / np.cos(theta) ** 2
    order = np.argsort(s)
    s, w = s[order], w[order]
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def make_gcq_nodes(n: int) -> GcqNodes:
    """Gauss-Chebyshev nodes for int_0^inf f(u) du after u = tan(s).

    s in (0, pi/2) is mapped to x in (-1, 1) by s = (pi/4)(x + 1); the
    Chebyshev weight 1/sqrt(1 - x^2) is cancelled by the sqrt factor in w_n.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"node count must be a positive integer, got {n}")
    s, w = _gcq_arrays(int(n))
    return GcqNodes(s, w)


def _gcq_sum(ber, g, ctx, n, probe):
    nodes = make_gcq_nodes(n)
    s = np.asarray(nodes.abscissas)
    values = _evaluate_on(probe, s * g)
    return float(np.sum(nodes.weights * kernel_Z(ctx, s) * (1.0 - 2.0 * values)))


def ber_to_capacity_gcq(ber: Callable, avg_snr: float, mod: BinaryModulation, cfg: TransformConfig | None = None) -> TransformResult:
    """Finite-sum capacity ``sum_n w_n Z(s_n) (1 - 2 ber(s_n avg_snr))``.

    The error estimate is the change from the rule with half as many nodes
    (NaN for a single node).
    """
    cfg = cfg or TransformConfig()
    g = _check_avg_snr(avg_snr)
    ctx = KernelContext(mod, cfg.bandwidth)
    probe = _Probe(ber)
    n = int(cfg.gcq_nodes)
    value = _gcq_sum(ber, g, ctx, n, probe)
    lo, hi = probe.lo, probe.hi
    error = abs(value - _gcq_sum(ber, g, ctx, n // 2, probe)) if n >= 2 else math.nan
    return TransformResult(value, error, lo, hi)


def capacity_to_ber(imcap, avg_snr: float, mod: BinaryModulation, cfg: TransformConfig | None = None) -> TransformResult:
    """Average BER at ``avg_snr`` from ``x -> Im C_avg(-x)``.

    ``imcap`` is an :class:`ImCapacity` or a plain callable (wrapped with
    ``cfg.bandwidth``).  With t = a/u the kernel becomes a Gamma(b) weight:

        E = ln2 / (2 pi W Gamma(b)) int_0^inf t^(b-1) e^-t [ceiling - Im C(-a g / t)] dt
    """
    cfg = cfg or TransformConfig()
    g = _check_avg_snr(avg_snr)
    if not isinstance(imcap, ImCapacity):
        imcap = ImCapacity(imcap, bandwidth=cfg.bandwidth)
    elif not math.isclose(imcap.bandwidth, cfg.bandwidth, rel_tol=1e-12):
        raise InconsistentInputError(
            f"capacity function bandwidth {imcap.bandwidth} differs from configured {cfg.bandwidth}"
        )
    a, b = mod.a, mod.b
    ag = a * g
    ceiling = imcap.ceiling
    lo_seen = [math.inf]
    hi_seen = [0.0]
    log_norm = math.log(LN2 / (2.0 * math.pi * cfg.bandwidth)) - math.lgamma(b)

    def f(t):
        if t <= 0.0:
            return 0.0
        x = ag / t
        lo_seen[0] = min(lo_seen[0], x)
        hi_seen[0] = max(hi_seen[0], x)
        d = float(imcap.deficit(x))
        if not (-BER_RANGE_TOL * ceiling <= d <= ceiling * (1.0 + BER_RANGE_TOL)):
            raise InconsistentInputError(f"Im C(-{x:.6g}) = {ceiling - d} lies outside [0, pi W / ln 2]")
        return d * math.exp(log_norm + (b - 1.0) * math.log(t) - t)

    pts = [b, max(b - 3.0 * math.sqrt(b), 1e-3), b + 5.0 * math.sqrt(b) + 5.0]
    pts += [ag / x for x in imcap.breakpoints if x > 0]
    res = integrate_half_line(f, breakpoints=pts, rel_tol=cfg.rel_tol, what="capacity-to-BER")
    if not (-RESULT_RANGE_TOL <= res.value <= 0.5 + RESULT_RANGE_TOL):
        raise InconsistentInputError(
            f"capacity-to-BER result {res.value} is outside [0, 1/2]; the capacity function is inconsistent"
        )
    return TransformResult(res.value, res.error, lo_seen[0], hi_seen[0])
