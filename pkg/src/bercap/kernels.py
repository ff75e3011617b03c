"""Transform kernels ("information certainty content").

``kernel_Z`` weights the average certainty ``1 - 2 E_avg(u * avg_snr)`` to give
ergodic capacity; it is the function satisfying

    int_0^inf Z(u) P(b, a u g) du = (W / ln 2) ln(1 + g)   for all g > 0.

Only the canonical detection parameters have real closed forms:

* b = 1:   Z(u) = (W / ln 2) exp(-a u) / u                 (Frullani)
* b = 1/2: Z(u) = (W / ln 2) (1 - 2 x D(x)) / u,  x = sqrt(a u)

where D is Dawson's function.  The second form follows from inverting the
Laplace transform sqrt(p) / (1 + p); both are checked against the defining
identity in the test-suite.

``kernel_Zhat`` weights ``Im C_avg(-u * avg_snr)`` to give the average BER.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .exceptions import DomainError, UnsupportedModulationError
from .modulation import BinaryModulation

__all__ = ["KernelContext", "kernel_Z", "kernel_Zhat", "DAWSON_RESIDUAL_ZERO", "perturbed_kernel"]

LN2 = math.log(2.0)
# 1 - 2 x D(x) = 0 at x = 0.92413887300459176701 (where D peaks)
DAWSON_RESIDUAL_ZERO = 0.92413887300459176701


# relative error injected into kernel_Z; only set by perturbed_kernel()
_PERTURBATION = contextvars.ContextVar("kernel_perturbation", default=0.0)


@contextlib.contextmanager
def perturbed_kernel(rel: float):
    """Scale ``kernel_Z`` by ``1 + rel`` inside the block (validation test hook)."""
    token = _PERTURBATION.set(float(rel))
    try:
        yield
    finally:
        _PERTURBATION.reset(token)


@dataclass(frozen=True)
class KernelContext:
    mod: BinaryModulation
    bandwidth: float = 1.0

    def __post_init__(self):
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")


def _positive(u, what):
    arr = np.asarray(u, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{what} requires u > 0")
    return arr


def kernel_Z(ctx: KernelContext, u):
    """Capacity kernel Z_{a,b}(u) for b in {1/2, 1}."""
    a, b = ctx.mod.a, ctx.mod.b
    scale = ctx.bandwidth / LN2 * (1.0 + _PERTURBATION.get())
    if isinstance(u, float):
        # scalar fast path, this sits inside quadrature loops
        if not u > 0:
            raise DomainError("kernel_Z requires u > 0")
        if b == 1.0:
            return scale * math.exp(-a * u) / u
        if b == 0.5:
            return scale * specfun.dawson_residual(math.sqrt(a * u)) / u
    arr = _positive(u, "kernel_Z")
    if b == 1.0:
        out = scale * np.exp(-a * arr) / arr
    elif b == 0.5:
        out = scale * np.asarray(specfun.dawson_residual(np.sqrt(a * arr))) / arr
    else:
        raise UnsupportedModulationError(f"kernel_Z has closed forms only for b in {{1/2, 1}}, got b={b}")
    return float(out) if np.ndim(u) == 0 else out


def kernel_Zhat(ctx: KernelContext, u):
    """BER kernel ``ln2 / (2 pi a W Gamma(b)) (a/u)^(b+1) exp(-a/u)``.

    Evaluated in log space; underflows cleanly to 0 as u -> 0+.
    """
    arr = _positive(u, "kernel_Zhat")
    a, b = ctx.mod.a, ctx.mod.b
    ratio = a / arr
    log_val = math.log(LN2 / (2.0 * math.pi * a * ctx.bandwidth)) - math.lgamma(b) + (b + 1.0) * np.log(ratio) - ratio
    out = np.exp(log_val)
    return float(out) if np.ndim(u) == 0 else out
