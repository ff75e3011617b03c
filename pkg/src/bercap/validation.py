"""Self-check suites run by ``bercap validate``.

Each suite compares library results against closed forms or independent
integrations and reports the largest relative error seen against its
tolerance.  ``run_suites(kernel_perturbation=eps)`` scales the capacity
kernel by ``1 + eps`` while the suites run, to confirm the harness notices.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import specfun
from .channels import (
    AwgnChannel,
    NakagamiChannel,
    RayleighChannel,
    avg_ber_closed,
    avg_ber_direct,
    avg_ber_from_outage,
    avg_ber_function,
    avg_certainty_from_outage,
    comp_outage,
    db_to_linear,
    ergodic_capacity,
    im_capacity_function,
    im_capacity_neg,
    snr_pdf,
)
from .empirical import BerCurve, empirical_capacity
from .kernels import KernelContext, kernel_Z, perturbed_kernel
from .modulation import CANONICAL, DBPSK, NCBFSK, CBPSK, BinaryModulation, instantaneous_ber
from .montecarlo import McConfig, estimate_avg_ber, estimate_capacity
from .quadrature import integrate_half_line, integrate_log_axis
from .transforms import TransformConfig, ber_to_capacity, ber_to_capacity_gcq, capacity_to_ber

__all__ = ["SuiteResult", "SUITES", "run_suites"]

LN2 = math.log(2.0)
SNR_GRID_DB = (-10.0, 0.0, 10.0, 20.0, 30.0)
NAKAGAMI_M = (0.5, 1.0, 2.5, 4.0)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    max_rel_error: float
    tolerance: float
    cases: int
    seconds: float
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _rel(value, ref):
    return abs(value - ref) / abs(ref)


class _Tracker:
    def __init__(self, tol):
        self.tol = tol
        self.worst = 0.0
        self.cases = 0
        self.where = ""

    def add(self, err, where):
        self.cases += 1
        if not err <= self.worst:  # also catches NaN
            self.worst = err
            self.where = where

    @property
    def passed(self):
        return self.worst <= self.tol


def rayleigh_roundtrip():
    t = _Tracker(1e-6)
    for mod in CANONICAL:
        for db in SNR_GRID_DB:
            g = db_to_linear(db)
            ch = RayleighChannel(g)
            ref = LN2**-1 * specfun.exp_integral_e1_scaled(1.0 / g)
            got = ber_to_capacity(avg_ber_function(ch, mod), g, mod).value
            t.add(_rel(got, ref), f"{mod.name} {db:g} dB")
    return t


def nakagami_roundtrip():
    t = _Tracker(1e-6)
    for m in NAKAGAMI_M:
        for mod in CANONICAL:
            for db in SNR_GRID_DB:
                g = db_to_linear(db)
                ch = NakagamiChannel(g, m)
                got = capacity_to_ber(im_capacity_function(ch), g, mod).value
                t.add(_rel(got, avg_ber_closed(ch, mod)), f"m={m:g} {mod.name} {db:g} dB")
    return t


def kernel_identity():
    # int Z(u) P(b, a u g) du = log2(1 + g), integrated here without the transform code
    t = _Tracker(1e-6)
    for a in (0.5, 1.0):
        for b in (0.5, 1.0):
            ctx = KernelContext(BinaryModulation(a, b))
            for g in (0.1, 1.0, 3.0, 10.0, 100.0):

                def f(u, ctx=ctx, a=a, b=b, g=g):
                    return kernel_Z(ctx, u) * specfun.reg_lower_gamma(b, a * u * g)

                # the integrand is below (a g u)^b / u near 0 and below 1/(a u^2) for large u
                lo = 1e-13 ** (1.0 / b) / (a * g)
                hi = 1e13 / a
                pts = (1.0 / a, 1.0 / (a * g))
                got = integrate_log_axis(f, lo, hi, rel_tol=1e-11, points=pts).value
                t.add(_rel(got, math.log2(1.0 + g)), f"a={a:g} b={b:g} g={g:g}")
    return t


def deterministic_reduction():
    t = _Tracker(1e-6)
    for mod in CANONICAL:
        for g in (0.5, 2.0, 20.0):
            ch = AwgnChannel(g)
            cap = ber_to_capacity(avg_ber_function(ch, mod), g, mod).value
            t.add(_rel(cap, math.log2(1.0 + g)), f"capacity {mod.name} g={g:g}")
            ber = capacity_to_ber(im_capacity_function(ch), g, mod).value
            t.add(_rel(ber, instantaneous_ber(mod, g)), f"BER {mod.name} g={g:g}")
    return t


def _printed_rate_certainty(ch, mod):
    # average certainty with the Gamma rate b/a instead of a
    rate = mod.b / mod.a

    def f(phi):
        if phi <= 0:
            return 0.0
        return float(ch.comp_outage(phi)) * math.exp(
            mod.b * math.log(rate) + (mod.b - 1) * math.log(phi) - rate * phi - math.lgamma(mod.b)
        )

    return integrate_half_line(f, breakpoints=(1.0, ch.avg_snr)).value


def certainty_density():
    t = _Tracker(1e-8)
    ch = RayleighChannel(2.0)
    value = avg_certainty_from_outage(ch, NCBFSK)
    t.add(abs(value - 0.5), "Rayleigh NCBFSK g=2 vs 0.5")
    printed = _printed_rate_certainty(ch, NCBFSK)
    if abs(printed - 0.8) > 1e-8 or abs(value - printed) < 0.1:
        t.add(math.inf, "printed-rate discriminator")
    for mod in CANONICAL:
        for db in SNR_GRID_DB:
            ch = RayleighChannel(db_to_linear(db))
            ref = 1.0 - 2.0 * avg_ber_closed(ch, mod)
            t.add(abs(avg_certainty_from_outage(ch, mod, rel_tol=1e-11) - ref), f"{mod.name} {db:g} dB")
    t.detail = f"printed rate gives {printed:.10f}"
    return t


def gcq_convergence():
    t = _Tracker(1e-3)
    ch = RayleighChannel(1.0)
    ref = ergodic_capacity(ch)
    ber = avg_ber_function(ch, DBPSK)
    errors = []
    for n in (10, 20, 50, 100):
        errors.append(_rel(ber_to_capacity_gcq(ber, 1.0, DBPSK, TransformConfig(gcq_nodes=n)).value, ref))
    t.add(errors[2], "N=50")
    if any(b > a for a, b in zip(errors, errors[1:])):
        t.add(math.inf, "error increased with N")
    t.detail = "errors " + ", ".join(f"{e:.3e}" for e in errors)
    return t


def empirical_workflow():
    t = _Tracker(1e-2)
    grid_db = np.arange(-30.0, 50.0 + 1e-9, 2.0)
    for m in (1.0, 2.0, 4.0):
        family = NakagamiChannel(1.0, m)
        for mod in CANONICAL:
            ber = avg_ber_function(family, mod)
            curve = BerCurve(tuple(grid_db), tuple(ber(db_to_linear(grid_db))))
            for db in (0.0, 10.0, 20.0):
                g = db_to_linear(db)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    got = empirical_capacity(curve, g, mod).value
                t.add(_rel(got, ergodic_capacity(family.with_avg_snr(g))), f"m={m:g} {mod.name} {db:g} dB")
    return t


def monte_carlo():
    # errors in units of standard error; tolerance 3
    t = _Tracker(3.0)
    n, seed = 10**6, 20240611
    cases = [(RayleighChannel(9.0), mod) for mod in CANONICAL] + [(NakagamiChannel(10.0, 2.5), CBPSK)]
    for ch, mod in cases:
        est = estimate_avg_ber(McConfig(n, seed, ch, mod))
        t.add(abs(est.mean - avg_ber_closed(ch, mod)) / est.std_error, f"BER {ch} {mod.name}")
        again = estimate_avg_ber(McConfig(n, seed, ch, mod))
        if again != est:
            t.add(math.inf, f"non-deterministic {ch} {mod.name}")
    for ch in (RayleighChannel(9.0), NakagamiChannel(10.0, 2.5)):
        est = estimate_capacity(McConfig(n, seed, ch))
        t.add(abs(est.mean - ergodic_capacity(ch)) / est.std_error, f"capacity {ch}")
    return t


def _rayleigh_pairs(g):
    ray, nak = RayleighChannel(g), NakagamiChannel(g, 1.0)
    x = np.array([0.0, 0.1, 1.0, 3.0, 10.0]) * g
    yield "pdf", snr_pdf(ray, x), snr_pdf(nak, x)
    yield "comp_outage", comp_outage(ray, x), comp_outage(nak, x)
    yield "im_capacity_neg", im_capacity_neg(ray, x[1:]), im_capacity_neg(nak, x[1:])
    yield "ergodic_capacity", ergodic_capacity(ray), ergodic_capacity(nak, rel_tol=1e-12)
    for mod in CANONICAL:
        yield f"avg_ber_closed {mod.name}", avg_ber_closed(ray, mod), avg_ber_closed(nak, mod)
        yield f"avg_ber_direct {mod.name}", avg_ber_direct(ray, mod, rel_tol=1e-11), avg_ber_direct(nak, mod, rel_tol=1e-11)
        yield (
            f"avg_ber_from_outage {mod.name}",
            avg_ber_from_outage(ray, mod, rel_tol=1e-11),
            avg_ber_from_outage(nak, mod, rel_tol=1e-11),
        )
        cfg = TransformConfig(rel_tol=1e-11)
        yield (
            f"ber_to_capacity {mod.name}",
            ber_to_capacity(avg_ber_function(ray, mod), g, mod, cfg).value,
            ber_to_capacity(avg_ber_function(nak, mod), g, mod, cfg).value,
        )
        yield (
            f"capacity_to_ber {mod.name}",
            capacity_to_ber(im_capacity_function(ray), g, mod, cfg).value,
            capacity_to_ber(im_capacity_function(nak), g, mod, cfg).value,
        )
    mc_ray = estimate_avg_ber(McConfig(4096, 5, ray, DBPSK))
    mc_nak = estimate_avg_ber(McConfig(4096, 5, nak, DBPSK))
    yield "monte carlo BER", mc_ray.mean, mc_nak.mean


def rayleigh_reduction():
    t = _Tracker(1e-8)
    for db in SNR_GRID_DB:
        g = db_to_linear(db)
        for name, ray, nak in _rayleigh_pairs(g):
            ray = np.atleast_1d(np.asarray(ray, dtype=float))
            nak = np.atleast_1d(np.asarray(nak, dtype=float))
            scale = np.maximum(np.abs(ray), 1e-300)
            err = float(np.max(np.abs(ray - nak) / scale))
            t.add(err, f"{name} {db:g} dB")
    return t


SUITES: dict[str, Callable[[], _Tracker]] = {
    "rayleigh_roundtrip": rayleigh_roundtrip,
    "nakagami_roundtrip": nakagami_roundtrip,
    "kernel_identity": kernel_identity,
    "deterministic_reduction": deterministic_reduction,
    "certainty_density": certainty_density,
    "gcq_convergence": gcq_convergence,
    "empirical_workflow": empirical_workflow,
    "monte_carlo": monte_carlo,
    "rayleigh_reduction": rayleigh_reduction,
}


def run_suites(names=None, *, kernel_perturbation: float = 0.0) -> list[SuiteResult]:
    """Run the named suites (all by default) and collect their results."""
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    results = []
    with perturbed_kernel(kernel_perturbation):
        for name in names:
            start = time.perf_counter()
            try:
                t = SUITES[name]()
            except (ArithmeticError, ValueError) as exc:
                results.append(SuiteResult(name, False, math.inf, math.nan, 0, time.perf_counter() - start, str(exc)))
                continue
            detail = getattr(t, "detail", "")
            where = f"worst at {t.where}" if t.where else ""
            detail = "; ".join(s for s in (where, detail) if s)
            results.append(
                SuiteResult(name, t.passed, t.worst, t.tol, t.cases, time.perf_counter() - start, detail)
            )
    return results
