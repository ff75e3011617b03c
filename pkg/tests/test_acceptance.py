"""Acceptance criteria 1-9, each checked against an outside oracle at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""

from __future__ import annotations

import math
import time

import mpmath as mp
import numpy as np
from scipy import integrate

from bercap.channels import (
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
from bercap.empirical import BerCurve, empirical_capacity, load_curve, save_curve
from bercap.kernels import KernelContext, kernel_Z
from bercap.modulation import CANONICAL, DBPSK, NCBFSK, CBPSK, BinaryModulation, certainty
from bercap.montecarlo import McConfig, estimate_avg_ber, estimate_capacity, sample_snr
from bercap.transforms import TransformConfig, ber_to_capacity, ber_to_capacity_gcq, capacity_to_ber

GRID_DB = (-10.0, 0.0, 10.0, 20.0, 30.0)
MC_SEED = 20240611
mp.mp.dps = 30


def rel(value, ref):
    if value == ref:
        return 0.0
    return abs(value - ref) / abs(ref)


def mp_rayleigh_capacity(g):
    x = 1 / mp.mpf(g)
    return float(mp.exp(x) * mp.e1(x) / mp.log(2))


def mp_nakagami_ber(m, mod, g):
    m, a, b, g = mp.mpf(m), mp.mpf(mod.a), mp.mpf(mod.b), mp.mpf(g)
    z = m / (m + a * g)
    coef = mp.gamma(m + b) / (2 * mp.gamma(b) * mp.gamma(m + 1))
    return float(coef * (a * g / (m + a * g)) ** b * z**m * mp.hyp2f1(1, m + b, m + 1, z))


def mp_nakagami_capacity(m, g):
    m, g = mp.mpf(m), mp.mpf(g)
    pdf = lambda x: (m / g) ** m * x ** (m - 1) * mp.exp(-m * x / g) / mp.gamma(m)
    return float(mp.quad(lambda x: mp.log1p(x) * pdf(x), [0, g / m / 10, g / m, g, 10 * g, mp.inf]) / mp.log(2))


def test_criterion_1_rayleigh_round_trip(acceptance):
    # compile and warm caches outside the timed sweep
    ber_to_capacity(avg_ber_function(RayleighChannel(1.0), CBPSK), 1.0, CBPSK)
    ber_to_capacity(avg_ber_function(RayleighChannel(1.0), DBPSK), 1.0, DBPSK)
    refs = {db: mp_rayleigh_capacity(db_to_linear(db)) for db in GRID_DB}
    worst = 0.0
    start = time.perf_counter()
    for mod in CANONICAL:
        ber = avg_ber_function(RayleighChannel(1.0), mod)
        for db in GRID_DB:
            worst = max(worst, rel(ber_to_capacity(ber, db_to_linear(db), mod).value, refs[db]))
    seconds = time.perf_counter() - start
    ok = acceptance(1, worst <= 1e-6 and seconds < 5.0, f"max rel err {worst:.2e} (tol 1e-6), sweep {seconds:.2f} s (limit 5 s)")
    assert ok


def test_criterion_2_nakagami_round_trip(acceptance):
    worst = 0.0
    for m in (0.5, 1.0, 2.5, 4.0):
        imcap = im_capacity_function(NakagamiChannel(1.0, m))
        for mod in CANONICAL:
            for db in GRID_DB:
                g = db_to_linear(db)
                worst = max(worst, rel(capacity_to_ber(imcap, g, mod).value, mp_nakagami_ber(m, mod, g)))
    assert acceptance(2, worst <= 1e-6, f"max rel err {worst:.2e} (tol 1e-6)")


def test_criterion_3_kernel_identity(acceptance):
    # plain scipy quad in log u, no package integration helpers
    worst = 0.0
    for a in (0.5, 1.0):
        for b in (0.5, 1.0):
            mod = BinaryModulation(a, b)
            ctx = KernelContext(mod)
            for g in (0.1, 1.0, 3.0, 10.0, 100.0):
                f = lambda t: kernel_Z(ctx, math.exp(t)) * certainty(mod, math.exp(t) * g) * math.exp(t)
                pts = sorted({math.log(1 / a), math.log(1 / (a * g)), math.log(0.854 / a)})
                value = integrate.quad(f, -60, 35, points=pts, limit=500, epsabs=0, epsrel=1e-11)[0]
                worst = max(worst, rel(value, math.log2(1 + g)))
    assert acceptance(3, worst <= 1e-6, f"max rel err {worst:.2e} (tol 1e-6)")


def test_criterion_4_deterministic_reductions(acceptance):
    worst_c = worst_e = 0.0
    for g0 in (0.5, 2.0, 20.0):
        ch = AwgnChannel(g0)
        for mod in CANONICAL:
            cap = ber_to_capacity(avg_ber_function(ch, mod), g0, mod).value
            worst_c = max(worst_c, rel(cap, math.log2(1 + g0)))
            ber = capacity_to_ber(im_capacity_function(ch), g0, mod).value
            ref = float(mp.gammainc(mod.b, mod.a * g0, mp.inf, regularized=True) / 2)
            worst_e = max(worst_e, rel(ber, ref))
    ok = worst_c <= 1e-6 and worst_e <= 1e-6
    assert acceptance(4, ok, f"capacity rel err {worst_c:.2e}, BER rel err {worst_e:.2e} (tol 1e-6)")


def test_criterion_5_certainty_density(acceptance):
    phi = avg_certainty_from_outage(RayleighChannel(2.0), NCBFSK)
    worst = 0.0
    for mod in CANONICAL:
        for db in GRID_DB:
            g = db_to_linear(db)
            # 1 - 2 E for Rayleigh is (a g / (1 + a g))^b
            ref = (mod.a * g / (1 + mod.a * g)) ** mod.b
            worst = max(worst, abs(avg_certainty_from_outage(RayleighChannel(g), mod) - ref))
    ok = abs(phi - 0.5) <= 1e-8 and abs(phi - 0.8) > 0.1 and worst <= 1e-8
    assert acceptance(5, ok, f"NCBFSK at 2: {phi:.12f} (expect 0.5, not 0.8); max |diff| {worst:.2e} (tol 1e-8)")


def test_criterion_6_gcq_convergence(acceptance):
    ber = avg_ber_function(RayleighChannel(1.0), DBPSK)
    exact = mp_rayleigh_capacity(1.0)
    errs = [rel(ber_to_capacity_gcq(ber, 1.0, DBPSK, TransformConfig(gcq_nodes=n)).value, exact) for n in (10, 20, 50, 100)]
    ok = errs[2] <= 1e-3 and all(e2 <= e1 for e1, e2 in zip(errs, errs[1:]))
    detail = ", ".join(f"N={n}: {e:.2e}" for n, e in zip((10, 20, 50, 100), errs))
    assert acceptance(6, ok, f"{detail} (N=50 tol 1e-3, nonincreasing)")


def test_criterion_7_empirical_workflow(acceptance, tmp_path, recwarn):
    db = np.arange(-30.0, 50.0 + 1.0, 2.0)
    worst = 0.0
    for m in (1.0, 2.0, 4.0):
        caps = {g: ergodic_capacity(NakagamiChannel(db_to_linear(g), m)) for g in (0.0, 10.0, 20.0)}
        for mod in CANONICAL:
            curve = BerCurve(tuple(db), tuple(mp_nakagami_ber(m, mod, db_to_linear(d)) for d in db))
            path = tmp_path / f"m{m}_{mod}.csv"
            save_curve(curve, path)
            loaded = load_curve(path)
            for g, cap in caps.items():
                worst = max(worst, rel(empirical_capacity(loaded, db_to_linear(g), mod).value, cap))
    assert acceptance(7, worst <= 0.01, f"max rel err {worst:.2e} (tol 1e-2), all four modulations")


def test_criterion_8_monte_carlo(acceptance):
    cases = [(RayleighChannel(9.0), mod) for mod in CANONICAL] + [(NakagamiChannel(10.0, 2.5), CBPSK)]
    worst = 0.0
    for ch, mod in cases:
        cfg = McConfig(10**6, MC_SEED, ch, mod)
        ber = estimate_avg_ber(cfg)
        cap = estimate_capacity(cfg)
        if isinstance(ch, RayleighChannel):
            ref_cap = mp_rayleigh_capacity(ch.avg_snr)
            x = mod.a * ch.avg_snr
            ref_ber = 0.5 - 0.5 * (x / (1 + x)) ** mod.b
        else:
            ref_cap = mp_nakagami_capacity(ch.m, ch.avg_snr)
            ref_ber = mp_nakagami_ber(ch.m, mod, ch.avg_snr)
        worst = max(worst, abs(ber.mean - ref_ber) / ber.std_error, abs(cap.mean - ref_cap) / cap.std_error)
    cfg = McConfig(10**6, MC_SEED, cases[-1][0], CBPSK)
    repeat = estimate_avg_ber(cfg) == estimate_avg_ber(cfg)
    ok = worst <= 3.0 and repeat
    assert acceptance(8, ok, f"max deviation {worst:.2f} standard errors (limit 3), repeatable under seed: {repeat}")


def test_criterion_9_rayleigh_reduction(acceptance):
    worst = 0.0
    t = np.array([0.01, 0.5, 1.0, 4.0])
    for db in GRID_DB:
        g = db_to_linear(db)
        ray, nak = RayleighChannel(g), NakagamiChannel(g, 1.0)
        pairs = [
            (ergodic_capacity(nak), ergodic_capacity(ray)),
            *zip(snr_pdf(nak, t * g), snr_pdf(ray, t * g)),
            *zip(comp_outage(nak, t * g), comp_outage(ray, t * g)),
            *zip(im_capacity_neg(nak, t), im_capacity_neg(ray, t)),
        ]
        for mod in CANONICAL:
            pairs += [
                (avg_ber_closed(nak, mod), avg_ber_closed(ray, mod)),
                (avg_ber_direct(nak, mod), avg_ber_direct(ray, mod)),
                (avg_ber_from_outage(nak, mod), avg_ber_from_outage(ray, mod)),
                (avg_certainty_from_outage(nak, mod), avg_certainty_from_outage(ray, mod)),
                (
                    capacity_to_ber(im_capacity_function(nak), g, mod).value,
                    capacity_to_ber(im_capacity_function(ray), g, mod).value,
                ),
                (
                    ber_to_capacity(avg_ber_function(nak, mod), g, mod).value,
                    ber_to_capacity(avg_ber_function(ray, mod), g, mod).value,
                ),
            ]
        worst = max(worst, max(rel(float(x), float(y)) for x, y in pairs))
        ray_draws = next(sample_snr(McConfig(1000, MC_SEED, ray)))
        nak_draws = next(sample_snr(McConfig(1000, MC_SEED, nak)))
        worst = max(worst, float(np.max(np.abs(nak_draws / ray_draws - 1))))
    assert acceptance(9, worst <= 1e-8, f"max rel diff {worst:.2e} over every operation (tol 1e-8)")
