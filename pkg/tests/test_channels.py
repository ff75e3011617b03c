from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
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
    parse_channel,
    snr_pdf,
)
from bercap.exceptions import DomainError, UnsupportedChannelError
from bercap.modulation import CANONICAL, CBFSK, CBPSK, DBPSK, NCBFSK, BinaryModulation

# mpmath quadrature of Q(b, a x)/2 against the Nakagami density, 30 digits
NAKAGAMI_BER = [
    (0.5, 1.0, 0.5, 0.0, 0.19591327601530363),
    (2.5, 1.0, 0.5, 10.0, 0.0032831359137815031),
    (4.0, 0.5, 1.0, 20.0, 1.5053411385271366e-5),
    (2.0, 1.0, 1.0, 30.0, 1.9920239361596169e-6),
    (1.5, 0.5, 0.5, -10.0, 0.38627745556004337),
    (3.0, 1.0, 0.5, 25.0, 1.3014224363649515e-7),
]
# mpmath quadrature of log2(1 + x) against the Nakagami density
NAKAGAMI_CAP = [
    (2.5, 10.0, 3.2230445703339892),
    (0.5, 0.0, 0.76961025710758165),
    (4.0, 20.0, 6.4750991606502853),
]
# exp(1/g) E1(1/g) / ln 2 from mpmath
RAYLEIGH_CAP = [(0.1, 0.13209796780219238), (1.0, 0.86034738227088595), (100.0, 5.8840482336834735)]


@pytest.mark.parametrize("m,a,b,db,ref", NAKAGAMI_BER)
def test_nakagami_closed_form(m, a, b, db, ref):
    ch = NakagamiChannel(db_to_linear(db), m)
    assert avg_ber_closed(ch, BinaryModulation(a, b)) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("m,a,b,db,ref", NAKAGAMI_BER)
def test_nakagami_direct_quadrature(m, a, b, db, ref):
    ch = NakagamiChannel(db_to_linear(db), m)
    assert avg_ber_direct(ch, BinaryModulation(a, b)) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("m,db,ref", NAKAGAMI_CAP)
def test_nakagami_capacity(m, db, ref):
    assert ergodic_capacity(NakagamiChannel(db_to_linear(db), m)) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("g,ref", RAYLEIGH_CAP)
def test_rayleigh_capacity(g, ref):
    assert ergodic_capacity(RayleighChannel(g)) == pytest.approx(ref, rel=1e-13)
    assert ergodic_capacity(RayleighChannel(g), bandwidth=2e6) == pytest.approx(2e6 * ref, rel=1e-13)


@pytest.mark.parametrize("mod", CANONICAL, ids=str)
@pytest.mark.parametrize("g", [0.1, 1.0, 9.0, 1e3])
def test_rayleigh_closed_form(mod, g):
    x = mod.a * g
    ref = 0.5 - 0.5 * (x / (1 + x)) ** mod.b
    got = avg_ber_closed(RayleighChannel(g), mod)
    assert got == pytest.approx(ref, rel=1e-10)
    assert avg_ber_direct(RayleighChannel(g), mod) == pytest.approx(got, rel=1e-8)


def test_rayleigh_closed_form_high_snr_precision():
    # 1/2 - 1/2 (x/(1+x)) loses all digits at 1e12; the closed form must not
    assert avg_ber_closed(RayleighChannel(1e12), DBPSK) == pytest.approx(0.5 / (1.0 + 1e12), rel=1e-12)


@pytest.mark.parametrize("mod", CANONICAL, ids=str)
@pytest.mark.parametrize("g", [0.1, 1.0, 31.6])
def test_nakagami_m1_is_rayleigh(mod, g):
    ray, nak = RayleighChannel(g), NakagamiChannel(g, 1.0)
    assert avg_ber_closed(nak, mod) == pytest.approx(avg_ber_closed(ray, mod), rel=1e-12)
    t = np.array([0.0, 0.3 * g, g, 5 * g])
    np.testing.assert_allclose(nak.pdf(t), ray.pdf(t), rtol=1e-13)
    np.testing.assert_allclose(nak.comp_outage(t), ray.comp_outage(t), rtol=1e-13)


@pytest.mark.parametrize(
    "ch",
    [RayleighChannel(2.0), NakagamiChannel(2.0, 0.5), NakagamiChannel(5.0, 3.7)],
    ids=str,
)
def test_pdf_and_outage_consistent(ch):
    assert integrate.quad(ch.pdf, 0, np.inf)[0] == pytest.approx(1.0, rel=1e-8)
    assert integrate.quad(lambda g: g * ch.pdf(g), 0, np.inf)[0] == pytest.approx(ch.avg_snr, rel=1e-8)
    for t in (0.5, 2.0, 7.0):
        tail = integrate.quad(ch.pdf, t, np.inf)[0]
        assert float(comp_outage(ch, t)) == pytest.approx(tail, rel=1e-8)
        assert float(ch.outage(t)) == pytest.approx(1.0 - tail, rel=1e-8)


def test_nakagami_pdf_at_zero():
    assert NakagamiChannel(1.0, 1.0).pdf(0.0) == 1.0
    assert NakagamiChannel(1.0, 2.0).pdf(0.0) == 0.0
    assert math.isinf(NakagamiChannel(1.0, 0.5).pdf(0.0))


def test_certainty_discriminator():
    # the Gamma(b, rate a) certainty density gives g/(2+g) for NCBFSK on Rayleigh
    ch = RayleighChannel(2.0)
    assert avg_certainty_from_outage(ch, NCBFSK) == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize("mod", CANONICAL, ids=str)
@pytest.mark.parametrize(
    "ch", [RayleighChannel(0.1), RayleighChannel(100.0), NakagamiChannel(10.0, 2.5), AwgnChannel(2.0)], ids=str
)
def test_outage_routes_match_closed_form(mod, ch):
    closed = avg_ber_closed(ch, mod)
    assert avg_ber_from_outage(ch, mod) == pytest.approx(closed, rel=1e-8)
    assert avg_certainty_from_outage(ch, mod) == pytest.approx(1.0 - 2.0 * closed, rel=1e-8, abs=1e-12)


def test_awgn_channel():
    ch = AwgnChannel(2.0)
    assert ergodic_capacity(ch) == pytest.approx(math.log2(3.0))
    assert avg_ber_closed(ch, DBPSK) == pytest.approx(0.5 * math.exp(-2.0))
    assert float(comp_outage(ch, 1.0)) == 1.0
    assert float(comp_outage(ch, 3.0)) == 0.0
    with pytest.raises(UnsupportedChannelError):
        snr_pdf(ch, 1.0)
    np.testing.assert_array_equal(ch.sample(np.random.default_rng(0), 3), [2.0, 2.0, 2.0])


def test_im_capacity_neg():
    ch = RayleighChannel(4.0)
    ceiling = math.pi / math.log(2.0)
    # Pr(snr > 1/s) = exp(-1/(s g))
    assert im_capacity_neg(ch, 0.5) == pytest.approx(ceiling * math.exp(-0.5), rel=1e-14)
    f = im_capacity_function(ch)
    assert f.ceiling == pytest.approx(ceiling)
    assert f(2.0) == pytest.approx(ceiling * math.exp(-0.5), rel=1e-14)
    assert f.deficit(2.0) == pytest.approx(ceiling * -math.expm1(-0.5), rel=1e-14)
    with pytest.raises(DomainError):
        im_capacity_neg(ch, 0.0)


def test_awgn_im_capacity_breakpoint():
    f = im_capacity_function(AwgnChannel(3.0))
    assert f.breakpoints == (1.0,)
    assert f(0.5) == 0.0 and f(2.0) == pytest.approx(f.ceiling)


def test_avg_ber_function_vectorized():
    fn = avg_ber_function(NakagamiChannel(1.0, 2.0), CBPSK)
    g = np.array([0.5, 5.0, 50.0])
    vals = fn(g)
    assert vals.shape == (3,)
    for gi, v in zip(g, vals):
        assert v == pytest.approx(avg_ber_closed(NakagamiChannel(gi, 2.0), CBPSK), rel=1e-14)
    assert isinstance(fn(3.0), float)


@pytest.mark.parametrize(
    "text,cls",
    [("rayleigh", RayleighChannel), ("nakagami:m=2.5", NakagamiChannel), ("awgn", AwgnChannel)],
)
def test_parse_channel(text, cls):
    ch = parse_channel(text, 3.0)
    assert isinstance(ch, cls) and ch.avg_snr == 3.0


@pytest.mark.parametrize("text", ["rician", "nakagami", "nakagami:m=0.3", "nakagami:k=2", "none"])
def test_parse_channel_rejects(text):
    with pytest.raises(ValueError):
        parse_channel(text, 1.0)


def test_bad_channel_parameters():
    with pytest.raises(DomainError):
        RayleighChannel(0.0)
    with pytest.raises(DomainError):
        NakagamiChannel(1.0, 0.49)
    with pytest.raises(DomainError):
        comp_outage(RayleighChannel(1.0), -1.0)
    with pytest.raises(DomainError):
        ergodic_capacity(RayleighChannel(1.0), bandwidth=0.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 8.0), st.floats(-20.0, 50.0), st.sampled_from(CANONICAL))
def test_nakagami_closed_form_bounded_and_matches_quadrature(m, db, mod):
    ch = NakagamiChannel(db_to_linear(db), m)
    closed = avg_ber_closed(ch, mod)
    assert 0.0 < closed < 0.5
    assert closed == pytest.approx(avg_ber_direct(ch, mod), rel=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 8.0), st.floats(0.01, 100.0), st.floats(1.01, 10.0))
def test_more_snr_means_less_ber(m, g, factor):
    lo = avg_ber_closed(NakagamiChannel(g, m), CBFSK)
    hi = avg_ber_closed(NakagamiChannel(g * factor, m), CBFSK)
    assert hi < lo


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 8.0), st.floats(-30.0, 60.0), st.sampled_from(CANONICAL))
def test_outage_route_matches_closed_form(m, db, mod):
    ch = NakagamiChannel(db_to_linear(db), m)
    assert avg_ber_from_outage(ch, mod) == pytest.approx(avg_ber_closed(ch, mod), rel=1e-8)


def test_comp_outage_values():
    assert float(comp_outage(NakagamiChannel(3.0, 2.5), 0.0)) == 1.0
    assert float(comp_outage(RayleighChannel(1.0), 1.0)) == pytest.approx(math.exp(-1.0), rel=1e-15)
    # Q(2.5, 1.25) from mpmath
    assert float(comp_outage(NakagamiChannel(4.0, 2.5), 2.0)) == pytest.approx(0.77649507112332271, rel=1e-13)


def test_dbpsk_rayleigh_at_nine():
    assert avg_ber_closed(RayleighChannel(9.0), DBPSK) == pytest.approx(0.05, rel=1e-14)


@pytest.mark.parametrize("mod", CANONICAL, ids=str)
@pytest.mark.parametrize("m", [0.5, 1.0, 2.5, 4.0])
@pytest.mark.parametrize("g", [0.1, 1.0, 10.0, 100.0])
def test_three_ber_routes_agree(mod, m, g):
    ch = NakagamiChannel(g, m)
    closed = avg_ber_closed(ch, mod)
    outage = avg_ber_from_outage(ch, mod)
    assert avg_ber_direct(ch, mod) == pytest.approx(closed, rel=1e-6)
    assert outage == pytest.approx(closed, rel=1e-6)
    assert avg_certainty_from_outage(ch, mod) + 2 * outage == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("ch", [RayleighChannel, lambda g: NakagamiChannel(g, 0.5), lambda g: NakagamiChannel(g, 3.0)])
def test_capacity_strictly_increasing(ch):
    caps = [ergodic_capacity(ch(g)) for g in np.geomspace(1e-3, 1e4, 15)]
    assert all(b > a for a, b in zip(caps, caps[1:]))


@pytest.mark.parametrize("m", [0.5, 1.0, 2.5, 4.0])
@pytest.mark.parametrize("s", [0.05, 1.0, 30.0])
def test_im_capacity_matches_upper_gamma(m, s):
    import mpmath as mp

    g = 2.0
    ch = NakagamiChannel(g, m)
    ref = float(mp.gammainc(m, m / (s * g), mp.inf, regularized=True)) * math.pi / math.log(2.0)
    assert im_capacity_neg(ch, s) == pytest.approx(ref, rel=1e-12)
    assert im_capacity_neg(ch, s) * math.log(2.0) / math.pi == pytest.approx(float(comp_outage(ch, 1 / s)), rel=1e-15)
