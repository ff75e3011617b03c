"""Fading channel models and the averaged quantities built on them.

A channel is described by its average SNR and the distribution of the
normalized instantaneous SNR.  Each model supplies the density, the
complementary outage probability ``Pr(snr > threshold)`` and its complement
(the outage CDF, kept separately so neither loses precision near 0 or 1).
Everything else here (average BER three ways, average certainty, ergodic
capacity, the imaginary part of capacity on the negative axis) is derived
from those primitives.
"""

from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace

import numpy as np

from . import specfun
from .exceptions import DomainError, UnsupportedChannelError
from .modulation import BinaryModulation, certainty_pdf, instantaneous_ber
from .quadrature import integrate_half_line
from .sampling import standard_gamma
from .transforms import ImCapacity

__all__ = [
    "ChannelModel",
    "RayleighChannel",
    "NakagamiChannel",
    "AwgnChannel",
    "parse_channel",
    "db_to_linear",
    "snr_pdf",
    "comp_outage",
    "avg_ber_closed",
    "avg_ber_direct",
    "avg_ber_from_outage",
    "avg_certainty_from_outage",
    "ergodic_capacity",
    "im_capacity_neg",
    "avg_ber_function",
    "im_capacity_function",
]

LN2 = math.log(2.0)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0) if np.ndim(db) else 10.0 ** (float(db) / 10.0)


def _nonnegative(x, what):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"{what} must be >= 0")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


class ChannelModel(ABC):
    """Abstract fading channel with average SNR ``avg_snr`` (linear)."""

    avg_snr: float

    def _validate_avg_snr(self):
        if not (self.avg_snr > 0 and math.isfinite(self.avg_snr)):
            raise DomainError(f"avg_snr must be positive and finite, got {self.avg_snr}")

    def with_avg_snr(self, avg_snr: float) -> "ChannelModel":
        """Same fading family at another average SNR."""
        return replace(self, avg_snr=float(avg_snr))

    @abstractmethod
    def pdf(self, snr):
        """SNR density at ``snr`` (array in, array out)."""

    @abstractmethod
    def comp_outage(self, threshold):
        """Pr(snr > threshold)."""

    def outage(self, threshold):
        """Pr(snr <= threshold).  Override when 1 - comp_outage cancels."""
        return 1.0 - self.comp_outage(threshold)

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` instantaneous SNRs."""

    def closed_form_ber(self, mod: BinaryModulation, avg_snr):
        """Average BER of ``mod`` over this family at ``avg_snr`` (vectorized)."""
        raise UnsupportedChannelError(f"no closed-form average BER for {type(self).__name__}")

    def quadrature_points(self) -> tuple[float, ...]:
        """SNR values where integrands over the density change scale."""
        return (self.avg_snr,)

    @property
    def outage_discontinuities(self) -> tuple[float, ...]:
        """Thresholds at which ``comp_outage`` jumps."""
        return ()

    def has_density(self) -> bool:
        return True


@dataclass(frozen=True)
class RayleighChannel(ChannelModel):
    """Rayleigh fading: exponentially distributed SNR."""

    avg_snr: float

    def __post_init__(self):
        self._validate_avg_snr()

    def pdf(self, snr):
        g = np.asarray(snr, dtype=float)
        return np.exp(-g / self.avg_snr) / self.avg_snr

    def comp_outage(self, threshold):
        return np.exp(-np.asarray(threshold, dtype=float) / self.avg_snr)

    def outage(self, threshold):
        return -np.expm1(-np.asarray(threshold, dtype=float) / self.avg_snr)

    def sample(self, rng, size):
        return standard_gamma(rng, 1.0, size) * self.avg_snr

    def closed_form_ber(self, mod, avg_snr):
        # 1/2 - 1/2 (x/(1+x))^b written as -expm1(...)/2 to keep precision at high SNR
        x = mod.a * np.asarray(avg_snr, dtype=float)
        return -0.5 * np.expm1(-mod.b * np.log1p(1.0 / x))

    def __str__(self):
        return "rayleigh"


@dataclass(frozen=True)
class NakagamiChannel(ChannelModel):
    """Nakagami-m fading: Gamma(shape m, mean avg_snr) distributed SNR."""

    avg_snr: float
    m: float

    def __post_init__(self):
        self._validate_avg_snr()
        if not (self.m >= 0.5 and math.isfinite(self.m)):
            raise DomainError(f"Nakagami fading figure must satisfy m >= 1/2, got {self.m}")

    def pdf(self, snr):
        g = np.asarray(snr, dtype=float)
        m, gbar = self.m, self.avg_snr
        with np.errstate(divide="ignore", invalid="ignore"):
            log_g = np.log(g)
            power = (m - 1.0) * log_g if m != 1.0 else np.zeros_like(g)
            log_pdf = m * math.log(m / gbar) + power - m * g / gbar - math.lgamma(m)
        return np.exp(log_pdf)

    def comp_outage(self, threshold):
        x = self.m * np.asarray(threshold, dtype=float) / self.avg_snr
        return np.asarray(specfun.reg_upper_gamma(self.m, x))

    def outage(self, threshold):
        x = self.m * np.asarray(threshold, dtype=float) / self.avg_snr
        return np.asarray(specfun.reg_lower_gamma(self.m, x))

    def sample(self, rng, size):
        return standard_gamma(rng, self.m, size) * (self.avg_snr / self.m)

    def closed_form_ber(self, mod, avg_snr):
        # z = m/(m + a g), w = 1 - z.  For z <= 1/2 the 2F1(1, m+b; m+1; z) form is
        # summed directly.  Nearer z = 1 that series needs ~1/(1-z) terms, so the
        # 1-z connection formula is used instead:
        #   E = 1/2 - Gamma(m+b) / (2 Gamma(b+1) Gamma(m)) w^b z^m 2F1(1, m+b; b+1; w)
        g = np.asarray(avg_snr, dtype=float)
        flat = np.atleast_1d(g)
        m, a, b = self.m, mod.a, mod.b
        ag = a * flat
        with np.errstate(divide="ignore"):
            log_z = np.log(m / (m + ag))
            log_w = np.log(ag / (m + ag))
        z = np.exp(log_z)
        w = ag / (m + ag)
        near = z <= 0.5
        far = ~near
        out = np.empty(flat.shape)
        if near.any():
            head = math.lgamma(m + b) - math.log(2.0) - math.lgamma(b) - math.lgamma(m + 1.0)
            hyp = specfun.gauss_2f1_slot(m + b, m + 1.0, z[near])
            out[near] = np.exp(head + b * log_w[near] + m * log_z[near]) * hyp
        if far.any():
            head = math.lgamma(m + b) - math.log(2.0) - math.lgamma(b + 1.0) - math.lgamma(m)
            hyp = specfun.gauss_2f1_slot(m + b, b + 1.0, w[far])
            with np.errstate(under="ignore"):
                out[far] = 0.5 - np.exp(head + b * log_w[far] + m * log_z[far]) * hyp
        return out.reshape(g.shape)

    def quadrature_points(self):
        spread = 5.0 * self.avg_snr / math.sqrt(self.m)
        pts = {self.avg_snr, self.avg_snr + spread}
        if self.avg_snr > spread:
            pts.add(self.avg_snr - spread)
        return tuple(sorted(pts))

    def __str__(self):
        return f"nakagami:m={self.m:g}"


@dataclass(frozen=True)
class AwgnChannel(ChannelModel):
    """No fading: the instantaneous SNR always equals ``avg_snr``.

    Has no density; quantities are evaluated at the single SNR value.  This is
    the deterministic channel used to check that the transforms collapse to
    the Shannon formula and the conditional BER.
    """

    avg_snr: float

    def __post_init__(self):
        self._validate_avg_snr()

    def pdf(self, snr):
        raise UnsupportedChannelError("AWGN channel has a point-mass SNR distribution, no density")

    def comp_outage(self, threshold):
        return np.where(np.asarray(threshold, dtype=float) < self.avg_snr, 1.0, 0.0)

    def outage(self, threshold):
        return np.where(np.asarray(threshold, dtype=float) < self.avg_snr, 0.0, 1.0)

    def sample(self, rng, size):
        return np.full(size, self.avg_snr)

    def closed_form_ber(self, mod, avg_snr):
        return np.asarray(instantaneous_ber(mod, np.asarray(avg_snr, dtype=float)))

    @property
    def outage_discontinuities(self):
        return (self.avg_snr,)

    def has_density(self):
        return False

    def __str__(self):
        return "awgn"


_CHANNEL_RE = re.compile(r"^(?P<kind>[a-z]+)(?::(?P<params>.*))?$")


def parse_channel(text: str, avg_snr: float) -> ChannelModel:
    """Build a channel from ``rayleigh``, ``nakagami:m=<v>`` or ``awgn``."""
    spec = text.strip().lower()
    match = _CHANNEL_RE.match(spec)
    if match is None:
        raise ValueError(f"malformed channel spec {text!r} at position 0")
    kind, params = match.group("kind"), match.group("params")
    if kind in ("rayleigh", "awgn"):
        if params:
            raise ValueError(f"channel {kind!r} takes no parameters (position {match.start('params')})")
        return RayleighChannel(avg_snr) if kind == "rayleigh" else AwgnChannel(avg_snr)
    if kind == "nakagami":
        if not params:
            raise ValueError(f"nakagami channel needs 'm=<v>' at position {len(spec)}")
        key, _, value = params.partition("=")
        if key.strip() != "m" or not value:
            raise ValueError(f"expected 'm=<v>' in {text!r} at position {match.start('params')}")
        try:
            m = float(value)
        except ValueError:
            raise ValueError(f"bad fading figure {value!r} in {text!r} at position {spec.index('=') + 1}") from None
        return NakagamiChannel(avg_snr, m)
    raise ValueError(f"unknown channel {kind!r} in {text!r} at position 0; expected rayleigh, nakagami:m=<v> or awgn")


# -- public operations ------------------------------------------------------


def snr_pdf(ch: ChannelModel, snr):
    """Density of the instantaneous SNR."""
    _nonnegative(snr, "snr")
    return _out(ch.pdf(snr), snr)


def comp_outage(ch: ChannelModel, threshold):
    """Complementary outage probability Pr(snr > threshold)."""
    _nonnegative(threshold, "threshold")
    return _out(ch.comp_outage(threshold), threshold)


def avg_ber_closed(ch: ChannelModel, mod: BinaryModulation) -> float:
    """Closed-form average BER (Rayleigh, Nakagami-m, AWGN)."""
    return float(ch.closed_form_ber(mod, ch.avg_snr))


def avg_ber_direct(ch: ChannelModel, mod: BinaryModulation, *, rel_tol: float = 1e-9) -> float:
    """Average BER by integrating the conditional BER against the SNR density."""
    if not ch.has_density():
        return avg_ber_closed(ch, mod)

    def f(g):
        return float(instantaneous_ber(mod, g)) * float(ch.pdf(g))

    # at high average SNR the BER mass sits where a g ~ 1, far below the channel's own scale
    pts = (*ch.quadrature_points(), 0.1 / mod.a, 1.0 / mod.a, 10.0 / mod.a, 50.0 / mod.a)
    return integrate_half_line(f, breakpoints=pts, rel_tol=rel_tol, what="average BER").value


def _outage_weighted(ch, mod, fn, rel_tol, what):
    # int_0^inf fn(phi) p_phi(phi) dphi, p_phi the Gamma(b, rate a) certainty density
    def f(phi):
        if phi <= 0.0:
            return 0.0
        return float(fn(phi)) * certainty_pdf(mod, phi)

    # the Gamma(b, rate a) weight lives on a scale of 1/a whatever the channel's scale
    own = [(mod.b + k) / mod.a for k in (0.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0)]
    pts = (0.01 * mod.b / mod.a, *own, *ch.quadrature_points(), *ch.outage_discontinuities)
    return integrate_half_line(f, breakpoints=pts, rel_tol=rel_tol, what=what).value


def avg_ber_from_outage(ch: ChannelModel, mod: BinaryModulation, *, rel_tol: float = 1e-9) -> float:
    """Average BER from the outage statistics alone.

    Uses ``E = 1/2 - 1/2 int Pr(snr > phi) p_phi(phi) dphi`` in the equivalent
    form ``1/2 int Pr(snr <= phi) p_phi(phi) dphi`` (the certainty density has
    unit mass), so small BERs do not come out of a cancellation.
    """
    return 0.5 * _outage_weighted(ch, mod, ch.outage, rel_tol, "average BER from outage")


def avg_certainty_from_outage(ch: ChannelModel, mod: BinaryModulation, *, rel_tol: float = 1e-9) -> float:
    """Average certainty ``int Pr(snr > phi) p_phi(phi) dphi`` (= 1 - 2 E_avg)."""
    return _outage_weighted(ch, mod, ch.comp_outage, rel_tol, "average certainty")


def ergodic_capacity(ch: ChannelModel, bandwidth: float = 1.0, *, rel_tol: float = 1e-9) -> float:
    """Ergodic capacity ``W E[log2(1 + snr)]`` in bits/s."""
    if not bandwidth > 0:
        raise DomainError("bandwidth must be positive")
    if isinstance(ch, RayleighChannel):
        # (W / ln 2) exp(1/g) E1(1/g), with the scaled E1 to stay finite for any g
        return bandwidth / LN2 * specfun.exp_integral_e1_scaled(1.0 / ch.avg_snr)
    if isinstance(ch, AwgnChannel):
        return bandwidth * math.log2(1.0 + ch.avg_snr)

    def f(g):
        return math.log1p(g) * float(ch.pdf(g))

    res = integrate_half_line(f, breakpoints=ch.quadrature_points(), rel_tol=rel_tol, what="ergodic capacity")
    return bandwidth / LN2 * res.value


def im_capacity_neg(ch: ChannelModel, s, bandwidth: float = 1.0):
    """Imaginary part of the ergodic capacity at average SNR ``-s * avg_snr``.

    On the principal branch ``Im log(1 - s snr) = pi`` exactly when
    ``s snr > 1``, so averaging gives ``(pi W / ln 2) Pr(snr > 1/s)``.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("im_capacity_neg requires s > 0")
    with np.errstate(divide="ignore"):
        value = math.pi * bandwidth / LN2 * ch.comp_outage(1.0 / arr)
    return _out(value, s)


def avg_ber_function(ch: ChannelModel, mod: BinaryModulation):
    """Closed-form average BER of this channel family as a function of avg SNR."""
    ch.closed_form_ber(mod, ch.avg_snr)  # fail early for unsupported channels

    def ber(avg_snr):
        return _out(ch.closed_form_ber(mod, avg_snr), avg_snr)

    ber.__name__ = f"avg_ber[{ch}, {mod}]"
    return ber


def im_capacity_function(ch: ChannelModel, bandwidth: float = 1.0) -> ImCapacity:
    """``x -> Im C_avg(-x)`` for this channel's family, x being the average SNR.

    Family members differ only by scale, so ``Pr(snr_x > 1) = Pr(snr > avg/x)``
    with ``snr`` drawn from ``ch`` itself.
    """
    ceiling = math.pi * bandwidth / LN2
    gbar = ch.avg_snr

    def thresholds(x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return gbar / arr

    return ImCapacity(
        lambda x: _out(ceiling * ch.comp_outage(thresholds(x)), x),
        bandwidth=bandwidth,
        deficit=lambda x: _out(ceiling * ch.outage(thresholds(x)), x),
        breakpoints=tuple(gbar / p for p in ch.outage_discontinuities),
    )
