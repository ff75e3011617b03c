"""Capacity from a sampled average-BER curve.

A measured curve (average SNR in dB, average BER) is turned into a BER
function of linear average SNR and pushed through the forward transform on a
symmetric window ``u in [10^(-L/10), 10^(L/10)]``.

Inside the sample span the curve is interpolated with a monotone piecewise
cubic (PCHIP) in (dB, log10 BER).  Outside it:

* low side: the certainty ``1 - 2 BER`` continues as a power law of SNR
  (straight line in (dB, log10 certainty)), slope matched to the interpolant
  at the first knot and clamped by the policy, so BER -> 1/2 as SNR -> 0.
  Every fading channel has certainty ~ c * snr^b at low SNR, so this is the
  shape the true curve has there.
* high side: log10 BER continues on the secant slope of the last two
  samples, limited to [-high_slope_cap, 0] decades per dB.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .exceptions import CurveError
from .kernels import KernelContext, kernel_Z
from .modulation import BinaryModulation
from .quadrature import integrate_log_axis
from .transforms import TransformConfig, TransformResult, ber_to_capacity

__all__ = [
    "BerCurve",
    "ExtrapolationPolicy",
    "load_curve",
    "save_curve",
    "interpolate",
    "empirical_capacity",
    "DEFAULT_GAMMA_DB_LIMIT",
]

DEFAULT_GAMMA_DB_LIMIT = 100.0
MONOTONE_TOL = 1e-12
COVERAGE_DB = 20.0
# share of the |Z| * certainty mass that may come from extrapolated SNRs before warning
EXTRAPOLATED_SHARE_WARN = 0.01
_TINY_BER = np.finfo(float).tiny
HEADER = ("snr_db", "ber")


@dataclass(frozen=True)
class BerCurve:
    """Sampled average BER, ``snr_db`` strictly increasing, ``ber`` in (0, 1/2]."""

    snr_db: tuple[float, ...]
    ber: tuple[float, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        x = np.asarray(self.snr_db, dtype=float)
        y = np.asarray(self.ber, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise CurveError("snr_db and ber must be 1-d sequences of equal length")
        if x.size < 2:
            raise CurveError(f"a BER curve needs at least 2 samples, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise CurveError("snr_db values must be finite")
        bad = np.flatnonzero(~((y > 0) & (y <= 0.5)))
        if bad.size:
            i = int(bad[0])
            raise CurveError(f"sample {i} (snr_db={x[i]:g}): ber={y[i]!r} outside (0, 1/2]")
        step = np.diff(x)
        if np.any(step <= 0):
            i = int(np.flatnonzero(step <= 0)[0]) + 1
            kind = "duplicate" if step[i - 1] == 0 else "decreasing"
            raise CurveError(f"sample {i} (snr_db={x[i]:g}): {kind} snr_db; values must be strictly increasing")
        notes = list(self.warnings)
        rises = np.flatnonzero(np.diff(y) > MONOTONE_TOL)
        if rises.size:
            i = int(rises[0]) + 1
            msg = f"BER rises with SNR at {rises.size} sample(s), first at snr_db={x[i]:g}"
            if msg not in notes:
                notes.append(msg)
        object.__setattr__(self, "snr_db", tuple(float(v) for v in x))
        object.__setattr__(self, "ber", tuple(float(v) for v in y))
        object.__setattr__(self, "warnings", tuple(notes))

    @classmethod
    def from_samples(cls, snr_db, ber) -> "BerCurve":
        """Build from unsorted samples (sorted here; duplicates still rejected)."""
        x = np.asarray(snr_db, dtype=float)
        y = np.asarray(ber, dtype=float)
        order = np.argsort(x, kind="stable")
        return cls(tuple(x[order]), tuple(y[order]))

    def __len__(self):
        return len(self.snr_db)

    @property
    def span_db(self) -> tuple[float, float]:
        return self.snr_db[0], self.snr_db[-1]


@dataclass(frozen=True)
class ExtrapolationPolicy:
    """Slope limits for the two extrapolated tails.

    ``low_slope_min``/``low_slope_max``: allowed growth of log10 certainty per
    dB below the span (0.05 per dB is certainty ~ snr^(1/2), 0.1 is ~ snr).
    ``high_slope_cap``: steepest allowed BER decay above the span, decades per dB.
    """

    low_slope_min: float = 0.02
    low_slope_max: float = 0.2
    high_slope_cap: float = 1.0

    def __post_init__(self):
        if not (0 < self.low_slope_min <= self.low_slope_max < math.inf):
            raise ValueError("need 0 < low_slope_min <= low_slope_max")
        if not (0 < self.high_slope_cap < math.inf):
            raise ValueError("high_slope_cap must be positive")


def _parse_rows(lines, source):
    rows = []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            if tuple(f.lower() for f in fields) != HEADER:
                raise CurveError(f"{source}:{lineno}: expected header 'snr_db,ber', got {line!r}")
            header_seen = True
            continue
        if len(fields) != 2:
            raise CurveError(f"{source}:{lineno}: expected 2 fields, got {len(fields)}")
        try:
            snr, ber = float(fields[0]), float(fields[1])
        except ValueError:
            raise CurveError(f"{source}:{lineno}: cannot parse {line!r} as numbers") from None
        if not math.isfinite(snr):
            raise CurveError(f"{source}:{lineno}: snr_db must be finite")
        if not (0 < ber <= 0.5):
            raise CurveError(f"{source}:{lineno}: ber={fields[1]} outside (0, 1/2]")
        rows.append((snr, ber, lineno))
    if not header_seen:
        raise CurveError(f"{source}: empty file, expected header 'snr_db,ber'")
    rows.sort(key=lambda r: r[0])
    for prev, cur in zip(rows, rows[1:]):
        if prev[0] == cur[0]:
            raise CurveError(f"{source}:{cur[2]}: duplicate snr_db {cur[0]:g} (also on line {prev[2]})")
    if len(rows) < 2:
        raise CurveError(f"{source}: a BER curve needs at least 2 samples, got {len(rows)}")
    return BerCurve(tuple(r[0] for r in rows), tuple(r[1] for r in rows))


def load_curve(path) -> BerCurve:
    """Read a ``snr_db,ber`` CSV file (LF or CRLF line endings)."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return _parse_rows(io.StringIO(text, newline=None), str(path))


def save_curve(curve: BerCurve, path) -> None:
    """Write ``curve`` as CSV with LF endings and 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for snr, ber in zip(curve.snr_db, curve.ber):
            writer.writerow((f"{snr:.17g}", f"{ber:.17g}"))


class _CurveFunction:
    """Average BER as a function of linear average SNR, built from a curve."""

    def __init__(self, curve: BerCurve, policy: ExtrapolationPolicy):
        self.curve = curve
        self.policy = policy
        x = np.asarray(curve.snr_db)
        e = np.asarray(curve.ber)
        self._x = x
        self._e = e
        self._spline = PchipInterpolator(x, np.log10(e), extrapolate=False)
        # plain-float copies for the scalar path used inside quadrature
        self._knots = [float(v) for v in x]
        self._samples = [float(v) for v in e]
        self._coef = [tuple(float(c) for c in col) for col in self._spline.c.T]

        # low side: log10 certainty linear in dB
        e0 = e[0]
        self._phi0 = 1.0 - 2.0 * e0
        if self._phi0 > 0:
            dlog10e = float(self._spline.derivative()(x[0]))
            slope = -2.0 * e0 * dlog10e / self._phi0
            self._low_slope = min(max(slope, policy.low_slope_min), policy.low_slope_max)
        else:
            self._low_slope = policy.low_slope_min

        # high side: log10 BER linear in dB
        secant = (math.log10(e[-1]) - math.log10(e[-2])) / (x[-1] - x[-2])
        self._high_slope = min(max(secant, -policy.high_slope_cap), 0.0)

    @property
    def low_slope(self) -> float:
        return self._low_slope

    @property
    def high_slope(self) -> float:
        return self._high_slope

    def ber_db(self, snr_db):
        d = np.atleast_1d(np.asarray(snr_db, dtype=float))
        out = np.empty(d.shape)
        lo, hi = self._x[0], self._x[-1]
        below = d < lo
        above = d > hi
        inside = ~(below | above)
        if inside.any():
            di = d[inside]
            vals = 10.0 ** self._spline(di)
            # reproduce the samples exactly at the knots
            k = np.clip(np.searchsorted(self._x, di), 0, self._x.size - 1)
            hit = self._x[k] == di
            vals[hit] = self._e[k[hit]]
            out[inside] = vals
        if below.any():
            with np.errstate(under="ignore"):
                phi = self._phi0 * 10.0 ** (self._low_slope * (d[below] - lo))
            out[below] = 0.5 * (1.0 - phi)
        if above.any():
            with np.errstate(under="ignore"):
                out[above] = self._e[-1] * 10.0 ** (self._high_slope * (d[above] - hi))
        np.clip(out, _TINY_BER, 0.5, out=out)
        return out if np.ndim(snr_db) else float(out[0])

    def _scalar(self, d):
        knots = self._knots
        lo, hi = knots[0], knots[-1]
        if d < lo:
            phi = self._phi0 * 10.0 ** (self._low_slope * (d - lo))
            return 0.5 * (1.0 - phi)
        if d > hi:
            value = self._samples[-1] * 10.0 ** (self._high_slope * (d - hi))
            return max(value, _TINY_BER)
        i = bisect.bisect_right(knots, d) - 1
        if knots[i] == d:
            return self._samples[i]
        c3, c2, c1, c0 = self._coef[i]
        t = d - knots[i]
        return min(10.0 ** (((c3 * t + c2) * t + c1) * t + c0), 0.5)

    def __call__(self, avg_snr):
        if isinstance(avg_snr, float):
            if avg_snr > 0:
                return self._scalar(10.0 * math.log10(avg_snr))
            if avg_snr == 0:
                return 0.5
        g = np.asarray(avg_snr, dtype=float)
        with np.errstate(divide="ignore"):
            d = 10.0 * np.log10(g)
        return self.ber_db(d if g.ndim else float(d))

    def in_span(self, avg_snr):
        lo, hi = self._x[0], self._x[-1]
        with np.errstate(divide="ignore"):
            d = 10.0 * np.log10(np.asarray(avg_snr, dtype=float))
        return (d >= lo) & (d <= hi)


def interpolate(curve: BerCurve, policy: ExtrapolationPolicy | None = None):
    """BER function of linear average SNR, continuous on (0, inf), values in (0, 1/2]."""
    return _CurveFunction(curve, policy or ExtrapolationPolicy())


def _mass(f, lo, hi, rel_tol, abs_tol=0.0):
    if hi <= lo:
        return 0.0
    return integrate_log_axis(f, lo, hi, rel_tol=rel_tol, abs_tol=abs_tol, what="kernel mass").value


def empirical_capacity(
    curve: BerCurve,
    avg_snr: float,
    mod: BinaryModulation,
    cfg: TransformConfig | None = None,
    gamma_db_limit: float = DEFAULT_GAMMA_DB_LIMIT,
    policy: ExtrapolationPolicy | None = None,
) -> TransformResult:
    """Capacity at ``avg_snr`` from a sampled BER curve.

    The forward transform runs on ``u in [10^(-L/10), 10^(L/10)]`` with
    ``L = gamma_db_limit``.  ``kernel_mass_coverage`` is the share of
    ``int |Z(u)| (1 - 2 E(u avg_snr)) du`` falling inside that window.  A
    warning is raised when probed SNRs leave the sample span by more than
    20 dB and the extrapolated part carries more than 1% of that mass.
    """
    if not gamma_db_limit > 0:
        raise ValueError(f"gamma_db_limit must be positive, got {gamma_db_limit}")
    cfg = cfg or TransformConfig()
    u_min = 10.0 ** (-gamma_db_limit / 10.0)
    u_max = 10.0 ** (gamma_db_limit / 10.0)
    window_cfg = replace(cfg, u_min=u_min, u_max=u_max, auto_truncate=False)
    ber = interpolate(curve, policy)
    g = float(avg_snr)
    res = ber_to_capacity(ber, g, mod, window_cfg)

    ctx = KernelContext(mod, cfg.bandwidth)
    mass_tol = max(cfg.rel_tol, 1e-7)

    def weight(u):
        return abs(kernel_Z(ctx, u)) * (1.0 - 2.0 * float(ber(u * g)))

    def extrapolated_weight(u):
        return 0.0 if ber.in_span(u * g) else weight(u)

    inside = _mass(weight, u_min, u_max, mass_tol)
    # the weight is below (W/ln2) (a g u)^b / (b Gamma(b+1)) near 0 and below
    # (W/ln2)/(a u^2) at large u, so these outer limits leave < 1e-12 unaccounted
    outer_lo = min(u_min, 1e-24 / (mod.a * g))
    outer_hi = max(u_max, 1e12 / mod.a)
    tail_tol = mass_tol * inside
    total = inside + _mass(weight, outer_lo, u_min, mass_tol, tail_tol) + _mass(weight, u_max, outer_hi, mass_tol, tail_tol)
    coverage = inside / total if total > 0 else 1.0

    span_lo, span_hi = curve.span_db
    notes = list(res.warnings) + list(curve.warnings)
    probed_lo_db = 10.0 * math.log10(res.probed_min)
    probed_hi_db = 10.0 * math.log10(res.probed_max)
    far_out = probed_lo_db < span_lo - COVERAGE_DB or probed_hi_db > span_hi + COVERAGE_DB
    if far_out and inside > 0:
        pts = [10.0 ** (span_lo / 10.0) / g, 10.0 ** (span_hi / 10.0) / g]
        extra = integrate_log_axis(
            extrapolated_weight, u_min, u_max, rel_tol=mass_tol, points=pts, what="extrapolated mass"
        ).value
        share = extra / inside
        if share > EXTRAPOLATED_SHARE_WARN:
            msg = (
                f"probed SNRs span {probed_lo_db:.1f}..{probed_hi_db:.1f} dB against a curve covering "
                f"{span_lo:g}..{span_hi:g} dB; extrapolated SNRs carry {100 * share:.1f}% of the integrand"
            )
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            notes.append(msg)
    return replace(res, kernel_mass_coverage=coverage, warnings=tuple(notes))
