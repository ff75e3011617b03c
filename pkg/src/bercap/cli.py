"""Command-line front end.

Subcommands emit one row per SNR grid point as CSV or JSON:

    bercap tabulate --channel nakagami:m=2 --mod bpsk --snr-db -5:30:5
    bercap ber2cap  --channel rayleigh --mod dbpsk --snr-db 0
    bercap ber2cap  --curve measured.csv --mod bpsk --snr-db 0:20:10
    bercap cap2ber  --channel nakagami:m=2.5 --mod bpsk --snr-db 10
    bercap mc       --channel rayleigh --mod dbpsk --snr-db 9.542 --samples 1000000
    bercap validate

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .channels import (
    avg_ber_closed,
    avg_ber_function,
    comp_outage,
    db_to_linear,
    ergodic_capacity,
    im_capacity_function,
    parse_channel,
)
from .empirical import DEFAULT_GAMMA_DB_LIMIT, empirical_capacity, interpolate, load_curve
from .exceptions import (
    BerRangeError,
    ConvergenceError,
    CurveError,
    DomainError,
    InconsistentInputError,
    QuadratureError,
    UnsupportedChannelError,
    UnsupportedModulationError,
)
from .modulation import parse_modulation
from .montecarlo import McConfig, estimate_avg_ber, estimate_capacity
from .transforms import TransformConfig, ber_to_capacity, ber_to_capacity_gcq, capacity_to_ber

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4

NUMERIC_ERRORS = (ArithmeticError, BerRangeError, InconsistentInputError)


class UsageError(Exception):
    pass


class NumericFailure(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a single value, in dB."""
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad --snr-db {text!r}: expected <db> or <start>:<stop>:<step>") from None
    if not all(math.isfinite(v) for v in values):
        raise UsageError(f"bad --snr-db {text!r}: values must be finite")
    if len(values) == 1:
        return values
    if len(values) != 3:
        raise UsageError(f"bad --snr-db {text!r}: expected <start>:<stop>:<step>")
    start, stop, step = values
    if not step > 0:
        raise UsageError(f"bad --snr-db {text!r}: step must be > 0")
    if stop < start:
        raise UsageError(f"bad --snr-db {text!r}: empty grid (stop < start)")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # rounding keeps 0.1-type steps from printing as 0.30000000000000004
    return [round(start + i * step, 10) for i in range(count)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(rows: list[dict], fmt: str, meta: dict) -> str:
    if fmt == "json":
        doc = dict(meta)
        doc["rows"] = [{k: _json_value(v) for k, v in row.items()} for row in rows]
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        columns = list(rows[0])
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jobs(args) -> int:
    return args.jobs if args.jobs else min(4, os.cpu_count() or 1)


def _over_grid(args, fn) -> list[dict]:
    """Evaluate ``fn(snr_db)`` for every grid point, concurrently, rows in grid order."""
    grid = parse_grid(args.snr_db)

    def run(db):
        try:
            return fn(db)
        except NUMERIC_ERRORS as exc:
            raise NumericFailure(f"at snr_db={db:g}: {exc}") from exc

    if len(grid) == 1 or _jobs(args) == 1:
        return [run(db) for db in grid]
    with ThreadPoolExecutor(max_workers=_jobs(args)) as pool:
        return list(pool.map(run, grid))


def _channel(args, avg_snr):
    if not args.channel:
        raise UsageError("--channel is required")
    try:
        return parse_channel(args.channel, avg_snr)
    except ValueError as exc:
        raise UsageError(f"--channel: {exc}") from None


def _mod(args):
    if not args.mod:
        raise UsageError("--mod is required")
    try:
        return parse_modulation(args.mod)
    except ValueError as exc:
        raise UsageError(f"--mod: {exc}") from None


def _transform_cfg(args) -> TransformConfig:
    try:
        return TransformConfig(
            bandwidth=args.bandwidth_hz,
            rel_tol=args.rel_tol,
            gcq_nodes=args.gcq if args.gcq else TransformConfig.gcq_nodes,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_tabulate(args) -> list[dict]:
    mod = _mod(args)
    _channel(args, 1.0)

    def row(db):
        ch = _channel(args, db_to_linear(db))
        return {
            "snr_db": db,
            "avg_ber": avg_ber_closed(ch, mod),
            "ergodic_capacity": ergodic_capacity(ch, args.bandwidth_hz, rel_tol=args.rel_tol),
            "comp_outage": float(comp_outage(ch, ch.avg_snr)),
        }

    return _over_grid(args, row)


def cmd_ber2cap(args) -> list[dict]:
    if bool(args.curve) == bool(args.channel):
        raise UsageError("ber2cap needs exactly one BER source: --curve <csv> or --channel <spec>")
    mod = _mod(args)
    cfg = _transform_cfg(args)
    if args.curve:
        try:
            curve = load_curve(args.curve)
        except (OSError, CurveError) as exc:
            raise UsageError(f"--curve: {exc}") from None
        ber = interpolate(curve)
    else:
        family = _channel(args, 1.0)
        try:
            ber = avg_ber_function(family, mod)
        except UnsupportedChannelError as exc:
            raise UsageError(str(exc)) from None

    def row(db):
        g = db_to_linear(db)
        if args.gcq:
            res = ber_to_capacity_gcq(ber, g, mod, cfg)
        elif args.curve:
            res = empirical_capacity(curve, g, mod, cfg, gamma_db_limit=args.gamma_db_limit)
        else:
            res = ber_to_capacity(ber, g, mod, cfg)
        return {
            "snr_db": db,
            "capacity": res.value,
            "error_estimate": res.error_estimate,
            "kernel_mass_coverage": res.kernel_mass_coverage,
        }

    return _over_grid(args, row)


def cmd_cap2ber(args) -> list[dict]:
    if args.curve:
        raise UsageError(
            "cap2ber needs the capacity as an analytic function of SNR (a closed-form --channel); "
            "recovering Im C(-x) from sampled capacity values is an ill-posed analytic continuation "
            "and is not supported"
        )
    mod = _mod(args)
    cfg = _transform_cfg(args)
    family = _channel(args, 1.0)
    imcap = im_capacity_function(family, cfg.bandwidth)

    def row(db):
        g = db_to_linear(db)
        res = capacity_to_ber(imcap, g, mod, cfg)
        return {"snr_db": db, "avg_ber": res.value, "error_estimate": res.error_estimate}

    return _over_grid(args, row)


def cmd_mc(args) -> list[dict]:
    mod = _mod(args)
    _channel(args, 1.0)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")

    def row(db):
        ch = _channel(args, db_to_linear(db))
        cfg = McConfig(args.samples, args.seed, ch, mod)
        ber = estimate_avg_ber(cfg)
        cap = estimate_capacity(cfg, args.bandwidth_hz)
        return {
            "snr_db": db,
            "ber_mean": ber.mean,
            "ber_std_error": ber.std_error,
            "capacity_mean": cap.mean,
            "capacity_std_error": cap.std_error,
            "n": ber.n,
            "seed": ber.seed,
            "generator": ber.generator,
        }

    return _over_grid(args, row)


def cmd_validate(args) -> tuple[list[dict], bool]:
    from .validation import run_suites

    try:
        results = run_suites(args.suite, kernel_perturbation=args.kernel_perturbation)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [r.as_dict() for r in results]
    return rows, all(r.passed for r in results)


def _add_common(p, *, transform=False, mc=False, curve=False):
    p.add_argument("--channel", help="rayleigh | nakagami:m=<v> | awgn")
    p.add_argument("--mod", help="bpsk | bfsk | dbpsk | ncbfsk | a=<v>,b=<v>")
    p.add_argument("--snr-db", required=True, help="average SNR grid in dB: <db> or <start>:<stop>:<step>")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--bandwidth-hz", type=float, default=1.0, help="W; 1 gives bits/s/Hz (default)")
    p.add_argument("--rel-tol", type=float, default=1e-9, help="relative quadrature tolerance")
    p.add_argument("--jobs", type=int, default=0, help="worker threads for the grid (default min(4, cpus))")
    if transform:
        p.add_argument("--gcq", type=int, default=0, metavar="N", help="use the N-node Gauss-Chebyshev sum")
    if curve:
        p.add_argument("--curve", help="measured BER curve, CSV with header snr_db,ber")
        p.add_argument(
            "--gamma-db-limit",
            type=float,
            default=DEFAULT_GAMMA_DB_LIMIT,
            help=f"u-window half-width in dB for curve input (default {DEFAULT_GAMMA_DB_LIMIT:g})",
        )
    if mc:
        p.add_argument("--samples", type=int, default=10**6)
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bercap", description="Average BER <-> ergodic capacity over fading channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tabulate", help="closed-form BER, capacity and outage over an SNR grid")
    _add_common(p)
    p.set_defaults(handler=cmd_tabulate)

    p = sub.add_parser("ber2cap", help="capacity from average BER (closed-form channel or measured curve)")
    _add_common(p, transform=True, curve=True)
    p.set_defaults(handler=cmd_ber2cap)

    p = sub.add_parser("cap2ber", help="average BER from the capacity of a closed-form channel")
    _add_common(p, transform=True)
    p.add_argument("--curve", help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_cap2ber)

    p = sub.add_parser("mc", help="Monte Carlo estimates of average BER and capacity")
    _add_common(p, mc=True)
    p.set_defaults(handler=cmd_mc)

    p = sub.add_parser("validate", help="run the self-check suites")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out")
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    p.add_argument("--kernel-perturbation", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(handler=None)
    return parser


def _glue_negative_grid(argv):
    # "--snr-db -5:30:5" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for token in it:
        if token == "--snr-db":
            value = next(it, None)
            if value is not None and value.startswith("-") and value[1:2].replace(".", "0").isdigit():
                out.append(f"--snr-db={value}")
                continue
            out.append(token)
            if value is not None:
                out.append(value)
            continue
        out.append(token)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_grid(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "validate":
            rows, ok = cmd_validate(args)
            _emit(render(rows, args.format, {"command": "validate", "passed": ok}), args.out)
            return EXIT_OK if ok else EXIT_VALIDATION
        rows = args.handler(args)
        meta = {"command": args.command}
        for key in ("channel", "mod", "bandwidth_hz", "seed", "samples", "curve"):
            if getattr(args, key, None) is not None:
                meta[key] = getattr(args, key)
        _emit(render(rows, args.format, meta), args.out)
        return EXIT_OK
    except UsageError as exc:
        print(f"bercap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericFailure, QuadratureError, ConvergenceError) as exc:
        print(f"bercap {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UnsupportedChannelError, UnsupportedModulationError, DomainError, CurveError) as exc:
        print(f"bercap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
