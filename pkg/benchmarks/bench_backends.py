"""Compare the numba-compiled kernels with the pure-numpy fallback.

    python benchmarks/bench_backends.py [--size 1000000] [--repeat 5]

Array timings go through the public functions with ``backend="numba"`` and
``backend="numpy"``; the scalar row times the per-call path the quadrature
loops use.  Compilation happens in a warm-up call outside the timed region.
The max |difference| column checks that both backends give the same numbers.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bercap import specfun
from bercap._accel import HAVE_NUMBA
from bercap.channels import RayleighChannel, avg_ber_function
from bercap.modulation import CBPSK
from bercap.transforms import ber_to_capacity


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(size, rng):
    x = rng.uniform(0.0, 60.0, size)
    s = rng.uniform(0.5, 20.0, size)
    small = size // 10
    z = rng.uniform(0.0, 0.95, small)
    return [
        ("reg_upper_gamma", lambda be: specfun.reg_upper_gamma(s, x, backend=be), size),
        ("reg_lower_gamma", lambda be: specfun.reg_lower_gamma(s, x, backend=be), size),
        ("exp_integral_e1", lambda be: specfun.exp_integral_e1(x + 1e-3, backend=be), size),
        ("dawson_residual", lambda be: specfun.dawson_residual(x, backend=be), size),
        ("gauss_2f1_slot", lambda be: specfun.gauss_2f1_slot(3.5, 4.0, z, backend=be), small),
    ]


def scalar_case(calls):
    xs = np.linspace(0.01, 30.0, calls).tolist()

    def run(be):
        return [specfun.reg_upper_gamma(0.5, v, backend=be) for v in xs]

    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scalar-calls", type=int, default=20_000)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>10}{'numba s':>12}{'numpy s':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, fn, n in cases(args.size, rng):
        t_nb = best_of(lambda: fn("numba"), args.repeat)
        t_np = best_of(lambda: fn("numpy"), args.repeat)
        diff = float(np.max(np.abs(fn("numba") - fn("numpy"))))
        print(f"{name:<22}{n:>10}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{diff:>14.2e}")

    run = scalar_case(args.scalar_calls)
    t_nb = best_of(lambda: run("numba"), args.repeat)
    t_np = best_of(lambda: run("numpy"), args.repeat)
    diff = max(abs(a - b) for a, b in zip(run("numba"), run("numpy")))
    print(f"{'scalar Q(1/2, x)':<22}{args.scalar_calls:>10}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{diff:>14.2e}")

    # end to end: one forward transform, dominated by scalar kernel calls
    ch = RayleighChannel(10.0)
    ber = avg_ber_function(ch, CBPSK)
    t = best_of(lambda: ber_to_capacity(ber, 10.0, CBPSK), args.repeat)
    print(f"\nber_to_capacity (Rayleigh, bpsk, 10 dB), active backend: {t:.4f} s")


if __name__ == "__main__":
    main()
