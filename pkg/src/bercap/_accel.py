"""Backend selection for the compiled kernels.

Hot loops (incomplete gamma, Dawson, E1, the 2F1 series, array sweeps) are
written once as scalar Python and compiled with ``numba.njit`` when numba is
importable.  A vectorized pure-numpy implementation lives next to them.
Public functions dispatch on ``USE_NUMBA``, which is on by default and can be
switched off with ``BERCAP_DISABLE_NUMBA=1`` before import.
"""

from __future__ import annotations

import os

ENV_FLAG = "BERCAP_DISABLE_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False


def _flag_set(value: str | None) -> bool:
    return (value or "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _flag_set(os.environ.get(ENV_FLAG))


def jit(fn):
    """``numba.njit(cache=True)`` if numba is present, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def py_func(fn):
    """Undecorated Python function behind a jitted kernel."""
    return getattr(fn, "py_func", fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
