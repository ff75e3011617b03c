from __future__ import annotations

import pytest

from bercap._accel import HAVE_NUMBA

BACKENDS = ["numpy", "numba"] if HAVE_NUMBA else ["numpy"]
_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def acceptance(request):
    """``record(number, ok, detail)`` for the acceptance summary."""
    log = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, ok, detail):
        log[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if log:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(log):
            terminalreporter.write_line(log[number])
