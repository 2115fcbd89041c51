import os

import pytest

from ktp.config import AP_EPS, resolve_preset

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def case1_spec():
    return resolve_preset("riemann1-case1")


@pytest.fixture(scope="session")
def case1_sweep(case1_spec):
    """Kinetic runs at the three sweep values of eps against the LF Euler reference."""
    import time

    from ktp.diagnostics import ap_sweep

    t0 = time.perf_counter()
    workers = int(os.environ.get("KTP_THREADS", str(min(3, os.cpu_count() or 1))))
    reports, results, ref = ap_sweep(case1_spec.sim, AP_EPS, workers=workers)
    return reports, results, ref, time.perf_counter() - t0
