"""Shared pytest hooks: one PASS/FAIL line per acceptance criterion.

Tests named test_criterion_<NN>_* feed the summary; a criterion fails if
any phase (setup/call/teardown) of its test fails.
"""

import re

_CRITERIA = {
    1: "spectrum exactness",
    2: "simulator correctness",
    3: "gradient oracle",
    4: "spectral confinement",
    5: "Fourier round trip",
    6: "2D experiment ordering and threshold",
    7: "4D experiment ordering and threshold",
    8: "coefficient fidelity",
    9: "classical Fourier least-squares oracle",
    10: "noise degradation and readout sanity",
    11: "bitwise determinism",
}

_PATTERN = re.compile(r"test_criterion_(\d+)")
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running experiment pipelines")


def pytest_runtest_logreport(report):
    match = _PATTERN.search(report.nodeid)
    if match is None:
        return
    num = int(match.group(1))
    if report.when == "call":
        status = "PASS" if report.passed else "FAIL"
    elif report.failed:
        status = "FAIL"
    elif report.when == "setup" and report.skipped:
        status = "SKIP"
    else:
        return
    if _outcomes.get(num) != "FAIL":
        _outcomes[num] = status


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(_outcomes):
        label = _CRITERIA.get(num, "unknown")
        terminalreporter.write_line(f"criterion {num:2d} ({label}): {_outcomes[num]}")
