"""Shared fixtures and the acceptance-criteria summary hook.

Acceptance tests append one line each to ACCEPTANCE_LINES; the
terminal-summary hook replays them at the end of the run so the
PASS/FAIL verdicts survive pytest's output capture.
"""

import pytest

from equidist import alpha_from_specs

# 40-digit decimal literals; frac_from_real rounds them half-up onto the
# 2**-128 grid, so these tokens pin the raws exactly.
GOLDEN_TOKEN = "0.61803398874989484820458683436563811772"
SQRT2M1_TOKEN = "0.41421356237309504880168872420969807857"

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def golden1():
    return alpha_from_specs([GOLDEN_TOKEN])


@pytest.fixture(scope="session")
def golden_sqrt2():
    return alpha_from_specs([GOLDEN_TOKEN, SQRT2M1_TOKEN])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
