import math

import numpy as np
import pytest
from scipy.stats import levy_stable

CRITERION_LINES = {}


def stable_pdf_oracle(alpha, rho, x):
    """Independent double precision density from scipy (S1 parameterization)."""
    a, r = float(alpha), float(rho)
    t = math.pi * a * (r - 0.5)
    scale = math.cos(t) ** (1 / a)
    skew = math.tan(t) / math.tan(math.pi * a / 2)
    levy_stable.parameterization = "S1"
    return levy_stable.pdf(np.asarray(x, float), a, skew, loc=0.0, scale=scale)


@pytest.fixture
def oracle():
    return stable_pdf_oracle


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERION_LINES):
        terminalreporter.write_line(CRITERION_LINES[n])
