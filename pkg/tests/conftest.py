import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from skyblur._accel import NUMBA_AVAILABLE

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BACKENDS = ["numpy", pytest.param("numba", marks=pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba missing"))]


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def step_raster():
    """3x5 raster: columns 0-1 are 0, columns 2-4 are 10."""
    img = np.zeros((3, 5))
    img[:, 2:] = 10.0
    return img


# --------------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion in the terminal summary
# --------------------------------------------------------------------------

_criteria = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    name = props["criterion"]
    if report.when == "call" or report.failed:
        if report.failed:
            _criteria[name] = "FAIL"
        elif report.skipped:
            _criteria.setdefault(name, "SKIP")
        else:
            _criteria.setdefault(name, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        terminalreporter.write_line(f"{_criteria[name]:4}  {name}")
