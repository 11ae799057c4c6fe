import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from moderf.function_space import default_x_max, erf_grid, ramp_grid  # noqa: E402


@pytest.fixture(scope="session")
def erf_h():
    return erf_grid()


@pytest.fixture(scope="session")
def ramp_h():
    return ramp_grid()


@pytest.fixture(scope="session")
def wide_x_max():
    return default_x_max(0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if rep.when == "call" and "criterion" in props:
                lines.append((props["criterion"], outcome.upper(), props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome, detail in sorted(lines):
            terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}  {detail}")
