import math

import numpy as np
import pytest
from hypothesis import settings

from svapprox import direction_grid
from svapprox.set_functions import PeriodicGrid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


@pytest.fixture
def grid2():
    return direction_grid(2, 32)


@pytest.fixture
def xgrid():
    return PeriodicGrid(128)


def polygon_h(points, grid):
    pts = np.asarray(points, dtype=float)
    return np.max(pts @ grid.directions.T, axis=0)


TWO_PI = 2 * math.pi
