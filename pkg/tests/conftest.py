import math
from pathlib import Path

import pytest

from nrpnoise.params import LossBudget, preset_fig2

ROOT = Path(__file__).resolve().parents[1]
W100 = 2 * math.pi * 100.0


@pytest.fixture
def fig2():
    return preset_fig2()


@pytest.fixture
def fig2_lossless():
    return preset_fig2().lossless()


@pytest.fixture
def config_dir():
    return ROOT / "configs"


def lossless_with_r(r):
    return preset_fig2().lossless().with_squeezing(r)


IDEAL = LossBudget()


ACCEPTANCE = {}


def record(number, title, ok, detail):
    ACCEPTANCE[number] = (title, bool(ok), detail)
    print(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
