import os

import pytest
from hypothesis import settings

from thermocasimir.constants import HBAR_C
from thermocasimir.dielectric import Drude, Plasma

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GOLD_WP = HBAR_C / 22.0


@pytest.fixture
def gold_drude():
    return Drude(omega_p=GOLD_WP, gamma=0.035)


@pytest.fixture
def gold_plasma():
    return Plasma(omega_p=GOLD_WP)


@pytest.fixture
def ideal_metal():
    return Plasma(omega_p=1e6)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
