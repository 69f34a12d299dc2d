import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from wedgediff import Profile, derive  # noqa: E402


@pytest.fixture
def ref_scene():
    return derive(math.pi / 2, math.pi / 4, 1.0)


@pytest.fixture
def hp_scene():
    return derive(0.0, math.pi, 1.0)


@pytest.fixture
def generic_scene():
    return derive(1.0, 0.3, 1.0)


@pytest.fixture
def ramp():
    return Profile.ramp(0.5)


@pytest.fixture
def heaviside():
    return Profile.heaviside()


_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record and print one PASS/FAIL line; shown again in the terminal summary."""
    def _rec(tag: str, passed: bool, text: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] {tag}: {text}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed
    return _rec


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
