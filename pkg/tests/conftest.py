import numpy as np
import pytest

from predictability.core import CategoricalSequence

_acceptance_lines = []


@pytest.fixture
def criterion():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def record(label, ok, detail=""):
        _acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def seq(codes, k=None):
    return CategoricalSequence.from_codes(codes, k)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
