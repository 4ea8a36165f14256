import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(config.acceptance_lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request, capsys):
    """``criterion(k, ok, detail)`` prints and records one pass/fail line for criterion ``k``."""
    seen = []

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.acceptance_lines.append(line)
        seen.append(number)
        with capsys.disabled():
            print("\n" + line)
        return ok

    yield record
    if not seen:
        number = int(request.node.name.split("_")[2])
        request.config.acceptance_lines.append(f"criterion {number:>2}: FAIL  raised before reporting")
