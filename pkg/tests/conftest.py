import numpy as np
import pytest

from fexor.device import MLC, SLC, preset


@pytest.fixture
def slc():
    return preset("sim-default", SLC)


@pytest.fixture
def mlc():
    return preset("sim-default", MLC)


@pytest.fixture
def slc0(slc):
    """SLC profile with variation switched off."""
    return slc.with_(sigma_vth=0.0)


@pytest.fixture
def mlc0(mlc):
    return mlc.with_(sigma_vth=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request, capsys):
    """Record a criterion outcome and echo it as a single line."""
    lines = request.config._acceptance_lines

    def record(status: str, label: str, detail: str):
        line = f"[{status}] {label}: {detail}"
        lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
