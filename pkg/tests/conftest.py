import math

import numpy as np
import pytest

from wakerom.flowsim import FlowConfig, run
from wakerom.rom import RomParameters
from wakerom.signals import TimeSeries

# Published spectral parameters used as synthetic fixtures.
FIXED = dict(cd_mean=1.376, a1L=0.905, a1D=0.0016, a2D=0.077, psi1_deg=256.0, psi2_deg=335.2)
CASE_B = dict(cd_mean=1.445, a1L=0.902, a1D=0.16, a2D=0.123, psi1_deg=223.0, psi2_deg=352.9)
SYNTH_OMEGA = 2 * math.pi * 0.2


def rom_params(case: dict, omega: float = SYNTH_OMEGA, **kw) -> RomParameters:
    return RomParameters.from_phases(omega=omega, **case, **kw)


def tone(amplitude, omega, phase_deg=0.0, dt=0.01, duration=50.0, t0=0.0, offset=0.0):
    t = t0 + dt * np.arange(int(round(duration / dt)) + 1)
    return TimeSeries(t0, dt, offset + amplitude * np.cos(omega * (t - t0) + math.radians(phase_deg)))


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])


_FLOW_CACHE: dict = {}


def _flow(reynolds: float):
    if reynolds not in _FLOW_CACHE:
        _FLOW_CACHE[reynolds] = run(FlowConfig(reynolds=reynolds))
    return _FLOW_CACHE[reynolds]


@pytest.fixture(scope="session")
def flow_re300():
    """Default-grid fixed-cylinder run at Re 300 (a few minutes)."""
    return _flow(300.0)


@pytest.fixture(scope="session")
def flow_re500():
    """Default-grid fixed-cylinder run at Re 500 (a few minutes)."""
    return _flow(500.0)
