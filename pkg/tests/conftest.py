import math

import numpy as np
import pytest

from thermoflow import _pykernels, kernels
from thermoflow.core import BlockDiagonalState, EnergySpectrum, ThermalContext

try:
    from thermoflow import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels, "cython": _ckernels}
KERNEL_NAMES = ("curve_gap", "flattest_sorted", "compositions")

_ACCEPTANCE = {}


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run a test once per kernel implementation."""
    impl = BACKENDS[request.param]
    if impl is None:
        pytest.skip("compiled kernels not built")
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def six_level():
    spectrum = EnergySpectrum.trivial(6)
    ctx = ThermalContext(spectrum, 1.0)
    return BlockDiagonalState(np.array([0.3, 0.25, 0.22, 0.1, 0.07, 0.06]), spectrum), ctx


@pytest.fixture
def three_level():
    # thermal state {1/13, 4/13, 8/13}
    spectrum = EnergySpectrum((0.0, -math.log(4.0), -math.log(8.0)))
    ctx = ThermalContext(spectrum, 1.0)
    return BlockDiagonalState(np.array([0.1, 0.35, 0.55]), spectrum), ctx


@pytest.fixture
def record_acceptance():
    def record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
