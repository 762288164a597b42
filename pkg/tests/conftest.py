import numpy as np
import pytest

from sharray import ArchitectureConfig, make_comb, make_square

F_HM = 1e9
F_RF = 28e9


@pytest.fixture
def comb5():
    return make_comb(range(-2, 3), total_power=1.0, f_hm=F_HM)


@pytest.fixture
def square4():
    return make_square(0.25, f_hm=F_HM)


def random_waveform(rng, m_max=4, f_hm=F_HM):
    from sharray import HarmonicWaveform
    c = rng.normal(size=2 * m_max + 1) + 1j * rng.normal(size=2 * m_max + 1)
    return HarmonicWaveform(f_hm=f_hm, coeffs=c)


def make_cfg(kind, n, waveform, **kw):
    kw.setdefault("f_rf", F_RF)
    return ArchitectureConfig(kind=kind, n_channels=n, waveform=waveform, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = {}


def record_criterion(number, name, passed, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {name}: {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
