import numpy as np
import pytest

from orlicz_kit.models.grid import GridFunction
from orlicz_kit.models.schemas import Domain, FractionalParams
from orlicz_kit.services.young import PowerLog


@pytest.fixture
def square():
    """A(t) = t^2"""
    return PowerLog(2.0)


@pytest.fixture
def half_plane():
    """n = 2, s = 1/2, so that n/s = 4"""
    return FractionalParams(n=2, s=0.5)


@pytest.fixture
def chi_unit():
    """Characteristic function of (0, 1) on 64 cells"""
    return GridFunction(domain=Domain.interval(0.0, 1.0), values=np.ones(64))


@pytest.fixture
def tent():
    """Continuous tent on (0, 1), peak 1 at 1/2, with derivative samples"""
    return GridFunction.from_callable(lambda x: 1.0 - np.abs(2.0 * x - 1.0), Domain.interval(0.0, 1.0), 64,
                                      interpolation="linear", derivative=lambda x: -2.0 * np.sign(x - 0.5))


@pytest.fixture
def smooth_bump():
    """sin(pi x)^2 on (0, 1) with derivative samples"""
    return GridFunction.from_callable(lambda x: np.sin(np.pi * x) ** 2, Domain.interval(0.0, 1.0), 32,
                                      interpolation="linear",
                                      derivative=lambda x: 2.0 * np.pi * np.sin(np.pi * x) * np.cos(np.pi * x))


@pytest.fixture
def rng():
    """Seeded generator for randomized tests"""
    return np.random.default_rng(42)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run inside a temporary directory so that logs and reports stay there"""
    monkeypatch.chdir(tmp_path)
    return tmp_path
