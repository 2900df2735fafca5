import numpy as np
import pytest

from cgo.amplitude import ThetaProfile
from core.cache import OperatorCache
from utils.presets import build_chart


@pytest.fixture
def cache():
    return OperatorCache(max_factor_mb=64)


@pytest.fixture
def flat_chart():
    return build_chart('flat-cylinder', (9, 9, 5))


@pytest.fixture
def chart():
    return build_chart('flat-cylinder', (17, 17, 9))


@pytest.fixture
def warped_chart():
    return build_chart('exp-warp', (17, 17, 9))


@pytest.fixture
def bump():
    return ThetaProfile(kind='bump', center=0.0, half_width=0.4, arc=(-np.pi / 6, np.pi / 6))


def write_ini(path, text):
    path.write_text(text)
    return str(path)
