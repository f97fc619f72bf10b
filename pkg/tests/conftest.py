"""
Спільні фікстури: еталонні середовища (1, 1, 4, 2), k на промені 45°,
невеликі сітки, щоб тести блоків працювали за секунди
"""
import numpy as np
import pytest

from telab.models.media import validate_media
from telab.models.mode import ModeId, Polarization
from telab.models.spectral import ray_point, validate_k
from telab.services.modeop.grid import build_grid
from telab.services.modeop.operator import build_mode_operator


@pytest.fixture(scope="session")
def media():
    return validate_media(1.0, 1.0, 4.0, 2.0)


@pytest.fixture(scope="session")
def te1():
    return ModeId(degree=1, polarization=Polarization.TE)


@pytest.fixture(scope="session")
def tm1():
    return ModeId(degree=1, polarization=Polarization.TM)


@pytest.fixture(scope="session")
def spectral():
    """k = 10 e^{i pi/4}, gamma = 1"""
    return validate_k(ray_point(10.0, 45.0), 1.0)


@pytest.fixture(scope="session")
def grid():
    return build_grid(1.0, 32)


@pytest.fixture(scope="session")
def te1_operator(media, te1, spectral, grid):
    return build_mode_operator(media, te1, spectral, grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


REFERENCE_CONFIG = """\
# еталонні середовища
eps = 1
mu = 1
eps_hat = 4
mu_hat = 2
"""


@pytest.fixture
def config_text():
    """Текст конфігурації з еталонними середовищами; команду та решту дописує тест"""

    def make(command: str, **extra) -> str:
        lines = [f"command = {command}", REFERENCE_CONFIG]
        lines += [f"{key} = {value}" for key, value in extra.items()]
        return "\n".join(lines) + "\n"

    return make
