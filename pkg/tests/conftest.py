import pytest

from extsrc.spectral_curve import make_curve


@pytest.fixture(scope="session")
def curve():
    return make_curve(2.0)
