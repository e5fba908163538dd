import pytest

from dispersive_jcm.model import ModelParams


BASELINE = dict(omega_a=1.0, omega_b=1.1, Omega0=5.0, g_a=0.05, g_b=0.05)


def baseline(**overrides):
    kw = dict(BASELINE, cutoff_a=6, cutoff_b=6)
    kw.update(overrides)
    return ModelParams(**kw)


@pytest.fixture
def params():
    return baseline()


@pytest.fixture
def space(params):
    return params.space
