import pytest

from nhemitters import catalog


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ('NH_EMITTERS_JOBS', 'NH_EMITTERS_LOG_LEVEL',
                 'NH_EMITTERS_OUTPUT'):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def hatano_nelson():
    return catalog.built('hatano_nelson', J=0.15, kappa=1.0)


@pytest.fixture
def unidirectional():
    return catalog.built('hn_unidirectional', kappa=1.0)


@pytest.fixture
def alternating():
    return catalog.built('alternating_loss', J=1.0, kappa=1.0)
