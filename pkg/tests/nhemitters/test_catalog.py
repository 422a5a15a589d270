import numpy as np
import pytest

from nhemitters import catalog
from nhemitters.errors import ModelError

k = np.linspace(-np.pi, np.pi, 13)


def test_hatano_nelson_dispersion():
    J, kappa = 0.6, 1.0
    h = catalog.built('hatano_nelson', J=J, kappa=kappa).bloch(k)[:, 0, 0]
    assert np.allclose(h, 2 * J * np.cos(k) - 1j * kappa * (np.sin(k) + 1))


def test_unidirectional_dispersion():
    h = catalog.built('hn_unidirectional', kappa=2.0).bloch(k)[:, 0, 0]
    assert np.allclose(h, 2.0 * np.exp(-1j * k) - 2.0j)


def test_alternating_loss_bloch_matrix():
    J, kappa = 1.0, 0.5
    h = catalog.built('alternating_loss', J=J, kappa=kappa).bloch(k)
    assert np.allclose(h[:, 0, 0], -1j * kappa)
    assert np.allclose(h[:, 1, 1], 0)
    assert np.allclose(h[:, 0, 1], J * (1 + np.exp(-1j * k)))
    assert np.allclose(h[:, 1, 0], J * (1 + np.exp(1j * k)))


def test_hermitian_and_wick_chains():
    J = 0.5
    hermitian = catalog.built('hermitian_chain', J=J).bloch(k)[:, 0, 0]
    wick = catalog.built('wick_chain', J=J).bloch(k)[:, 0, 0]
    assert np.allclose(hermitian, -2 * J * (np.cos(k) + 1))
    assert np.allclose(wick, -2j * J * (np.cos(k) + 1))


def test_swap2d_bloch_matrix():
    kappa = 1.0
    kx, ky = np.meshgrid(k, k, indexing='ij')
    h = catalog.built('swap2d', kappa=kappa).bloch(np.stack([kx, ky], -1))
    assert np.allclose(h[..., 0, 0], -2j * kappa)
    assert np.allclose(h[..., 1, 1], -2j * kappa)
    assert np.allclose(h[..., 0, 1], kappa * (1 + np.exp(-1j * (kx + ky))))
    assert np.allclose(h[..., 1, 0],
                       kappa * (np.exp(1j * kx) + np.exp(1j * ky)))


def test_next_nearest_neighbour_dispersion():
    kappa, kappa_prime = 1.0, 2.0
    h = catalog.built('hn_nnn', kappa=kappa,
                      kappa_prime=kappa_prime).bloch(k)[:, 0, 0]
    assert np.allclose(h, kappa * np.exp(-1j * k) +
                       kappa_prime * np.exp(-2j * k) -
                       1j * (kappa + kappa_prime))


def test_lookup():
    lattice = catalog.lookup('hatano_nelson', J=0.15, kappa=1.0)
    assert lattice.parameters == {'J': 0.15, 'kappa': 1.0}
    assert set(catalog.CATALOG) == {
        'hatano_nelson', 'hn_unidirectional', 'alternating_loss',
        'hermitian_chain', 'wick_chain', 'swap2d', 'hn_nnn'}

    with pytest.raises(ModelError):
        catalog.lookup('kagome')
    with pytest.raises(ModelError):
        catalog.lookup('hatano_nelson', J=1.0)
    with pytest.raises(ModelError):
        catalog.lookup('hn_unidirectional', kappa=0.0)
    with pytest.raises(ModelError):
        catalog.lookup('hatano_nelson', J=1.0, kappa=-0.5)
