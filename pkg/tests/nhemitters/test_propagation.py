import numpy as np
import pytest

from nhemitters import catalog
from nhemitters.dynamics import evolve_dense, photon_field_resolvent
from nhemitters.errors import PreconditionError
from nhemitters.model import EmitterSet
from nhemitters.propagation import free_propagation_hn, gbz_radius, \
    running_wave_decomposition, running_wave_hn


def test_free_propagation_starts_localized():
    x = np.arange(-3, 4)
    assert np.allclose(free_propagation_hn(x, 0.0, 1.0, 1.0),
                       [0, 0, 0, 1, 0, 0, 0])
    assert np.allclose(free_propagation_hn(x, 0.0, 0.5, 1.0),
                       [0, 0, 0, 1, 0, 0, 0])


@pytest.mark.slow
@pytest.mark.timeout(120)
@pytest.mark.parametrize('J', [2.5, 0.5])
def test_free_propagation_matches_the_lattice(J):
    extent, origin = 200, 100
    model = catalog.built('hatano_nelson', J=J, kappa=1.0)
    offsets = np.arange(-30, 31)
    sites = [((origin + x,), 0) for x in offsets]
    times = np.array([0.0, 1.0, 2.5, 5.0])
    trajectory = evolve_dense(model, EmitterSet(), extent,
                              initial='photon:{}'.format(origin),
                              tgrid=times, sites=sites)
    for index, t in enumerate(times):
        expected = free_propagation_hn(offsets, t, J, 1.0)
        observed = np.abs(trajectory.photon_field[index]) ** 2
        assert np.allclose(observed, expected, rtol=1e-6, atol=1e-14)


def test_gbz_radius():
    assert gbz_radius(1.0, 1.0) == pytest.approx(np.sqrt(1 / 3))
    assert gbz_radius(0.5, 1.0) == 0.0
    with pytest.raises(PreconditionError):
        gbz_radius(-0.5, 1.0)


def test_running_wave_is_contour_independent():
    arguments = (10, 5.0, 1.0, 1.0, 0j, 0.5)
    inner = running_wave_decomposition(*arguments, contour_radius=0.85)
    outer = running_wave_decomposition(*arguments, contour_radius=0.98)
    assert len(inner.poles) == 1
    assert len(outer.poles) == 0
    assert inner.poles[0].rate > 0
    assert inner.total == pytest.approx(outer.total, abs=1e-8)
    assert running_wave_hn(*arguments, contour_radius=0.85) == inner.total


def test_running_wave_radius_checks():
    with pytest.raises(PreconditionError):
        running_wave_decomposition(3, 1.0, 1.0, 1.0, 0j, 0.5,
                                   contour_radius=0.3)
    with pytest.raises(PreconditionError):
        running_wave_decomposition(3, 1.0, 1.0, 1.0, 0j, 0.5,
                                   contour_radius=1.5)
    with pytest.raises(PreconditionError):
        running_wave_decomposition(3, 1.0, 0.5, 1.0, 0j, 0.5)


@pytest.mark.parametrize('J, g', [(0.3, 0.5), (2.5, 2.0)])
def test_running_wave_matches_the_lattice_on_both_sides(J, g):
    extent, origin = 200, 100
    model = catalog.built('hatano_nelson', J=J, kappa=1.0)
    emitters = EmitterSet.single(cell=origin, g=g)
    offsets = [-5, -3, -1, 0, 1, 3]
    times = np.array([1.0, 2.0, 3.0])
    trajectory = evolve_dense(model, emitters, extent, tgrid=times,
                              sites=[((origin + x,), 0) for x in offsets])
    for index, t in enumerate(times):
        expected = trajectory.photon_field[index]
        observed = [running_wave_hn(x, t, J, 1.0, 0j, g) for x in offsets]
        assert np.allclose(observed, expected, rtol=0, atol=1e-8)


def test_running_wave_is_one_sided_on_a_unidirectional_chain():
    for x in (-1, -4):
        wave = running_wave_decomposition(x, 1.0, 0.5, 1.0, 0j, 0.3,
                                          contour_radius=0.5)
        assert abs(wave.total) < 1e-12
    assert abs(running_wave_hn(2, 1.0, 0.5, 1.0, 0j, 0.3,
                               contour_radius=0.5)) > 1e-3


def test_upstream_wave_is_contour_independent():
    arguments = (-4, 5.0, 1.0, 1.0, 0j, 0.5)
    inner = running_wave_decomposition(*arguments, contour_radius=0.85)
    outer = running_wave_decomposition(*arguments, contour_radius=0.98)
    assert inner.total == pytest.approx(outer.total, abs=1e-8)


@pytest.mark.slow
@pytest.mark.timeout(300)
def test_running_wave_matches_the_resolvent_photon_field():
    J, kappa, g = 0.3, 1.0, 0.5
    model = catalog.built('hatano_nelson', J=J, kappa=kappa)
    offsets = [-3, -1, 0, 2]
    times = np.array([0.0, 1.0, 2.0])
    trajectory = photon_field_resolvent(model, EmitterSet.single(g=g), times,
                                        [((x,), 0) for x in offsets])
    for index, t in enumerate(times[1:], start=1):
        observed = [running_wave_hn(x, t, J, kappa, 0j, g) for x in offsets]
        assert np.allclose(trajectory.photon_field[index], observed,
                           rtol=0, atol=1e-4)
