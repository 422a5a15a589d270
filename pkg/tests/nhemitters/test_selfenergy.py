import numpy as np
import pytest

from nhemitters import catalog
from nhemitters.errors import BranchAmbiguityError, PreconditionError, \
    ResolventSingularityError
from nhemitters.model import EmitterSet, EmitterSpec
from nhemitters.selfenergy import ClosedFormSigma, QuadratureSigma, Sheet, \
    _roots, cauchy_riemann_residual, elliptic_k, evaluate, \
    maximal_winding_vanishing_check, self_energy_evaluator, sigma_2d_closed, \
    sigma_hn_closed, sigma_hn_unidirectional, sigma_nnn_closed, \
    sigma_pt_closed, sigma_wick, sigma_wick_chain_closed, winding_number

POINTS = (0.3 + 0.5j, -1.2 + 1.0j, 2.0 + 0.25j)


def _emitters(*sites):
    return EmitterSet([EmitterSpec(cell, {s: 1.0}) for cell, s in sites])


@pytest.mark.parametrize('name, params, sites', [
    ('hatano_nelson', {'J': 0.6, 'kappa': 1.0}, [(0, 0), (3, 0)]),
    ('hn_unidirectional', {'kappa': 1.0}, [(0, 0), (2, 0)]),
    ('alternating_loss', {'J': 1.0, 'kappa': 1.0}, [(0, 0), (2, 1)]),
    ('wick_chain', {'J': 1.0}, [(0, 0), (1, 0)]),
])
def test_closed_form_matches_quadrature(name, params, sites):
    model = catalog.built(name, **params)
    emitters = _emitters(*sites)
    closed = self_energy_evaluator(model, emitters)
    assert isinstance(closed, ClosedFormSigma)
    quadrature = QuadratureSigma(model, emitters)
    for z in POINTS:
        assert np.allclose(closed(z), quadrature(z), rtol=0, atol=1e-8)


def test_two_dimensional_closed_form():
    model = catalog.built('swap2d', kappa=1.0)
    emitters = EmitterSet.single(cell=(0, 0))
    quadrature = QuadratureSigma(model, emitters)
    for z in POINTS:
        assert sigma_2d_closed(z, 1.0, 1.0) == \
            pytest.approx(quadrature(z)[0, 0], abs=1e-6)


def test_unidirectional_sheets():
    z = 0.5 + 1.0j
    assert sigma_hn_unidirectional(z, 0, 1.0) == pytest.approx(1 / (z + 1j))
    assert sigma_hn_unidirectional(z, -1, 1.0) == 0
    assert sigma_hn_unidirectional(z, 0, 1.0, Sheet.SECOND) == 0
    assert sigma_hn_unidirectional(-0.5j, 0, 1.0) == 0


def test_wick_relation_to_hermitian_chain():
    hermitian = catalog.built('hermitian_chain', J=1.0)
    quadrature = QuadratureSigma(hermitian, EmitterSet.single())
    for z in POINTS:
        rotated = sigma_wick(z, lambda w: quadrature(w)[0, 0])
        assert rotated == pytest.approx(sigma_wick_chain_closed(z, 1.0),
                                        abs=1e-8)


def test_elliptic_k():
    assert elliptic_k(0) == pytest.approx(np.pi / 2)
    assert elliptic_k(0.5) == pytest.approx(1.8540746773013719)


def test_evaluate_reports_method():
    model = catalog.built('hatano_nelson', J=0.6, kappa=1.0)
    closed = evaluate(model, EmitterSet.single(), 0.3 + 0.5j)
    assert closed.method == 'closed_form'
    assert closed.detail == 'hatano_nelson'
    assert closed.value.shape == (1, 1)

    numeric = evaluate(model, EmitterSet.single(), 0.3 + 0.5j,
                       method='quadrature', grid_n=1024)
    assert numeric.method == 'quadrature'
    assert numeric.detail == 'grid_n=1024'
    assert np.allclose(closed.value, numeric.value, atol=1e-8)

    lossy = catalog.built('alternating_loss', J=1.0, kappa=1.0)
    both = EmitterSet([EmitterSpec((0,), {0: 1.0, 1: 0.5})])
    assert evaluate(lossy, both, 1j).method == 'quadrature'


def test_evaluator_errors():
    model = catalog.built('hatano_nelson', J=0.15, kappa=1.0)
    with pytest.raises(ValueError):
        self_energy_evaluator(model, EmitterSet.single(), 'series')
    with pytest.raises(PreconditionError):
        self_energy_evaluator(catalog.built('hermitian_chain', J=1.0),
                              EmitterSet.single(), 'closed')

    quadrature = QuadratureSigma(model, EmitterSet.single())
    with pytest.raises(ResolventSingularityError) as error:
        quadrature(0j)
    assert error.value.k is not None
    with pytest.raises(PreconditionError):
        quadrature(1j, Sheet.SECOND)


def test_closed_form_is_analytic_off_the_spectrum():
    model = catalog.built('hatano_nelson', J=0.6, kappa=1.0)
    sigma = self_energy_evaluator(model, EmitterSet.single())
    assert cauchy_riemann_residual(sigma, 0.3 + 0.5j) < 1e-5


def test_winding_numbers(hatano_nelson):
    assert winding_number(hatano_nelson, -1j).index == -1
    assert winding_number(hatano_nelson, 1j).index == 0
    nnn = catalog.built('hn_nnn', kappa=1.0, kappa_prime=2.0)
    assert winding_number(nnn, -3j).index == -2

    with pytest.raises(ResolventSingularityError):
        winding_number(hatano_nelson, 0j)
    with pytest.raises(PreconditionError):
        winding_number(catalog.built('swap2d', kappa=1.0), 1j)


def test_maximal_winding_vanishing(hatano_nelson):
    emitters = EmitterSet([EmitterSpec((x,), {0: 0.5}) for x in (0, 5)])
    report = maximal_winding_vanishing_check(hatano_nelson, emitters, -1j)
    assert report
    assert report.index == -1
    assert report.ranges == (1, 1)
    assert set(report.elements) == {(0, 0), (1, 0), (1, 1)}

    outside = maximal_winding_vanishing_check(hatano_nelson, emitters, 1j)
    assert outside.holds
    assert outside.index == 0
    assert outside.elements == {}


@pytest.mark.parametrize('name, params, sites, points', [
    ('hatano_nelson', {'J': 0.6, 'kappa': 1.0}, [(0, 0), (3, 0)],
     [-1j, 0.3 - 0.8j, -2.5j, 1.5 - 1j]),
    ('hn_unidirectional', {'kappa': 1.0}, [(0, 0), (2, 0)],
     [-0.7j, 0.5 - 1.2j, -2.5j, 1.5 - 1j]),
    ('alternating_loss', {'J': 1.0, 'kappa': 1.0}, [(0, 0), (2, 1)],
     [0.5 - 0.2j, -1.0 - 0.9j, -2j, 0.3 - 1.5j]),
    ('wick_chain', {'J': 1.0}, [(0, 0), (1, 0)],
     [0.5 - 1j, -0.3 - 3j, -5j, 1 - 0.5j]),
])
def test_closed_form_matches_quadrature_below_the_axis(name, params, sites,
                                                       points):
    model = catalog.built(name, **params)
    emitters = _emitters(*sites)
    closed = self_energy_evaluator(model, emitters)
    quadrature = QuadratureSigma(model, emitters)
    for z in points:
        assert quadrature.distance(z)[0] > 0.2
        assert np.allclose(closed(z), quadrature(z), rtol=0, atol=1e-8)


def test_hatano_nelson_closed_form():
    model = catalog.built('hatano_nelson', J=0.15, kappa=1.0)
    quadrature = QuadratureSigma(model, EmitterSet.single())
    assert sigma_hn_closed(1.0, 0, 0.15, 1.0) == \
        pytest.approx(quadrature(1.0)[0, 0], abs=1e-10)
    for x in (0, 1, 3):
        assert sigma_hn_closed(-1j, x, 0.15, 1.0) == 0
    assert abs(sigma_hn_closed(-1j, -1, 0.15, 1.0)) > 0.1
    with pytest.raises(PreconditionError):
        sigma_hn_closed(1j, 0, 0.5, 1.0)
    with pytest.raises(BranchAmbiguityError):
        sigma_hn_closed(0j, 0, 0.15, 1.0)


@pytest.mark.parametrize('a, b, c', [
    (1.0 / 2 - 0.15, 0.3 + 1.5j, -1.0 / 2 - 0.15),
    (-1.0, -2.0 + (0.4 - 0.7j) * (0.4 + 0.3j), -1.0),
    (1j, -1.0 + 2j, 1j),
])
def test_root_product(a, b, c):
    y_plus, y_minus, _ = _roots(a, b, c)
    assert y_plus * y_minus == pytest.approx(c / a, abs=1e-12)


def test_unidirectional_closed_form_values():
    assert sigma_hn_unidirectional(1j, 0, 1.0) == pytest.approx(-0.5j)
    assert sigma_hn_unidirectional(-0.5j, 0, 1.0) == 0
    assert sigma_hn_unidirectional(-0.5j, -1, 1.0) == pytest.approx(-1.0)
    with pytest.raises(BranchAmbiguityError):
        sigma_hn_unidirectional(0j, 0, 1.0)


def test_alternating_loss_closed_form():
    model = catalog.built('alternating_loss', J=1.0, kappa=1.0)
    for sublattice, pair in ((0, 'AA'), (1, 'BB')):
        emitters = EmitterSet.single(sublattice=sublattice)
        quadrature = QuadratureSigma(model, emitters)
        for z in (0.3 + 0.5j, 0.5 - 0.2j, -2j):
            assert sigma_pt_closed(z, 0, pair, 1.0, 1.0) == \
                pytest.approx(quadrature(z)[0, 0], abs=1e-8)

    assert sigma_pt_closed(0j, 0, 'AA', 1.0, 1.0) == 0
    with pytest.raises(ValueError):
        sigma_pt_closed(1j, 0, 'AC', 1.0, 1.0)

    # the B-site self-energy diverges as |z|^{-1/2} at the branch point
    near = abs(sigma_pt_closed(1e-6j, 0, 'BB', 1.0, 1.0))
    nearer = abs(sigma_pt_closed(1e-8j, 0, 'BB', 1.0, 1.0))
    assert near * 1e-3 == pytest.approx(0.5, rel=1e-2)
    assert nearer / near == pytest.approx(10.0, rel=1e-2)


def test_next_nearest_neighbour_closed_form():
    model = catalog.built('hn_nnn', kappa=1.0, kappa_prime=2.0)
    quadrature = QuadratureSigma(model, EmitterSet.single())
    for z in (0.5 + 1j, -3j, -8j, 4 - 3j):
        assert sigma_nnn_closed(z, 1.0, 2.0) == \
            pytest.approx(quadrature(z)[0, 0], abs=1e-8)
    with pytest.raises(PreconditionError):
        sigma_nnn_closed(1j, 1.0, 2.0, x=-1)


def test_second_sheet_continues_across_the_spectrum():
    epsilon = 1e-7
    # the Wick chain spectrum is the segment [−4iJ, 0]
    left = sigma_wick_chain_closed(-epsilon - 2j, 1.0, sheet=Sheet.SECOND)
    right = sigma_wick_chain_closed(epsilon - 2j, 1.0)
    assert left == pytest.approx(right, abs=1e-5)
    assert sigma_wick_chain_closed(1 - 1j, 1.0, sheet=Sheet.SECOND) == \
        pytest.approx(-sigma_wick_chain_closed(1 - 1j, 1.0))

    # the alternating-loss spectrum contains the line Im z = −κ/2
    below = sigma_pt_closed(1 - 0.5j - 1j * epsilon, 0, 'AA', 1.0, 1.0,
                            sheet=Sheet.SECOND)
    above = sigma_pt_closed(1 - 0.5j + 1j * epsilon, 0, 'AA', 1.0, 1.0)
    assert below == pytest.approx(above, abs=1e-5)
    assert abs(below - sigma_pt_closed(1 - 0.5j - 1j * epsilon, 0, 'AA',
                                       1.0, 1.0)) > 0.1
