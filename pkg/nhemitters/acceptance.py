"""
The acceptance suite: numbered checks tagged with the modules they exercise.
Each check returns a JSON-ready detail dict whose ``passed`` key decides the
outcome.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np

from nhemitters import catalog
from nhemitters.analysis import bic_scaling, fit_power_law
from nhemitters.asymptotics import alternating_loss_law, \
    asymptotic_trajectory, exact_unidirectional_poles, spa_poles, \
    unidirectional_continued_sigma, wick_chain_law
from nhemitters.boundstates import Sector, bic_construct, \
    two_emitter_trapped_state
from nhemitters.dynamics import emitter_amplitudes_resolvent, \
    evolve_finite, group_velocity
from nhemitters.errors import ConfigurationError, NumericalError
from nhemitters.model import Basis, BoundaryCondition, EmitterSet, \
    EmitterSpec, real_space_hamiltonian
from nhemitters.propagation import free_propagation_hn
from nhemitters.scenarios import diffusion, hidden_pinning, \
    overlap_checks, overlap_curves, pinning_distance, winding_regions
from nhemitters.selfenergy import QuadratureSigma, \
    maximal_winding_vanishing_check, self_energy_evaluator
from nhemitters.trajectory import InitialState

logger = logging.getLogger(__name__)

PERIODIC, OPEN = BoundaryCondition.PERIODIC, BoundaryCondition.OPEN


@dataclass(frozen=True)
class Check:
    number: int
    name: str
    tags: Tuple[str, ...]
    function: Callable[[], Dict]


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    tags: Tuple[str, ...]
    passed: bool
    elapsed: float
    details: Dict = field(default_factory=dict)

    def to_dict(self):
        return {'number': self.number, 'name': self.name,
                'tags': list(self.tags), 'passed': self.passed,
                'elapsed': round(self.elapsed, 3), 'details': self.details}


CHECKS = {}


def check(number, name, *tags):
    def register(function):
        CHECKS[number] = Check(number, name, tags, function)
        return function
    return register


def _log_times(t_max=1000.0, samples=121):
    return np.concatenate([[0.0], np.logspace(0, np.log10(t_max), samples)])


def _decay(model, emitters, extent, times, initial='emitter:0'):
    return evolve_finite(model, emitters, extent, PERIODIC, initial, times)


def _law_report(t, p, law, window=(100.0, 1000.0), exponent_tol=0.1,
                coefficient_tol=0.1):
    fit = fit_power_law((t, p), window)
    exponent, coefficient = law
    passed = abs(fit.exponent - exponent) <= exponent_tol and \
        (coefficient is None or
         abs(fit.coefficient / coefficient - 1) <= coefficient_tol)
    return {'passed': passed, 'exponent': fit.exponent,
            'coefficient': fit.coefficient, 'expected_exponent': exponent,
            'expected_coefficient': coefficient, 'r_squared': fit.r_squared}


def _random_upper(rng, count):
    """Points above every loss-only spectrum."""
    return rng.uniform(-3, 3, count) + 1j * rng.uniform(0.2, 2.0, count)


def _random_off_spectrum(rng, quadrature, count, gap=0.2):
    """Points on both sides of the real axis, at least ``gap`` from the
    spectrum, including the regions it encloses."""
    points = []
    while len(points) < count:
        z = complex(rng.uniform(-3, 3), rng.uniform(-6.5, 2.0))
        if quadrature.distance(z)[0] >= gap:
            points.append(z)
    return points


# ------------------------------------------------------------------ checks

@check(1, 'hidden-state pinning', 'boundstates', 'selfenergy')
def hidden_state_pinning():
    _, pinned = hidden_pinning(0.15, 1.0, 0.5, (0, 15, 30))
    return {'passed': all(p.state is not None and p.one_sided
                          for p in pinned),
            'states': [{'detuning': p.detuning,
                        'energy': p.state and p.state.energy,
                        'left_max': p.left, 'right_max': p.right}
                       for p in pinned]}


@check(2, 'closed form against quadrature', 'selfenergy')
def closed_form_against_quadrature():
    rng = np.random.default_rng(2)
    cases = [
        ('hatano_nelson', {'J': 0.6, 'kappa': 1.0}, [(0, 0), (3, 0)], 1e-8),
        ('hn_unidirectional', {'kappa': 1.0}, [(0, 0), (2, 0)], 1e-8),
        ('alternating_loss', {'J': 1.0, 'kappa': 1.0}, [(0, 0), (2, 1)],
         1e-8),
        ('wick_chain', {'J': 1.0}, [(0, 0), (1, 0)], 1e-8),
        ('swap2d', {'kappa': 1.0}, [((0, 0), 0)], 1e-6),
    ]
    # 2D bands fill an area, so the 2D lattice is sampled above the axis only
    details = {'passed': True}
    for name, params, sites, tolerance in cases:
        model = catalog.built(name, **params)
        emitters = EmitterSet([EmitterSpec(cell, {s: 1.0})
                               for cell, s in sites])
        closed = self_energy_evaluator(model, emitters, 'closed')
        quadrature = QuadratureSigma(model, emitters)
        points = _random_upper(rng, 50) if model.dimension > 1 else \
            _random_off_spectrum(rng, quadrature, 50)
        worst = max(float(np.max(np.abs(closed(z) - quadrature(z))))
                    for z in points)
        details[name] = worst
        details['passed'] &= worst < tolerance
    return details


@check(3, 'maximal winding', 'selfenergy', 'boundstates')
def maximal_winding():
    rng = np.random.default_rng(3)
    model = catalog.built('hatano_nelson', J=0.15, kappa=1.0)
    emitters = EmitterSet([EmitterSpec((x,), {0: 0.5}) for x in (0, 15, 30)])
    radius = 0.8 * np.sqrt(rng.uniform(0, 1, 100))
    angle = rng.uniform(0, 2 * np.pi, 100)
    points = -1j + 0.3 * radius * np.cos(angle) + 1j * radius * np.sin(angle)
    reports = [maximal_winding_vanishing_check(model, emitters, z)
               for z in points]
    worst = max(max(r.elements.values(), default=0.0) for r in reports)

    nnn = catalog.built('hn_nnn', kappa=1.0, kappa_prime=2.0)
    regions = winding_regions(nnn)
    pair = EmitterSet([EmitterSpec((x,), {0: 1.0}) for x in (0, 3)])
    nnn_reports = [maximal_winding_vanishing_check(nnn, pair, z)
                   for z in regions.get(-2, [])[:20]]
    distances = [pinning_distance(nnn, z) for z in regions.get(-1, [])[:5]]
    return {'passed': all(r.holds and r.index != 0 for r in reports) and
            bool(nnn_reports) and all(nnn_reports) and
            any(d > 1e-3 for d in distances),
            'hatano_nelson_worst': worst,
            'nnn_points': len(nnn_reports),
            'nnn_partial_distances': distances}


@check(4, 'cross-engine dynamics', 'dynamics', 'asymptotics')
def cross_engine():
    times = np.linspace(0, 20, 41)
    details = {}
    hn = catalog.built('hatano_nelson', J=2.5, kappa=1.0)
    for g in (2.0, 5.0):
        oracle = _decay(hn, EmitterSet.single(cell=500, g=g), 1000, times)
        resolvent = emitter_amplitudes_resolvent(
            hn, EmitterSet.single(g=g), times)
        details['hatano_nelson g={:g}'.format(g)] = float(np.max(np.abs(
            oracle.emitter_amps - resolvent.emitter_amps)))
    lossy = catalog.built('alternating_loss', J=1.0, kappa=1.0)
    oracle = _decay(lossy, EmitterSet.single(cell=200, g=1.5), 400, times)
    resolvent = emitter_amplitudes_resolvent(
        lossy, EmitterSet.single(g=1.5), times)
    details['alternating_loss'] = float(np.max(np.abs(
        oracle.emitter_amps - resolvent.emitter_amps)))

    unidirectional = catalog.built('hn_unidirectional', kappa=1.0)
    oracle = _decay(unidirectional, EmitterSet.single(cell=100), 200, times)
    exact = asymptotic_trajectory(unidirectional, EmitterSet.single(), times)
    exact_error = float(np.max(np.abs(oracle.emitter_amps -
                                      exact.emitter_amps)))
    details['unidirectional_exact'] = exact_error
    details['passed'] = exact_error < 1e-9 and all(
        v < 1e-6 for k, v in details.items() if k != 'unidirectional_exact')
    return details


@check(5, 'algebraic decay laws', 'dynamics', 'analysis', 'asymptotics')
def algebraic_laws():
    times = _log_times()
    details = {}

    wick = catalog.built('wick_chain', J=1.0)
    p = _decay(wick, EmitterSet.single(cell=200, detuning=1.0), 400,
               times).populations()[:, 0]
    details['wick'] = _law_report(times, p, wick_chain_law(1.0, 1.0))

    lossy = catalog.built('alternating_loss', J=1.0, kappa=1.0)
    for label, detuning, sublattice in (('t1', 0.0, 0), ('t3', 1.0, 0),
                                        ('lossless t3', 0.5, 1)):
        emitters = EmitterSet.single(cell=200, g=1.5, detuning=detuning,
                                     sublattice=sublattice)
        p = _decay(lossy, emitters, 400, times).populations()[:, 0]
        details[label] = _law_report(times, p, alternating_loss_law(
            1.0, 1.0, 1.5, detuning, sublattice))

    emitters = EmitterSet([EmitterSpec((x,), {0: 1.5}, 0.5)
                           for x in (200, 201)])
    psi0 = np.zeros(Basis.for_model(lossy, emitters, 400).size, dtype=complex)
    psi0[:2] = 1 / np.sqrt(2)
    amplitudes = _decay(lossy, emitters, 400, times,
                        InitialState.custom(psi0)).emitter_amps
    p = np.abs(amplitudes.sum(axis=1)) ** 2 / 2
    details['two emitters t5'] = _law_report(times, p, (-5.0, None),
                                             exponent_tol=0.2)
    details['passed'] = all(v['passed'] for v in details.values())
    return details


@check(6, 'free propagation', 'dynamics', 'propagation')
def free_propagation():
    J, kappa, size, origin = 2.5, 1.0, 600, 300
    model = catalog.built('hatano_nelson', J=J, kappa=kappa)
    times = np.linspace(0, 20, 21)
    xs = np.arange(-50, 51)
    trajectory = evolve_finite(model, EmitterSet(), size, PERIODIC,
                               'photon:{}'.format(origin), times,
                               [((origin + x,), 0) for x in xs])
    exact = free_propagation_hn(xs[None, :], times[:, None], J, kappa)
    deviation = float(np.max(np.abs(np.abs(trajectory.photon_field) ** 2 -
                                    exact)))
    return {'passed': deviation < 1e-8, 'max_deviation': deviation}


@check(7, 'dark states', 'boundstates', 'analysis')
def dark_states():
    model = catalog.built('alternating_loss', J=1.0, kappa=1.0)
    sizes = (40, 80, 160)
    eigen = {}
    for size in sizes:
        emitters = EmitterSet.single(cell=size // 2, g=1.2)
        state = bic_construct(model, emitters, size)
        vector = state.to_vector(Basis.for_model(model, emitters, size),
                                 wrap=False)
        hamiltonian = real_space_hamiltonian(model, emitters, size, OPEN)
        energy = np.vdot(vector, hamiltonian @ vector)
        eigen[size] = {'residual': state.residual, 'im_energy': energy.imag}
    scaling = bic_scaling(1.0, 1.0, 1.2, sizes)

    parity = {}
    for separation in (1, 2, 3, 4):
        emitters = EmitterSet([EmitterSpec((x,), {0: 1.2})
                               for x in (0, separation)])
        expected = Sector.SYMMETRIC if separation % 2 else \
            Sector.ANTISYMMETRIC
        other = Sector.ANTISYMMETRIC if separation % 2 else Sector.SYMMETRIC
        state = two_emitter_trapped_state(model, emitters, expected)
        parity[separation] = {
            'residual': state.residual if state else None,
            'parity_rule': state is not None and
            two_emitter_trapped_state(model, emitters, other) is None}
    passed = all(e['residual'] < 1e-10 and abs(e['im_energy']) < 1e-12
                 for e in eigen.values()) and \
        all(abs(r.ratio - 1) <= 0.05 for r in scaling.rows) and \
        scaling.r_squared > 0.99 and \
        all(p['parity_rule'] and p['residual'] < 1e-10
            for p in parity.values())
    return {'passed': passed, 'eigenvectors': eigen,
            'ratios': [r.ratio for r in scaling.rows],
            'r_squared': scaling.r_squared, 'two_emitter': parity}


@check(8, 'two-dimensional diffusion', 'dynamics', 'analysis')
def diffusion_2d():
    kappa = 1.0
    free = diffusion(kappa)
    return {'passed': all(free.checks(kappa).values()),
            'msd_slope': free.slope, 'msd_r_squared': free.r_squared,
            'late_exponent': free.late_exponent}


@check(9, 'single-pole approximation', 'asymptotics')
def single_pole_map():
    kappa, g = 1.0, 0.2
    sigma = unidirectional_continued_sigma(kappa, g)
    rows = []
    for phase in np.pi * np.array([0, 0.25, 0.75, 1, -0.25, -0.5, -0.75]):
        detuning = kappa * np.exp(1j * phase) - 1j * kappa
        spa = spa_poles(detuning, sigma)
        exact = exact_unidirectional_poles(detuning, g, kappa).dominant().rate
        rows.append({'detuning': detuning, 'spa': spa.rate, 'exact': exact,
                     'agree': not spa.breakdown and
                     abs(spa.rate / exact - 1) <= 0.05})
    centre = spa_poles(-1j * kappa, sigma)
    residues = [abs(p.residue[0, 0]) for p in
                exact_unidirectional_poles(-1j * kappa, g, kappa).poles]
    # approaching the centre from inside the loop, where Σ is still finite
    near = -1j * kappa + 0.05j * kappa
    spa = spa_poles(near, sigma)
    exact = exact_unidirectional_poles(near, g, kappa).dominant().rate
    disagree = not spa.breakdown and abs(spa.rate / exact - 1) > 0.5
    return {'passed': all(r['agree'] for r in rows) and centre.breakdown and
            disagree and abs(residues[0] - residues[1]) < 1e-12,
            'loop': rows,
            'near': {'detuning': near, 'spa': spa.rate, 'exact': exact},
            'centre': {'breakdown': centre.breakdown,
                       'reason': centre.reason, 'residues': residues}}


@check(10, 'boundary insensitivity', 'dynamics')
def boundary_insensitivity():
    size = 400
    model = catalog.built('hatano_nelson', J=2.5, kappa=1.0)
    emitters = EmitterSet.single(cell=size // 2, g=2.0)
    horizon = size / (2 * group_velocity(model))
    times = np.linspace(0, 0.9 * horizon, 37)
    periodic = evolve_finite(model, emitters, size, PERIODIC, 'emitter:0',
                             times)
    open_chain = evolve_finite(model, emitters, size, OPEN, 'emitter:0',
                               times)
    difference = float(np.max(np.abs(periodic.emitter_amps -
                                     open_chain.emitter_amps)))
    return {'passed': difference < 1e-8, 'difference': difference,
            'horizon': horizon}


@check(11, 'overlap excitation', 'analysis', 'boundstates')
def overlap_excitation():
    lossy, control, bound = overlap_curves(1.0, 0.5, -0.5j, 80,
                                           np.linspace(0, 40, 201),
                                           0.5, -2.5)
    checks = overlap_checks(lossy, control)
    return {'passed': all(checks.values()), **checks,
            'initial_overlap': float(lossy[0]),
            'lossy_range': float(np.ptp(lossy)),
            'hermitian_range': float(np.ptp(control)),
            'bound_energy': bound.energy}


# ------------------------------------------------------------------ suite

def select(tags=None):
    """Check numbers in order, restricted to those carrying any of ``tags``."""
    if tags:
        known = {t for c in CHECKS.values() for t in c.tags}
        unknown = set(tags) - known
        if unknown:
            raise ConfigurationError('Unknown tags {}; known: {}'.format(
                ', '.join(sorted(unknown)), ', '.join(sorted(known))))
    return [number for number, c in sorted(CHECKS.items())
            if not tags or set(tags) & set(c.tags)]


def run_check(number) -> CheckResult:
    entry = CHECKS[number]
    logger.info('Check %d: %s', number, entry.name)
    start = time.perf_counter()
    try:
        details = entry.function()
    except NumericalError as exception:
        logger.error('Check %d failed: %s', number, exception)
        details = {'passed': False, 'error': type(exception).__name__,
                   'message': str(exception)}
    passed = bool(details.pop('passed'))
    return CheckResult(number, entry.name, entry.tags, passed,
                       time.perf_counter() - start, details)


def report(results) -> Dict:
    return {'passed': all(r.passed for r in results),
            'checks': [r.to_dict() for r in results]}
