"""
Figure scenarios.  Each recipe runs with fixed parameters, writes its data
as CSV next to a matplotlib script that plots it, and returns named checks;
``summary.json`` records the checks and ``config.json`` is enough to run the
scenario again.
"""
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Dict, Mapping

import numpy as np

from nhemitters import catalog
from nhemitters.analysis import bic_scaling, fit_power_law, \
    local_exponents, msd, overlap_dynamics, spectra
from nhemitters.asymptotics import alternating_loss_law, \
    asymptotic_trajectory
from nhemitters.boundstates import BoundStateClass, RootSearchConfig, \
    find_bound_states, finite_lattice_state, two_emitter_trapped_state
from nhemitters.config import Settings
from nhemitters.dynamics import evolve_dense, evolve_finite
from nhemitters.errors import ConfigurationError, FitError, NumericalError
from nhemitters.model import Basis, BoundaryCondition, EmitterSet, \
    EmitterSpec
from nhemitters.observers import SnapshotWriter
from nhemitters.propagation import gbz_radius, running_wave_decomposition
from nhemitters.selfenergy import winding_number
from nhemitters.trajectory import InitialState

logger = logging.getLogger(__name__)

PERIODIC, OPEN = BoundaryCondition.PERIODIC, BoundaryCondition.OPEN

PLOT_TEMPLATE = '''\
"""{title}"""
import math

import matplotlib.pyplot as plt
import numpy as np

golden_ratio = (math.sqrt(5) - 1.0) / 2.0
plt.rcParams['figure.figsize'] = [6.0, 6.0 * golden_ratio]
plt.rcParams['font.size'] = 10

with open({table!r}) as handle:
    header = handle.readline().strip().split(',')
data = np.loadtxt({table!r}, delimiter=',', skiprows=1, ndmin=2)

x = data[:, header.index({x!r})]
for name in {ys!r}:
    plt.plot(x, data[:, header.index(name)], {style!r}, label=name)
plt.xscale({xscale!r})
plt.yscale({yscale!r})
plt.xlabel({xlabel!r})
plt.ylabel({ylabel!r})
plt.legend(frameon=False)
plt.tight_layout()
plt.savefig({figure!r})
'''


# ------------------------------------------------------------------- files

def _encode(value):
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': float(value.real), 'im': float(value.imag)}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError('Cannot serialize {!r}'.format(value))


def _decode(item):
    if set(item) == {'re', 'im'}:
        return complex(item['re'], item['im'])
    return item


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_encode) + '\n'


def write_json(path, data):
    Path(path).write_text(dumps(data))


def read_json(path):
    try:
        return json.loads(Path(path).read_text(), object_hook=_decode)
    except (OSError, json.JSONDecodeError) as exception:
        raise ConfigurationError('Cannot read {}: {}'.format(path, exception))


def write_table(path, columns: Dict[str, np.ndarray]) -> Path:
    """CSV with a plain header line and 17 significant digits."""
    data = np.column_stack([np.asarray(c, dtype=float)
                            for c in columns.values()])
    np.savetxt(path, data, delimiter=',', fmt='%.17g',
               header=','.join(columns), comments='')
    return Path(path)


class Output:
    """Collects the files and summary values of one scenario run."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.files = []
        self.results = {}

    def table(self, name, columns: Dict[str, np.ndarray]) -> Path:
        path = write_table(self.directory / (name + '.csv'), columns)
        self.files.append(path.name)
        return path

    def plot(self, name, table, x, ys, xlabel, ylabel, title='',
             xscale='linear', yscale='linear', style='-'):
        path = self.directory / ('plot_' + name + '.py')
        path.write_text(PLOT_TEMPLATE.format(
            title=title or name, table=table.name, x=x, ys=list(ys),
            style=style, xscale=xscale, yscale=yscale, xlabel=xlabel,
            ylabel=ylabel, figure=name + '.pdf'))
        self.files.append(path.name)


# ---------------------------------------------------------------- registry

@dataclass(frozen=True)
class Scenario:
    id: str
    title: str
    recipe: Callable
    params: Mapping[str, object]


@dataclass(frozen=True)
class ScenarioResult:
    id: str
    directory: str
    checks: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


SCENARIOS = {}


def scenario(id, title, **params):
    def register(recipe):
        SCENARIOS[id] = Scenario(id, title, recipe, params)
        return recipe
    return register


def lookup(scenario_id) -> Scenario:
    try:
        return SCENARIOS[scenario_id]
    except KeyError:
        raise ConfigurationError('Unknown scenario {!r}; known: {}'.format(
            scenario_id, ', '.join(sorted(SCENARIOS))))


def run(scenario_id, output=None, params=None) -> ScenarioResult:
    """Run one scenario into ``output``/<id> and write its summary."""
    entry = lookup(scenario_id)
    unknown = set(params or {}) - set(entry.params)
    if unknown:
        raise ConfigurationError('Unknown parameters for {}: {}'.format(
            scenario_id, ', '.join(sorted(unknown))))
    merged = dict(entry.params, **(params or {}))
    # parameters go through JSON so that a re-run sees the same values
    merged = json.loads(dumps(merged), object_hook=_decode)

    directory = Path(output or Settings.from_env().output) / entry.id
    directory.mkdir(parents=True, exist_ok=True)
    write_json(directory / 'config.json',
               {'scenario': entry.id, 'params': merged})

    logger.info('Running %s: %s', entry.id, entry.title)
    out = Output(directory)
    checks = {name: bool(value) for name, value in
              entry.recipe(out, **merged).items()}
    write_json(directory / 'summary.json', {
        'scenario': entry.id,
        'title': entry.title,
        'checks': checks,
        'passed': all(checks.values()),
        'files': sorted(out.files),
        'results': out.results,
    })
    for name, value in checks.items():
        if not value:
            logger.warning('%s: check %s failed', entry.id, name)
    return ScenarioResult(entry.id, str(directory), checks)


def run_config(path, output=None) -> ScenarioResult:
    """Re-run a scenario from the config.json it emitted."""
    config = read_json(path)
    try:
        scenario_id, params = config['scenario'], config['params']
    except (KeyError, TypeError):
        raise ConfigurationError('{} is not a scenario config'.format(path))
    if output is None:
        output = Path(path).resolve().parent.parent
    return run(scenario_id, output, params)


# ----------------------------------------------------------------- helpers

def _log_times(t_max, samples):
    return np.concatenate([[0.0], np.logspace(0, np.log10(t_max), samples)])


def _column(value):
    return 'delta={:g}'.format(value.real if isinstance(value, complex)
                               else value)


def _law_matches(fit, law, exponent_tol, coefficient_tol=0.1):
    exponent, coefficient = law
    return abs(fit.exponent - exponent) <= exponent_tol and \
        abs(fit.coefficient / coefficient - 1) <= coefficient_tol


def _fit_or_none(t, p, window):
    try:
        return fit_power_law((t, p), window)
    except FitError as exception:
        logger.warning('No fit on %s: %s', window, exception)
        return None


def _alternating_decays(out, name, J, kappa, g, detunings, sublattice,
                        extent, t_max, samples, window):
    model = catalog.built('alternating_loss', J=J, kappa=kappa)
    times = _log_times(t_max, samples)
    columns = {'t': times}
    fits, laws = {}, {}
    for detuning in detunings:
        emitters = EmitterSet.single(cell=extent // 2, g=g, detuning=detuning,
                                     sublattice=sublattice)
        trajectory = evolve_finite(model, emitters, extent, PERIODIC,
                                   'emitter:0', times)
        key = _column(detuning)
        population = trajectory.populations()[:, 0]
        exponent, coefficient = alternating_loss_law(J, kappa, g, detuning,
                                                     sublattice)
        columns['p ' + key] = population
        with np.errstate(divide='ignore'):
            columns['law ' + key] = coefficient * times ** exponent
        try:
            law = asymptotic_trajectory(model, emitters, times[1:])
            columns['branch cut ' + key] = np.concatenate(
                [[np.nan], law.populations()[:, 0]])
        except NumericalError as exception:
            logger.info('No branch-cut law for %s: %s', key, exception)
        fits[key] = _fit_or_none(times, population, window)
        laws[key] = (exponent, coefficient)

    table = out.table(name, columns)
    out.plot(name, table, 't', [c for c in columns if c != 't'], 'κt',
             '|c_e|²', xscale='log', yscale='log')
    out.results['fits'] = {key: fit and asdict(fit) for key, fit in fits.items()}
    out.results['laws'] = {key: {'exponent': law[0], 'coefficient': law[1]}
                           for key, law in laws.items()}
    return fits, laws


@dataclass(frozen=True)
class Pinning:
    detuning: complex
    state: object = None
    left: float = np.inf
    right: float = np.inf

    @property
    def one_sided(self) -> bool:
        return self.state is not None and min(self.left, self.right) < 1e-12


def hidden_pinning(J, kappa, g, cells, radius=30):
    """
    Bound states of emitters at ``cells`` on a Hatano-Nelson lattice with
    Δₙ = 0.05(n+1) − 0.5i, and for each Δₙ the hidden state pinned to it
    with the largest photon amplitude left and right of the emitters it
    involves.
    """
    model = catalog.built('hatano_nelson', J=J, kappa=kappa)
    detunings = [0.05 * (n + 1) - 0.5j for n in range(1, len(cells) + 1)]
    emitters = EmitterSet([EmitterSpec((x,), {0: g}, d)
                           for x, d in zip(cells, detunings)])
    config = RootSearchConfig(region=(-1.0, 1.0, -2.5, 0.5),
                              seed_grid=(16, 16), profile_radius=radius)
    states = find_bound_states(model, emitters, config)

    positions = emitters.positions()[:, 0]
    xs = np.arange(positions.min() - radius, positions.max() + radius + 1)
    pinned = []
    for detuning in detunings:
        match = [s for s in states if abs(s.energy - detuning) < 1e-9 and
                 s.kind is BoundStateClass.HIDDEN]
        if not match:
            pinned.append(Pinning(detuning))
            continue
        state = match[0]
        amplitude = np.array([abs(state.photon_profile.get(((x,), 0), 0))
                              for x in xs])
        involved = positions[np.abs(state.emitter_weights) > 1e-12]
        pinned.append(Pinning(
            detuning, state,
            float(np.max(amplitude[xs < involved.min()], initial=0.0)),
            float(np.max(amplitude[xs > involved.max()], initial=0.0))))
    return states, pinned


def overlap_curves(kappa, g, detuning, extent, times, control_J,
                   control_detuning, cell=20, photon=0):
    """
    |⟨ψ_b|ψ(t)⟩| for a photon released upstream of an emitter, on the
    unidirectional lattice and on a Hermitian chain whose bound state lies
    below the band.  Returns (lossy, hermitian, lossy bound state).
    """

    def overlaps(model, delta):
        emitters = EmitterSet.single(cell=cell, g=g, detuning=delta)
        state = finite_lattice_state(model, emitters, extent, PERIODIC, delta)
        trajectory = evolve_dense(model, emitters, extent, PERIODIC,
                                  'photon:{}'.format(photon), times, 'all')
        return np.abs(overlap_dynamics(state, trajectory)), state

    lossy, bound = overlaps(catalog.built('hn_unidirectional', kappa=kappa),
                            detuning)
    control, _ = overlaps(catalog.built('hermitian_chain', J=control_J),
                          control_detuning)
    return lossy, control, bound


def overlap_checks(lossy, control):
    """The lossy overlap starts dark and peaks later; the Hermitian one is
    conserved."""
    return {'starts_dark': bool(lossy[0] < 1e-3),
            'rises': bool(np.argmax(lossy) > 0 and
                          np.ptp(lossy) > 0.1),
            'hermitian_constant': bool(np.ptp(control) < 1e-10)}


# ----------------------------------------------------------------- recipes

@scenario('fig2', 'Hidden bound states of three emitters on a Hatano-Nelson '
          'lattice', J=0.15, kappa=1.0, g=0.5, cells=(0, 15, 30), radius=30)
def hidden_states(out, J, kappa, g, cells, radius):
    states, pinned = hidden_pinning(J, kappa, g, cells, radius)
    energies = np.array([s.energy for s in states])
    out.table('bound_states', {
        're': energies.real, 'im': energies.imag,
        'hidden': [s.kind is BoundStateClass.HIDDEN for s in states],
        'residual': [s.residual for s in states]})

    profiles = {'x': np.arange(min(cells) - radius, max(cells) + radius + 1)}
    for n, entry in enumerate(pinned):
        if entry.state is None:
            continue
        profiles['emitter {}'.format(n)] = np.array([
            abs(entry.state.photon_profile.get(((x,), 0), 0)) ** 2
            for x in profiles['x']])
        out.results['emitter {}'.format(n)] = {
            'energy': entry.state.energy, 'left_max': entry.left,
            'right_max': entry.right}

    table = out.table('profiles', profiles)
    out.plot('profiles', table, 'x', [c for c in profiles if c != 'x'], 'x',
             '|c_x|²', yscale='log', style='o-')
    return {'hidden_pinned': all(e.state is not None for e in pinned),
            'one_sided': all(e.one_sided for e in pinned)}


@scenario('fig3c', 'Running wave on the Hatano-Nelson lattice split into '
          'contour and pole parts', J=2.5, kappa=1.0, detuning=0.0, g=2.0,
          times=(10.0, 20.0, 30.0), sites=(-20, 60))
def running_wave(out, J, kappa, detuning, g, times, sites):
    xs = np.arange(sites[0], sites[1] + 1)
    columns = {'x': xs}
    for t in times:
        waves = [running_wave_decomposition(x, t, J, kappa, detuning, g)
                 for x in xs]
        scale = np.sqrt(2 * J * t)
        columns['total t={:g}'.format(t)] = \
            np.abs([w.total for w in waves]) ** 2 * scale
        columns['contour t={:g}'.format(t)] = \
            np.abs([w.circle for w in waves]) ** 2 * scale
    table = out.table('running_wave', columns)
    out.plot('running_wave', table, 'x', [c for c in columns if c != 'x'],
             'x', '√(2Jt) |c_x|²', yscale='log')

    probe = running_wave_decomposition(0, times[len(times) // 2], J, kappa,
                                       detuning, g)
    out.table('poles', {
        're': [p.beta.real for p in probe.poles],
        'im': [p.beta.imag for p in probe.poles],
        'rate': [p.rate for p in probe.poles]})
    imaginary = [p for p in probe.poles
                 if abs(p.beta.real) < 1e-8 and p.rate < kappa]

    x, t = 10, times[len(times) // 2]
    on_gbz = running_wave_decomposition(x, t, J, kappa, detuning, g).total
    on_circle = running_wave_decomposition(x, t, J, kappa, detuning, g,
                                           1.0).total
    out.results.update({'gbz_radius': gbz_radius(J, kappa),
                        'contour_difference': abs(on_gbz - on_circle)})
    return {'imaginary_pole': bool(imaginary),
            'contour_independent': abs(on_gbz - on_circle) < 1e-8}


@scenario('fig4a', 'Crossover from t^-1 to t^-3 decay on a lossy site',
          J=1.0, kappa=1.0, g=1.5, detunings=(0.0, 0.1, 0.5, 1.0), extent=400,
          t_max=1000.0, samples=121)
def lossy_site_decay(out, J, kappa, g, detunings, extent, t_max, samples):
    start = 100.0
    fits, laws = _alternating_decays(out, 'decay', J, kappa, g, detunings, 0,
                                     extent, t_max, samples, (start, t_max))
    checks = {}
    for detuning, (key, fit) in zip(detunings, fits.items()):
        if laws[key][0] == -1.0:
            checks['t1 ' + key] = fit and _law_matches(fit, laws[key], 0.1)
        elif crossover_time(J, kappa, g, detuning) <= start / 50:
            checks['t3 ' + key] = fit and _law_matches(fit, laws[key], 0.1)
    return checks


def crossover_time(J, kappa, g, detuning) -> float:
    """
    Time after which a detuned emitter on a lossy site decays as t^-3:
    (g² / (2J√κ |Δ|))², where the branch-point term of Σ_A matches Δ.
    """
    if abs(detuning) == 0:
        return float('inf')
    return float((g * g / (2 * J * np.sqrt(kappa) * abs(detuning))) ** 2)


@scenario('fig4b', 'Detuning-independent t^-3 decay on a lossless site',
          J=1.0, kappa=1.0, g=1.5, detunings=(0.0, 0.5, 1.0), extent=400,
          t_max=1000.0, samples=121)
def lossless_site_decay(out, J, kappa, g, detunings, extent, t_max, samples):
    fits, laws = _alternating_decays(out, 'decay', J, kappa, g, detunings, 1,
                                     extent, t_max, samples, (100.0, t_max))
    return {'t3 ' + key: fit and _law_matches(fit, laws[key], 0.1)
            for key, fit in fits.items()}


@scenario('fig5', 'Finite-size scaling of the dark state', J=1.0, kappa=1.0,
          g=1.2, sizes=(40, 80, 160))
def dark_state_scaling(out, J, kappa, g, sizes):
    scaling = bic_scaling(J, kappa, g, sizes)
    rows = scaling.rows
    table = out.table('scaling', {
        'inverse size': [1 / r.size for r in rows],
        'weight2': [r.weight2 for r in rows],
        'plateau': [r.plateau for r in rows],
        'weight4': [r.weight2 ** 2 for r in rows]})
    out.plot('scaling', table, 'inverse size', ['weight2', 'plateau',
                                                'weight4'],
             '1/L', 'population', style='o-')
    out.results.update({'slope': scaling.slope,
                        'intercept': scaling.intercept,
                        'r_squared': scaling.r_squared,
                        'ratios': [r.ratio for r in rows]})
    return {'plateau_is_weight_squared':
            all(abs(r.ratio - 1) <= 0.05 for r in rows),
            'inverse_size_fit': scaling.r_squared > 0.99}


@scenario('fig6', 'Algebraic decay without exceptional points', J=0.2,
          kappa=1.0, g=1.5, detunings=(0.0, 1.0), extent=400, t_max=1000.0,
          samples=121)
def no_exceptional_points(out, J, kappa, g, detunings, extent, t_max,
                          samples):
    fits, laws = _alternating_decays(out, 'decay', J, kappa, g, detunings, 0,
                                     extent, t_max, samples, (200.0, t_max))
    return {'exponent ' + key: fit is not None and
            abs(fit.exponent - laws[key][0]) <= 0.15
            for key, fit in fits.items()}


@scenario('fig7', 'Periodic and open spectra with one emitter', J=0.6,
          kappa=1.0, detuning=-0.5j, couplings=(0.5, 1.0, 2.0), extent=50)
def finite_spectra(out, J, kappa, detuning, couplings, extent):
    model = catalog.built('hatano_nelson', J=J, kappa=kappa)
    checks = {}
    for g in couplings:
        emitters = EmitterSet.single(cell=extent // 2, g=g, detuning=detuning)
        pbc, obc = spectra(model, emitters, extent)
        name = 'spectrum_g={:g}'.format(g)
        table = out.table(name, {
            'pbc re': pbc.eigenvalues.real, 'pbc im': pbc.eigenvalues.imag,
            'obc re': obc.eigenvalues.real, 'obc im': obc.eigenvalues.imag})
        out.plot(name, table, 'pbc re', ['pbc im'], 'Re E', 'Im E',
                 style='o')
        out.results[name] = {
            'closest_to_detuning': float(np.min(np.abs(pbc.eigenvalues -
                                                       detuning)))}
        checks['size g={:g}'.format(g)] = len(pbc) == len(obc) == extent + 1
    return checks


@dataclass(frozen=True)
class Diffusion:
    times: np.ndarray
    spread: np.ndarray
    slope: float
    r_squared: float
    decay_times: np.ndarray
    population: np.ndarray
    late_exponent: float

    def checks(self, kappa):
        return {'msd_linear': self.r_squared > 0.99,
                'msd_slope': abs(self.slope / (kappa / 2) - 1) <= 0.2,
                'late_exponent': -3 <= self.late_exponent <= -2}


def diffusion(kappa, extent=(200, 200), g=0.4, t_max=20.0, fit_from=5.0,
              decay_t_max=100.0, late_from=50.0) -> Diffusion:
    """
    Free-photon ⟨r²⟩ on the 2D lattice with its linear fit from ``fit_from``,
    and the median sliding-window exponent of an emitter's late decay.
    """
    model = catalog.built('swap2d', kappa=kappa)
    origin = tuple(e // 2 for e in extent)
    times = np.linspace(0, t_max, 41)
    free = evolve_finite(model, EmitterSet(), extent, PERIODIC,
                         'photon:{},{}'.format(*origin), times, 'all')
    spread = msd(free, origin)
    window = times >= fit_from
    slope, intercept = np.polyfit(times[window], spread[window], 1)
    residual = spread[window] - (slope * times[window] + intercept)
    total = np.sum((spread[window] - spread[window].mean()) ** 2)

    decay_times = np.concatenate([[0.0],
                                  np.logspace(0, np.log10(decay_t_max), 81)])
    decay = evolve_finite(model, EmitterSet.single(cell=origin, g=g), extent,
                          PERIODIC, 'emitter:0', decay_times)
    population = decay.populations()[:, 0]
    centres, exponents = local_exponents(decay_times, population)
    return Diffusion(times, spread, float(slope),
                     float(1 - np.sum(residual ** 2) / total), decay_times,
                     population, float(np.median(exponents[centres >=
                                                           late_from])))


@scenario('fig8', 'Diffusive emission into the two-dimensional lattice',
          kappa=1.0, couplings=(0.4, 0.8), extent=(30, 30), t_max=15.0,
          samples=61, every=20, diffusion_extent=(200, 200))
def diffusive_emission(out, kappa, couplings, extent, t_max, samples, every,
                       diffusion_extent):
    model = catalog.built('swap2d', kappa=kappa)
    times = np.linspace(0, t_max, samples)
    origin = tuple(e // 2 for e in extent)
    columns = {'t': times}
    checks = {}
    for g in couplings:
        emitters = EmitterSet.single(cell=origin, g=g)
        writer = SnapshotWriter(out.directory / 'snapshots_g={:g}'.format(g),
                                Basis.for_model(model, emitters, extent),
                                every=every)
        trajectory = evolve_finite(model, emitters, extent, PERIODIC,
                                   'emitter:0', times, 'all', (writer,))
        spread = msd(trajectory, origin)
        columns['p g={:g}'.format(g)] = trajectory.populations()[:, 0]
        columns['msd g={:g}'.format(g)] = spread
        half = len(times) // 2
        checks['msd grows g={:g}'.format(g)] = \
            bool(np.all(np.diff(spread[half:]) > 0))
    table = out.table('emission', columns)
    out.plot('population', table, 't',
             [c for c in columns if c.startswith('p ')], 'κt', '|c_e|²',
             yscale='log')
    out.plot('msd', table, 't', [c for c in columns if c.startswith('msd')],
             'κt', '⟨r²⟩')

    free = diffusion(kappa, tuple(diffusion_extent))
    table = out.table('free_msd', {'t': free.times, 'msd': free.spread})
    out.plot('free_msd', table, 't', ['msd'], 'κt', '⟨r²⟩')
    table = out.table('late_decay', {'t': free.decay_times,
                                     'p': free.population})
    out.plot('late_decay', table, 't', ['p'], 'κt', '|c_e|²', xscale='log',
             yscale='log')
    out.results.update({'msd_slope': free.slope,
                        'msd_r_squared': free.r_squared,
                        'late_exponent': free.late_exponent})
    checks.update(free.checks(kappa))
    return checks


@scenario('fig9', 'Two emitters on lossy sites', J=1.0, kappa=1.0, g=1.5,
          detunings=(0.0, 0.5), separation=1, trapped_separation=5,
          extent=400, t_max=1000.0, samples=121)
def two_emitters(out, J, kappa, g, detunings, separation, trapped_separation,
                 extent, t_max, samples):
    model = catalog.built('alternating_loss', J=J, kappa=kappa)
    times = _log_times(t_max, samples)
    first = extent // 2
    columns = {'t': times}
    plateau, fit = None, None
    for detuning in detunings:
        emitters = EmitterSet([EmitterSpec((x,), {0: g}, detuning)
                               for x in (first, first + separation)])
        basis = Basis.for_model(model, emitters, extent)
        psi0 = np.zeros(basis.size, dtype=complex)
        psi0[:2] = 1 / np.sqrt(2)
        trajectory = evolve_finite(model, emitters, extent, PERIODIC,
                                   InitialState.custom(psi0), times)
        symmetric = np.abs(trajectory.emitter_amps.sum(axis=1)) ** 2 / 2
        key = _column(detuning)
        columns['p ' + key] = symmetric
        if abs(detuning) < 1e-12:
            plateau = float(symmetric[-1])
        else:
            fit = _fit_or_none(times, symmetric, (100.0, t_max))
            out.results['fit ' + key] = fit and asdict(fit)
    table = out.table('symmetric_decay', columns)
    out.plot('symmetric_decay', table, 't',
             [c for c in columns if c != 't'], 'κt', '|c_+|²',
             xscale='log', yscale='log')

    emitters = EmitterSet([EmitterSpec((x,), {0: g})
                           for x in (0, trapped_separation)])
    state = two_emitter_trapped_state(model, emitters)
    xs = np.arange(-2, trapped_separation + 3)
    out.table('trapped_profile', {
        'x': xs,
        'b': [state.photon_profile.get(((x,), 1), 0).real for x in xs]})
    out.results.update({'plateau': plateau, 'trapped_flags': state.flags,
                        'trapped_residual': state.residual})
    checks = {'trapped_residual': state.residual < 1e-10}
    if plateau is not None:
        checks['resonant_plateau'] = plateau > 0.01
    if any(abs(d) >= 1e-12 for d in detunings):
        checks['t5_exponent'] = fit is not None and \
            abs(fit.exponent + 5) <= 0.2
    return checks


@scenario('fig11', 'Exciting a hidden bound state with an incoming photon',
          kappa=1.0, g=0.5, detuning=-0.5j, extent=80, t_max=40.0,
          samples=201, control_J=0.5, control_detuning=-2.5, cell=20,
          photon=0)
def overlap_excitation(out, kappa, g, detuning, extent, t_max, samples,
                       control_J, control_detuning, cell, photon):
    times = np.linspace(0, t_max, samples)
    lossy, control, bound = overlap_curves(kappa, g, detuning, extent, times,
                                           control_J, control_detuning,
                                           cell, photon)
    table = out.table('overlap', {'t': times, 'lossy': lossy,
                                  'hermitian': control})
    out.plot('overlap', table, 't', ['lossy', 'hermitian'], 'κt',
             '|⟨ψ_b|ψ(t)⟩|')
    out.results.update({'bound_energy': bound.energy,
                        'lossy_range': float(np.ptp(lossy)),
                        'hermitian_range': float(np.ptp(control)),
                        'peak_time': float(times[np.argmax(lossy)])})
    return overlap_checks(lossy, control)


def winding_regions(model, re=(-3.0, 3.0), im=(-5.75, -0.25), points=13):
    """Grid points of the complex plane grouped by winding index."""
    regions = {}
    for x in np.linspace(re[0], re[1], points):
        for y in np.linspace(im[0], im[1], points):
            z = complex(x, y)
            try:
                index = winding_number(model, z).index
            except NumericalError:
                continue
            regions.setdefault(index, []).append(z)
    return regions


def pinning_distance(model, detuning, g=1.0, half_width=0.3):
    """|E − Δ| for the closest bound state near Δ, inf when there is none."""
    emitters = EmitterSet.single(g=g, detuning=detuning)
    config = RootSearchConfig(
        region=(detuning.real - half_width, detuning.real + half_width,
                detuning.imag - half_width, detuning.imag + half_width),
        seed_grid=(6, 6), profile_radius=5)
    states = find_bound_states(model, emitters, config)
    return min((abs(s.energy - detuning) for s in states), default=np.inf)


@scenario('fig12', 'Pinning with next-nearest-neighbour hopping', kappa=1.0,
          kappa_prime=2.0, g=1.0, per_region=3)
def nnn_pinning(out, kappa, kappa_prime, g, per_region):
    model = catalog.built('hn_nnn', kappa=kappa, kappa_prime=kappa_prime)
    regions = winding_regions(model)
    rows = []
    for index in (-2, -1):
        for z in regions.get(index, [])[:per_region]:
            rows.append((z, index, pinning_distance(model, z, g)))
    out.table('pinning', {
        're': [r[0].real for r in rows], 'im': [r[0].imag for r in rows],
        'index': [r[1] for r in rows], 'distance': [r[2] for r in rows]})
    maximal = [d for _, index, d in rows if index == -2]
    partial = [d for _, index, d in rows if index == -1]
    out.results['region_sizes'] = {str(k): len(v) for k, v in
                                   sorted(regions.items())}
    return {'pinned_at_maximal_winding':
            bool(maximal) and all(d < 1e-9 for d in maximal),
            'unpinned_below_maximal': any(d > 1e-3 for d in partial)}
