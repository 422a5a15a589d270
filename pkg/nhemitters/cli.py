"""
Command line interface.  Every subcommand prints JSON on stdout (or writes
CSV with ``--out``); failures print a JSON diagnostic on stderr and exit
with 2 (usage), 3 (numerical failure) or 4 (acceptance failure).
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from nhemitters import acceptance, scenarios
from nhemitters.analysis import bic_scaling, fit_power_law, msd, \
    overlap_dynamics, spectra
from nhemitters.asymptotics import asymptotic_trajectory
from nhemitters.boundstates import RootSearchConfig, find_bound_states, \
    finite_lattice_state, localization_lengths, normalize
from nhemitters.config import Settings
from nhemitters.document import load
from nhemitters.dynamics import emitter_amplitudes_resolvent, \
    evolve_finite
from nhemitters.errors import ConfigurationError, ExitCode, \
    NumericalError, exit_code_for
from nhemitters.model import BoundaryCondition, EmitterSet, EmitterSpec, \
    build_effective
from nhemitters.propagation import gbz_radius, running_wave_decomposition
from nhemitters.runner import ScenarioRunner
from nhemitters.selfenergy import ClosedFormSigma, Sheet, evaluate, \
    self_energy_evaluator, winding_number
from nhemitters.trajectory import InitialState

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------ parsing

def _complex(text):
    try:
        return complex(text.replace(' ', ''))
    except ValueError:
        raise argparse.ArgumentTypeError(
            'not a complex number: {!r}'.format(text))


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(
            'expected comma-separated numbers, got {!r}'.format(text))


def _ints(text):
    try:
        return tuple(int(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(
            'expected comma-separated integers, got {!r}'.format(text))


def _z_grid(text):
    """``re0:re1:n,im0:im1:m`` as a flat array, real part fastest."""
    try:
        (re0, re1, n), (im0, im1, m) = [
            (float(a), float(b), int(c)) for a, b, c in
            (axis.split(':') for axis in text.split(','))]
    except ValueError:
        raise argparse.ArgumentTypeError(
            'expected re0:re1:n,im0:im1:m, got {!r}'.format(text))
    if n < 1 or m < 1:
        raise argparse.ArgumentTypeError('grid sizes must be positive')
    re, im = np.linspace(re0, re1, n), np.linspace(im0, im1, m)
    return (re[None, :] + 1j * im[:, None]).ravel()


def _region(text):
    values = _floats(text.replace(':', ','))
    if len(values) != 4:
        raise argparse.ArgumentTypeError(
            'expected re0:re1:im0:im1, got {!r}'.format(text))
    return values


def _emitter(text):
    """``x[,y][/sublattice]:g[:detuning]``"""
    parts = text.split(':')
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(
            'emitter must be CELL[/SUBLATTICE]:G[:DELTA], got {!r}'.format(
                text))
    cell, _, sublattice = parts[0].partition('/')
    try:
        return EmitterSpec(tuple(int(c) for c in cell.split(',')),
                           {int(sublattice or 0): _complex(parts[1])},
                           _complex(parts[2]) if len(parts) == 3 else 0j)
    except ValueError as exception:
        raise argparse.ArgumentTypeError(str(exception))


def _model_arguments(parser, emitters=True):
    parser.add_argument('--model', required=True,
                        help='model document (.json) or catalog expression '
                             'such as hatano_nelson:J=0.15,kappa=1')
    if emitters:
        parser.add_argument('--emitter', action='append', type=_emitter,
                            default=[], metavar='CELL[/S]:G[:DELTA]',
                            help='add an emitter (repeatable)')


def _evolution_arguments(parser):
    parser.add_argument('--extent', type=_ints, required=True,
                        help='cells per dimension, e.g. 400 or 30,30')
    parser.add_argument('--bc', choices=[b.value for b in BoundaryCondition],
                        default=BoundaryCondition.PERIODIC.value)
    parser.add_argument('--t-max', type=float, default=20.0)
    parser.add_argument('--t-samples', type=int, default=201)
    parser.add_argument('--initial', default='emitter:0',
                        help='emitter:<n> or photon:<x>[,<y>][/<s>]')
    parser.add_argument('--out', type=Path, help='write CSV here')


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog='nhemitters',
        description='Quantum emitters coupled to non-Hermitian photonic '
                    'lattices.')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log INFO (-v) or DEBUG (-vv)')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    command = commands.add_parser('selfenergy', help='Σ(z) matrix')
    _model_arguments(command)
    points = command.add_mutually_exclusive_group(required=True)
    points.add_argument('--z', type=_complex)
    points.add_argument('--z-grid', type=_z_grid,
                        metavar='RE0:RE1:N,IM0:IM1:M')
    command.add_argument('--sheet', choices=[s.value for s in Sheet],
                         default=Sheet.FIRST.value)
    command.add_argument('--method', default='auto',
                         choices=['auto', 'closed', 'quadrature'])
    command.add_argument('--grid', type=int)
    command.add_argument('--out', type=Path, help='write CSV here')

    command = commands.add_parser('bound-states', help='dressed bound states')
    _model_arguments(command)
    command.add_argument('--region', type=_region, required=True,
                         metavar='RE0:RE1:IM0:IM1')
    command.add_argument('--seeds', type=_ints, default=(40, 40))
    command.add_argument('--radius', type=int, default=40,
                         help='photon profile radius in cells')
    command.add_argument('--normalize', action='store_true')
    command.add_argument('--out', type=Path,
                         help='write JSON here and one profile CSV per state')

    command = commands.add_parser('dynamics', help='emitter dynamics')
    _model_arguments(command)
    command.add_argument('--engine', default='oracle',
                         choices=['oracle', 'resolvent', 'asymptotic'])
    command.add_argument('--extent', type=_ints,
                         help='finite lattice for the oracle engine')
    command.add_argument('--bc', choices=[b.value for b in BoundaryCondition],
                         default=BoundaryCondition.PERIODIC.value)
    command.add_argument('--t-max', type=float, default=20.0)
    command.add_argument('--t-samples', type=int, default=201)
    command.add_argument('--initial', default='emitter:0')
    command.add_argument('--out', type=Path, help='write CSV here')

    command = commands.add_parser('spectra', help='PBC and OBC spectra')
    _model_arguments(command)
    command.add_argument('--extent', type=_ints, required=True)

    command = commands.add_parser('winding', help='spectral winding number')
    _model_arguments(command, emitters=False)
    command.add_argument('--z', type=_complex, required=True)

    command = commands.add_parser(
        'gbz', help='Hatano-Nelson GBZ radius and running-wave poles')
    command.add_argument('--J', type=float, required=True)
    command.add_argument('--kappa', type=float, required=True)
    command.add_argument('--x', type=int)
    command.add_argument('--t', type=float)
    command.add_argument('--detuning', type=_complex, default=0j)
    command.add_argument('--g', type=float, default=1.0)
    command.add_argument('--radius', type=float)

    command = commands.add_parser('fit-decay', help='power-law fit of a CSV')
    command.add_argument('table', type=Path)
    command.add_argument('--column', default=None,
                         help='population column (default: second)')
    command.add_argument('--window', type=_floats, metavar='T0,T1')

    command = commands.add_parser('msd', help='photon mean squared '
                                              'displacement')
    _model_arguments(command)
    _evolution_arguments(command)
    command.add_argument('--origin', type=_ints)

    command = commands.add_parser('overlap', help='overlap with a finite '
                                                  'lattice eigenstate')
    _model_arguments(command)
    _evolution_arguments(command)
    command.add_argument('--near', type=_complex, required=True,
                         help='pick the eigenstate closest to this energy')
    command.add_argument('--normalize', action='store_true')

    command = commands.add_parser('bic-scaling', help='dark-state weights '
                                                      'and plateaus')
    command.add_argument('--J', type=float, default=1.0)
    command.add_argument('--kappa', type=float, default=1.0)
    command.add_argument('--g', type=float, default=1.2)
    command.add_argument('--sizes', type=_ints, default=(40, 80, 160))

    command = commands.add_parser('reproduce', help='run figure scenarios')
    command.add_argument('scenario', nargs='*',
                         help='scenario ids, or "all" ({})'.format(
                             ', '.join(sorted(scenarios.SCENARIOS))))
    command.add_argument('--config', type=Path,
                         help='re-run from an emitted config.json')
    command.add_argument('--out', type=Path)
    command.add_argument('--jobs', type=int, default=1)

    command = commands.add_parser('validate-all',
                                  help='run the acceptance suite')
    command.add_argument('--tags', type=lambda s: s.split(','),
                         help='only checks carrying one of these tags')
    command.add_argument('--jobs', type=int, default=1)
    command.add_argument('--report', type=Path,
                         help='write the JSON report here')
    return parser.parse_args(argv)


# ----------------------------------------------------------------- helpers

def _model(args, emitters=True):
    lattice, document_emitters = load(args.model)
    model = build_effective(lattice)
    if not emitters:
        return model, EmitterSet()
    return model, EmitterSet(list(document_emitters) + list(args.emitter))


def _print(data):
    sys.stdout.write(scenarios.dumps(data))


def _times(args):
    if args.t_samples < 2:
        raise ConfigurationError('--t-samples must be at least 2')
    return np.linspace(0.0, args.t_max, args.t_samples)


def _jobs(args):
    return Settings.from_env().jobs or args.jobs


def _trajectory_table(trajectory):
    columns = {'t': trajectory.times}
    for n in range(trajectory.emitter_amps.shape[1]):
        columns['e{} re'.format(n)] = trajectory.emitter_amps[:, n].real
        columns['e{} im'.format(n)] = trajectory.emitter_amps[:, n].imag
    return columns


# ---------------------------------------------------------------- commands

def selfenergy(args):
    model, emitters = _model(args)
    if args.z is not None and args.out is None:
        result = evaluate(model, emitters, args.z, args.method,
                          Sheet(args.sheet), args.grid)
        _print({'z': result.z, 'method': result.method,
                'detail': result.detail, 'sheet': result.sheet.value,
                'value': result.value})
        return ExitCode.OK

    points = np.atleast_1d(args.z if args.z is not None else args.z_grid)
    sigma = self_energy_evaluator(model, emitters, args.method, args.grid)
    values = np.array([np.atleast_2d(sigma(z, Sheet(args.sheet)))
                       for z in points])
    columns = {'re_z': points.real, 'im_z': points.imag}
    for i, j in np.ndindex(*values.shape[1:]):
        columns['re_sigma_{}_{}'.format(i, j)] = values[:, i, j].real
        columns['im_sigma_{}_{}'.format(i, j)] = values[:, i, j].imag
    method = 'closed_form' if isinstance(sigma, ClosedFormSigma) \
        else 'quadrature'
    if args.out:
        scenarios.write_table(args.out, columns)
        _print({'method': method, 'points': len(points), 'table': args.out})
    else:
        _print({'method': method, 'z': points, 'value': values})
    return ExitCode.OK


def _profile_table(profile):
    sites = sorted(profile)
    cells = np.array([cell for cell, _ in sites], dtype=int).reshape(
        len(sites), -1)
    columns = {axis: cells[:, d] for d, axis in
               enumerate('xyz'[:cells.shape[1]])}
    amplitudes = np.array([profile[site] for site in sites], dtype=complex)
    columns.update({'sublattice': [s for _, s in sites],
                    're': amplitudes.real, 'im': amplitudes.imag})
    return columns


def bound_states(args):
    model, emitters = _model(args)
    config = RootSearchConfig(region=args.region, seed_grid=args.seeds,
                              profile_radius=args.radius)
    states = find_bound_states(model, emitters, config)
    if args.normalize:
        states = [normalize(s, model, emitters) for s in states]
    rows, records = [], []
    for index, state in enumerate(states):
        row = {'energy': state.energy, 'kind': state.kind.value,
               'residual': state.residual, 'weights': state.emitter_weights,
               'flags': list(state.flags)}
        if model.dimension == 1 and model.bands == 1:
            try:
                lengths = localization_lengths(state.photon_profile)
                row['localization'] = {'left': lengths.xi_left,
                                       'right': lengths.xi_right}
            except NumericalError as exception:
                logger.info('No localization for %s: %s', state.energy,
                            exception)
        rows.append(row)
        if args.out:
            path = args.out.with_name('{}_profile_{}.csv'.format(
                args.out.stem, index))
            scenarios.write_table(path, _profile_table(state.photon_profile))
            records.append({'E': state.energy, 'class': state.kind.value,
                            'c_e': state.emitter_weights,
                            'profile_csv_path': str(path),
                            'residual': state.residual})
    if args.out:
        scenarios.write_json(args.out, records)
    _print({'states': rows, 'out': args.out})
    return ExitCode.OK


def dynamics(args):
    model, emitters = _model(args)
    times = _times(args)
    if args.engine == 'oracle':
        if args.extent is None:
            raise ConfigurationError('The oracle engine needs --extent')
        trajectory = evolve_finite(model, emitters, args.extent,
                                   BoundaryCondition(args.bc),
                                   InitialState.parse(args.initial), times)
    elif args.engine == 'resolvent':
        trajectory = emitter_amplitudes_resolvent(
            model, emitters, times, initial=_emitter_index(args.initial))
    else:
        trajectory = asymptotic_trajectory(model, emitters, times)
    if args.out:
        scenarios.write_table(args.out, _trajectory_table(trajectory))
    _print({'engine': trajectory.engine.value, 'flags': trajectory.flags,
            'samples': len(trajectory),
            'final_populations': trajectory.populations()[-1],
            'table': args.out})
    return ExitCode.OK


def _emitter_index(text):
    initial = InitialState.parse(text)
    if initial.kind != 'emitter':
        raise ConfigurationError('The resolvent engine starts from an '
                                 'excited emitter, got {!r}'.format(text))
    return initial.emitter


def spectra_command(args):
    model, emitters = _model(args)
    reports = spectra(model, emitters, args.extent)
    _print({report.bc.value: report.eigenvalues for report in reports})
    return ExitCode.OK


def winding(args):
    model, _ = _model(args, emitters=False)
    _print({'z': args.z, 'index': winding_number(model, args.z).index})
    return ExitCode.OK


def gbz(args):
    data = {'radius': gbz_radius(args.J, args.kappa)}
    if args.x is not None and args.t is not None:
        wave = running_wave_decomposition(args.x, args.t, args.J, args.kappa,
                                          args.detuning, args.g, args.radius)
        data.update({'contour_radius': wave.radius, 'circle': wave.circle,
                     'total': wave.total,
                     'poles': [{'beta': p.beta, 'residue': p.contribution,
                                'rate': p.rate} for p in wave.poles]})
    _print(data)
    return ExitCode.OK


def fit_decay(args):
    try:
        with open(str(args.table)) as handle:
            header = handle.readline().strip().split(',')
        data = np.loadtxt(str(args.table), delimiter=',', skiprows=1,
                          ndmin=2)
    except (OSError, ValueError) as exception:
        raise ConfigurationError('Cannot read {}: {}'.format(args.table,
                                                            exception))
    column = args.column or header[1]
    if column not in header:
        raise ConfigurationError('No column {!r} in {}'.format(column,
                                                               header))
    fit = fit_power_law((data[:, 0], data[:, header.index(column)]),
                        args.window)
    _print({'exponent': fit.exponent, 'coefficient': fit.coefficient,
            'window': fit.window, 'r_squared': fit.r_squared,
            'samples': fit.samples, 'low_confidence': fit.low_confidence})
    return ExitCode.OK


def msd_command(args):
    model, emitters = _model(args)
    times = _times(args)
    trajectory = evolve_finite(model, emitters, args.extent,
                               BoundaryCondition(args.bc),
                               InitialState.parse(args.initial), times, 'all')
    spread = msd(trajectory, args.origin)
    if args.out:
        scenarios.write_table(args.out, {'t': times, 'msd': spread})
    _print({'final_msd': spread[-1], 'table': args.out})
    return ExitCode.OK


def overlap(args):
    model, emitters = _model(args)
    times = _times(args)
    bc = BoundaryCondition(args.bc)
    state = finite_lattice_state(model, emitters, args.extent, bc, args.near)
    trajectory = evolve_finite(model, emitters, args.extent, bc,
                               InitialState.parse(args.initial), times, 'all')
    values = np.abs(overlap_dynamics(state, trajectory,
                                     normalize=args.normalize))
    if args.out:
        scenarios.write_table(args.out, {'t': times, 'overlap': values})
    _print({'energy': state.energy, 'range': float(np.ptp(values)),
            'table': args.out})
    return ExitCode.OK


def bic_scaling_command(args):
    scaling = bic_scaling(args.J, args.kappa, args.g, args.sizes)
    _print({'rows': [{'size': r.size, 'weight2': r.weight2,
                      'plateau': r.plateau, 'ratio': r.ratio,
                      'settled_at': r.settled_at} for r in scaling.rows],
            'slope': scaling.slope, 'intercept': scaling.intercept,
            'r_squared': scaling.r_squared})
    return ExitCode.OK


def reproduce(args):
    output = args.out or Settings.from_env().output
    if args.config:
        results = [scenarios.run_config(args.config, args.out)]
    else:
        ids = args.scenario
        if not ids:
            raise ConfigurationError('Name a scenario, "all" or --config')
        if ids == ['all']:
            ids = sorted(scenarios.SCENARIOS)
        for scenario_id in ids:
            scenarios.lookup(scenario_id)
        results = ScenarioRunner(_jobs(args)).run(scenarios.run, ids, output)
    _print({'scenarios': [{'id': r.id, 'directory': r.directory,
                           'checks': r.checks, 'passed': r.passed}
                          for r in results],
            'passed': all(r.passed for r in results)})
    if all(r.passed for r in results):
        return ExitCode.OK
    return ExitCode.ACCEPTANCE


def validate_all(args):
    numbers = acceptance.select(args.tags)
    results = ScenarioRunner(_jobs(args)).run(acceptance.run_check, numbers)
    report = acceptance.report(results)
    if args.report:
        scenarios.write_json(args.report, report)
    _print(report)
    return ExitCode.OK if report['passed'] else ExitCode.ACCEPTANCE


COMMANDS = {
    'selfenergy': selfenergy,
    'bound-states': bound_states,
    'dynamics': dynamics,
    'spectra': spectra_command,
    'winding': winding,
    'gbz': gbz,
    'fit-decay': fit_decay,
    'msd': msd_command,
    'overlap': overlap,
    'bic-scaling': bic_scaling_command,
    'reproduce': reproduce,
    'validate-all': validate_all,
}


def _configure_logging(verbose):
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
    else:
        level = Settings.from_env().log_level
    logging.basicConfig(level=level,
                        format='%(asctime)s %(levelname)s %(name)s: '
                               '%(message)s')


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        _configure_logging(args.verbose)
        return int(COMMANDS[args.command](args))
    except (ValueError, NumericalError) as exception:
        code = exit_code_for(exception)
        logger.debug('%s failed', args.command, exc_info=True)
        sys.stderr.write(scenarios.dumps({
            'error': type(exception).__name__, 'message': str(exception),
            'exit_code': int(code)}))
        return int(code)


if __name__ == '__main__':
    sys.exit(main())
