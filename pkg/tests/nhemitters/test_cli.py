import json

import numpy as np
import pytest

from nhemitters.cli import main
from nhemitters.scenarios import write_table

HN = 'hatano_nelson:J=0.15,kappa=1'


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_winding(capsys):
    code, out, _ = _run(capsys, 'winding', '--model', HN, '--z=-1j')
    assert code == 0
    assert json.loads(out) == {'index': -1, 'z': {'re': 0.0, 'im': -1.0}}


def test_selfenergy(capsys):
    code, out, _ = _run(capsys, 'selfenergy', '--model',
                        'hn_unidirectional:kappa=1', '--emitter', '0:1',
                        '--z', '0.5+1j')
    assert code == 0
    result = json.loads(out)
    assert result['method'] == 'closed_form'
    assert result['sheet'] == 'first'
    value = result['value'][0][0]
    expected = 1 / (0.5 + 2j)
    assert complex(value['re'], value['im']) == pytest.approx(expected)


def test_bad_model_is_a_usage_error(capsys):
    code, out, err = _run(capsys, 'winding', '--model', 'kagome:J=1',
                          '--z', '1j')
    assert code == 2
    assert out == ''
    message = json.loads(err)
    assert message['error'] == 'DocumentError'
    assert message['exit_code'] == 2


def test_on_spectrum_is_a_numerical_error(capsys):
    code, _, err = _run(capsys, 'selfenergy', '--model', HN,
                        '--emitter', '0:1', '--z', '0',
                        '--method', 'quadrature')
    assert code == 3
    assert json.loads(err)['error'] == 'ResolventSingularityError'


def test_malformed_arguments():
    with pytest.raises(SystemExit) as error:
        main(['selfenergy', '--model', HN, '--emitter', 'nowhere',
              '--z', '1j'])
    assert error.value.code == 2


def test_fit_decay(tmp_path, capsys):
    t = np.logspace(1, 3, 50)
    table = write_table(tmp_path / 'decay.csv', {'t': t, 'p': 2 * t ** -3.0})
    code, out, _ = _run(capsys, 'fit-decay', str(table))
    assert code == 0
    fit = json.loads(out)
    assert fit['exponent'] == pytest.approx(-3.0)
    assert fit['coefficient'] == pytest.approx(2.0)
    assert fit['samples'] == 50

    code, _, err = _run(capsys, 'fit-decay', str(table), '--column', 'q')
    assert code == 2
    code, _, err = _run(capsys, 'fit-decay', str(tmp_path / 'missing.csv'))
    assert code == 2


def test_gbz(capsys):
    code, out, _ = _run(capsys, 'gbz', '--J', '1', '--kappa', '1')
    assert code == 0
    assert json.loads(out)['radius'] == pytest.approx(np.sqrt(1 / 3))


def test_dynamics_writes_a_table(tmp_path, capsys):
    path = tmp_path / 'dynamics.csv'
    code, out, _ = _run(capsys, 'dynamics', '--model',
                        'hn_unidirectional:kappa=1', '--emitter', '30:1',
                        '--extent', '60', '--t-max', '2', '--t-samples', '5',
                        '--out', str(path))
    assert code == 0
    result = json.loads(out)
    assert result['engine'] == 'oracle'
    assert result['samples'] == 5
    assert path.read_text().splitlines()[0] == 't,e0 re,e0 im'
    assert np.loadtxt(str(path), delimiter=',', skiprows=1).shape == (5, 3)


def test_dynamics_needs_an_extent(capsys):
    code, _, err = _run(capsys, 'dynamics', '--model', HN,
                        '--emitter', '0:1')
    assert code == 2
    assert json.loads(err)['error'] == 'ConfigurationError'


def test_reproduce_needs_a_scenario(capsys):
    code, _, _ = _run(capsys, 'reproduce')
    assert code == 2
    code, _, err = _run(capsys, 'reproduce', 'fig99')
    assert code == 2
    assert 'fig99' in json.loads(err)['message']


def test_validate_all_rejects_unknown_tags(capsys):
    code, _, err = _run(capsys, 'validate-all', '--tags', 'nonsense')
    assert code == 2
    assert 'nonsense' in json.loads(err)['message']


def test_selfenergy_grid_to_csv(tmp_path, capsys):
    path = tmp_path / 'sigma.csv'
    code, out, _ = _run(capsys, 'selfenergy', '--model',
                        'hn_unidirectional:kappa=1', '--emitter', '0:1',
                        '--z-grid', '0:1:3,1:2:2', '--out', str(path))
    assert code == 0
    assert json.loads(out)['points'] == 6
    assert path.read_text().splitlines()[0] == \
        're_z,im_z,re_sigma_0_0,im_sigma_0_0'
    table = np.loadtxt(path, delimiter=',', skiprows=1)
    assert table.shape == (6, 4)
    z = table[:, 0] + 1j * table[:, 1]
    assert np.allclose(z, [1j, 0.5 + 1j, 1 + 1j, 2j, 0.5 + 2j, 1 + 2j])
    assert np.allclose(table[:, 2] + 1j * table[:, 3], 1 / (z + 1j))


def test_selfenergy_needs_one_point_source():
    with pytest.raises(SystemExit) as error:
        main(['selfenergy', '--model', HN, '--emitter', '0:1'])
    assert error.value.code == 2
    with pytest.raises(SystemExit) as error:
        main(['selfenergy', '--model', HN, '--emitter', '0:1', '--z', '1j',
              '--z-grid', '0:1:2,1:2:2'])
    assert error.value.code == 2
    with pytest.raises(SystemExit) as error:
        main(['selfenergy', '--model', HN, '--emitter', '0:1',
              '--z-grid', '0:1:2'])
    assert error.value.code == 2


def test_bound_states_to_json(tmp_path, capsys):
    path = tmp_path / 'states.json'
    code, out, _ = _run(capsys, 'bound-states', '--model', HN,
                        '--emitter', '0:0.5:-0.5j',
                        '--region=-0.2:0.2:-0.8:-0.2', '--seeds', '4,4',
                        '--out', str(path))
    assert code == 0
    assert len(json.loads(out)['states']) >= 1

    records = json.loads(path.read_text())
    hidden = [r for r in records
              if abs(complex(r['E']['re'], r['E']['im']) + 0.5j) < 1e-9]
    assert len(hidden) == 1
    record = hidden[0]
    assert record['class'] == 'hidden'
    assert record['residual'] < 1e-9
    assert len(record['c_e']) == 1

    profile = tmp_path / 'states_profile_{}.csv'.format(records.index(record))
    assert record['profile_csv_path'] == str(profile)
    assert profile.read_text().splitlines()[0] == 'x,sublattice,re,im'
    table = np.loadtxt(profile, delimiter=',', skiprows=1)
    upstream = np.hypot(table[:, 2], table[:, 3])[table[:, 0] < 0]
    downstream = np.hypot(table[:, 2], table[:, 3])[table[:, 0] >= 0]
    assert np.max(upstream) > 1e-6
    assert np.max(downstream) < 1e-10
