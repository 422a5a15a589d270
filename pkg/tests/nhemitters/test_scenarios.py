import json

import numpy as np
import pytest

from nhemitters import scenarios
from nhemitters.errors import ConfigurationError


def test_json_keeps_complex_values(tmp_path):
    data = {'z': 0.5 - 1j, 'values': np.array([1.0, 2.0]), 'n': np.int64(3),
            'ok': np.bool_(True), 'path': tmp_path}
    encoded = json.loads(scenarios.dumps(data))
    assert encoded['z'] == {'re': 0.5, 'im': -1.0}
    assert encoded['values'] == [1.0, 2.0]
    assert encoded['path'] == str(tmp_path)

    path = tmp_path / 'data.json'
    scenarios.write_json(path, data)
    back = scenarios.read_json(path)
    assert back['z'] == 0.5 - 1j
    assert back['n'] == 3
    assert back['ok'] is True

    with pytest.raises(TypeError):
        scenarios.dumps({'bad': object()})
    with pytest.raises(ConfigurationError):
        scenarios.read_json(tmp_path / 'missing.json')


def test_write_table(tmp_path):
    path = scenarios.write_table(tmp_path / 'table.csv',
                                 {'t': [0.0, 1.0], 'p re': [1.0, 0.25]})
    lines = path.read_text().splitlines()
    assert lines == ['t,p re', '0,1', '1,0.25']


def test_unknown_scenarios_and_parameters(tmp_path):
    with pytest.raises(ConfigurationError):
        scenarios.lookup('fig99')
    with pytest.raises(ConfigurationError):
        scenarios.run('fig7', tmp_path, {'colour': 'red'})


def test_registry_defaults_are_json_ready():
    for entry in scenarios.SCENARIOS.values():
        assert entry.title
        json.loads(scenarios.dumps(dict(entry.params)))


def test_run_and_rerun_from_config(tmp_path):
    result = scenarios.run('fig7', tmp_path,
                           {'extent': 10, 'couplings': [1.0]})
    assert result.passed
    assert result.checks == {'size g=1': True}

    directory = tmp_path / 'fig7'
    summary = scenarios.read_json(directory / 'summary.json')
    assert summary['scenario'] == 'fig7'
    assert summary['files'] == ['plot_spectrum_g=1.py', 'spectrum_g=1.csv']
    config = scenarios.read_json(directory / 'config.json')
    assert config['params']['detuning'] == -0.5j
    assert config['params']['extent'] == 10

    table = (directory / 'spectrum_g=1.csv').read_text()
    assert table.splitlines()[0] == 'pbc re,pbc im,obc re,obc im'
    assert len(table.splitlines()) == 12
    plot = (directory / 'plot_spectrum_g=1.py').read_text()
    assert "'spectrum_g=1.csv'" in plot
    assert "plt.savefig('spectrum_g=1.pdf')" in plot

    again = scenarios.run_config(directory / 'config.json')
    assert again.checks == result.checks
    assert again.directory == str(directory.resolve())
    assert (directory / 'spectrum_g=1.csv').read_text() == table


def test_incoming_photon_excites_the_hidden_state():
    times = np.linspace(0, 40, 201)
    lossy, control, bound = scenarios.overlap_curves(1.0, 0.5, -0.5j, 80,
                                                     times, 0.5, -2.5)
    assert lossy[0] < 1e-3
    assert np.argmax(lossy) > 0
    assert np.max(lossy) > 0.1
    assert np.ptp(control) < 1e-10
    assert scenarios.overlap_checks(lossy, control) == {
        'starts_dark': True, 'rises': True, 'hermitian_constant': True}


def test_overlap_checks_reject_a_decaying_overlap():
    decaying = np.exp(-np.linspace(0, 5, 11)) * 0.4
    checks = scenarios.overlap_checks(decaying, np.full(11, 0.2))
    assert not checks['starts_dark']
    assert not checks['rises']
    assert checks['hermitian_constant']


def test_crossover_time():
    assert scenarios.crossover_time(1.0, 1.0, 1.5, 1.0) == \
        pytest.approx(1.265625)
    assert scenarios.crossover_time(1.0, 1.0, 1.5, 0.0) == float('inf')
    assert scenarios.crossover_time(1.0, 1.0, 1.0, 1.0) < \
        scenarios.crossover_time(1.0, 1.0, 1.0, 0.5)


def test_diffusion_checks():
    times = np.linspace(0, 20, 41)
    good = scenarios.Diffusion(times, 0.5 * times, 0.52, 0.999,
                               times, np.ones_like(times), -2.4)
    assert all(good.checks(1.0).values())

    bad = scenarios.Diffusion(times, 0.5 * times, 0.8, 0.9,
                              times, np.ones_like(times), -1.5)
    assert not any(bad.checks(1.0).values())
