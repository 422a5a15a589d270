from pathlib import Path

import pytest

from nhemitters.config import Settings
from nhemitters.errors import ConfigurationError, ExitCode, FitError, \
    ModelError, exit_code_for


def test_settings_defaults():
    settings = Settings.from_env({})
    assert settings.jobs is None
    assert settings.log_level == 'WARNING'
    assert settings.output == Path('output')


def test_settings_from_environment():
    settings = Settings.from_env({'NH_EMITTERS_JOBS': '3',
                                  'NH_EMITTERS_LOG_LEVEL': 'debug',
                                  'NH_EMITTERS_OUTPUT': '/tmp/runs'})
    assert settings.jobs == 3
    assert settings.log_level == 'DEBUG'
    assert settings.output == Path('/tmp/runs')


def test_settings_reads_os_environ(monkeypatch):
    monkeypatch.setenv('NH_EMITTERS_JOBS', '2')
    assert Settings.from_env().jobs == 2


@pytest.mark.parametrize('environ', [
    {'NH_EMITTERS_JOBS': 'many'},
    {'NH_EMITTERS_JOBS': '0'},
    {'NH_EMITTERS_LOG_LEVEL': 'chatty'},
])
def test_invalid_settings(environ):
    with pytest.raises(ConfigurationError):
        Settings.from_env(environ)


def test_exit_codes():
    assert exit_code_for(ModelError('bad')) is ExitCode.USAGE
    assert exit_code_for(ConfigurationError('bad')) == 2
    assert exit_code_for(FitError('bad')) is ExitCode.NUMERICAL
    assert ExitCode.ACCEPTANCE == 4
    with pytest.raises(KeyError):
        exit_code_for(KeyError('not ours'))
