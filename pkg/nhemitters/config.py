"""
Numerical tolerances and environment-driven settings.

Energies are in units of the loss rate κ and times in 1/κ throughout.
"""
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from nhemitters.errors import ConfigurationError

#: distance below which z counts as lying on the grid spectrum
TOL_SPECTRUM = 1e-9
#: guard band around |y| = 1 for closed-form root selection
TOL_ROOT = 1e-12
#: Hermiticity test for wick_rotate
TOL_HERMITIAN = 1e-12

SIGMA_GRID = 4096
SIGMA_GRID_2D = 512
WINDING_GRID = 2048
WINDING_GRID_REFINED = 16384
HERMITIAN_TEST_GRID = 16

INTEGRATOR_METHOD = 'RK45'
INTEGRATOR_RTOL = 1e-10
INTEGRATOR_ATOL = 1e-13

CONTOUR_ETAS = (1e-2, 5e-3, 2.5e-3)
CONTOUR_EPS = 1e-10

NEWTON_STEP = 1e-6
BIC_THRESHOLD = 1e-9

FIT_TRANSIENT = 5.0
FIT_NOISE_FLOOR = 1e-24
FIT_MIN_SAMPLES = 20
FIT_LOW_CONFIDENCE = 0.98

DENSE_LIMIT = 4000


@dataclass(frozen=True)
class Settings:
    jobs: Optional[int] = None
    log_level: str = 'WARNING'
    output: Path = Path('output')

    @classmethod
    def from_env(cls, environ=None):
        environ = os.environ if environ is None else environ
        settings = cls()
        jobs = environ.get('NH_EMITTERS_JOBS')
        if jobs is not None:
            try:
                jobs = int(jobs)
            except ValueError:
                raise ConfigurationError(
                    'NH_EMITTERS_JOBS must be an integer, got {!r}'.format(jobs))
            if jobs < 1:
                raise ConfigurationError(
                    'NH_EMITTERS_JOBS must be positive, got {}'.format(jobs))
        level = environ.get('NH_EMITTERS_LOG_LEVEL', settings.log_level).upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigurationError('Unknown log level {!r}'.format(level))
        return cls(jobs=jobs,
                   log_level=level,
                   output=Path(environ.get('NH_EMITTERS_OUTPUT',
                                           settings.output)))

