"""
Subscribers to a running time evolution.
"""
import logging
from pathlib import Path

import numpy as np

from nhemitters.model import Basis
from nhemitters.trajectory import Engine, Trajectory
from sampling import DefaultSubscriber

logger = logging.getLogger(__name__)


def _site_columns(basis: Basis, sites):
    if sites is None:
        return (), np.zeros(0, dtype=int)
    if isinstance(sites, str) and sites == 'all':
        sites = basis.sites()
    sites = tuple((tuple(int(c) for c in cell), int(s)) for cell, s in sites)
    return sites, np.array([basis.site_index(cell, s) for cell, s in sites],
                           dtype=int)


class TrajectoryRecorder(DefaultSubscriber):
    """Collects emitter amplitudes and the field on ``sites`` (or 'all')."""

    def __init__(self, basis: Basis, sites=None, engine=Engine.ORACLE,
                 flags=()):
        super().__init__()
        self.basis = basis
        self.engine = engine
        self.flags = tuple(flags)
        self.sites, self.columns = _site_columns(basis, sites)
        self.times, self.emitters, self.fields = [], [], []
        self.error = None

    def on_next(self, sample):
        self.times.append(sample.t)
        self.emitters.append(sample.state[:self.basis.n_emitters].copy())
        if self.sites:
            self.fields.append(sample.state[self.columns].copy())

    def on_error(self, exception):
        self.error = exception

    def trajectory(self) -> Trajectory:
        field = np.array(self.fields) if self.sites else None
        emitters = np.array(self.emitters, dtype=complex).reshape(
            len(self.times), self.basis.n_emitters)
        return Trajectory(np.array(self.times), emitters, self.engine, field,
                          self.sites, self.basis, self.flags)


class NormMonitor(DefaultSubscriber):
    """
    Records P(t) and reports every increase larger than ``tolerance``; on a
    loss-only lattice the norm never grows.
    """

    def __init__(self, tolerance=1e-12):
        super().__init__()
        self.tolerance = tolerance
        self.times, self.norms, self.violations = [], [], []

    def on_next(self, sample):
        norm = float(np.vdot(sample.state, sample.state).real)
        if self.norms and norm > self.norms[-1] + self.tolerance:
            self.violations.append((sample.t, norm - self.norms[-1]))
            logger.warning('Norm grew by %.3g at t=%g',
                           norm - self.norms[-1], sample.t)
        self.times.append(sample.t)
        self.norms.append(norm)

    @property
    def monotonic(self) -> bool:
        return not self.violations


class SnapshotWriter(DefaultSubscriber):
    """Writes the photon field of every ``every``-th sample as CSV."""

    def __init__(self, directory, basis: Basis, every=1, prefix='snapshot'):
        super().__init__()
        self.directory = Path(directory)
        self.basis = basis
        self.every = every
        self.prefix = prefix
        self.paths = []
        self._cells = basis.cell_array()
        self._sublattices = np.tile(np.arange(basis.bands), basis.cells)

    def on_subscribe(self, subscription):
        self.directory.mkdir(parents=True, exist_ok=True)
        super().on_subscribe(subscription)

    def on_next(self, sample):
        if sample.index % self.every:
            return
        field = sample.state[self.basis.n_emitters:]
        path = self.directory / '{}_{:05d}.csv'.format(self.prefix, sample.index)
        columns = ['x', 'y'][:self._cells.shape[1]] + ['sublattice', 're', 'im']
        table = np.column_stack([self._cells, self._sublattices,
                                 field.real, field.imag])
        np.savetxt(path, table, delimiter=',', fmt='%.17g',
                   header='t={!r}\n'.format(sample.t) + ','.join(columns),
                   comments='# ')
        self.paths.append(path)
