"""
Time-sampled single-excitation states and the initial conditions they start
from.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from nhemitters.errors import ConfigurationError
from nhemitters.model import Basis

Site = Tuple[Tuple[int, ...], int]


class Engine(str, Enum):
    ORACLE = 'oracle'
    RESOLVENT = 'resolvent'
    ASYMPTOTIC = 'asymptotic'
    ANALYTIC = 'analytic'


@dataclass(eq=False)
class Trajectory:
    """
    Emitter amplitudes (T x N) and optionally a photon field (T x S) on the
    listed sites.  When the field covers every site of ``basis`` the full
    state vector of each sample is available.
    """
    times: np.ndarray
    emitter_amps: np.ndarray
    engine: Engine
    photon_field: Optional[np.ndarray] = None
    sites: Tuple[Site, ...] = ()
    basis: Optional[Basis] = None
    flags: Tuple[str, ...] = ()

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        amplitudes = np.asarray(self.emitter_amps, dtype=complex)
        if amplitudes.ndim == 1:
            amplitudes = amplitudes[:, np.newaxis]
        self.emitter_amps = amplitudes
        self.sites = tuple(self.sites)
        if self.photon_field is not None:
            self.photon_field = np.asarray(self.photon_field, dtype=complex) \
                .reshape(len(self.times), len(self.sites))

    def __len__(self):
        return len(self.times)

    def populations(self) -> np.ndarray:
        return np.abs(self.emitter_amps) ** 2

    @property
    def complete(self) -> bool:
        return self.basis is not None and self.photon_field is not None and \
            len(self.sites) == self.basis.cells * self.basis.bands

    def total_probability(self) -> np.ndarray:
        total = np.sum(self.populations(), axis=1)
        if self.photon_field is not None:
            total = total + np.sum(np.abs(self.photon_field) ** 2, axis=1)
        return total

    def field(self, site) -> np.ndarray:
        cell, sublattice = site
        try:
            column = self.sites.index((tuple(cell), sublattice))
        except ValueError:
            raise ConfigurationError('Site {} was not recorded'.format(site))
        return self.photon_field[:, column]

    def state(self, index) -> np.ndarray:
        """Full single-excitation vector of sample ``index``."""
        if not self.complete:
            raise ConfigurationError('Trajectory does not hold full states')
        return np.concatenate([self.emitter_amps[index],
                               self.photon_field[index]])

    def snapshot(self, index):
        return dict(zip(self.sites, self.photon_field[index]))


@dataclass(frozen=True, eq=False)
class InitialState:
    """
    ``emitter:<n>``, ``photon:<x>[,<y>][/<sublattice>]`` or an explicit
    vector over the single-excitation basis.
    """
    kind: str
    emitter: int = 0
    cell: Tuple[int, ...] = ()
    sublattice: int = 0
    vector: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def parse(cls, text):
        kind, _, rest = text.partition(':')
        try:
            if kind == 'emitter':
                return cls('emitter', emitter=int(rest or 0))
            if kind == 'photon':
                cell, _, sublattice = rest.partition('/')
                return cls('photon', cell=tuple(int(c) for c in cell.split(',')),
                           sublattice=int(sublattice or 0))
        except ValueError:
            pass
        raise ConfigurationError(
            'Initial state must be emitter:<n> or photon:<cell>[/<s>], '
            'got {!r}'.format(text))

    @classmethod
    def custom(cls, vector):
        return cls('vector', vector=np.asarray(vector, dtype=complex))

    def vector_for(self, basis: Basis) -> np.ndarray:
        if self.kind == 'vector':
            if self.vector.shape != (basis.size,):
                raise ConfigurationError(
                    'Initial vector has shape {}, basis size is {}'.format(
                        self.vector.shape, basis.size))
            return self.vector.copy()
        psi = np.zeros(basis.size, dtype=complex)
        if self.kind == 'emitter':
            if not 0 <= self.emitter < basis.n_emitters:
                raise ConfigurationError('No emitter {} among {}'.format(
                    self.emitter, basis.n_emitters))
            psi[self.emitter] = 1
        else:
            psi[basis.site_index(self.cell, self.sublattice)] = 1
        return psi
