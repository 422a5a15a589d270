"""
Lattice and emitter data model, effective non-Hermitian hoppings, Bloch and
real-space Hamiltonians in the single-excitation sector.

Conventions: a hopping term with offset ``d`` moves an excitation from cell
``r`` to cell ``r + d``; its Bloch matrix element is ``amplitude * exp(-i k.d)``.
A jump operator term ``(o, s, l)`` contributes ``l * a_{r+o, s}`` to ``L_r``.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, Mapping, Tuple

import numpy as np
import scipy.sparse as sparse

from nhemitters.config import HERMITIAN_TEST_GRID, TOL_HERMITIAN
from nhemitters.errors import ConfigurationError, ModelError, \
    PreconditionError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


class BoundaryCondition(str, Enum):
    PERIODIC = 'periodic'
    OPEN = 'open'


def _offset(value) -> Vector:
    return tuple(int(v) for v in np.atleast_1d(value))


def _check_complex(value, what):
    value = complex(value)
    if not np.isfinite(value):
        raise ModelError('{} must be finite, got {}'.format(what, value))
    return value


@dataclass(frozen=True)
class HoppingTerm:
    offset: Vector
    from_sublattice: int
    to_sublattice: int
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, 'offset', _offset(self.offset))
        object.__setattr__(self, 'amplitude',
                           _check_complex(self.amplitude, 'Hopping amplitude'))


@dataclass(frozen=True)
class JumpTerm:
    offset: Vector
    sublattice: int
    coeff: complex

    def __post_init__(self):
        object.__setattr__(self, 'offset', _offset(self.offset))
        object.__setattr__(self, 'coeff',
                           _check_complex(self.coeff, 'Jump coefficient'))


@dataclass(frozen=True)
class JumpOperatorSpec:
    channel: int
    terms: Tuple[JumpTerm, ...]

    def __post_init__(self):
        terms = tuple(t if isinstance(t, JumpTerm) else JumpTerm(*t)
                      for t in self.terms)
        if not terms:
            raise ModelError('Jump channel {} has no terms'.format(self.channel))
        object.__setattr__(self, 'terms', terms)


@dataclass(frozen=True)
class LatticeSpec:
    dimension: int
    sublattice_count: int
    hoppings: Tuple[HoppingTerm, ...]
    jumps: Tuple[JumpOperatorSpec, ...] = ()
    kappa: float = 0.0
    max_range: int = 2
    name: str = 'custom'
    params: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ModelError('Dimension must be 1 or 2, got {}'.format(
                self.dimension))
        if self.sublattice_count < 1:
            raise ModelError('At least one sublattice is required')
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ModelError('kappa must be finite and >= 0, got {}'.format(
                self.kappa))
        object.__setattr__(self, 'hoppings', tuple(self.hoppings))
        object.__setattr__(self, 'jumps', tuple(self.jumps))
        object.__setattr__(self, 'params', tuple(
            sorted(dict(self.params).items())))

        for term in self.hoppings:
            self._check_site(term.offset, term.from_sublattice)
            self._check_site(term.offset, term.to_sublattice)
        for jump in self.jumps:
            for term in jump.terms:
                self._check_site(term.offset, term.sublattice)

    def _check_site(self, offset, sublattice):
        if len(offset) != self.dimension:
            raise ModelError('Offset {} does not match dimension {}'.format(
                offset, self.dimension))
        if not 0 <= sublattice < self.sublattice_count:
            raise ModelError('Sublattice {} out of range 0..{}'.format(
                sublattice, self.sublattice_count - 1))

    @property
    def parameters(self) -> Dict[str, float]:
        return dict(self.params)


@dataclass(frozen=True)
class EmitterSpec:
    cell: Vector
    sublattice_couplings: Mapping[int, complex]
    detuning: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, 'cell', _offset(self.cell))
        couplings = tuple(sorted(
            (int(s), _check_complex(g, 'Coupling'))
            for s, g in dict(self.sublattice_couplings).items()))
        if not couplings:
            raise ModelError('Emitter at {} couples to no sublattice'.format(
                self.cell))
        object.__setattr__(self, 'sublattice_couplings', couplings)
        detuning = _check_complex(self.detuning, 'Detuning')
        if detuning.imag > 0:
            raise ModelError('Detuning must have Im <= 0, got {}'.format(
                detuning))
        object.__setattr__(self, 'detuning', detuning)

    @property
    def couplings(self) -> Dict[int, complex]:
        return dict(self.sublattice_couplings)

    @property
    def sublattice(self) -> int:
        return self.sublattice_couplings[0][0]

    @property
    def coupling_norm(self) -> float:
        return float(np.sqrt(sum(abs(g) ** 2 for _, g in
                                 self.sublattice_couplings)))


class EmitterSet:
    """
    Emitters ordered by cell position, ties broken by sublattice.  The
    position in this ordering is the matrix index n of Δ and Σ.
    """
    __slots__ = ('emitters',)

    def __init__(self, emitters=()):
        self.emitters = tuple(sorted(
            emitters, key=lambda e: (e.cell, e.sublattice)))

    @classmethod
    def single(cls, cell=0, g=1.0, detuning=0j, sublattice=0):
        return cls([EmitterSpec(cell, {sublattice: g}, detuning)])

    def __len__(self):
        return len(self.emitters)

    def __iter__(self):
        return iter(self.emitters)

    def __getitem__(self, item):
        return self.emitters[item]

    def __eq__(self, other):
        return isinstance(other, EmitterSet) and \
            self.emitters == other.emitters

    def __repr__(self):
        return '<EmitterSet: {}>'.format(list(self.emitters))

    @property
    def detunings(self) -> np.ndarray:
        return np.array([e.detuning for e in self.emitters], dtype=complex)

    def positions(self) -> np.ndarray:
        if not self.emitters:
            return np.zeros((0, 1), dtype=int)
        return np.array([e.cell for e in self.emitters], dtype=int)

    def coupling_matrix(self, sublattice_count) -> np.ndarray:
        """|I| x N matrix of couplings g_ns (no phase)."""
        g = np.zeros((sublattice_count, len(self)), dtype=complex)
        for n, emitter in enumerate(self.emitters):
            for s, value in emitter.sublattice_couplings:
                if s >= sublattice_count:
                    raise ConfigurationError(
                        'Emitter {} couples to missing sublattice {}'.format(
                            n, s))
                g[s, n] = value
        return g

    def coupling_norm(self) -> float:
        return float(np.sqrt(sum(e.coupling_norm ** 2 for e in self)))


def _wavevectors(k, dimension):
    k = np.asarray(k, dtype=float)
    if dimension == 1:
        return k[..., np.newaxis]
    if k.shape[-1:] != (dimension,):
        raise ValueError('Wavevector must end in an axis of length {}'.format(
            dimension))
    return k


@dataclass(frozen=True)
class BuiltModel:
    lattice: LatticeSpec
    effective_hoppings: Tuple[HoppingTerm, ...]
    label: str = ''
    _offsets: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'effective_hoppings',
                           tuple(self.effective_hoppings))
        if not self.label:
            object.__setattr__(self, 'label', self.lattice.name)
        offsets = np.array([t.offset for t in self.effective_hoppings],
                           dtype=float).reshape(-1, self.dimension)
        object.__setattr__(self, '_offsets', offsets)

    @property
    def dimension(self) -> int:
        return self.lattice.dimension

    @property
    def bands(self) -> int:
        return self.lattice.sublattice_count

    @property
    def name(self) -> str:
        return self.lattice.name

    def bloch(self, k) -> np.ndarray:
        """
        Bloch matrix h_k.  For 1D models ``k`` may be a scalar or any array of
        momenta; for 2D models its last axis holds (k_x, k_y).  The result
        carries the batch shape of ``k`` followed by |I| x |I|.
        """
        k = _wavevectors(k, self.dimension)
        phases = np.exp(-1j * (k @ self._offsets.T))
        h = np.zeros(k.shape[:-1] + (self.bands, self.bands), dtype=complex)
        for index, term in enumerate(self.effective_hoppings):
            h[..., term.to_sublattice, term.from_sublattice] += \
                term.amplitude * phases[..., index]
        return h

    def hopping_ranges(self) -> Tuple[int, int]:
        """(p, q): farthest hop to the right and to the left of a 1D model."""
        if self.dimension != 1:
            raise PreconditionError('Hopping ranges are defined for 1D models')
        offsets = [t.offset[0] for t in self.effective_hoppings]
        return max([0] + offsets), max([0] + [-d for d in offsets])

    def k_grid(self, n: int, closed=False) -> np.ndarray:
        """Uniform grid of n momenta per axis on [-π, π)."""
        axis = -np.pi + 2 * np.pi * np.arange(n + int(closed)) / n
        if self.dimension == 1:
            return axis
        kx, ky = np.meshgrid(axis, axis, indexing='ij')
        return np.stack([kx, ky], axis=-1)

    def max_norm(self, n=256) -> float:
        """Largest operator norm of h_k on a grid."""
        h = self.bloch(self.k_grid(n if self.dimension == 1 else 64))
        return float(np.max(np.linalg.norm(h, ord=2, axis=(-2, -1))))


def build_effective(lattice: LatticeSpec) -> BuiltModel:
    """Fold the jump operators into complex hoppings J - (iκ/2) Σ l* l."""
    table = {}

    def add(offset, to, source, amplitude):
        key = (offset, to, source)
        table[key] = table.get(key, 0j) + amplitude

    for term in lattice.hoppings:
        add(term.offset, term.to_sublattice, term.from_sublattice,
            term.amplitude)

    for jump in lattice.jumps:
        for first, second in product(jump.terms, repeat=2):
            offset = tuple(a - b for a, b in zip(first.offset, second.offset))
            add(offset, first.sublattice, second.sublattice,
                -0.5j * lattice.kappa * np.conj(first.coeff) * second.coeff)

    scale = max([abs(v) for v in table.values()] + [1.0])
    hoppings = []
    for (offset, to, source), amplitude in sorted(table.items()):
        if abs(amplitude) <= 1e-15 * scale:
            continue
        if max(abs(o) for o in offset) > lattice.max_range:
            raise ModelError(
                'Effective hopping offset {} exceeds declared range {}'.format(
                    offset, lattice.max_range))
        hoppings.append(HoppingTerm(offset, source, to, amplitude))

    logger.debug('Built %s with %d effective hoppings',
                 lattice.name, len(hoppings))
    return BuiltModel(lattice, hoppings)


def bloch(model: BuiltModel, k) -> np.ndarray:
    return model.bloch(k)


def _extent(extent, dimension) -> Vector:
    extent = _offset(extent)
    if len(extent) != dimension or min(extent) < 1:
        raise ConfigurationError('Extent {} invalid for a {}D lattice'.format(
            extent, dimension))
    return extent


class Basis:
    """
    Single-excitation basis: emitters first, then photon sites in row-major
    cell order with the sublattice index running fastest.
    """
    __slots__ = ('n_emitters', 'extent', 'bands')

    def __init__(self, n_emitters, extent, bands):
        self.n_emitters = n_emitters
        self.extent = tuple(extent)
        self.bands = bands

    @classmethod
    def for_model(cls, model: BuiltModel, emitters: EmitterSet, extent):
        return cls(len(emitters), _extent(extent, model.dimension),
                   model.bands)

    def __eq__(self, other):
        return isinstance(other, Basis) and \
            (self.n_emitters, self.extent, self.bands) == \
            (other.n_emitters, other.extent, other.bands)

    def __repr__(self):
        return '<Basis: {} emitters, extent {}, {} bands>'.format(
            self.n_emitters, self.extent, self.bands)

    @property
    def cells(self) -> int:
        return int(np.prod(self.extent))

    @property
    def size(self) -> int:
        return self.n_emitters + self.cells * self.bands

    def contains(self, cell) -> bool:
        return len(cell) == len(self.extent) and \
            all(0 <= c < e for c, e in zip(cell, self.extent))

    def site_index(self, cell, sublattice=0) -> int:
        cell = _offset(cell)
        if not self.contains(cell):
            raise ConfigurationError('Cell {} outside extent {}'.format(
                cell, self.extent))
        flat = int(np.ravel_multi_index(cell, self.extent))
        return self.n_emitters + flat * self.bands + sublattice

    def sites(self):
        """All photon sites as (cell, sublattice) in basis order."""
        return [(cell, s) for cell in np.ndindex(*self.extent)
                for s in range(self.bands)]

    def cell_array(self) -> np.ndarray:
        """Cell coordinates of every photon basis state, shape (M, d)."""
        cells = np.array(list(np.ndindex(*self.extent)), dtype=int)
        return np.repeat(cells, self.bands, axis=0)


def real_space_hamiltonian(model: BuiltModel, emitters: EmitterSet, extent,
                           bc=BoundaryCondition.PERIODIC) -> sparse.csr_matrix:
    bc = BoundaryCondition(bc)
    basis = Basis.for_model(model, emitters, extent)
    shape = np.array(basis.extent)
    cells = np.array(list(np.ndindex(*basis.extent)), dtype=int).reshape(
        -1, model.dimension)
    source = np.arange(len(cells))
    bands, offset = model.bands, basis.n_emitters

    rows, cols, data = [], [], []
    for term in model.effective_hoppings:
        target = cells + np.array(term.offset)
        if bc is BoundaryCondition.PERIODIC:
            target %= shape
            mask = np.ones(len(cells), dtype=bool)
        else:
            mask = np.all((target >= 0) & (target < shape), axis=1)
        flat = np.ravel_multi_index(tuple(target[mask].T), basis.extent)
        rows.append(offset + flat * bands + term.to_sublattice)
        cols.append(offset + source[mask] * bands + term.from_sublattice)
        data.append(np.full(mask.sum(), term.amplitude, dtype=complex))

    for n, emitter in enumerate(emitters):
        if not basis.contains(emitter.cell):
            raise ConfigurationError('Emitter {} at {} outside extent {}'.format(
                n, emitter.cell, basis.extent))
        rows.append([n])
        cols.append([n])
        data.append([emitter.detuning])
        for s, g in emitter.sublattice_couplings:
            site = basis.site_index(emitter.cell, s)
            rows.append([site, n])
            cols.append([n, site])
            data.append([g, np.conj(g)])

    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(basis.size, basis.size), dtype=complex)
    return matrix.tocsr()


def is_hermitian(model: BuiltModel, tolerance=TOL_HERMITIAN) -> bool:
    h = model.bloch(model.k_grid(HERMITIAN_TEST_GRID))
    return bool(np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2)))) <=
                tolerance)


def wick_rotate(hermitian: BuiltModel) -> BuiltModel:
    if not is_hermitian(hermitian):
        raise PreconditionError(
            'wick_rotate needs a Hermitian model, {} is not'.format(
                hermitian.label))
    hoppings = [HoppingTerm(t.offset, t.from_sublattice, t.to_sublattice,
                            1j * t.amplitude)
                for t in hermitian.effective_hoppings]
    return BuiltModel(hermitian.lattice, hoppings,
                      'wick({})'.format(hermitian.label))


def fourier_cells(grid, cells) -> np.ndarray:
    """
    c_r = n^{-d} Σ_k e^{ik.r} grid[k] for each requested cell, where ``grid``
    holds values on ``k_grid(n)`` with shape (n,)*d followed by any trailing
    axes.  The result has shape (len(cells),) + trailing axes.
    """
    cells = np.asarray(cells, dtype=int).reshape(len(cells), -1)
    dimension = cells.shape[1]
    n = grid.shape[0]
    transformed = np.fft.ifftn(grid, axes=tuple(range(dimension)))
    values = transformed[tuple((cells % n).T)]
    # the grid starts at k = −π
    sign = np.where(cells.sum(axis=1) % 2, -1.0, 1.0)
    return values * sign.reshape((-1,) + (1,) * (values.ndim - 1))
