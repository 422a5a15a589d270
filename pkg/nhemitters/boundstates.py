"""
Bound states: roots of det[E − Δ − Σ(E)], their photon profiles,
normalization and classification, and the analytic dark states of the
alternating-loss lattice.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from nhemitters.config import BIC_THRESHOLD, NEWTON_STEP, TOL_SPECTRUM
from nhemitters.errors import InsufficientTailError, NumericalError, \
    PreconditionError
from nhemitters.model import Basis, BoundaryCondition, BuiltModel, \
    EmitterSet, fourier_cells, real_space_hamiltonian
from nhemitters.selfenergy import QuadratureSigma, default_grid, \
    self_energy_evaluator, winding_number

logger = logging.getLogger(__name__)

Site = Tuple[Tuple[int, ...], int]


class BoundStateClass(str, Enum):
    CONVENTIONAL = 'conventional'
    HIDDEN = 'hidden'
    BIC = 'bic'
    UNCLASSIFIABLE = 'unclassifiable'


class Sector(str, Enum):
    SYMMETRIC = 'symmetric'
    ANTISYMMETRIC = 'antisymmetric'


@dataclass(frozen=True, eq=False)
class BoundState:
    energy: complex
    emitter_weights: np.ndarray
    photon_profile: Dict[Site, complex]
    kind: BoundStateClass
    residual: float
    normalized: bool = False
    flags: Tuple[str, ...] = ()

    def total_norm(self) -> float:
        return float(np.sum(np.abs(self.emitter_weights) ** 2) +
                     sum(abs(c) ** 2 for c in self.photon_profile.values()))

    def to_vector(self, basis: Basis, wrap=True) -> np.ndarray:
        """Embed into a finite single-excitation basis.  Sites outside the
        extent are folded back periodically, or dropped if ``wrap`` is off."""
        vector = np.zeros(basis.size, dtype=complex)
        vector[:basis.n_emitters] = self.emitter_weights
        shape = np.array(basis.extent)
        for (cell, s), amplitude in self.photon_profile.items():
            if not basis.contains(cell):
                if not wrap:
                    continue
                cell = tuple(np.mod(cell, shape))
            vector[basis.site_index(cell, s)] += amplitude
        return vector


@dataclass(frozen=True)
class RootSearchConfig:
    region: Tuple[float, float, float, float]
    seed_grid: Tuple[int, int] = (40, 40)
    newton_tol: float = 1e-12
    dedupe_radius: float = 1e-6
    max_iterations: int = 60
    residual_tol: float = 1e-9
    profile_radius: int = 40
    grid_n: Optional[int] = None
    method: str = 'auto'

    def __post_init__(self):
        re0, re1, im0, im1 = self.region
        if not (re0 < re1 and im0 < im1):
            raise ValueError('Region must be re0 < re1, im0 < im1')
        if min(self.newton_tol, self.dedupe_radius, self.residual_tol) <= 0:
            raise ValueError('Tolerances must be positive')
        if min(self.seed_grid) < 1:
            raise ValueError('Seed grid must be at least 1 x 1')

    def seeds(self):
        re0, re1, im0, im1 = self.region
        n_re, n_im = self.seed_grid
        re = re0 + (re1 - re0) * (np.arange(n_re) + 0.5) / n_re
        im = im0 + (im1 - im0) * (np.arange(n_im) + 0.5) / n_im
        return (re[:, None] + 1j * im[None, :]).ravel()

    def contains(self, z, margin=0.1):
        re0, re1, im0, im1 = self.region
        pad_re, pad_im = margin * (re1 - re0), margin * (im1 - im0)
        return re0 - pad_re <= z.real <= re1 + pad_re and \
            im0 - pad_im <= z.imag <= im1 + pad_im


def _dressed(sigma, detunings, energy):
    return energy * np.eye(len(detunings)) - np.diag(detunings) - sigma(energy)


def _newton(f, seed, config):
    energy = seed
    for _ in range(config.max_iterations):
        try:
            value = f(energy)
            slope = (f(energy + NEWTON_STEP) - f(energy - NEWTON_STEP)) / \
                (2 * NEWTON_STEP)
        except NumericalError:
            return None, None
        if slope == 0:
            return None, None
        step = value / slope
        energy = energy - step
        if not config.contains(energy):
            return None, None
        if abs(step) < config.newton_tol * max(1.0, abs(energy)):
            return energy, slope
    return None, None


def _null_vector(matrix):
    _, singular, vh = np.linalg.svd(matrix)
    vector = np.conj(vh[-1])
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * abs(pivot) / pivot, float(singular[-1])


def dressed_roots(sigma, detunings, config: RootSearchConfig):
    """
    Distinct roots of det[z − Δ − Σ(z)] inside ``config.region`` as
    (root, slope) pairs sorted by real then imaginary part.  ``sigma`` may be
    any callable z ↦ Σ(z), including a continuation to another sheet.
    """
    def f(energy):
        return np.linalg.det(_dressed(sigma, detunings, energy))

    candidates = []
    for seed in config.seeds():
        root, slope = _newton(f, seed, config)
        if root is not None:
            candidates.append((root, slope))
    if not candidates:
        logger.info('Newton did not converge from any of %d seeds in %s',
                    len(config.seeds()), config.region)
        return []

    candidates.sort(key=lambda item: (item[0].real, item[0].imag))
    roots = []
    for root, slope in candidates:
        if all(abs(root - kept) > config.dedupe_radius for kept, _ in roots):
            roots.append((root, slope))
    return roots


def find_bound_states(model: BuiltModel, emitters: EmitterSet,
                      config: RootSearchConfig, sigma=None) -> List[BoundState]:
    sigma = sigma or self_energy_evaluator(model, emitters, config.method,
                                           config.grid_n)
    detunings = emitters.detunings
    roots = dressed_roots(sigma, detunings, config)

    states = []
    for energy, slope in roots:
        weights, residual = _null_vector(_dressed(sigma, detunings, energy))
        if residual > config.residual_tol:
            logger.debug('Dropping root %s with residual %.3g',
                         energy, residual)
            continue
        flags = ()
        if abs(slope) < 1e-8:
            flags = ('singular-jacobian',)
            logger.warning('Root %s has a singular Jacobian', energy)
        profile = photon_profile(energy, weights, model, emitters,
                                 config.profile_radius)
        state = BoundState(complex(energy), weights, profile,
                           BoundStateClass.CONVENTIONAL, residual,
                           flags=flags)
        if model.dimension == 1:
            state = replace(state, kind=classify(state, model))
        states.append(state)
    logger.debug('Found %d bound states in %s', len(states), config.region)
    return states


def _profile_grid(model, span, radius, grid_n):
    n = max(grid_n or default_grid(model), 8 * (span + 2 * radius))
    n = 1 << int(np.ceil(np.log2(n)))
    return n if model.dimension == 1 else min(n, 1024)


def _transform(model, emitters, energy, weights, n):
    """(E − h_k)^{-1} g_k c_e on the n-point grid, shape (n,)*d + (|I|,)."""
    quadrature = QuadratureSigma(model, emitters, n)
    amplitudes = quadrature.resolved(energy) @ weights
    return amplitudes.reshape((n,) * model.dimension + (model.bands,))


def photon_profile(energy, weights, model: BuiltModel, emitters: EmitterSet,
                   radius=40, grid_n=None) -> Dict[Site, complex]:
    """
    c_r = ∫ e^{ik.r} (E − h_k)^{-1} g_k c_e on every cell within ``radius``
    (Chebyshev distance) of an emitter.
    """
    positions = emitters.positions()
    low, high = positions.min(axis=0) - radius, positions.max(axis=0) + radius
    n = _profile_grid(model, int(np.max(high - low)), radius, grid_n)
    grid = _transform(model, emitters, energy, np.asarray(weights), n)

    cells = set()
    for position in positions:
        cells.update(product(*[range(int(p) - radius, int(p) + radius + 1)
                               for p in position]))
    cells = sorted(cells)
    values = fourier_cells(grid, cells)
    return {(cell, s): complex(values[i, s])
            for i, cell in enumerate(cells) for s in range(model.bands)}


def normalize(state: BoundState, model: BuiltModel, emitters: EmitterSet,
              grid_n=None) -> BoundState:
    """Rescale so that Σ|c_e|² + Σ_r|c_r|² = 1 over the infinite lattice."""
    weights = np.asarray(state.emitter_weights)
    quadrature = QuadratureSigma(model, emitters, grid_n)
    photons = quadrature.resolved(state.energy) @ weights
    bracket = float(np.sum(np.abs(weights) ** 2) +
                    np.mean(np.sum(np.abs(photons) ** 2, axis=-1)))
    scale = 1 / np.sqrt(bracket)
    return replace(state, emitter_weights=weights * scale,
                   photon_profile={site: c * scale for site, c in
                                   state.photon_profile.items()},
                   normalized=True)


def classify(state: BoundState, model: BuiltModel,
             grid_n=4096) -> BoundStateClass:
    if model.dimension != 1:
        raise PreconditionError('Classification needs a 1D model')
    energy = state.energy
    spectrum = np.linalg.eigvals(model.bloch(model.k_grid(grid_n, closed=True)))
    undamped = spectrum[np.abs(spectrum.imag) < BIC_THRESHOLD].real
    if abs(energy.imag) < BIC_THRESHOLD and undamped.size and \
            undamped.min() - BIC_THRESHOLD <= energy.real <= \
            undamped.max() + BIC_THRESHOLD:
        return BoundStateClass.BIC
    if np.min(np.abs(spectrum - energy)) < TOL_SPECTRUM:
        logger.warning('Energy %s sits on the spectrum and is not a BIC',
                       energy)
        return BoundStateClass.UNCLASSIFIABLE
    if winding_number(model, energy).index != 0:
        return BoundStateClass.HIDDEN
    return BoundStateClass.CONVENTIONAL


@dataclass(frozen=True)
class Localization:
    xi_left: float
    xi_right: float
    r_squared_left: float = 1.0
    r_squared_right: float = 1.0


def _tail_fit(x, amplitude, floor=1e-13, minimum=8):
    mask = amplitude > floor
    if not mask.any():
        return 0.0, 1.0
    if mask.sum() < minimum:
        raise InsufficientTailError(
            'Only {} tail sites above {:g}'.format(int(mask.sum()), floor))
    logs = np.log(amplitude[mask])
    slope, intercept = np.polyfit(x[mask], logs, 1)
    fitted = slope * x[mask] + intercept
    total = np.sum((logs - logs.mean()) ** 2)
    r_squared = 1.0 if total == 0 else 1 - np.sum((logs - fitted) ** 2) / total
    return float(1 / abs(slope)), float(r_squared)


def localization_lengths(profile: Dict[Site, complex]) -> Localization:
    """Exponential decay lengths on each side of the profile maximum."""
    weights = {}
    for (cell, _), amplitude in profile.items():
        if len(cell) != 1:
            raise PreconditionError('Localization lengths need a 1D profile')
        weights[cell[0]] = weights.get(cell[0], 0.0) + abs(amplitude) ** 2
    x = np.array(sorted(weights))
    amplitude = np.sqrt([weights[i] for i in x])
    peak = int(np.argmax(amplitude))
    xi_left, r2_left = _tail_fit(x[:peak], amplitude[:peak])
    xi_right, r2_right = _tail_fit(x[peak + 1:], amplitude[peak + 1:])
    return Localization(xi_left, xi_right, r2_left, r2_right)


def _alternating(model, emitters, count):
    if model.label != 'alternating_loss':
        raise PreconditionError('Needs the alternating_loss lattice, got '
                                '{}'.format(model.label))
    if len(emitters) != count:
        raise PreconditionError('Expected {} emitter(s), got {}'.format(
            count, len(emitters)))
    for emitter in emitters:
        if abs(emitter.detuning) > 1e-12:
            raise PreconditionError('Dark states need Δ = 0, got {}'.format(
                emitter.detuning))
    return model.lattice.parameters['J']


def _verified(model, emitters, extent, weights, profile, kind, flags=()):
    norm = np.sqrt(np.sum(np.abs(weights) ** 2) +
                   sum(abs(c) ** 2 for c in profile.values()))
    state = BoundState(0j, weights / norm,
                       {site: c / norm for site, c in profile.items()},
                       kind, 0.0, True, flags)
    basis = Basis.for_model(model, emitters, extent)
    hamiltonian = real_space_hamiltonian(model, emitters, extent,
                                         BoundaryCondition.OPEN)
    residual = float(np.linalg.norm(
        hamiltonian @ state.to_vector(basis, wrap=False)))
    if residual > 1e-10:
        logger.warning('Dark state residual %.3g exceeds 1e-10', residual)
    return replace(state, residual=residual)


def bic_construct(model: BuiltModel, emitters: EmitterSet, extent,
                  bc=BoundaryCondition.OPEN) -> BoundState:
    """
    Dark state of an A-site emitter in an open alternating-loss chain: the
    photon lives on the B sites to the right of the emitter with alternating
    sign, and the emitter amplitude is J/g.
    """
    J = _alternating(model, emitters, 1)
    if BoundaryCondition(bc) is not BoundaryCondition.OPEN:
        raise PreconditionError('The dark state needs an open right boundary')
    emitter = emitters[0]
    if [s for s, _ in emitter.sublattice_couplings] != [0]:
        raise PreconditionError('The emitter must couple to sublattice A only')
    length = int(np.atleast_1d(extent)[0])
    x_e = emitter.cell[0]
    g = emitter.couplings[0]
    profile = {((x,), 1): -complex((-1) ** (x - x_e))
               for x in range(x_e, length)}
    return _verified(model, emitters, extent, np.array([J / g]), profile,
                     BoundStateClass.BIC)


def two_emitter_trapped_state(model: BuiltModel, emitters: EmitterSet,
                              sector: Optional[Sector] = None,
                              extent=None) -> Optional[BoundState]:
    """
    Photon trapped between two A-site emitters; the emitters carry the
    relative sign (−1)^{x₂₁+1}, so odd separations are symmetric and even
    ones antisymmetric.  Returns None when no such state exists.
    """
    J = _alternating(model, emitters, 2)
    first, second = emitters
    if any([s for s, _ in e.sublattice_couplings] != [0] for e in emitters):
        logger.info('No trapped state: both emitters must sit on A')
        return None
    x1, x2 = first.cell[0], second.cell[0]
    if x1 == x2:
        raise PreconditionError('Emitters must sit in different cells')
    separation = x2 - x1
    sign = (-1) ** (separation + 1)
    found = Sector.SYMMETRIC if sign > 0 else Sector.ANTISYMMETRIC
    if sector is not None and Sector(sector) is not found:
        logger.info('No trapped state in the %s sector for |x12| = %d',
                    Sector(sector).value, separation)
        return None
    weights = np.array([J / first.couplings[0], sign * J / second.couplings[0]])
    profile = {((x,), 1): -complex((-1) ** (x - x1)) for x in range(x1, x2)}
    extent = extent if extent is not None else (x2 + 2,)
    return _verified(model, emitters, extent, weights, profile,
                     BoundStateClass.BIC, ('sector=' + found.value,))


def finite_lattice_state(model: BuiltModel, emitters: EmitterSet, extent,
                         bc, near) -> BoundState:
    """Right eigenvector of the finite H_eff whose eigenvalue is closest to
    ``near``, normalized to unit norm."""
    basis = Basis.for_model(model, emitters, extent)
    hamiltonian = real_space_hamiltonian(model, emitters, extent, bc).toarray()
    values, vectors = scipy.linalg.eig(hamiltonian)
    index = int(np.argmin(np.abs(values - near)))
    vector = vectors[:, index] / np.linalg.norm(vectors[:, index])
    residual = float(np.linalg.norm(hamiltonian @ vector -
                                    values[index] * vector))
    profile = {site: complex(vector[basis.n_emitters + i])
               for i, site in enumerate(basis.sites())}
    return BoundState(complex(values[index]), vector[:basis.n_emitters],
                      profile, BoundStateClass.CONVENTIONAL, residual, True,
                      ('finite-lattice',))
