"""
Diagnostics on trajectories and finite lattices: power-law fits and local
exponents, PBC/OBC spectra, mean squared displacement of the photon cloud,
overlaps with bound states and the finite-size scaling of the dark state.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg
from numpy.lib.stride_tricks import sliding_window_view

from nhemitters import catalog
from nhemitters.boundstates import BoundState, bic_construct
from nhemitters.config import DENSE_LIMIT, FIT_LOW_CONFIDENCE, \
    FIT_MIN_SAMPLES, FIT_NOISE_FLOOR, FIT_TRANSIENT
from nhemitters.dynamics import evolve_dense
from nhemitters.errors import ConfigurationError, FitError, \
    PlateauNotReachedError, PreconditionError
from nhemitters.model import Basis, BoundaryCondition, BuiltModel, \
    EmitterSet, real_space_hamiltonian
from nhemitters.trajectory import Trajectory

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------- power laws

@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    coefficient: float
    window: Tuple[float, float]
    r_squared: float
    samples: int
    low_confidence: bool = False

    def __call__(self, t):
        return self.coefficient * np.asarray(t, dtype=float) ** self.exponent


def _series(data, emitter):
    if isinstance(data, Trajectory):
        return data.times, data.populations()[:, emitter]
    t, p = data
    return np.asarray(t, dtype=float), np.asarray(p, dtype=float)


def fit_power_law(data, window=None, emitter=0) -> PowerLawFit:
    """
    Least squares of ln p against ln t.  ``data`` is a Trajectory (the
    population of ``emitter`` is fitted) or a (t, p) pair.  Samples before
    the transient or under the noise floor are left out.
    """
    t, p = _series(data, emitter)
    low, high = window or (FIT_TRANSIENT, np.inf)
    mask = (t >= max(low, FIT_TRANSIENT)) & (t <= high) & \
        (p > FIT_NOISE_FLOOR)
    count = int(np.count_nonzero(mask))
    if count < FIT_MIN_SAMPLES:
        raise FitError('Need {} samples in window ({}, {}), got {}'.format(
            FIT_MIN_SAMPLES, low, high, count))
    x, y = np.log(t[mask]), np.log(p[mask])
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = float(1 - np.sum(residual ** 2) / total) if total > 0 else 1.0
    low_confidence = r_squared < FIT_LOW_CONFIDENCE
    if low_confidence:
        logger.warning('Power-law fit on (%g, %g) has R^2 = %.4f',
                       t[mask][0], t[mask][-1], r_squared)
    return PowerLawFit(float(slope), float(np.exp(intercept)),
                       (float(t[mask][0]), float(t[mask][-1])),
                       r_squared, count, low_confidence)


def local_exponents(t, p, width=9):
    """Sliding-window slope d ln p / d ln t; returns (window centres, slopes)."""
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    keep = (t > 0) & (p > FIT_NOISE_FLOOR)
    x, y = np.log(t[keep]), np.log(p[keep])
    if len(x) < width:
        raise FitError('Need at least {} positive samples, got {}'.format(
            width, len(x)))
    xs, ys = sliding_window_view(x, width), sliding_window_view(y, width)
    dx = xs - xs.mean(axis=1, keepdims=True)
    dy = ys - ys.mean(axis=1, keepdims=True)
    slopes = np.sum(dx * dy, axis=1) / np.sum(dx * dx, axis=1)
    return np.exp(xs.mean(axis=1)), slopes


# -------------------------------------------------------------------- spectra

@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    bc: BoundaryCondition
    extent: Tuple[int, ...]

    def __len__(self):
        return len(self.eigenvalues)


def spectra(model: BuiltModel, emitters: EmitterSet, extent):
    """Full single-excitation spectra under periodic and open boundaries."""
    basis = Basis.for_model(model, emitters, extent)
    if basis.size > DENSE_LIMIT:
        raise ConfigurationError(
            'Dense diagonalization is limited to {} states, got {}'.format(
                DENSE_LIMIT, basis.size))
    reports = []
    for bc in (BoundaryCondition.PERIODIC, BoundaryCondition.OPEN):
        matrix = real_space_hamiltonian(model, emitters, basis.extent, bc)
        values = scipy.linalg.eigvals(matrix.toarray())
        values = values[np.lexsort((values.imag, values.real))]
        reports.append(SpectrumReport(values, bc, basis.extent))
    return tuple(reports)


# ------------------------------------------------------------------------ MSD

def msd(trajectory: Trajectory, origin=None, extent=None) -> np.ndarray:
    """
    ⟨r²⟩ of the photon cloud about ``origin`` at each time, normalized by the
    photon weight.  With an ``extent`` (default: the trajectory basis)
    displacements use the nearest periodic image.  NaN where no photon is
    present.
    """
    if trajectory.photon_field is None or not trajectory.sites:
        raise PreconditionError('Trajectory carries no photon field')
    cells = np.array([cell for cell, _ in trajectory.sites], dtype=int)
    origin = np.zeros(cells.shape[1], dtype=int) if origin is None else \
        np.atleast_1d(np.asarray(origin, dtype=int))
    displacement = cells - origin
    if extent is None and trajectory.basis is not None:
        extent = trajectory.basis.extent
    if extent is not None:
        size = np.atleast_1d(np.asarray(extent, dtype=int))
        displacement = (displacement + size // 2) % size - size // 2
    radius2 = np.sum(displacement ** 2, axis=1)
    weights = np.abs(trajectory.photon_field) ** 2
    total = weights.sum(axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(total > 0, weights @ radius2 / total, np.nan)


# -------------------------------------------------------------------- overlap

def overlap_dynamics(bound_state: BoundState, trajectory: Trajectory,
                     basis: Basis = None, normalize=False) -> np.ndarray:
    """
    ⟨ψ_b|ψ(t)⟩ at each sample.  With ``normalize`` both states are scaled to
    unit norm first, which removes the overall loss of ψ(t).
    """
    basis = basis or trajectory.basis
    if trajectory.basis is None or basis != trajectory.basis:
        raise ConfigurationError('Bound state basis {} does not match the '
                                 'trajectory basis {}'.format(
                                     basis, trajectory.basis))
    if not trajectory.complete:
        raise ConfigurationError('Overlaps need the full state; record the '
                                 'trajectory with sites="all"')
    states = np.hstack([trajectory.emitter_amps, trajectory.photon_field])
    vector = bound_state.to_vector(basis)
    overlaps = states @ np.conj(vector)
    if normalize:
        norms = np.linalg.norm(states, axis=1) * np.linalg.norm(vector)
        with np.errstate(divide='ignore', invalid='ignore'):
            overlaps = np.where(norms > 0, overlaps / norms, 0j)
    return overlaps


# ---------------------------------------------------------------- dark states

@dataclass(frozen=True)
class BICScalingRow:
    size: int
    weight2: float
    plateau: float
    settled_at: float

    @property
    def ratio(self) -> float:
        return self.plateau / self.weight2 ** 2


@dataclass(frozen=True)
class BICScaling:
    rows: Tuple[BICScalingRow, ...]
    slope: float
    intercept: float
    r_squared: float


def _plateau(model, emitters, size, t0, cap, samples=201):
    t = float(t0)
    while True:
        times = np.linspace(t, 2 * t, samples)
        trajectory = evolve_dense(model, emitters, size, BoundaryCondition.OPEN,
                                  'emitter:0', times)
        population = trajectory.populations()[:, 0]
        mean = float(population.mean())
        oscillation = float(np.ptp(population)) / mean if mean > 0 else np.inf
        if oscillation <= 0.1:
            return mean, t
        if 2 * t > cap:
            raise PlateauNotReachedError(
                'L={}: population still oscillates by {:.1%} on [{}, {}]'.format(
                    size, oscillation, t, 2 * t))
        logger.info('L=%d: oscillation %.1f%% at t=%g, extending',
                    size, 100 * oscillation, t)
        t *= 2


def bic_scaling(J, kappa, g, sizes, t0=200.0, cap=25600.0) -> BICScaling:
    """
    For each chain length: the dark-state emitter weight |c_e|², the long-time
    population plateau of an initially excited A-site emitter in the middle
    of an open chain, and a linear fit of |c_e|² against 1/L.
    """
    model = catalog.built('alternating_loss', J=J, kappa=kappa)
    rows = []
    for size in sizes:
        emitters = EmitterSet.single(cell=size // 2, g=g)
        state = bic_construct(model, emitters, size)
        weight2 = float(np.abs(state.emitter_weights[0]) ** 2)
        plateau, settled = _plateau(model, emitters, size, t0, cap)
        rows.append(BICScalingRow(int(size), weight2, plateau, settled))
        logger.debug('L=%d weight^2=%.6g plateau=%.6g', size, weight2, plateau)

    x = 1.0 / np.array([row.size for row in rows], dtype=float)
    y = np.array([row.weight2 for row in rows])
    if len(rows) < 2:
        return BICScaling(tuple(rows), np.nan, np.nan, np.nan)
    slope, intercept = np.polyfit(x, y, 1)
    total = np.sum((y - y.mean()) ** 2)
    residual = np.sum((y - (slope * x + intercept)) ** 2)
    r_squared = float(1 - residual / total) if total > 0 else 1.0
    return BICScaling(tuple(rows), float(slope), float(intercept), r_squared)
