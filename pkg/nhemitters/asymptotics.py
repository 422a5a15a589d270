"""
Long-time and closed-form emitter amplitudes: branch-cut power laws, pole
sets and their residues, the single-pole approximation and the exact
two-pole solution of the unidirectional Hatano-Nelson lattice.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.special import gamma

from nhemitters.boundstates import RootSearchConfig, dressed_roots
from nhemitters.config import NEWTON_STEP, TOL_ROOT
from nhemitters.errors import ConfluentPoleError, FitError, NumericalError, \
    PreconditionError
from nhemitters.model import BuiltModel, EmitterSet
from nhemitters.selfenergy import Sheet, self_energy_evaluator
from nhemitters.trajectory import Engine, Trajectory

logger = logging.getLogger(__name__)


def _times(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


# ----------------------------------------------------------------- branch cut

@dataclass(frozen=True)
class BranchCutAsymptotics:
    z_bp: complex
    nu: float
    F: complex
    residual: float = 0.0
    window: Tuple[float, float] = (1e-6, 1e-2)

    def amplitude(self, t) -> np.ndarray:
        """c_BC(t); NaN at t <= 0 where the law has no meaning."""
        t = _times(t)
        prefactor = np.exp(-0.5j * np.pi * (self.nu + 1)) * \
            gamma(self.nu + 1) * self.F / (2 * np.pi)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = prefactor * np.exp(-1j * self.z_bp * t) / \
                t ** (self.nu + 1)
        return np.where(t > 0, values, np.nan)

    def population(self, t) -> np.ndarray:
        return np.abs(self.amplitude(t)) ** 2

    @property
    def exponent(self) -> float:
        """Power of t in |c_BC(t)|²."""
        return -2 * (self.nu + 1)


def _green(sigma, detunings, z, sheet):
    size = len(detunings)
    return np.linalg.inv(z * np.eye(size) - np.diag(detunings) -
                         sigma(z, sheet))


def sheet_difference(sigma, detunings, z, vector) -> complex:
    """u† [G_I(z) − G_II(z)] u."""
    difference = _green(sigma, detunings, z, Sheet.FIRST) - \
        _green(sigma, detunings, z, Sheet.SECOND)
    return complex(np.vdot(vector, difference @ vector))


def branch_cut_asymptotics(sigma, detunings, z_bp, vector=None,
                           theta=np.pi / 2, window=(1e-6, 1e-2),
                           points=41) -> BranchCutAsymptotics:
    """
    Fit D(z) = F (z − z_bp)^ν to the sheet difference on the ray
    z = z_bp + s e^{iθ}, s log-spaced over ``window``.  ν is snapped to the
    nearest half-integer when the log-log slope is within 0.05 of one.
    """
    detunings = np.atleast_1d(np.asarray(detunings, dtype=complex))
    if vector is None:
        vector = np.zeros(len(detunings), dtype=complex)
        vector[0] = 1
    vector = np.asarray(vector, dtype=complex)
    s = np.logspace(np.log10(window[0]), np.log10(window[1]), points)
    offsets = s * np.exp(1j * theta)
    try:
        values = np.array([sheet_difference(sigma, detunings, z_bp + w, vector)
                           for w in offsets])
    except (NumericalError, np.linalg.LinAlgError) as exception:
        raise FitError('Sheet difference undefined near {}: {}'.format(
            z_bp, exception))
    if not np.all(np.isfinite(values)) or np.any(values == 0):
        raise FitError('Sheet difference vanishes or diverges near {}'.format(
            z_bp))

    slope = float(np.polyfit(np.log(s), np.log(np.abs(values)), 1)[0])
    nu = np.round(2 * slope) / 2
    if abs(nu - slope) > 0.05:
        logger.debug('Slope %.4f is not a half-integer, kept as is', slope)
        nu = slope
    ratios = values / offsets ** nu
    F = complex(np.median(ratios.real), np.median(ratios.imag))
    residual = float(np.max(np.abs(ratios - F)) / abs(F))
    if residual > 0.05:
        raise FitError(
            'Sheet difference near {} is not a power law over {} '
            '(relative residual {:.3g})'.format(z_bp, window, residual))
    logger.debug('Branch cut at %s: nu=%g F=%s residual %.3g',
                 z_bp, nu, F, residual)
    return BranchCutAsymptotics(complex(z_bp), float(nu), F, residual,
                                tuple(window))


# ---------------------------------------------------------------------- poles

@dataclass(frozen=True, eq=False)
class Pole:
    z: complex
    residue: np.ndarray
    sheet: Sheet = Sheet.FIRST

    @property
    def rate(self) -> float:
        return -self.z.imag


@dataclass(frozen=True, eq=False)
class PoleSet:
    poles: Tuple[Pole, ...]

    def __len__(self):
        return len(self.poles)

    def __iter__(self):
        return iter(self.poles)

    def dominant(self) -> Pole:
        if not self.poles:
            raise PreconditionError('Empty pole set')
        return max(self.poles, key=lambda p: np.linalg.norm(p.residue))

    def amplitude(self, t, initial=0) -> np.ndarray:
        """Σ_p R_p e^{−i z_p t} applied to emitter ``initial``, shape (T, N)."""
        t = _times(t)
        size = np.atleast_2d(self.dominant().residue).shape[0]
        total = np.zeros((len(t), size), dtype=complex)
        for pole in self.poles:
            column = np.atleast_2d(pole.residue)[:, initial]
            total += np.exp(-1j * pole.z * t)[:, None] * column[None, :]
        return total


def pole_residue(green: Callable, z0, radius=1e-4, points=16):
    """Residue of ``green`` at a simple pole z0 by circular quadrature."""
    angles = 2 * np.pi * np.arange(points) / points
    offsets = radius * np.exp(1j * angles)
    return sum(np.asarray(green(z0 + w)) * w for w in offsets) / points


def pole_set(model: BuiltModel, emitters: EmitterSet, config: RootSearchConfig,
             sheet=Sheet.FIRST, sigma=None) -> PoleSet:
    """Roots of det[z − Δ − Σ(z)] on ``sheet`` with their matrix residues."""
    sigma = sigma or self_energy_evaluator(model, emitters, config.method,
                                           config.grid_n)
    detunings = emitters.detunings

    def on_sheet(z):
        return sigma(z, sheet)

    def green(z):
        return _green(sigma, detunings, z, sheet)

    poles = [Pole(complex(z), pole_residue(green, z), Sheet(sheet))
             for z, _ in dressed_roots(on_sheet, detunings, config)]
    return PoleSet(tuple(poles))


def exact_unidirectional_poles(detuning, g, kappa) -> PoleSet:
    """
    Closed-form poles z± = [Δ − iκ ± √((Δ+iκ)² + 4g²)]/2 and residues
    R± = ±(z± + iκ)/(z₊ − z₋) of one emitter on the unidirectional lattice.
    """
    root = np.sqrt((detuning + 1j * kappa) ** 2 + 4 * g * g + 0j)
    plus = (detuning - 1j * kappa + root) / 2
    minus = (detuning - 1j * kappa - root) / 2
    if abs(plus - minus) < 1e-12:
        raise ConfluentPoleError(
            'Dressed exceptional point at z = {} (Δ={}, g={}, κ={}): the '
            'amplitude is (1 + a t) e^{{−izt}}, not a pole sum'.format(
                plus, detuning, g, kappa))
    residues = ((plus + 1j * kappa) / (plus - minus),
                -(minus + 1j * kappa) / (plus - minus))
    return PoleSet(tuple(Pole(complex(z), np.array([[r]]))
                         for z, r in zip((plus, minus), residues)))


def unidirectional_continued_sigma(kappa, g) -> Callable:
    """Σ(z) = g²/(z + iκ), continued across the loop."""
    def sigma(z, sheet=Sheet.FIRST):
        return np.array([[g * g / (z + 1j * kappa)]])
    return sigma


# ------------------------------------------------------------------------ SPA

@dataclass(frozen=True)
class SPAResult:
    z: complex
    rate: float
    breakdown: bool = False
    reason: str = ''

    def amplitude(self, t) -> np.ndarray:
        t = _times(t)
        if self.breakdown:
            return np.full(len(t), np.nan, dtype=complex)
        return np.exp(-1j * self.z * t)


def spa_poles(detuning, sigma, derivative_limit=1e8) -> SPAResult:
    """
    Single-pole approximation z = Δ + Σ(Δ).  Breaks down where Σ diverges or
    its numerical derivative exceeds ``derivative_limit``.
    """
    def scalar(z):
        return complex(np.asarray(sigma(z)).ravel()[0])

    try:
        with np.errstate(divide='raise', invalid='raise'):
            value = scalar(detuning)
            slope = (scalar(detuning + NEWTON_STEP) -
                     scalar(detuning - NEWTON_STEP)) / (2 * NEWTON_STEP)
    except (NumericalError, ZeroDivisionError, FloatingPointError) as exception:
        logger.info('SPA breaks down at Δ=%s: %s', detuning, exception)
        return SPAResult(complex(detuning), np.nan, True,
                         'self-energy diverges: {}'.format(exception))
    if not np.isfinite(value) or not np.isfinite(slope) or \
            abs(slope) > derivative_limit:
        logger.info('SPA breaks down at Δ=%s: Σ=%s, Σ\'=%s',
                    detuning, value, slope)
        return SPAResult(complex(detuning), np.nan, True,
                         'self-energy is singular at the detuning')
    z = detuning + value
    return SPAResult(complex(z), -z.imag)


# ------------------------------------------------------------------- dispatch

def _unidirectional(model: BuiltModel) -> bool:
    params = model.lattice.parameters
    if model.label == 'hn_unidirectional':
        return True
    return model.label == 'hatano_nelson' and \
        abs(abs(params['J']) - params['kappa'] / 2) < TOL_ROOT


def _fit_with_retry(sigma, detunings, vector, window):
    low, high = window
    while True:
        try:
            return branch_cut_asymptotics(sigma, detunings, 0j, vector,
                                          window=(low, high))
        except FitError:
            if high <= 1e-4:
                raise
            high /= 10
            logger.debug('Narrowing branch-cut window to (%g, %g)', low, high)


def asymptotic_trajectory(model: BuiltModel, emitters: EmitterSet, tgrid,
                          vector=None, window=(1e-6, 1e-2)) -> Trajectory:
    """
    The asymptotic engine: exact two-pole amplitude on the unidirectional
    lattice, the branch-cut law at z = 0 for the Wick chain and the
    alternating-loss lattice.  ``vector`` picks the emitter superposition the
    branch cut is projected on.
    """
    times = _times(tgrid)
    if len(emitters) == 0:
        raise PreconditionError('The asymptotic engine needs emitters')
    if _unidirectional(model):
        if len(emitters) != 1:
            raise PreconditionError(
                'Exact poles cover a single unidirectional emitter')
        emitter = emitters[0]
        kappa = model.lattice.parameters['kappa']
        poles = exact_unidirectional_poles(
            emitter.detuning, emitter.couplings[emitter.sublattice], kappa)
        return Trajectory(times, poles.amplitude(times), Engine.ASYMPTOTIC,
                          flags=('exact-poles',))
    if model.label in ('wick_chain', 'alternating_loss'):
        sigma = self_energy_evaluator(model, emitters, 'closed')
        if vector is None:
            vector = np.zeros(len(emitters), dtype=complex)
            vector[0] = 1
        law = _fit_with_retry(sigma, emitters.detunings, vector, window)
        amplitude = law.amplitude(times)
        return Trajectory(times, amplitude[:, None] *
                          np.asarray(vector)[None, :],
                          Engine.ASYMPTOTIC,
                          flags=('branch-cut', 'nu={:g}'.format(law.nu)))
    raise PreconditionError(
        'No asymptotic decomposition for {}'.format(model.label))


# ----------------------------------------------------------------- laws

def alternating_loss_law(J, kappa, g, detuning=0j, sublattice=0):
    """
    (exponent, coefficient) of the long-time |c_e(t)|² for one emitter on the
    alternating-loss lattice: t⁻¹ on a resonant lossy site, t⁻³ otherwise.
    """
    if sublattice == 1:
        return -3.0, J ** 2 / (np.pi * g ** 4 * kappa)
    if abs(detuning) < TOL_ROOT:
        return -1.0, 4 * J ** 2 * kappa / (np.pi * g ** 4)
    return -3.0, g ** 4 / (16 * np.pi * J ** 2 * abs(detuning) ** 4 * kappa)


def wick_chain_law(J, g):
    """(exponent, coefficient) on the Wick chain; independent of Δ."""
    return -3.0, J / (np.pi * g ** 4)
