"""
Real-time dynamics in the single-excitation sector.

Two engines are provided.  The finite-lattice oracle integrates
i dψ/dt = H_eff ψ on a real-space lattice and publishes every sample to
``sampling`` subscribers.  The resolvent engine integrates the emitter
Green's function G(z) = (z − Δ − Σ(z))^{-1} along Im z = η, closed by two
rays into the lower half plane, and builds the photon field from the emitter
amplitudes by convolution with the bare propagator.
"""
import logging
from abc import abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
from scipy.integrate import quad_vec, solve_ivp
from scipy.signal import fftconvolve

from nhemitters.config import CONTOUR_EPS, CONTOUR_ETAS, DENSE_LIMIT, \
    INTEGRATOR_ATOL, INTEGRATOR_METHOD, INTEGRATOR_RTOL, TOL_SPECTRUM
from nhemitters.errors import ConfigurationError, IntegrationError, \
    KernelRangeError, PreconditionError
from nhemitters.model import Basis, BoundaryCondition, BuiltModel, \
    EmitterSet, fourier_cells, real_space_hamiltonian
from nhemitters.observers import NormMonitor, TrajectoryRecorder
from nhemitters.selfenergy import QuadratureSigma, self_energy_evaluator
from nhemitters.trajectory import Engine, InitialState, Trajectory
from sampling import Publisher, Sample
from sampling.subscription import DemandSubscription

logger = logging.getLogger(__name__)


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigurationError('Time grid must be a non-empty 1D array')
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ConfigurationError(
            'Time grid must be non-negative and non-decreasing')
    return times


# --------------------------------------------------------------- propagation

class Propagation(Publisher):
    """
    Publishes the state at each requested time.  Samples go only to
    subscriptions with outstanding demand; the run ends once no leading
    subscription has demand left.  Passive subscriptions observe without
    keeping the run alive.
    """

    def __init__(self, psi0, times):
        self.psi0 = np.asarray(psi0, dtype=complex)
        self.times = _check_times(times)
        self.subscriptions = []

    def subscribe(self, subscriber, passive=False):
        subscription = DemandSubscription(subscriber, passive)
        self.subscriptions.append(subscription)
        subscriber.on_subscribe(subscription)

    @abstractmethod
    def advance(self, state, t0, t1):
        pass

    def _demand(self):
        leading = [s for s in self.subscriptions if not s.passive]
        return any(s.active for s in leading or self.subscriptions)

    def run(self) -> np.ndarray:
        state, clock = self.psi0.copy(), 0.0
        try:
            for index, t in enumerate(self.times):
                if not self._demand():
                    logger.debug('No demand left, stopping at t=%g', clock)
                    break
                if t > clock:
                    state = self.advance(state, clock, t)
                    clock = t
                sample = Sample(index, float(t), state)
                for subscription in self.subscriptions:
                    if subscription.active:
                        subscription.deliver(sample)
        except IntegrationError as exception:
            for subscription in self.subscriptions:
                if not subscription.cancelled:
                    subscription.subscriber.on_error(exception)
            raise
        for subscription in self.subscriptions:
            if not subscription.cancelled:
                subscription.subscriber.on_complete()
        return state


class Integration(Propagation):
    """Adaptive Runge-Kutta between consecutive sample times."""

    def __init__(self, hamiltonian, psi0, times, method=INTEGRATOR_METHOD,
                 rtol=INTEGRATOR_RTOL, atol=INTEGRATOR_ATOL):
        super().__init__(psi0, times)
        self.hamiltonian = sparse.csr_matrix(hamiltonian)
        self.method = method
        self.rtol = rtol
        self.atol = atol

    def _rhs(self, t, y):
        return -1j * (self.hamiltonian @ y)

    def advance(self, state, t0, t1):
        solution = solve_ivp(self._rhs, (t0, t1), state, method=self.method,
                             t_eval=(t1,), rtol=self.rtol, atol=self.atol)
        if solution.status != 0:
            raise IntegrationError('Integration failed on [{}, {}]: {}'.format(
                t0, t1, solution.message))
        return solution.y[:, -1]


class MatrixExponential(Propagation):
    """Dense propagator e^{−iHΔt}, reused while the step stays the same."""

    def __init__(self, hamiltonian, psi0, times):
        super().__init__(psi0, times)
        if hamiltonian.shape[0] > DENSE_LIMIT:
            raise ConfigurationError(
                'Dense propagation is limited to {} states, got {}'.format(
                    DENSE_LIMIT, hamiltonian.shape[0]))
        self.hamiltonian = hamiltonian.toarray() \
            if sparse.issparse(hamiltonian) else np.asarray(hamiltonian)
        self._step, self._propagator = None, None

    def advance(self, state, t0, t1):
        step = t1 - t0
        if self._step is None or abs(step - self._step) > 1e-12 * step:
            self._step = step
            self._propagator = scipy.linalg.expm(-1j * step * self.hamiltonian)
        return self._propagator @ state


def group_velocity(model: BuiltModel, grid_n=2048) -> float:
    """max |∂_k Re E_k| over bands and momenta, by Hellmann-Feynman."""
    grid = model.k_grid(grid_n if model.dimension == 1 else 128)
    k = grid.reshape(-1, model.dimension)
    h = model.bloch(grid).reshape(-1, model.bands, model.bands)
    _, right = np.linalg.eig(h)
    left = np.linalg.inv(right)
    phases = np.exp(-1j * (k @ np.array([t.offset for t in
                                         model.effective_hoppings]).T))
    fastest = 0.0
    for axis in range(model.dimension):
        derivative = np.zeros_like(h)
        for index, term in enumerate(model.effective_hoppings):
            derivative[:, term.to_sublattice, term.from_sublattice] += \
                -1j * term.offset[axis] * term.amplitude * phases[:, index]
        slopes = np.einsum('kjs,kst,ktj->kj', left, derivative, right).real
        finite = slopes[np.isfinite(slopes)]
        if finite.size:
            fastest = max(fastest, float(np.max(np.abs(finite))))
    return fastest


def _evolve(model, emitters, extent, bc, initial, times, sites, subscribers,
            dense):
    if isinstance(initial, str):
        initial = InitialState.parse(initial)
    times = _check_times(times)
    basis = Basis.for_model(model, emitters, extent)
    hamiltonian = real_space_hamiltonian(model, emitters, extent, bc)
    psi0 = initial.vector_for(basis)
    if dense:
        propagation = MatrixExponential(hamiltonian, psi0, times)
    else:
        propagation = Integration(hamiltonian, psi0, times)

    reach = group_velocity(model) * times[-1]
    if BoundaryCondition(bc) is BoundaryCondition.PERIODIC and \
            2 * reach > min(basis.extent):
        logger.info('Extent %s is below 2 v t_max = %.1f; wrap-around may '
                    'show before t=%g', basis.extent, 2 * reach, times[-1])

    recorder = TrajectoryRecorder(basis, sites, Engine.ORACLE,
                                  ('dense',) if dense else ())
    monitor = NormMonitor()
    propagation.subscribe(recorder, passive=bool(subscribers))
    propagation.subscribe(monitor, passive=True)
    for subscriber in subscribers:
        propagation.subscribe(subscriber)
    propagation.run()

    trajectory = recorder.trajectory()
    if not monitor.monotonic:
        trajectory.flags += ('norm-increase',)
    return trajectory


def evolve_finite(model: BuiltModel, emitters: EmitterSet, extent,
                  bc=BoundaryCondition.PERIODIC, initial='emitter:0',
                  tgrid=(0.0,), sites=None, subscribers=()) -> Trajectory:
    """
    |ψ(t)⟩ = e^{−iH_eff t}|ψ₀⟩ on a finite lattice by adaptive integration.
    ``sites`` selects the photon sites to record ('all' for the full state);
    extra ``subscribers`` receive every sample and may cancel to stop early.
    """
    return _evolve(model, emitters, extent, bc, initial, tgrid, sites,
                   subscribers, dense=False)


def evolve_dense(model: BuiltModel, emitters: EmitterSet, extent,
                 bc=BoundaryCondition.PERIODIC, initial='emitter:0',
                 tgrid=(0.0,), sites=None, subscribers=()) -> Trajectory:
    """Same as evolve_finite with a dense matrix-exponential propagator, for
    small lattices and very long times."""
    return _evolve(model, emitters, extent, bc, initial, tgrid, sites,
                   subscribers, dense=True)


# ----------------------------------------------------------------- resolvent

@dataclass(frozen=True)
class ContourSpec:
    etas: Tuple[float, ...] = CONTOUR_ETAS
    radius: Optional[float] = None
    epsabs: float = CONTOUR_EPS
    epsrel: float = 1e-10
    limit: int = 100000


class EmitterGreen:
    """z ↦ (z − Δ − Σ(z))^{-1} u for a fixed initial emitter vector u."""

    def __init__(self, sigma, detunings, initial):
        self.sigma = sigma
        self.detunings = np.diag(detunings)
        self.initial = initial

    def __call__(self, z):
        size = len(self.initial)
        return np.linalg.solve(
            z * np.eye(size) - self.detunings - self.sigma(z), self.initial)


def _bath_spectrum(model: BuiltModel) -> np.ndarray:
    return np.linalg.eigvals(model.bloch(model.k_grid(
        512 if model.dimension == 1 else 64))).ravel()


def bath_radius(model: BuiltModel, emitters: EmitterSet) -> float:
    """|Re z| beyond which G(z) is analytic down to Im z = −∞."""
    spectrum = np.abs(_bath_spectrum(model))
    return float(np.max(spectrum) + np.max(np.abs(emitters.detunings)) +
                 2 * emitters.coupling_norm() + 1)


def _extrapolation_weights(etas):
    """Lagrange weights evaluating the interpolant through ``etas`` at 0."""
    etas = np.asarray(etas, dtype=float)
    weights = []
    for i, eta in enumerate(etas):
        others = np.delete(etas, i)
        weights.append(float(np.prod(-others / (eta - others))))
    return weights


def _pack(values):
    return np.concatenate([values.real.ravel(), values.imag.ravel()])


def _unpack(packed, shape):
    half = packed.size // 2
    return (packed[:half] + 1j * packed[half:]).reshape(shape)


def _line_integral(green, t, eta, radius, contour):
    shape = (len(t), len(green.initial))

    def segment(x):
        z = x + 1j * eta
        return _pack(np.exp(-1j * z * t)[:, None] * green(z)[None, :])

    def rays(y):
        right = np.exp(-1j * radius * t)[:, None] * \
            green(radius - 1j * y)[None, :]
        left = np.exp(1j * radius * t)[:, None] * \
            green(-radius - 1j * y)[None, :]
        return _pack(-1j * (right - left) * np.exp(-y * t)[:, None])

    options = dict(epsabs=contour.epsabs, epsrel=contour.epsrel,
                   limit=contour.limit)
    line, _ = quad_vec(segment, -radius, radius, **options)
    tail, _ = quad_vec(rays, -eta, np.inf, **options)
    return 1j / (2 * np.pi) * _unpack(line + tail, shape)


def _initial_vector(emitters, initial):
    if isinstance(initial, (int, np.integer)):
        vector = np.zeros(len(emitters), dtype=complex)
        vector[initial] = 1
        return vector
    vector = np.asarray(initial, dtype=complex)
    if vector.shape != (len(emitters),):
        raise ConfigurationError('Initial emitter vector must have length '
                                 '{}'.format(len(emitters)))
    return vector


def emitter_amplitudes_resolvent(model: BuiltModel, emitters: EmitterSet,
                                 tgrid, contour: ContourSpec = None,
                                 initial=0, sigma=None,
                                 method='auto') -> Trajectory:
    """
    c_e(t) = (i/2π) ∫ G(z) e^{−izt} dz along Im z = η for each η of the
    contour ladder (scaled so that η t_max ≤ 1), extrapolated to η → 0.
    """
    times = _check_times(tgrid)
    contour = contour or ContourSpec()
    if len(emitters) == 0:
        raise PreconditionError('The resolvent engine needs emitters')
    if np.max(_bath_spectrum(model).imag) > TOL_SPECTRUM:
        raise PreconditionError(
            'Bath spectrum of {} reaches Im z > 0; the contour would cross '
            'it'.format(model.label))
    sigma = sigma or self_energy_evaluator(model, emitters, method)
    u = _initial_vector(emitters, initial)
    green = EmitterGreen(sigma, emitters.detunings, u)
    radius = contour.radius or bath_radius(model, emitters)

    amplitudes = np.empty((len(times), len(emitters)), dtype=complex)
    amplitudes[times == 0] = u
    t = times[times > 0]
    if t.size:
        scale = min(1.0, 1.0 / (contour.etas[0] * t.max()))
        etas = [eta * scale for eta in contour.etas]
        estimates = [_line_integral(green, t, eta, radius, contour)
                     for eta in etas]
        combined = sum(w * e for w, e in
                       zip(_extrapolation_weights(etas), estimates))
        spread = max(float(np.max(np.abs(e - combined))) for e in estimates)
        logger.debug('Contour ladder %s, spread %.3g', etas, spread)
        if spread > 1e-6:
            logger.warning('Contour estimates differ by %.3g', spread)
        amplitudes[times > 0] = combined
    return Trajectory(times, amplitudes, Engine.RESOLVENT)


def bare_propagator(h, tau) -> np.ndarray:
    """e^{−i h τ} for a batch of Bloch matrices."""
    bands = h.shape[-1]
    if bands == 1:
        return np.exp(-1j * tau * h)
    if bands == 2:
        mean = (h[:, 0, 0] + h[:, 1, 1]) / 2
        traceless = h - mean[:, None, None] * np.eye(2)
        w = np.sqrt(traceless[:, 0, 0] ** 2 +
                    traceless[:, 0, 1] * traceless[:, 1, 0] + 0j)
        cosine = np.cos(w * tau)[:, None, None] * np.eye(2)
        sine = (tau * np.sinc(w * tau / np.pi))[:, None, None] * traceless
        return np.exp(-1j * mean * tau)[:, None, None] * (cosine - 1j * sine)
    return scipy.linalg.expm(-1j * tau * h)


def photon_kernel(model: BuiltModel, emitters: EmitterSet, sites, taus,
                  grid_n=None) -> np.ndarray:
    """Φ_{r s, n}(τ) = ∫ e^{ik.r} [e^{−ih_k τ} g_k]_{s n}, shape (T, S, N)."""
    quadrature = QuadratureSigma(model, emitters, grid_n)
    n = quadrature.grid_n
    cells = np.array([cell for cell, _ in sites], dtype=int).reshape(
        len(sites), -1)
    sublattices = np.array([s for _, s in sites], dtype=int)

    reach = group_velocity(model) * float(np.max(taus))
    distance = np.max(np.abs(cells[:, None, :] -
                             emitters.positions()[None, :, :]))
    if distance + reach >= n / 2:
        raise KernelRangeError(
            'Sites up to {} cells away with reach {:.1f} exceed half the '
            'momentum grid ({})'.format(distance, reach, n))

    kernel = np.empty((len(taus), len(sites), len(emitters)), dtype=complex)
    shape = (n,) * model.dimension + (model.bands, len(emitters))
    for index, tau in enumerate(taus):
        propagated = bare_propagator(quadrature.h, tau) @ quadrature.g_k
        values = fourier_cells(propagated.reshape(shape), cells)
        kernel[index] = values[np.arange(len(sites)), sublattices]
    return kernel


def photon_field_resolvent(model: BuiltModel, emitters: EmitterSet, tgrid,
                           sites, contour: ContourSpec = None, initial=0,
                           grid_n=None, step=None, sigma=None) -> Trajectory:
    """
    c_r(t) = −i ∫₀ᵗ Φ_r(t − t') c_e(t') dt' by composite Simpson on a refined
    grid.  ``tgrid`` must be uniform and start at 0.
    """
    times = _check_times(tgrid)
    sites = tuple((tuple(int(c) for c in cell), int(s)) for cell, s in sites)
    if times[0] != 0 or (len(times) > 2 and not np.allclose(
            np.diff(times), times[1] - times[0], rtol=1e-9, atol=0)):
        raise ConfigurationError(
            'The photon field needs a uniform time grid starting at 0')
    if len(times) == 1:
        u = _initial_vector(emitters, initial)
        return Trajectory(times, u[None, :], Engine.RESOLVENT,
                          np.zeros((1, len(sites))), sites)

    radius = bath_radius(model, emitters)
    dt = times[1] - times[0]
    refine = 2 * int(np.ceil(dt / (2 * (step or 0.05 / radius))))
    dtau = dt / refine
    fine = np.arange((len(times) - 1) * refine + 1) * dtau

    emitter = emitter_amplitudes_resolvent(
        model, emitters, fine, contour, initial, sigma).emitter_amps
    kernel = photon_kernel(model, emitters, sites, fine, grid_n)

    parity = np.where(np.arange(len(fine)) % 2, 4.0, 2.0)
    size = len(fine)
    convolved = fftconvolve(kernel, (parity[:, None] * emitter)[:, None, :],
                            axes=0)[:size]
    # Simpson end points carry weight 1 instead of 2
    simpson = convolved - kernel * emitter[0][None, None, :] - \
        kernel[0][None] * emitter[:, None, :]
    field = -1j * dtau / 3 * simpson.sum(axis=2)
    return Trajectory(times, emitter[::refine], Engine.RESOLVENT,
                      field[::refine], sites)
