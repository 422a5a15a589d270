"""
Hatano-Nelson photon propagation: the free Bessel solution, the generalized
Brillouin zone radius, and the emitter-sourced running wave split into a
contour integral plus pole residues.

With a = J − κ/2 and b = J + κ/2 the Bloch dispersion is
h = bβ + a/β − iκ on β = e^{−ik}; photons drift towards +x when b > a.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import gammaln, jv

from nhemitters.errors import BranchAmbiguityError, PreconditionError

logger = logging.getLogger(__name__)


def _hoppings(J, kappa):
    return J - kappa / 2, J + kappa / 2


def free_propagation_hn(x, t, J, kappa):
    """
    |c_x(t)|² for a photon released at the origin with no emitter:
    (b/a)^x |J_x(2√(ab) t)|² e^{−2κt}.  At a = 0 only x ≥ 0 is reached.
    """
    x = np.asarray(x)
    t = np.asarray(t, dtype=float)
    a, b = _hoppings(J, kappa)
    decay = np.exp(-2 * kappa * t)
    if a == 0:
        n = np.maximum(x, 0)
        with np.errstate(divide='ignore', invalid='ignore'):
            log_value = 2 * n * np.log(abs(b) * t) - 2 * gammaln(n + 1)
        value = np.where(n == 0, 1.0, np.exp(log_value))
        return np.where(x >= 0, value * decay, 0.0)
    argument = 2 * np.sqrt(complex(a * b)) * t
    return np.abs(b / a) ** x * np.abs(jv(x, argument)) ** 2 * decay


def gbz_radius(J, kappa) -> float:
    """|β| of the open-boundary continuum, √|a/b|."""
    a, b = _hoppings(J, kappa)
    if b == 0:
        raise PreconditionError('J + κ/2 must not vanish')
    return float(np.sqrt(abs(a / b)))


@dataclass(frozen=True)
class ResiduePole:
    beta: complex
    contribution: complex
    rate: float


@dataclass(frozen=True)
class RunningWave:
    x: int
    t: float
    radius: float
    circle: complex
    poles: Tuple[ResiduePole, ...]

    @property
    def total(self) -> complex:
        return self.circle + sum(p.contribution for p in self.poles)

    def dominant(self) -> ResiduePole:
        return max(self.poles, key=lambda p: abs(p.contribution))


class _Integrand:
    """
    f(β) = g e^{−κt} u_x(β) e^{−i(bβ + a/β)t} (bβ² − a) / Q(β), where β is the
    outer root of the dispersion.  Downstream u_x = β^{−x}; upstream (x < 0)
    the lattice Green's function follows the inner root a/(bβ), so
    u_x = (a/(bβ))^{−x}, which vanishes for a unidirectional chain.
    """

    def __init__(self, x, t, a, b, kappa, detuning, g):
        self.x, self.t = x, t
        self.a, self.b = a, b
        self.kappa, self.g = kappa, g
        w = detuning + 1j * kappa
        self.q = np.array([b * b, -w * b, -g * g, w * a, -a * a],
                          dtype=complex)
        self.dq = np.polyder(self.q)

    def _shift(self, beta):
        if self.x >= 0:
            return beta ** (-self.x)
        return (self.a / (self.b * beta)) ** (-self.x)

    def _front(self, beta):
        return self.g * np.exp(-self.kappa * self.t) * self._shift(beta) * \
            np.exp(-1j * (self.b * beta + self.a / beta) * self.t) * \
            (self.b * beta ** 2 - self.a)

    def __call__(self, beta):
        return self._front(beta) / np.polyval(self.q, beta)

    def poles(self):
        return np.roots(self.q)

    def residue(self, beta):
        return self._front(beta) / np.polyval(self.dq, beta)

    def rate(self, beta):
        return float(self.kappa -
                     (self.b * beta + self.a / beta).imag)


def _circle(integrand, radius, a, b, t, x):
    """(1/2πi)∮ f dβ on |β| = radius by the trapezoid rule."""
    frequency = (abs(b) * radius + abs(a) / radius) * t + abs(x)
    size = 1 << int(np.ceil(np.log2(max(1024, 8 * frequency))))
    beta = radius * np.exp(2j * np.pi * np.arange(size) / size)
    return complex(np.mean(integrand(beta) * beta))


def running_wave_decomposition(x, t, J, kappa, detuning, g,
                               contour_radius=None) -> RunningWave:
    """
    Photon amplitude at site x (emitter at the origin, initially excited) as
    the integral on |β| = ``contour_radius`` plus the residues of the poles
    between that circle and the unit circle.  The default radius is the
    generalized Brillouin zone.
    """
    a, b = _hoppings(J, kappa)
    floor = gbz_radius(J, kappa)
    radius = floor if contour_radius is None else float(contour_radius)
    if radius <= 0:
        raise PreconditionError(
            'The generalized Brillouin zone collapses at J = κ/2; pass a '
            'positive contour radius')
    if not floor - 1e-12 <= radius <= 1 + 1e-12:
        raise PreconditionError(
            'Contour radius {} outside [{:.6g}, 1]'.format(radius, floor))

    integrand = _Integrand(int(x), float(t), a, b, kappa, detuning, g)
    poles = integrand.poles()
    for attempt in range(2):
        close = np.abs(np.abs(poles) - radius) < 1e-8
        if not np.any(close):
            break
        if attempt:
            raise BranchAmbiguityError(
                'Pole {} sits on the contour |β| = {}'.format(
                    poles[close][0], radius))
        radius += 1e-6 if radius < 1 else -1e-6
        logger.debug('Pole on the contour, moved radius to %.9f', radius)

    circle = _circle(integrand, radius, a, b, t, x)
    enclosed = [p for p in poles if radius < abs(p) < 1]
    residues = tuple(ResiduePole(complex(p), complex(integrand.residue(p)),
                                 integrand.rate(p)) for p in enclosed)
    return RunningWave(int(x), float(t), radius, circle, residues)


def running_wave_hn(x, t, J, kappa, detuning, g, contour_radius=None):
    return running_wave_decomposition(x, t, J, kappa, detuning, g,
                                      contour_radius).total
