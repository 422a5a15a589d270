"""
Emitter self-energies Σ(z), by momentum quadrature or by closed forms, plus
spectral winding numbers of 1D Bloch bands.

Closed forms reduce every 1D lattice Green's function to a contour integral
over y = e^{ik} whose integrand is y^{|x|} / (a y² + b y + c); only the roots
inside the unit circle contribute (Θ± = Θ(1 − |y±|)).  The second Riemann
sheet is reached by exchanging Θ₊ and Θ₋, which is the same as flipping the
sign of √δ while keeping each Θ attached to its root label.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from nhemitters.config import SIGMA_GRID, SIGMA_GRID_2D, TOL_ROOT, \
    TOL_SPECTRUM, WINDING_GRID, WINDING_GRID_REFINED
from nhemitters.errors import BranchAmbiguityError, PreconditionError, \
    ResolutionError, ResolventSingularityError
from nhemitters.model import BuiltModel, EmitterSet

logger = logging.getLogger(__name__)


class Sheet(str, Enum):
    FIRST = 'first'
    SECOND = 'second'


@dataclass(frozen=True)
class SelfEnergy:
    value: np.ndarray = field(compare=False)
    z: complex
    method: str
    detail: str = ''
    sheet: Sheet = Sheet.FIRST

    def __repr__(self):
        return '<SelfEnergy {} ({}{}), z={}, sheet={}>'.format(
            self.value.shape, self.method,
            ': ' + self.detail if self.detail else '', self.z,
            self.sheet.value)


@dataclass(frozen=True)
class WindingIndex:
    z: complex
    index: int


# --------------------------------------------------------------- closed forms

def _roots(a, b, c):
    sq = np.sqrt(b * b - 4 * a * c + 0j)
    return (-b + sq) / (2 * a), (-b - sq) / (2 * a), sq


def _inside(y):
    modulus = abs(y)
    if abs(modulus - 1) < TOL_ROOT:
        raise BranchAmbiguityError(
            'Root {} lies on the unit circle: z is on the spectrum'.format(y))
    return modulus < 1


def _thetas(y_plus, y_minus, sheet):
    theta_plus, theta_minus = _inside(y_plus), _inside(y_minus)
    if Sheet(sheet) is Sheet.SECOND:
        theta_plus, theta_minus = theta_minus, theta_plus
    return theta_plus, theta_minus


def _contour(a, b, c, power, sheet):
    """Σ over inside roots of y^power / (a (y − y_other))."""
    y_plus, y_minus, sq = _roots(a, b, c)
    if sq == 0:
        raise BranchAmbiguityError('Degenerate roots: √δ = 0')
    theta_plus, theta_minus = _thetas(y_plus, y_minus, sheet)
    return (power(y_plus) * theta_plus - power(y_minus) * theta_minus) / sq


def sigma_hn_closed(z, x, J, kappa, sheet=Sheet.FIRST) -> complex:
    """Real-space Green's function φ(z, x) of the Hatano-Nelson chain."""
    if abs(abs(J) - kappa / 2) < TOL_ROOT:
        raise PreconditionError(
            '|J| = κ/2 is unidirectional; use sigma_hn_unidirectional')
    sign = 1 if x >= 0 else -1
    a = sign * kappa / 2 - J
    b = z + 1j * kappa
    c = -sign * kappa / 2 - J
    return complex(_contour(a, b, c, lambda y: y ** abs(x), sheet))


def sigma_hn_unidirectional(z, x, kappa, sheet=Sheet.FIRST) -> complex:
    w = z + 1j * kappa
    if abs(abs(w) - kappa) < TOL_ROOT:
        raise BranchAmbiguityError(
            '|z + iκ| = κ: z = {} is on the spectrum'.format(z))
    outside = abs(w) > kappa
    if Sheet(sheet) is Sheet.SECOND:
        outside = not outside
    if x >= 0:
        return complex((kappa / w) ** x / w) if outside else 0j
    return 0j if outside else complex(-(kappa / w) ** (1 + x) / kappa)


def sigma_pt_closed(z, x_mn, pair, J, kappa, g=1.0,
                    sheet=Sheet.FIRST) -> complex:
    """
    Self-energy element of the alternating-loss lattice between an emitter on
    ``pair[0]`` and one on ``pair[1]`` separated by ``x_mn`` cells.
    """
    pair = pair.upper()
    if pair not in ('AA', 'BB', 'AB', 'BA'):
        raise ValueError('pair must be one of AA, BB, AB, BA')
    if pair == 'AA' and z == 0:
        return 0j
    a = c = -J * J
    b = -2 * J * J + z * (z + 1j * kappa)
    g2 = g * g
    if pair == 'AA':
        return complex(g2 * z * _contour(
            a, b, c, lambda y: y ** abs(x_mn), sheet))
    if pair == 'BB':
        return complex(g2 * (z + 1j * kappa) * _contour(
            a, b, c, lambda y: y ** abs(x_mn), sheet))
    x = x_mn if pair == 'AB' else -x_mn
    return complex(g2 * J * _contour(
        a, b, c, lambda y: y ** abs(x) + y ** abs(x - 1), sheet))


def sigma_wick(z, sigma_b: Callable[[complex], complex]) -> complex:
    """Σ(z) = −iΣ_B(−iz) for a bath obtained by multiplying h_k by i."""
    return -1j * sigma_b(-1j * z)


def sigma_wick_chain_closed(z, J, g=1.0, x=0, sheet=Sheet.FIRST) -> complex:
    """
    Wick-rotated chain h_k = −2iJ(cos k + 1).  At x = 0 this is
    g² / √(z(z + 4iJ)) on the branch where Σ ≈ g²/z for large z.
    """
    if z == 0 or z == -4j * J:
        raise BranchAmbiguityError('z = {} is a branch point'.format(z))
    a = c = 1j * J
    b = z + 2j * J
    return complex(g * g * _contour(a, b, c, lambda y: y ** abs(x), sheet))


def sigma_nnn_closed(z, kappa, kappa_prime, g=1.0, x=0,
                     sheet=Sheet.FIRST) -> complex:
    """Lattice with h_k = κe^{−ik} + κ′e^{−2ik} − i(κ+κ′), x ≥ 0."""
    if x < 0:
        raise PreconditionError('Closed form covers x >= 0 only')
    a = z + 1j * (kappa + kappa_prime)
    return complex(g * g * _contour(
        a, -kappa, -kappa_prime, lambda y: y ** (x + 1), sheet))


def elliptic_k(m, tolerance=1e-15, max_iterations=64) -> complex:
    """
    Complete elliptic integral of the first kind K(m) for complex parameter
    m off the cut [1, ∞), by the arithmetic-geometric mean.
    """
    m = complex(m)
    if abs(m.imag) <= TOL_ROOT * max(1.0, abs(m)) and m.real >= 1:
        raise BranchAmbiguityError('K(m) argument {} is on the cut'.format(m))
    a, b = 1 + 0j, np.sqrt(1 - m)
    for _ in range(max_iterations):
        if abs(a - b) <= tolerance * abs(a):
            break
        a, b = (a + b) / 2, np.sqrt(a * b)
        # keep the geometric mean on the same side as the arithmetic one
        if (b / a).real < 0:
            b = -b
    return complex(np.pi / (2 * a))


def sigma_2d_closed(z, g, kappa) -> complex:
    w = z + 2j * kappa
    if w == 0:
        raise BranchAmbiguityError('z = −2iκ is excluded')
    return complex(2 * g * g / (np.pi * w) * elliptic_k((2 * kappa / w) ** 4))


# ----------------------------------------------------------------- quadrature

def default_grid(model: BuiltModel) -> int:
    return SIGMA_GRID if model.dimension == 1 else SIGMA_GRID_2D


def _apply_resolvent(z, h, rhs):
    bands = h.shape[-1]
    if bands == 1:
        return rhs / (z - h[:, 0, 0])[:, None, None]
    if bands == 2:
        d00, d11 = z - h[:, 0, 0], z - h[:, 1, 1]
        h01, h10 = h[:, 0, 1], h[:, 1, 0]
        det = d00 * d11 - h01 * h10
        top = (d11[:, None] * rhs[:, 0] + h01[:, None] * rhs[:, 1])
        bottom = (h10[:, None] * rhs[:, 0] + d00[:, None] * rhs[:, 1])
        return np.stack([top, bottom], axis=1) / det[:, None, None]
    return np.linalg.solve(z * np.eye(bands) - h, rhs)


class QuadratureSigma:
    """
    First-sheet Σ(z) on a uniform grid of ``grid_n`` momenta per axis.  The
    grid, Bloch matrices and their eigenvalues are computed once.
    """
    sheet = Sheet.FIRST

    def __init__(self, model: BuiltModel, emitters: EmitterSet,
                 grid_n=None):
        self.model = model
        self.grid_n = grid_n or default_grid(model)
        k = model.k_grid(self.grid_n)
        self.k = k.reshape(-1, model.dimension)
        self.h = model.bloch(k).reshape(-1, model.bands, model.bands)
        self.eigenvalues = np.linalg.eigvals(self.h)
        positions = emitters.positions().astype(float)
        phase = np.exp(-1j * self.k @ positions.T)
        self.g_k = emitters.coupling_matrix(model.bands)[None] * \
            phase[:, None, :]

    def distance(self, z) -> Tuple[float, np.ndarray]:
        gaps = np.abs(self.eigenvalues - z)
        flat = int(np.argmin(gaps))
        return float(gaps.flat[flat]), self.k[flat // self.model.bands]

    def resolved(self, z) -> np.ndarray:
        """(z − h_k)^{-1} g_k on every grid point, shape (n_k, |I|, N)."""
        gap, k = self.distance(z)
        if gap < TOL_SPECTRUM:
            raise ResolventSingularityError(
                'z = {} lies on the grid spectrum (distance {:.3g})'.format(
                    z, gap), k=k)
        return _apply_resolvent(z, self.h, self.g_k)

    def __call__(self, z, sheet=Sheet.FIRST) -> np.ndarray:
        if Sheet(sheet) is not Sheet.FIRST:
            raise PreconditionError('Quadrature evaluates the first sheet only')
        x = self.resolved(z)
        return np.einsum('ksm,ksn->mn', np.conj(self.g_k), x) / len(self.k)


def sigma_numeric(model, emitters, z, grid_n=None) -> SelfEnergy:
    sigma = QuadratureSigma(model, emitters, grid_n)
    return SelfEnergy(sigma(z), complex(z), 'quadrature',
                      'grid_n={}'.format(sigma.grid_n))


# ---------------------------------------------------------------- evaluators

class ClosedFormSigma:
    """Σ matrix assembled element-wise from a scalar closed form."""

    def __init__(self, element, emitters: EmitterSet, model_id):
        self.element = element
        self.model_id = model_id
        self.positions = emitters.positions()[:, 0]
        self.sublattices = [e.sublattice for e in emitters]
        self.couplings = [e.couplings[e.sublattice] for e in emitters]

    def __call__(self, z, sheet=Sheet.FIRST) -> np.ndarray:
        size = len(self.positions)
        value = np.empty((size, size), dtype=complex)
        for m in range(size):
            for n in range(size):
                value[m, n] = np.conj(self.couplings[m]) * self.couplings[n] * \
                    self.element(z, int(self.positions[m] - self.positions[n]),
                                 self.sublattices[m], self.sublattices[n],
                                 sheet)
        return value


def _closed_element(model: BuiltModel, emitters: EmitterSet):
    params = model.lattice.parameters
    name = model.label
    if name == 'hatano_nelson' and abs(abs(params['J']) -
                                       params['kappa'] / 2) >= TOL_ROOT:
        return lambda z, x, sm, sn, sheet: sigma_hn_closed(
            z, x, params['J'], params['kappa'], sheet)
    if name in ('hn_unidirectional', 'hatano_nelson'):
        return lambda z, x, sm, sn, sheet: sigma_hn_unidirectional(
            z, x, params['kappa'], sheet)
    if name == 'alternating_loss':
        labels = 'AB'
        return lambda z, x, sm, sn, sheet: sigma_pt_closed(
            z, x, labels[sm] + labels[sn], params['J'], params['kappa'],
            sheet=sheet)
    if name == 'wick_chain':
        return lambda z, x, sm, sn, sheet: sigma_wick_chain_closed(
            z, params['J'], x=x, sheet=sheet)
    if len(emitters) == 1 and name == 'swap2d':
        def element(z, x, sm, sn, sheet):
            if Sheet(sheet) is not Sheet.FIRST:
                raise PreconditionError('swap2d closed form is first-sheet')
            return sigma_2d_closed(z, 1.0, params['kappa'])
        return element
    if len(emitters) == 1 and name == 'hn_nnn':
        return lambda z, x, sm, sn, sheet: sigma_nnn_closed(
            z, params['kappa'], params['kappa_prime'], sheet=sheet)
    return None


def self_energy_evaluator(model: BuiltModel, emitters: EmitterSet,
                          method='auto', grid_n=None):
    """
    Callable ``sigma(z, sheet=Sheet.FIRST) -> N x N``.  ``method='auto'``
    picks the closed form of a catalog lattice when every emitter couples to
    a single sublattice, and falls back to quadrature otherwise.
    """
    if method not in ('auto', 'closed', 'quadrature'):
        raise ValueError('Unknown self-energy method {!r}'.format(method))
    single_site = all(len(e.sublattice_couplings) == 1 for e in emitters)
    if method != 'quadrature' and single_site and len(emitters):
        element = _closed_element(model, emitters)
        if element is not None:
            return ClosedFormSigma(element, emitters, model.label)
    if method == 'closed':
        raise PreconditionError('No closed form for {} with {} emitters'.format(
            model.label, len(emitters)))
    return QuadratureSigma(model, emitters, grid_n)


def evaluate(model, emitters, z, method='auto', sheet=Sheet.FIRST,
             grid_n=None) -> SelfEnergy:
    sigma = self_energy_evaluator(model, emitters, method, grid_n)
    if isinstance(sigma, ClosedFormSigma):
        return SelfEnergy(sigma(z, sheet), complex(z), 'closed_form',
                          sigma.model_id, Sheet(sheet))
    return SelfEnergy(sigma(z, sheet), complex(z), 'quadrature',
                      'grid_n={}'.format(sigma.grid_n))


def cauchy_riemann_residual(sigma, z, step=1e-4) -> float:
    """|∂_x Σ − (1/i)∂_y Σ| by a 4-point stencil; ~0 where Σ is analytic."""
    dx = (sigma(z + step) - sigma(z - step)) / (2 * step)
    dy = (sigma(z + 1j * step) - sigma(z - 1j * step)) / (2j * step)
    return float(np.max(np.abs(dx - dy)))


# ------------------------------------------------------------------- winding

def winding_number(model: BuiltModel, z, grid_n=WINDING_GRID) -> WindingIndex:
    if model.dimension != 1:
        raise PreconditionError('Winding numbers are defined for 1D models')
    for n in (grid_n, WINDING_GRID_REFINED):
        k = model.k_grid(n, closed=True)
        h = model.bloch(k)
        gaps = np.abs(np.linalg.eigvals(h) - z)
        closest = np.unravel_index(np.argmin(gaps), gaps.shape)
        if gaps[closest] < TOL_SPECTRUM:
            raise ResolventSingularityError(
                'z = {} lies on the spectrum'.format(z), k=k[closest[0]])
        phase = np.unwrap(np.angle(np.linalg.det(h - z * np.eye(model.bands))))
        total = (phase[-1] - phase[0]) / (2 * np.pi)
        resolved = np.max(np.abs(np.diff(phase))) < np.pi / 2
        if resolved and abs(total - round(total)) < 1e-6:
            return WindingIndex(complex(z), int(round(total)))
        logger.debug('Winding at z=%s unresolved on %d points (%.6f)',
                     z, n, total)
    raise ResolutionError('Winding number at z = {} did not resolve'.format(z))


@dataclass(frozen=True)
class VanishingReport:
    holds: bool
    reason: str
    index: int
    ranges: Tuple[int, int]
    elements: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def maximal_winding_vanishing_check(model, emitters, z, grid_n=None,
                                    tolerance=1e-10) -> VanishingReport:
    """
    Check that Σ_mn(z) vanishes for x_m ≥ x_n when the winding is −p, and for
    x_m ≤ x_n when it is q.
    """
    if model.dimension != 1 or model.bands != 1:
        raise PreconditionError('The vanishing theorem covers 1D single-band '
                                'lattices')
    p, q = model.hopping_ranges()
    index = winding_number(model, z).index
    if index == 0:
        return VanishingReport(True, 'winding 0: nothing required to vanish',
                               index, (p, q))

    x = emitters.positions()[:, 0]
    sigma = QuadratureSigma(model, emitters, grid_n)(z)
    if index < 0:
        pairs = [(m, n) for m in range(len(x)) for n in range(len(x))
                 if x[m] >= x[n]]
    else:
        pairs = [(m, n) for m in range(len(x)) for n in range(len(x))
                 if x[m] <= x[n]]
    elements = {pair: float(abs(sigma[pair])) for pair in pairs}
    worst = max(elements.items(), key=lambda item: item[1],
                default=((None, None), 0.0))
    maximal = index in (-p, q)
    if worst[1] < tolerance:
        reason = 'all {} required elements vanish'.format(len(elements))
        return VanishingReport(True, reason, index, (p, q), elements)
    reason = '{}winding {} of range [{}, {}]: |Σ{}| = {:.3g}'.format(
        '' if maximal else 'non-maximal ', index, -p, q, worst[0], worst[1])
    return VanishingReport(False, reason, index, (p, q), elements)
