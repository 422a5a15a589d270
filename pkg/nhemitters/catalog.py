"""
Named lattices.  Each constructor returns the LatticeSpec (coherent hoppings
plus jump operators) whose effective Hamiltonian is the quoted Bloch matrix:

=====================  ====================================================
hatano_nelson(J, κ)    2J cos k − iκ(sin k + 1)
hn_unidirectional(κ)   κ e^{−ik} − iκ
alternating_loss(J, κ) [[−iκ, J(1 + e^{−ik})], [J(1 + e^{ik}), 0]]
hermitian_chain(J)     −2J(cos k + 1)
wick_chain(J)          −2iJ(cos k + 1)
swap2d(κ)              κ[[−2i, 1 + e^{−i(kx+ky)}], [e^{ikx} + e^{iky}, −2i]]
hn_nnn(κ, κ′)          κ e^{−ik} + κ′ e^{−2ik} − i(κ + κ′)
=====================  ====================================================
"""
import numpy as np

from nhemitters.errors import ModelError
from nhemitters.model import HoppingTerm, JumpOperatorSpec, JumpTerm, \
    LatticeSpec, build_effective

A, B = 0, 1


def _require_loss(kappa):
    if not np.isfinite(kappa) or kappa <= 0:
        raise ModelError('kappa must be positive, got {}'.format(kappa))


def _require_rate(kappa):
    if not np.isfinite(kappa) or kappa < 0:
        raise ModelError('kappa must be non-negative, got {}'.format(kappa))


def hatano_nelson(J, kappa) -> LatticeSpec:
    _require_rate(kappa)
    return LatticeSpec(
        dimension=1, sublattice_count=1,
        hoppings=(HoppingTerm((1,), A, A, J), HoppingTerm((-1,), A, A, J)),
        jumps=(JumpOperatorSpec(1, (JumpTerm((0,), A, 1),
                                    JumpTerm((1,), A, -1j))),),
        kappa=kappa, max_range=1, name='hatano_nelson',
        params=(('J', J), ('kappa', kappa)))


def hn_unidirectional(kappa) -> LatticeSpec:
    _require_loss(kappa)
    lattice = hatano_nelson(kappa / 2, kappa)
    return LatticeSpec(lattice.dimension, lattice.sublattice_count,
                       lattice.hoppings, lattice.jumps, kappa,
                       lattice.max_range, 'hn_unidirectional',
                       (('kappa', kappa),))


def alternating_loss(J, kappa) -> LatticeSpec:
    _require_rate(kappa)
    hoppings = (
        HoppingTerm((0,), B, A, J), HoppingTerm((1,), B, A, J),
        HoppingTerm((0,), A, B, J), HoppingTerm((-1,), A, B, J),
    )
    return LatticeSpec(
        dimension=1, sublattice_count=2, hoppings=hoppings,
        jumps=(JumpOperatorSpec(1, (JumpTerm((0,), A, np.sqrt(2)),)),),
        kappa=kappa, max_range=1, name='alternating_loss',
        params=(('J', J), ('kappa', kappa)))


def hermitian_chain(J) -> LatticeSpec:
    return LatticeSpec(
        dimension=1, sublattice_count=1,
        hoppings=(HoppingTerm((0,), A, A, -2 * J),
                  HoppingTerm((1,), A, A, -J), HoppingTerm((-1,), A, A, -J)),
        max_range=1, name='hermitian_chain', params=(('J', J),))


def wick_chain(J) -> LatticeSpec:
    _require_loss(2 * J)
    return LatticeSpec(
        dimension=1, sublattice_count=1, hoppings=(),
        jumps=(JumpOperatorSpec(1, (JumpTerm((0,), A, 1),
                                    JumpTerm((1,), A, 1))),),
        kappa=2 * J, max_range=1, name='wick_chain', params=(('J', J),))


def swap2d(kappa) -> LatticeSpec:
    _require_loss(kappa)
    J = kappa / 2
    hoppings = []
    for offset in ((0, 0), (1, 1), (1, 0), (0, 1)):
        hoppings.append(HoppingTerm(offset, B, A, J))
        hoppings.append(HoppingTerm(tuple(-o for o in offset), A, B, J))
    jumps = (
        JumpOperatorSpec(1, (JumpTerm((0, 0), A, 1), JumpTerm((-1, 0), B, -1j))),
        JumpOperatorSpec(2, (JumpTerm((0, 0), A, 1), JumpTerm((0, -1), B, -1j))),
        JumpOperatorSpec(3, (JumpTerm((0, 0), B, 1), JumpTerm((0, 0), A, -1j))),
        JumpOperatorSpec(4, (JumpTerm((0, 0), B, 1), JumpTerm((1, 1), A, -1j))),
    )
    return LatticeSpec(dimension=2, sublattice_count=2,
                       hoppings=tuple(hoppings), jumps=jumps, kappa=kappa,
                       max_range=1, name='swap2d', params=(('kappa', kappa),))


def hn_nnn(kappa, kappa_prime) -> LatticeSpec:
    _require_loss(kappa)
    _require_loss(kappa_prime)
    ratio = np.sqrt(kappa_prime / kappa)
    return LatticeSpec(
        dimension=1, sublattice_count=1,
        hoppings=(HoppingTerm((1,), A, A, kappa / 2),
                  HoppingTerm((-1,), A, A, kappa / 2),
                  HoppingTerm((2,), A, A, kappa_prime / 2),
                  HoppingTerm((-2,), A, A, kappa_prime / 2)),
        jumps=(JumpOperatorSpec(1, (JumpTerm((0,), A, 1),
                                    JumpTerm((1,), A, -1j))),
               JumpOperatorSpec(2, (JumpTerm((0,), A, ratio),
                                    JumpTerm((2,), A, -1j * ratio)))),
        kappa=kappa, max_range=2, name='hn_nnn',
        params=(('kappa', kappa), ('kappa_prime', kappa_prime)))


CATALOG = {
    'hatano_nelson': hatano_nelson,
    'hn_unidirectional': hn_unidirectional,
    'alternating_loss': alternating_loss,
    'hermitian_chain': hermitian_chain,
    'wick_chain': wick_chain,
    'swap2d': swap2d,
    'hn_nnn': hn_nnn,
}


def lookup(name, **params) -> LatticeSpec:
    try:
        constructor = CATALOG[name]
    except KeyError:
        raise ModelError('Unknown catalog model {!r}; known: {}'.format(
            name, ', '.join(sorted(CATALOG))))
    try:
        return constructor(**params)
    except TypeError as exception:
        raise ModelError('Bad parameters for {}: {}'.format(name, exception))


def built(name, **params):
    return build_effective(lookup(name, **params))
