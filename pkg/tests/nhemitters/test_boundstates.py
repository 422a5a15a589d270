import numpy as np
import pytest

from nhemitters.boundstates import BoundState, BoundStateClass, \
    RootSearchConfig, Sector, bic_construct, classify, dressed_roots, \
    find_bound_states, finite_lattice_state, localization_lengths, \
    normalize, two_emitter_trapped_state
from nhemitters.errors import PreconditionError
from nhemitters.model import Basis, BoundaryCondition, EmitterSet, \
    EmitterSpec, real_space_hamiltonian


def _state(energy):
    return BoundState(energy, np.ones(1), {}, BoundStateClass.CONVENTIONAL,
                      0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        RootSearchConfig(region=(1.0, -1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        RootSearchConfig(region=(-1.0, 1.0, 0.0, 1.0), residual_tol=0)
    with pytest.raises(ValueError):
        RootSearchConfig(region=(-1.0, 1.0, 0.0, 1.0), seed_grid=(0, 3))
    config = RootSearchConfig(region=(-1.0, 1.0, 0.0, 1.0), seed_grid=(2, 2))
    assert np.allclose(sorted(config.seeds(), key=lambda z: (z.real, z.imag)),
                       [-0.5 + 0.25j, -0.5 + 0.75j, 0.5 + 0.25j, 0.5 + 0.75j])


def test_dressed_roots_of_a_rational_self_energy():
    def sigma(z):
        return np.array([[0.5 / (z + 1j)]])

    config = RootSearchConfig(region=(-1.0, 1.0, -0.9, 0.5), seed_grid=(8, 8))
    roots = [root for root, _ in dressed_roots(sigma, np.zeros(1), config)]
    assert len(roots) == 2
    assert roots[0] == pytest.approx(-0.5 - 0.5j, abs=1e-9)
    assert roots[1] == pytest.approx(0.5 - 0.5j, abs=1e-9)


def test_hidden_state_is_pinned_to_the_detuning(hatano_nelson):
    detuning = -0.5j
    emitters = EmitterSet.single(g=0.5, detuning=detuning)
    config = RootSearchConfig(region=(-0.2, 0.2, -0.8, -0.2),
                              seed_grid=(4, 4), profile_radius=40)
    states = find_bound_states(hatano_nelson, emitters, config)
    pinned = [s for s in states if abs(s.energy - detuning) < 1e-9]
    assert len(pinned) == 1
    state = pinned[0]
    assert state.kind is BoundStateClass.HIDDEN
    assert state.residual < 1e-9

    right = max(abs(c) for (cell, _), c in state.photon_profile.items()
                if cell[0] >= 0)
    left = max(abs(c) for (cell, _), c in state.photon_profile.items()
               if cell[0] < 0)
    assert right < 1e-10
    assert left > 1e-6

    lengths = localization_lengths(state.photon_profile)
    assert lengths.xi_right == 0.0
    assert lengths.xi_left > 0

    scaled = normalize(state, hatano_nelson, emitters)
    assert scaled.normalized
    assert scaled.total_norm() == pytest.approx(1.0, abs=1e-6)


def test_classification(hatano_nelson, alternating):
    assert classify(_state(1j), hatano_nelson) is \
        BoundStateClass.CONVENTIONAL
    assert classify(_state(-0.5j), hatano_nelson) is BoundStateClass.HIDDEN
    assert classify(_state(0j), alternating) is BoundStateClass.BIC


def test_dark_state_of_one_emitter(alternating):
    size, g = 40, 1.2
    emitters = EmitterSet.single(cell=20, g=g)
    state = bic_construct(alternating, emitters, size)
    assert state.kind is BoundStateClass.BIC
    assert state.residual < 1e-10
    assert state.total_norm() == pytest.approx(1.0)
    weight = (1 / g) ** 2
    assert abs(state.emitter_weights[0]) ** 2 == \
        pytest.approx(weight / (weight + size - 20))
    assert all(s == 1 for (_, s) in state.photon_profile)

    vector = state.to_vector(Basis.for_model(alternating, emitters, size))
    hamiltonian = real_space_hamiltonian(alternating, emitters, size,
                                         BoundaryCondition.OPEN)
    assert np.linalg.norm(hamiltonian @ vector) < 1e-10


def test_dark_state_preconditions(alternating, hatano_nelson):
    with pytest.raises(PreconditionError):
        bic_construct(alternating, EmitterSet.single(cell=5, detuning=0.5),
                      10)
    with pytest.raises(PreconditionError):
        bic_construct(alternating, EmitterSet.single(cell=5), 10,
                      BoundaryCondition.PERIODIC)
    with pytest.raises(PreconditionError):
        bic_construct(alternating, EmitterSet.single(cell=5, sublattice=1),
                      10)
    with pytest.raises(PreconditionError):
        bic_construct(hatano_nelson, EmitterSet.single(cell=5), 10)


@pytest.mark.parametrize('separation', [1, 2, 3, 4])
def test_trapped_state_parity(alternating, separation):
    emitters = EmitterSet([EmitterSpec((x,), {0: 1.2})
                           for x in (0, separation)])
    expected = Sector.SYMMETRIC if separation % 2 else Sector.ANTISYMMETRIC
    other = Sector.ANTISYMMETRIC if separation % 2 else Sector.SYMMETRIC

    state = two_emitter_trapped_state(alternating, emitters)
    assert state.flags == ('sector=' + expected.value,)
    assert state.residual < 1e-10
    first, second = state.emitter_weights
    assert np.sign(first.real) * np.sign(second.real) == \
        (1 if expected is Sector.SYMMETRIC else -1)
    assert two_emitter_trapped_state(alternating, emitters, expected)
    assert two_emitter_trapped_state(alternating, emitters, other) is None


def test_trapped_state_needs_lossy_sites(alternating):
    emitters = EmitterSet([EmitterSpec((0,), {0: 1.0}),
                           EmitterSpec((3,), {1: 1.0})])
    assert two_emitter_trapped_state(alternating, emitters) is None


def test_finite_lattice_state(hatano_nelson):
    emitters = EmitterSet.single(cell=10, g=0.5, detuning=-0.5j)
    state = finite_lattice_state(hatano_nelson, emitters, 20,
                                 BoundaryCondition.PERIODIC, -0.5j)
    assert state.total_norm() == pytest.approx(1.0)
    assert state.residual < 1e-8
    assert state.flags == ('finite-lattice',)
    assert len(state.photon_profile) == 20
