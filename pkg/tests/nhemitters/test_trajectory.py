import numpy as np
import pytest

from nhemitters.errors import ConfigurationError
from nhemitters.model import Basis
from nhemitters.trajectory import Engine, InitialState, Trajectory


def test_initial_state_parse():
    assert InitialState.parse('emitter:2').emitter == 2
    assert InitialState.parse('emitter').emitter == 0
    photon = InitialState.parse('photon:3,4/1')
    assert photon.kind == 'photon'
    assert photon.cell == (3, 4)
    assert photon.sublattice == 1

    for text in ('photon:x', 'emitter:one', 'vacuum'):
        with pytest.raises(ConfigurationError):
            InitialState.parse(text)


def test_initial_state_vectors():
    basis = Basis(2, (3,), 2)
    assert np.flatnonzero(InitialState.parse('emitter:1').vector_for(basis)) \
        .tolist() == [1]
    assert np.flatnonzero(InitialState.parse('photon:1/1').vector_for(basis)) \
        .tolist() == [5]

    with pytest.raises(ConfigurationError):
        InitialState.parse('emitter:2').vector_for(basis)
    with pytest.raises(ConfigurationError):
        InitialState.parse('photon:3').vector_for(basis)

    custom = InitialState.custom(np.arange(8))
    vector = custom.vector_for(basis)
    vector[0] = 10
    assert custom.vector[0] == 0
    with pytest.raises(ConfigurationError):
        InitialState.custom(np.ones(3)).vector_for(basis)


def test_trajectory_shapes():
    trajectory = Trajectory([0.0, 1.0], [1.0, 0.5], Engine.ANALYTIC)
    assert trajectory.emitter_amps.shape == (2, 1)
    assert len(trajectory) == 2
    assert trajectory.populations()[:, 0] == pytest.approx([1.0, 0.25])
    assert not trajectory.complete


def test_trajectory_field_and_states():
    basis = Basis(1, (2,), 1)
    sites = basis.sites()
    trajectory = Trajectory([0.0, 1.0], [[1.0], [0.6]], Engine.ORACLE,
                            photon_field=[[0, 0], [0.8j, 0]], sites=sites,
                            basis=basis)
    assert trajectory.complete
    assert trajectory.total_probability() == pytest.approx([1.0, 1.0])
    assert trajectory.field(((0,), 0))[1] == 0.8j
    assert trajectory.state(1).tolist() == [0.6, 0.8j, 0]
    assert trajectory.snapshot(1) == {((0,), 0): 0.8j, ((1,), 0): 0}

    with pytest.raises(ConfigurationError):
        trajectory.field(((5,), 0))
    partial = Trajectory([0.0], [[1.0]], Engine.ORACLE, photon_field=[[0]],
                         sites=sites[:1], basis=basis)
    with pytest.raises(ConfigurationError):
        partial.state(0)
