"""
NH Emitters
~~~~~~~~~~~

Quantum emitters coupled to non-Hermitian photonic lattices in the
single-excitation sector: self-energies, bound states, spectral winding and
emission dynamics.
"""
from nhemitters.model import BoundaryCondition, BuiltModel, EmitterSet, \
    EmitterSpec, LatticeSpec, build_effective, real_space_hamiltonian
from nhemitters.catalog import CATALOG
from nhemitters.selfenergy import Sheet, evaluate, winding_number
from nhemitters.boundstates import BoundState, RootSearchConfig, \
    find_bound_states
from nhemitters.dynamics import emitter_amplitudes_resolvent, evolve_dense, \
    evolve_finite
from nhemitters.trajectory import Engine, InitialState, Trajectory


def nhemitters():
    return 'nhemitters-0.1'
