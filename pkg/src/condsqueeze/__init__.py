"""Conditional squeezing simulator.

A qubit-controlled oscillator (or oscillator pair) is driven so that the
oscillator is squeezed along an axis set by the qubit state.  The package
integrates the driven dynamics, post-selects on the qubit, and reports
quadrature squeezing, Wigner functions and Lie-algebra controllability
checks.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    CondSqueezeError, ConfigError, GuardAbort, LayoutError, LeakageAbort, NormDriftAbort, NumericalError,
    PostSelectionError, TruncationError,
)
from .operators import (
    Fock, HilbertLayout, QOperator, QState, Qubit, annihilator, basis_state, coherent_vector, commutator,
    conditional_squeeze, creator, displacement, embed, expectation, fidelity, fock_vector, identity,
    matrix_exponential, number, pauli, product_state, qubit_projector, qubit_vector, squeeze, variance,
)
from .model import (
    DriveParams, HamiltonianKind, HamiltonianSpec, TimeDependentOperator, TmsParams, build_hamiltonian,
    displacement_trajectory, drive_waveform, khz, mhz, photon_limits, tms_trajectories,
)
from .frames import FrameTransform, frame_transform
from .dynamics import EvolutionRecord, TimeGrid, evolve, evolve_stroboscopic, frame_map, leakage
from .observables import (
    GridSpec, SqueezingTrace, WignerGrid, conditioned_state, entanglement_entropy, joint_wigner_cut,
    quadrature, squeeze_db, squeezing_point, squeezing_trace, two_mode_quadratures, wigner,
)
from .controllability import (
    GeneratorSet, canonical_pair, closure_search, control_generators, identity_catalogue, verify_identity,
)
from .experiments import (
    ScenarioConfig, SweepResult, SweepSpec, reference_drive, reference_tms, run_approx_chain, run_scenario,
    run_single_mode, run_superposition, run_sweep, run_two_mode,
)
