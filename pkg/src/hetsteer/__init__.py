"""Qubit steering sets reachable by heterodyne detection of a jointly held field mode."""
from . import analytic, dynamics, hilbert, kernels, states, steering
from .errors import InvalidStateError, TruncationError, ZeroProbabilityOutcome
from .hilbert import BlochVector, FockVector, JointState, coherent_state, fock_state, mix_states, pure_joint
from .steering import (
    ConditionedOperators,
    SteeringSample,
    SweepGrid,
    conditioned_operators,
    heterodyne_steer,
    mixed_projection_steer,
    sweep,
)

__version__ = "0.1.0"
