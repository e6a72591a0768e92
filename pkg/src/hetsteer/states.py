"""Joint qubit-field states used throughout the worked examples."""
from __future__ import annotations

import math

import numpy as np

from .hilbert import (
    JointState,
    coherent_state,
    default_n_cut,
    fock_state,
    mix_states,
    pure_joint,
    state_from_vector,
)

_S = 1.0 / math.sqrt(2.0)


def bell(n_cut: int = 24) -> JointState:
    """``(|0,0> + |1,1>)/sqrt(2)``."""
    return pure_joint(fock_state(0, n_cut), fock_state(1, n_cut), _S, _S)


def product(n: int, n_cut: int = 24) -> JointState:
    """``(|0,n> + |1,n>)/sqrt(2)``: qubit in |+>, field in |n>."""
    f = fock_state(n, n_cut)
    return pure_joint(f, f, _S, _S)


def plus_two(n_cut: int = 24) -> JointState:
    """``|+>|2>``."""
    return product(2, n_cut)


def phi(n_cut: int = 24) -> JointState:
    """``(|1,0> + |0,1>)/sqrt(2)``."""
    return pure_joint(fock_state(1, n_cut), fock_state(0, n_cut), _S, _S)


def mixed(p: float, n_cut: int = 24) -> JointState:
    """``p |+,2><+,2| + (1-p) |Phi><Phi|``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    parts = [(w, s) for w, s in ((p, plus_two(n_cut)), (1.0 - p, phi(n_cut))) if w > 0.0]
    return mix_states(parts)


def coherent_pair(gamma: complex, gamma_prime: complex, n_cut: int | None = None) -> JointState:
    """``(|0,gamma> + |1,gamma'>)/sqrt(2)`` with truncated coherent states."""
    if n_cut is None:
        n_cut = default_n_cut(max(abs(gamma), abs(gamma_prime)))
    return pure_joint(coherent_state(gamma, n_cut), coherent_state(gamma_prime, n_cut), _S, _S)


def jc_initial(n: int, n_cut: int = 24) -> JointState:
    """``|1, n>``: qubit in its lower level, field with ``n`` photons."""
    field = fock_state(n, n_cut).amplitudes
    psi = np.concatenate([np.zeros(n_cut, dtype=complex), field])
    return state_from_vector(psi, n_cut)
