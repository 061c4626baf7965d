"""Constructors for the pure-state families used across the package.

Bitstring conventions: a qubit basis index is read as a bitstring with
party 0 as the most significant bit; weight-k bitstrings are enumerated in
ascending order of their integer value, which fixes the coefficient
addressing of generalized Dicke states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import NORM_TOL, PureState, SystemShape

__all__ = [
    "DickeCoefficients",
    "SectorSpec",
    "ghz",
    "gghz",
    "dicke",
    "generalized_dicke",
    "sector_state",
    "uniform_sector_state",
    "zeta",
    "superpose",
    "weight_k_indices",
    "sector_indices",
]


def weight_k_indices(n_parties: int, k: int) -> list[int]:
    """Qubit basis indices with exactly k ones, ascending."""
    if not 0 <= k <= n_parties:
        raise ValueError(f"excitation count {k} out of range [0, {n_parties}]")
    return [i for i in range(2**n_parties) if i.bit_count() == k]


def sector_indices(shape: SystemShape, modulus: int, k: int) -> list[int]:
    """Basis indices whose digit sum is congruent to k modulo ``modulus``."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    if not 0 <= k < modulus:
        raise ValueError(f"residue {k} out of range [0, {modulus})")
    return [
        i for i in range(shape.total_dim)
        if sum(shape.digits_of(i)) % modulus == k
    ]


@dataclass(frozen=True, eq=False)
class DickeCoefficients:
    """Coefficients of a generalized Dicke state.

    ``b[j]`` multiplies the j-th weight-k bitstring in ascending integer
    order; the vector must be unit norm.
    """

    n_parties: int
    k: int
    b: np.ndarray

    def __post_init__(self):
        if not 0 <= self.k <= self.n_parties:
            raise ValueError(f"excitation count {self.k} out of range")
        b = np.asarray(self.b, dtype=complex).reshape(-1)
        expected = math.comb(self.n_parties, self.k)
        if b.size != expected:
            raise ValueError(f"need {expected} coefficients, got {b.size}")
        norm = np.linalg.norm(b)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coefficient norm {norm!r} deviates from 1")
        frozen = b.copy()
        frozen.setflags(write=False)
        object.__setattr__(self, "b", frozen)


@dataclass(frozen=True, eq=False)
class SectorSpec:
    """A state supported on one residue class of the digit sum.

    ``q`` holds the coefficients over the sector's basis states, listed in
    ascending order of the full-space basis index.
    """

    shape: SystemShape
    modulus: int
    k: int
    q: np.ndarray

    def __post_init__(self):
        support = sector_indices(self.shape, self.modulus, self.k)
        q = np.asarray(self.q, dtype=complex).reshape(-1)
        if q.size != len(support):
            raise ValueError(
                f"sector (mod {self.modulus}, k={self.k}) has {len(support)} basis "
                f"states, got {q.size} coefficients"
            )
        norm = np.linalg.norm(q)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"sector coefficient norm {norm!r} deviates from 1")
        frozen = q.copy()
        frozen.setflags(write=False)
        object.__setattr__(self, "q", frozen)

    @classmethod
    def from_amplitudes(cls, shape, modulus, k, amplitudes) -> "SectorSpec":
        """Build a spec from a full-length vector, rejecting support leakage."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != shape.total_dim:
            raise ValueError("amplitude vector length does not match shape")
        support = sector_indices(shape, modulus, k)
        outside = np.delete(np.arange(shape.total_dim), support)
        leak = np.max(np.abs(amps[outside])) if outside.size else 0.0
        if leak > NORM_TOL:
            raise ValueError(
                f"support leaks outside sector k={k} (mod {modulus}) by {leak:.3e}"
            )
        return cls(shape, modulus, k, amps[support])


def ghz(n_parties: int, d: int = 2, sign: int = 1) -> PureState:
    """(|0...0> +/- |1...1>)/sqrt(2), embedded in d-dimensional local spaces."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    shape = SystemShape.uniform(n_parties, d)
    amps = np.zeros(shape.total_dim, dtype=complex)
    amps[0] = 1 / math.sqrt(2)
    amps[shape.index_of((1,) * n_parties)] = sign / math.sqrt(2)
    return PureState(shape, amps)


def gghz(n_parties: int, alpha: float) -> PureState:
    """alpha|0...0> + sqrt(1 - alpha^2)|1...1> on qubits, 0 <= alpha <= 1."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    shape = SystemShape.uniform(n_parties, 2)
    amps = np.zeros(shape.total_dim, dtype=complex)
    amps[0] = alpha
    amps[-1] = math.sqrt(1.0 - alpha * alpha)
    return PureState(shape, amps)


def dicke(n_parties: int, k: int) -> PureState:
    """Uniform superposition of all weight-k bitstrings."""
    idx = weight_k_indices(n_parties, k)
    amps = np.zeros(2**n_parties, dtype=complex)
    amps[idx] = 1 / math.sqrt(len(idx))
    return PureState(SystemShape.uniform(n_parties, 2), amps)


def generalized_dicke(coeffs: DickeCoefficients) -> PureState:
    """Dicke state with arbitrary coefficients per weight-k bitstring."""
    idx = weight_k_indices(coeffs.n_parties, coeffs.k)
    amps = np.zeros(2**coeffs.n_parties, dtype=complex)
    amps[idx] = coeffs.b
    return PureState(SystemShape.uniform(coeffs.n_parties, 2), amps)


def sector_state(spec: SectorSpec) -> PureState:
    """Pure state with support only on the declared residue sector."""
    amps = np.zeros(spec.shape.total_dim, dtype=complex)
    amps[sector_indices(spec.shape, spec.modulus, spec.k)] = spec.q
    return PureState(spec.shape, amps)


def uniform_sector_state(shape: SystemShape, modulus: int, k: int) -> PureState:
    """Uniform superposition over one digit-sum residue class."""
    support = sector_indices(shape, modulus, k)
    if not support:
        raise ValueError(f"sector k={k} (mod {modulus}) is empty for {shape.dims}")
    q = np.full(len(support), 1 / math.sqrt(len(support)), dtype=complex)
    return sector_state(SectorSpec(shape, modulus, k, q))


# Three-qubit basis of the rank-4 asymmetric family; amplitudes are exact
# quarters so the states are orthonormal by construction.
_ZETA_TERMS = {
    1: {0b001: 0.5, 0b010: 0.5, 0b100: -0.5, 0b111: 0.5},
    2: {0b000: -0.5j, 0b011: -0.5j, 0b100: 0.5, 0b111: 0.5},
    3: {0b000: 0.5j, 0b011: 0.5j, 0b100: 0.5, 0b111: 0.5},
    4: {0b001: 0.5, 0b010: 0.5, 0b100: 0.5, 0b111: -0.5},
}


def zeta(i: int) -> PureState:
    """The i-th (1..4) member of the orthonormal three-qubit zeta basis."""
    if i not in _ZETA_TERMS:
        raise ValueError(f"zeta index must be 1..4, got {i}")
    amps = np.zeros(8, dtype=complex)
    for idx, val in _ZETA_TERMS[i].items():
        amps[idx] = val
    return PureState(SystemShape.uniform(3, 2), amps)


def superpose(basis, weights, phases=None) -> PureState:
    """sum_k sqrt(w_k) exp(i phi_k) |basis_k> over an orthonormal basis.

    Parameters
    ----------
    basis : sequence of PureState
        Pairwise orthonormal within 1e-8, all on the same shape.
    weights : array_like
        Probability vector over the basis (sums to 1 within 1e-10).
    phases : array_like, optional
        One angle per basis element; defaults to all zeros.
    """
    basis = list(basis)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if phases is None:
        phases = np.zeros(len(basis))
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if not len(basis) == weights.size == phases.size:
        raise ValueError("basis, weights, and phases must have equal lengths")
    if np.any(weights < -NORM_TOL):
        raise ValueError("weights must be nonnegative")
    if abs(weights.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"weights sum to {weights.sum()!r}, not 1")
    shape = basis[0].shape
    mat = np.stack([b.amplitudes for b in basis])
    if any(b.shape != shape for b in basis):
        raise ValueError("all basis states must share a shape")
    gram_dev = np.max(np.abs(mat @ mat.conj().T - np.eye(len(basis))))
    if gram_dev > 1e-8:
        raise ValueError(f"basis is not orthonormal (deviation {gram_dev:.3e})")
    coeff = np.sqrt(np.clip(weights, 0.0, None)) * np.exp(1j * phases)
    return PureState(shape, coeff @ mat)
