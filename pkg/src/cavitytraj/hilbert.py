"""Operators and index bookkeeping for the atom-field product space.

The composite space is (two-level atom) x (Fock space truncated at n_max
photons).  Basis ordering is fixed package-wide: index k = s * fock_dim + n
with s = 0 the atomic ground state and s = 1 the excited state, so the atom
index is slow and the photon index fast.  All operators are dense complex
arrays; the dimensions stay small enough that sparsity buys nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, ZeroNormError

__all__ = [
    "SpaceDims",
    "annihilation",
    "creation",
    "number_op",
    "sigma_minus",
    "sigma_plus",
    "sigma_z",
    "tensor",
    "basis_index",
    "basis_state",
    "coherent_state",
    "expectation",
    "partial_transpose_field",
    "partial_trace",
    "partial_trace_field",
    "partial_trace_atom",
]

ATOM_DIM = 2


@dataclass(frozen=True)
class SpaceDims:
    """Dimensions of the truncated product space.

    n_max is the highest retained Fock state, so fock_dim = n_max + 1 and
    total_dim = 2 * fock_dim.
    """

    n_max: int

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidDimensionError(
                f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def fock_dim(self) -> int:
        return self.n_max + 1

    @property
    def total_dim(self) -> int:
        return ATOM_DIM * self.fock_dim


def annihilation(fock_dim: int) -> np.ndarray:
    """Photon annihilation operator a on the truncated Fock space."""
    if fock_dim < 2:
        raise InvalidDimensionError(f"fock_dim must be >= 2, got {fock_dim}")
    return np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), 1).astype(complex)


def creation(fock_dim: int) -> np.ndarray:
    """Photon creation operator a^dagger."""
    return annihilation(fock_dim).conj().T


def number_op(fock_dim: int) -> np.ndarray:
    """Photon number operator a^dagger a."""
    return np.diag(np.arange(fock_dim, dtype=float)).astype(complex)


# Atomic operators in the fixed ordering |g> = e_0, |e> = e_1.
def sigma_minus() -> np.ndarray:
    """Atomic lowering operator, sigma_- |e> = |g>."""
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def sigma_plus() -> np.ndarray:
    """Atomic raising operator, sigma_+ |g> = |e>."""
    return np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def sigma_z() -> np.ndarray:
    """Population inversion operator, sigma_z |e> = +|e>, sigma_z |g> = -|g>."""
    return np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)


def tensor(atom_op: np.ndarray, field_op: np.ndarray) -> np.ndarray:
    """Kronecker product consistent with the basis ordering (atom slow)."""
    atom_op = np.asarray(atom_op)
    field_op = np.asarray(field_op)
    if atom_op.shape != (ATOM_DIM, ATOM_DIM):
        raise InvalidDimensionError(
            f"atom operator must be 2x2, got shape {atom_op.shape}")
    if field_op.ndim != 2 or field_op.shape[0] != field_op.shape[1]:
        raise InvalidDimensionError(
            f"field operator must be square, got shape {field_op.shape}")
    return np.kron(atom_op, field_op)


def basis_index(dims: SpaceDims, s: int, n: int) -> int:
    """Flat index of the product basis state |s, n>."""
    if s not in (0, 1):
        raise InvalidDimensionError(f"atom index must be 0 or 1, got {s}")
    if not 0 <= n <= dims.n_max:
        raise InvalidDimensionError(
            f"photon index {n} outside [0, {dims.n_max}]")
    return s * dims.fock_dim + n


def basis_state(dims: SpaceDims, s: int, n: int) -> np.ndarray:
    """Unit vector for the product basis state |s, n>."""
    psi = np.zeros(dims.total_dim, dtype=complex)
    psi[basis_index(dims, s, n)] = 1.0
    return psi


def coherent_state(fock_dim: int, alpha: complex) -> np.ndarray:
    """Truncated coherent state |alpha>, renormalized on the truncated space.

    Amplitudes are built by the stable recurrence c_{n+1} = c_n alpha /
    sqrt(n+1) rather than with explicit factorials.
    """
    if fock_dim < 2:
        raise InvalidDimensionError(f"fock_dim must be >= 2, got {fock_dim}")
    c = np.zeros(fock_dim, dtype=complex)
    c[0] = 1.0
    for n in range(fock_dim - 1):
        c[n + 1] = c[n] * alpha / np.sqrt(n + 1.0)
    norm = np.linalg.norm(c)
    if norm == 0.0:
        raise ZeroNormError("coherent state underflowed to zero on this truncation")
    return c / norm


def expectation(op: np.ndarray, state: np.ndarray) -> complex:
    """<op> for a state vector (normalized by its squared norm) or a
    density matrix (normalized by its trace)."""
    op = np.asarray(op)
    state = np.asarray(state)
    if state.ndim == 1:
        if op.shape != (state.size, state.size):
            raise InvalidDimensionError(
                f"operator {op.shape} does not match state of size {state.size}")
        nrm = np.vdot(state, state).real
        if nrm <= 0.0:
            raise ZeroNormError("cannot take expectation in a zero-norm state")
        return complex(np.vdot(state, op @ state) / nrm)
    if state.ndim == 2:
        if op.shape != state.shape:
            raise InvalidDimensionError(
                f"operator {op.shape} does not match density matrix {state.shape}")
        tr = np.trace(state).real
        if tr <= 0.0:
            raise ZeroNormError("cannot take expectation in a zero-trace state")
        return complex(np.trace(op @ state) / tr)
    raise InvalidDimensionError(f"state must be a vector or a matrix, got ndim={state.ndim}")


def _as_blocks(rho: np.ndarray, dims: SpaceDims) -> np.ndarray:
    if rho.shape != (dims.total_dim, dims.total_dim):
        raise InvalidDimensionError(
            f"density matrix shape {rho.shape} does not match total_dim {dims.total_dim}")
    f = dims.fock_dim
    return rho.reshape(ATOM_DIM, f, ATOM_DIM, f)


def partial_transpose_field(rho: np.ndarray, dims: SpaceDims) -> np.ndarray:
    """Partial transpose over the field: rho[(s,n),(s',n')] -> rho[(s,n'),(s',n)]."""
    blocks = _as_blocks(np.asarray(rho), dims)
    return blocks.transpose(0, 3, 2, 1).reshape(dims.total_dim, dims.total_dim)


def partial_trace_field(rho: np.ndarray, dims: SpaceDims) -> np.ndarray:
    """Reduced 2x2 atomic density matrix."""
    blocks = _as_blocks(np.asarray(rho), dims)
    return np.trace(blocks, axis1=1, axis2=3)


def partial_trace_atom(rho: np.ndarray, dims: SpaceDims) -> np.ndarray:
    """Reduced fock_dim x fock_dim field density matrix."""
    blocks = _as_blocks(np.asarray(rho), dims)
    return np.trace(blocks, axis1=0, axis2=2)


def partial_trace(rho: np.ndarray, dims: SpaceDims, keep: str) -> np.ndarray:
    """Reduced density matrix of one subsystem; keep is "atom" or "field"."""
    if keep == "atom":
        return partial_trace_field(rho, dims)
    if keep == "field":
        return partial_trace_atom(rho, dims)
    raise InvalidDimensionError(
        f"keep must be 'atom' or 'field', got {keep!r}")
