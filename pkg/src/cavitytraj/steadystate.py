"""Independent master-equation route: Liouvillian, steady state, time evolution.

This module never touches the trajectory machinery; it exists so that
ensemble-averaged trajectory results can be checked against direct
integration of the Lindblad equation

    rho' = -i[H, rho] + sum_c ( C rho C^dag - (1/2){C^dag C, rho} ).

Superoperators are dense matrices acting on column-stacked density
matrices: vec(rho) = rho.flatten(order='F'), so vec(A rho B) =
(B^T kron A) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import hilbert, model
from .errors import (
    ConvergenceError,
    InvalidDimensionError,
    InvalidParameterError,
    NonUniqueSteadyStateError,
)

__all__ = [
    "ORACLE_MAX_NMAX",
    "Superoperator",
    "liouvillian",
    "steady_state",
    "SteadyStateResult",
    "evolve_master",
]

# Dense superoperators scale as (2 (n_max+1))^4 in memory; keep the oracle
# honest about where that stops being sensible.
ORACLE_MAX_NMAX = 30


@dataclass(frozen=True)
class Superoperator:
    """Dense Liouvillian together with the structured pieces it was built from.

    matrix acts on column-stacked vec(rho).  k_matrix = -i H - (1/2) sum
    C^dag C is kept so that time evolution can apply the same generator with
    cheap matrix products instead of d^2 x d^2 matvecs.
    """

    matrix: np.ndarray
    hamiltonian: np.ndarray
    collapses: tuple[np.ndarray, ...]
    dims: hilbert.SpaceDims
    k_matrix: np.ndarray
    suggested_dt: float


def liouvillian(p: model.SystemParams) -> Superoperator:
    """Dense Lindblad generator for the driven atom-cavity system."""
    if p.n_max > ORACLE_MAX_NMAX:
        raise InvalidDimensionError(
            f"oracle limited to n_max <= {ORACLE_MAX_NMAX}, got {p.n_max}; "
            "use the trajectory engine for larger spaces")
    h = model.hermitian_hamiltonian(p)
    collapses = tuple(c for _, c in model.collapse_operators(p))
    d = p.dims.total_dim
    eye = np.eye(d, dtype=complex)

    lmat = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    gsum = np.zeros((d, d), dtype=complex)
    for c in collapses:
        cdc = c.conj().T @ c
        gsum += cdc
        lmat += np.kron(c.conj(), c)
        lmat -= 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye))

    k = -1j * h - 0.5 * gsum
    return Superoperator(
        matrix=lmat,
        hamiltonian=h,
        collapses=collapses,
        dims=p.dims,
        k_matrix=k,
        suggested_dt=model.default_time_step(p),
    )


@dataclass(frozen=True)
class SteadyStateResult:
    rho: np.ndarray
    residual: float


def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.flatten(order="F")


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def _inverse_iterate(lu_piv, v0: np.ndarray, n_iter: int) -> np.ndarray:
    v = v0 / np.linalg.norm(v0)
    for _ in range(n_iter):
        v = scipy.linalg.lu_solve(lu_piv, v)
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise ConvergenceError("inverse iteration produced a non-finite vector")
        v = v / nrm
    return v


def _settle(v: np.ndarray, d: int) -> np.ndarray:
    """Hermitize and trace-normalize a candidate null vector."""
    rho = _unvec(v, d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise NonUniqueSteadyStateError(
            "null vector has vanishing trace; steady state is not unique "
            "or the iteration converged to a traceless mode")
    return rho / tr


def steady_state(sop: Superoperator, check_unique: bool = True) -> SteadyStateResult:
    """Steady-state density matrix from the Liouvillian null space.

    Shifted-inverse iteration around eigenvalue zero, then Hermitization and
    trace normalization, with one refinement pass if the residual misses
    1e-10 (relative to the operator scale).  Starting the iteration from two
    different full-rank guesses detects a degenerate null space.
    """
    lmat = sop.matrix
    d = sop.dims.total_dim
    scale = np.linalg.norm(lmat, np.inf)
    if scale == 0.0:
        raise InvalidParameterError("zero Liouvillian has no unique steady state")
    shifted = lmat + (1e-13 * scale) * np.eye(d * d, dtype=complex)
    lu_piv = scipy.linalg.lu_factor(shifted)

    start_a = _vec(np.diag(np.linspace(1.0, 0.5, d)).astype(complex))
    rho = _settle(_inverse_iterate(lu_piv, start_a, 3), d)

    def residual_of(r: np.ndarray) -> float:
        return float(np.linalg.norm(lmat @ _vec(r)) / scale)

    res = residual_of(rho)
    if res > 1e-10:
        # one refinement pass
        rho = _settle(_inverse_iterate(lu_piv, _vec(rho), 2), d)
        res = residual_of(rho)
        if res > 1e-10:
            raise ConvergenceError(
                f"steady-state residual {res:.3e} above 1e-10 after refinement")

    if check_unique:
        start_b = _vec(np.diag(np.linspace(0.3, 1.0, d)).astype(complex))
        rho_b = _settle(_inverse_iterate(lu_piv, start_b, 3), d)
        if residual_of(rho_b) <= 1e-8:
            dist = 0.5 * np.abs(np.linalg.eigvalsh(rho - rho_b)).sum()
            if dist > 1e-6:
                raise NonUniqueSteadyStateError(
                    f"two null-space candidates differ by trace distance {dist:.3e}")

    return SteadyStateResult(rho=rho, residual=res)


def evolve_master(sop: Superoperator, rho0: np.ndarray, sample_times,
                  dt: float | None = None) -> np.ndarray:
    """RK4 integration of rho' = L rho, sampled at the requested times.

    Returns an array of shape (len(sample_times), d, d).  The generator is
    applied through its structured form (K rho + rho K^dag + sum C rho
    C^dag), which is algebraically identical to sop.matrix @ vec(rho).
    Samples are re-Hermitized; a trace drift beyond 1e-8 raises.
    """
    d = sop.dims.total_dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise InvalidDimensionError(
            f"rho0 shape {rho0.shape} does not match dimension {d}")
    if abs(np.trace(rho0).real - 1.0) > 1e-8 or abs(np.trace(rho0).imag) > 1e-10:
        raise InvalidParameterError("rho0 must have unit trace")
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.size == 0:
        raise InvalidParameterError("sample_times must be non-empty")
    if np.any(np.diff(sample_times) <= 0) or sample_times[0] < 0:
        raise InvalidParameterError("sample_times must be strictly increasing and >= 0")
    if dt is None:
        dt = sop.suggested_dt
    if dt <= 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")

    k = sop.k_matrix
    collapses = sop.collapses

    def rhs(r: np.ndarray) -> np.ndarray:
        out = k @ r
        out += r @ k.conj().T
        for c in collapses:
            out += c @ r @ c.conj().T
        return out

    out = np.empty((sample_times.size, d, d), dtype=complex)
    rho = rho0.copy()
    t = 0.0
    for i, ts in enumerate(sample_times):
        seg = ts - t
        if seg > 0:
            n_steps = max(1, int(np.ceil(seg / dt)))
            h = seg / n_steps
            for _ in range(n_steps):
                k1 = rhs(rho)
                k2 = rhs(rho + 0.5 * h * k1)
                k3 = rhs(rho + 0.5 * h * k2)
                k4 = rhs(rho + h * k3)
                rho = rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            t = ts
        sample = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(sample).real - 1.0)
        if drift > 1e-8:
            raise ConvergenceError(
                f"trace drifted by {drift:.3e} at t={ts:g}; reduce dt")
        out[i] = sample
    return out
