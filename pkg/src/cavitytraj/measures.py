"""Entanglement and state-quality measures for the atom-field system.

Log negativity is the primary measure: E_N = log2 || rho^(T_F) ||_1, with
the partial transpose taken over the field.  For pure states the trace norm
collapses to the square of the Schmidt-coefficient sum, which is what the
per-trajectory fast path uses.  A projected two-qubit description
(span{|g,0>, |g,1>, |e,0>, |e,1>}) supports the pure-state concurrence in
both normalization conventions, since the literature uses both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import (
    InvalidDimensionError,
    InvalidParameterError,
    UndefinedCorrelationError,
    ZeroNormError,
)

__all__ = [
    "DensityMatrix",
    "EntanglementSeries",
    "TwoQubitProjection",
    "Concurrence",
    "BimodalFit",
    "log_negativity",
    "log_negativity_pure",
    "negativity",
    "two_qubit_E",
    "concurrence_pure",
    "log_negativity_from_concurrence",
    "impurity",
    "weak_field_overlap",
    "cross_correlation_g2tf",
    "series_max_and_steady",
    "bimodal_ansatz_overlap",
]

CLAMP = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix on the product space."""

    matrix: np.ndarray
    dims: hilbert.SpaceDims

    @classmethod
    def from_array(cls, arr: np.ndarray, dims: hilbert.SpaceDims,
                   psd_tol: float = 1e-8) -> "DensityMatrix":
        arr = np.asarray(arr, dtype=complex)
        d = dims.total_dim
        if arr.shape != (d, d):
            raise InvalidDimensionError(
                f"density matrix shape {arr.shape} does not match total_dim {d}")
        if np.linalg.norm(arr - arr.conj().T, np.inf) > 1e-10 * max(1.0, np.linalg.norm(arr, np.inf)):
            raise InvalidParameterError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(arr).real - 1.0) > 1e-10:
            raise InvalidParameterError("density matrix trace differs from 1 beyond 1e-10")
        if np.linalg.eigvalsh(arr).min() < -psd_tol:
            raise InvalidParameterError(
                f"density matrix has an eigenvalue below -{psd_tol:g}")
        return cls(matrix=arr, dims=dims)


@dataclass(frozen=True)
class EntanglementSeries:
    """Time series of an entanglement measure.

    kind is "ensemble_rho" (measure of the averaged density matrix; no
    meaningful standard error) or "per_trajectory_mean" (mean over
    trajectories of the pure-state measure, with its standard error).
    """

    times: np.ndarray
    values: np.ndarray
    kind: str
    stderr: np.ndarray | None = None


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def log_negativity(rho, dims: hilbert.SpaceDims) -> float:
    """E_N = log2 of the trace norm of the partial transpose over the field.

    Separable states give 0; values below 1e-12 are clamped to 0 so that
    round-off never reports spurious entanglement.
    """
    mat = _as_matrix(rho)
    pt = hilbert.partial_transpose_field(mat, dims)
    trace_norm = float(np.abs(np.linalg.eigvalsh(pt)).sum())
    value = float(np.log2(trace_norm)) if trace_norm > 0 else 0.0
    if value < CLAMP:
        return 0.0
    return value


def negativity(rho, dims: hilbert.SpaceDims) -> float:
    """N = (||rho^(T_F)||_1 - 1) / 2, clamped at zero like log_negativity."""
    mat = _as_matrix(rho)
    pt = hilbert.partial_transpose_field(mat, dims)
    value = 0.5 * (float(np.abs(np.linalg.eigvalsh(pt)).sum()) - 1.0)
    if value < CLAMP:
        return 0.0
    return value


def log_negativity_pure(psi: np.ndarray, dims: hilbert.SpaceDims) -> float:
    """Pure-state fast path: E_N = 2 log2 (sum of Schmidt coefficients).

    Exactly equals log_negativity of |psi><psi| but costs one SVD of a
    2 x fock_dim matrix instead of a full eigendecomposition.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.size != dims.total_dim:
        raise InvalidDimensionError(
            f"state size {psi.size} does not match total_dim {dims.total_dim}")
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ZeroNormError("cannot measure a zero state")
    s = np.linalg.svd(psi.reshape(2, dims.fock_dim) / nrm, compute_uv=False)
    value = 2.0 * float(np.log2(s.sum()))
    if value < CLAMP:
        return 0.0
    return value


@dataclass(frozen=True)
class TwoQubitProjection:
    """Projection of a pure state onto span{|g,0>, |g,1>, |e,0>, |e,1>}."""

    e_value: complex
    weight: float


@dataclass(frozen=True)
class Concurrence:
    """Pure-state concurrence in both conventions found in the literature."""

    standard: float   # 2 |E|
    sqrt_form: float  # sqrt(2 |E|)
    weight: float


def _project_two_qubit(psi: np.ndarray, dims: hilbert.SpaceDims):
    psi = np.asarray(psi, dtype=complex)
    if psi.size != dims.total_dim:
        raise InvalidDimensionError(
            f"state size {psi.size} does not match total_dim {dims.total_dim}")
    total = float(np.vdot(psi, psi).real)
    if total <= 0.0:
        raise ZeroNormError("cannot project a zero state")
    idx = [hilbert.basis_index(dims, s, n) for s, n in ((0, 0), (0, 1), (1, 0), (1, 1))]
    amps = psi[idx]
    weight = float(np.vdot(amps, amps).real) / total
    if weight < 1e-10:
        raise ZeroNormError(
            f"two-qubit projection weight {weight:.3e} below 1e-10; "
            "the reduced description is meaningless here")
    amps = amps / np.linalg.norm(amps)
    return amps, weight


def two_qubit_E(psi: np.ndarray, dims: hilbert.SpaceDims) -> TwoQubitProjection:
    """E = C_g0 C_e1 - C_g1 C_e0 on the renormalized two-qubit projection.

    E vanishes exactly for product states of the projected pair; its modulus
    is half the standard pure-state concurrence.
    """
    (c_g0, c_g1, c_e0, c_e1), weight = _project_two_qubit(psi, dims)
    return TwoQubitProjection(e_value=complex(c_g0 * c_e1 - c_g1 * c_e0), weight=weight)


def concurrence_pure(psi: np.ndarray, dims: hilbert.SpaceDims) -> Concurrence:
    """Both concurrence conventions for the projected two-qubit pure state."""
    proj = two_qubit_E(psi, dims)
    e_abs = abs(proj.e_value)
    return Concurrence(standard=2.0 * e_abs, sqrt_form=float(np.sqrt(2.0 * e_abs)),
                       weight=proj.weight)


def log_negativity_from_concurrence(c: float) -> float:
    """E_N = log2(1 + c) for a two-qubit pure state of concurrence c."""
    if not 0.0 <= c <= 1.0 + 1e-12:
        raise InvalidParameterError(
            f"concurrence must lie in [0, 1], got {c}")
    return float(np.log2(1.0 + min(c, 1.0)))


def impurity(rho) -> float:
    """1 - Tr(rho^2); zero for pure states, 1 - 1/d for maximally mixed."""
    mat = _as_matrix(rho)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidDimensionError(f"impurity needs a square matrix, got {mat.shape}")
    return float(1.0 - np.trace(mat @ mat).real)


def weak_field_overlap(psi_ref: np.ndarray, psi: np.ndarray) -> float:
    """Squared overlap |<ref|psi>|^2 with both states normalized first."""
    psi_ref = np.asarray(psi_ref, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if psi_ref.shape != psi.shape:
        raise InvalidDimensionError(
            f"state shapes differ: {psi_ref.shape} vs {psi.shape}")
    n1 = np.linalg.norm(psi_ref)
    n2 = np.linalg.norm(psi)
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroNormError("cannot overlap zero states")
    return float(abs(np.vdot(psi_ref, psi)) ** 2 / (n1 ** 2 * n2 ** 2))


def cross_correlation_g2tf(rho, dims: hilbert.SpaceDims,
                           tiny: float = 1e-30) -> float:
    """Equal-time transmitted/fluorescence cross correlation.

    g2_TF(0) = <a^dag a sigma_+ sigma_-> / (<a^dag a> <sigma_+ sigma_->).
    """
    mat = _as_matrix(rho)
    f = dims.fock_dim
    n_op = hilbert.tensor(np.eye(2, dtype=complex), hilbert.number_op(f))
    pe_op = hilbert.tensor(hilbert.sigma_plus() @ hilbert.sigma_minus(),
                           np.eye(f, dtype=complex))
    n_mean = hilbert.expectation(n_op, mat).real
    pe_mean = hilbert.expectation(pe_op, mat).real
    if n_mean <= tiny or pe_mean <= tiny:
        raise UndefinedCorrelationError(
            f"cross correlation undefined: <n> = {n_mean:.3e}, "
            f"<sigma+sigma-> = {pe_mean:.3e}")
    joint = hilbert.expectation(n_op @ pe_op, mat).real
    return float(joint / (n_mean * pe_mean))


def series_max_and_steady(series: EntanglementSeries,
                          window: tuple[float, float]) -> tuple[float, float]:
    """(max over the whole series, mean over the window [t_a, t_b])."""
    times = np.asarray(series.times, dtype=float)
    values = np.asarray(series.values, dtype=float)
    if times.shape != values.shape or times.size == 0:
        raise InvalidParameterError("series times and values must be equal-length and non-empty")
    t_a, t_b = float(window[0]), float(window[1])
    mask = (times >= t_a) & (times <= t_b)
    if not mask.any():
        raise InvalidParameterError(
            f"steady window [{t_a:g}, {t_b:g}] contains no samples")
    return float(values.max()), float(values[mask].mean())


@dataclass(frozen=True)
class BimodalFit:
    """Best bimodal-superposition ansatz found for a conditioned state."""

    overlap: float
    alpha_mod: float
    phi: float
    theta: float


def _branch_vectors(dims: hilbert.SpaceDims, r: float, phi: float):
    """The two ansatz branches at radius r and switching phase phi.

    plus branch: (1/sqrt2)(e^{+i phi}|e> + |g>) x |r e^{+i phi}>
    minus branch: (1/sqrt2)(e^{-i phi}|e> - |g>) x |r e^{-i phi}>
    """
    coh_p = hilbert.coherent_state(dims.fock_dim, r * np.exp(1j * phi))
    coh_m = hilbert.coherent_state(dims.fock_dim, r * np.exp(-1j * phi))
    return coh_p, coh_m


def _bimodal_best_theta(z_p: complex, z_m: complex, w: complex, n_theta: int):
    """Maximize |z_p + e^{i theta} z_m|^2 / (2 (1 + Re(e^{-i theta} w)))."""
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    phases = np.exp(1j * thetas)
    num = np.abs(z_p + phases * z_m) ** 2
    den = 2.0 * (1.0 + (np.conj(phases) * w).real)
    ok = den > 1e-12
    if not ok.any():
        return 0.0, 0.0
    vals = np.where(ok, num / np.where(ok, den, 1.0), -np.inf)
    j = int(np.argmax(vals))
    return float(vals[j]), float(thetas[j])


def bimodal_ansatz_overlap(psi: np.ndarray, dims: hilbert.SpaceDims,
                           r_max: float | None = None,
                           n_r: int = 24, n_phi: int = 24,
                           n_theta: int = 64) -> BimodalFit:
    """Best overlap with an equal-weight superposition of two dressed
    coherent branches, maximized over (|alpha|, phi, theta) on a grid and
    refined once around the coarse optimum.

    The ansatz is (1/sqrt2)[ |plus(r, phi)> + e^{-i theta} |minus(r, phi)> ],
    normalized (the branches are not orthogonal at small r).
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.size != dims.total_dim:
        raise InvalidDimensionError(
            f"state size {psi.size} does not match total_dim {dims.total_dim}")
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ZeroNormError("cannot fit a zero state")
    psi = psi / nrm
    c_g = psi[:dims.fock_dim]
    c_e = psi[dims.fock_dim:]

    if r_max is None:
        n_mean = float(np.sum(np.arange(dims.fock_dim) * (np.abs(c_g) ** 2 + np.abs(c_e) ** 2)))
        r_max = 2.0 * np.sqrt(max(n_mean, 0.25)) + 0.5

    def search(r_lo, r_hi, p_lo, p_hi, nr, nphi):
        best = (-1.0, 0.0, 0.0, 0.0)
        for r in np.linspace(r_lo, r_hi, nr):
            for phi in np.linspace(p_lo, p_hi, nphi, endpoint=False) if p_hi - p_lo >= 2 * np.pi - 1e-12 else np.linspace(p_lo, p_hi, nphi):
                coh_p, coh_m = _branch_vectors(dims, r, phi)
                ep = np.exp(-1j * phi)
                # <plus|psi> and <minus|psi>
                z_p = (np.vdot(coh_p, c_g) + ep * np.vdot(coh_p, c_e)) / np.sqrt(2.0)
                z_m = (-np.vdot(coh_m, c_g) + np.conj(ep) * np.vdot(coh_m, c_e)) / np.sqrt(2.0)
                # <plus|minus> in closed form
                w = 0.5 * (np.exp(-2j * phi) - 1.0) * np.vdot(coh_p, coh_m)
                val, th = _bimodal_best_theta(complex(z_p), complex(z_m), complex(w), n_theta)
                if val > best[0]:
                    best = (val, float(r), float(phi), th)
        return best

    val, r0, phi0, th0 = search(0.0, r_max, 0.0, 2.0 * np.pi, n_r, n_phi)
    # one local refinement at 10x resolution
    dr = r_max / max(n_r - 1, 1)
    dphi = 2.0 * np.pi / n_phi
    val2, r1, phi1, th1 = search(max(0.0, r0 - dr), r0 + dr,
                                 phi0 - dphi, phi0 + dphi, n_r, n_phi)
    if val2 > val:
        val, r0, phi0, th0 = val2, r1, phi1, th1
    return BimodalFit(overlap=float(min(val, 1.0)), alpha_mod=r0,
                      phi=float(np.mod(phi0, 2.0 * np.pi)), theta=th0)
