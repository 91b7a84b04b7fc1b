"""Physical model: parameters, Hamiltonians, collapse channels, linearized rates.

Conventions, fixed here once for the whole package:

* Frame rotating at the drive frequency.  ``delta`` is the dimensionless
  atom-cavity detuning (2 x (atom - cavity) / gamma) and ``theta`` the
  dimensionless drive-cavity detuning ((drive - cavity) / kappa).  The
  Hamiltonian detuning terms are restored to physical units as
  Delta_a = delta * gamma / 2 and Delta_c = theta * kappa, which makes the
  one-excitation amplitude decay rates come out as kappa_tilde/2-style
  complex rates (see complex_rates) with no extra factors.
* Collapse operators carry the full measured rates: sqrt(2 kappa) a for the
  cavity output and sqrt(gamma) sigma_- for fluorescence, so that
  H_eff - H_herm = -(i/2) sum C^dag C holds exactly and the fluorescence
  jump probability in a short interval is gamma <sigma_+ sigma_-> dt.
* ``epsilon`` may be given either as a raw drive amplitude or in saturation
  units where epsilon = 1 is the drive whose weak-field intracavity
  intensity extrapolates to the atomic saturation photon number
  n_sat = gamma^2 / (8 g^2); see saturation_scaled_drive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import InvalidParameterError

__all__ = [
    "SystemParams",
    "ComplexRates",
    "detuning_terms",
    "saturation_photon_number",
    "saturation_scaled_drive",
    "hermitian_hamiltonian",
    "effective_hamiltonian",
    "collapse_operators",
    "complex_rates",
    "default_time_step",
    "vacuum_rabi",
]

DRIVE_SCALINGS = ("raw", "saturation")


@dataclass(frozen=True)
class SystemParams:
    """Parameters of the driven atom-cavity system.

    kappa:   cavity field decay rate (by convention the energy decay rate
             out of the mirror is 2 kappa)
    gamma:   atomic spontaneous emission rate
    g:       atom-field coupling
    epsilon: drive amplitude, interpreted per drive_scaling
    delta:   dimensionless atom-cavity detuning
    theta:   dimensionless drive-cavity detuning
    n_max:   highest retained Fock state
    """

    kappa: float
    gamma: float
    g: float
    epsilon: float
    delta: float = 0.0
    theta: float = 0.0
    n_max: int = 10
    drive_scaling: str = "raw"

    def __post_init__(self) -> None:
        if self.kappa < 0 or self.gamma < 0 or self.g < 0:
            raise InvalidParameterError("rates kappa, gamma, g must be non-negative")
        if self.epsilon < 0:
            raise InvalidParameterError("epsilon must be non-negative (drive phase is fixed)")
        if self.epsilon > 0 and self.kappa <= 0:
            raise InvalidParameterError(
                "kappa must be positive when the cavity is driven; "
                "a lossless driven cavity has no steady state")
        if self.drive_scaling not in DRIVE_SCALINGS:
            raise InvalidParameterError(
                f"drive_scaling must be one of {DRIVE_SCALINGS}, got {self.drive_scaling!r}")
        if self.drive_scaling == "saturation" and self.g == 0:
            raise InvalidParameterError("saturation drive units are undefined at g = 0")
        # delegate n_max validation
        hilbert.SpaceDims(self.n_max)

    @property
    def dims(self) -> hilbert.SpaceDims:
        return hilbert.SpaceDims(self.n_max)


@dataclass(frozen=True)
class ComplexRates:
    """Detuning-dressed complex decay rates of the linearized system."""

    kappa_tilde: complex
    gamma_tilde: complex


def detuning_terms(p: SystemParams) -> tuple[float, float]:
    """Physical detuning coefficients (Delta_a, Delta_c) of the Hamiltonian.

    Delta_a = delta * gamma / 2 multiplies sigma_z / 2; Delta_c = theta *
    kappa multiplies a^dag a.  With these choices the one-excitation
    amplitudes decay at (gamma/2)(1 + i delta) and kappa (1 + i theta),
    matching the complex-rate description exactly.
    """
    return p.delta * p.gamma / 2.0, p.theta * p.kappa


def saturation_photon_number(p: SystemParams) -> float:
    """n_sat = gamma^2 / (8 g^2), the photon number that saturates the atom."""
    if p.g == 0:
        raise InvalidParameterError("saturation photon number undefined at g = 0")
    return p.gamma ** 2 / (8.0 * p.g ** 2)


def saturation_scaled_drive(p: SystemParams) -> float:
    """Physical drive amplitude implied by p.epsilon and p.drive_scaling.

    In saturation units epsilon = 1 is the drive whose low-field intracavity
    intensity equals the atomic saturation photon number.  The weak-field
    cavity response with the atom present is alpha = eps / (kappa (1 + 2 C1)),
    so epsilon_phys = epsilon * kappa * (1 + 2 C1) * sqrt(n_sat) with
    C1 = g^2 / (kappa gamma).  For kappa = gamma = g this puts the
    entanglement optimum at epsilon ~ 1.
    """
    if p.drive_scaling == "raw":
        return p.epsilon
    if p.gamma == 0:
        raise InvalidParameterError("saturation drive scaling undefined at gamma = 0")
    coop = p.g ** 2 / (p.kappa * p.gamma)
    return p.epsilon * p.kappa * (1.0 + 2.0 * coop) * np.sqrt(saturation_photon_number(p))


def _operators(p: SystemParams):
    f = p.dims.fock_dim
    a = hilbert.annihilation(f)
    eye_f = np.eye(f, dtype=complex)
    eye_a = np.eye(2, dtype=complex)
    return a, eye_f, eye_a


def hermitian_hamiltonian(p: SystemParams) -> np.ndarray:
    """Hermitian part of the Hamiltonian, drive included."""
    a, eye_f, eye_a = _operators(p)
    delta_a, delta_c = detuning_terms(p)
    eps = saturation_scaled_drive(p)
    n = a.conj().T @ a
    h = 0.5 * delta_a * hilbert.tensor(hilbert.sigma_z(), eye_f)
    h += delta_c * hilbert.tensor(eye_a, n)
    h += p.g * (hilbert.tensor(hilbert.sigma_minus(), a.conj().T)
                + hilbert.tensor(hilbert.sigma_plus(), a))
    h += 1j * eps * hilbert.tensor(eye_a, a.conj().T - a)
    return h


def effective_hamiltonian(p: SystemParams) -> np.ndarray:
    """Non-Hermitian Hamiltonian generating the no-jump evolution.

    H_eff = H_herm - i kappa a^dag a - i (gamma/2) sigma_+ sigma_-.
    """
    a, eye_f, _ = _operators(p)
    n = a.conj().T @ a
    h = hermitian_hamiltonian(p)
    h -= 1j * p.kappa * hilbert.tensor(np.eye(2, dtype=complex), n)
    sp_sm = hilbert.sigma_plus() @ hilbert.sigma_minus()
    h -= 0.5j * p.gamma * hilbert.tensor(sp_sm, eye_f)
    return h


def collapse_operators(p: SystemParams) -> list[tuple[str, np.ndarray]]:
    """Collapse operators with nonzero rate, in fixed (cavity, atom) order."""
    a, eye_f, eye_a = _operators(p)
    ops: list[tuple[str, np.ndarray]] = []
    if p.kappa > 0:
        ops.append(("cavity", np.sqrt(2.0 * p.kappa) * hilbert.tensor(eye_a, a)))
    if p.gamma > 0:
        ops.append(("atom", np.sqrt(p.gamma) * hilbert.tensor(hilbert.sigma_minus(), eye_f)))
    return ops


def complex_rates(p: SystemParams) -> ComplexRates:
    """Detuning-dressed rates kappa(1 + i theta) and gamma(1 + i delta)."""
    return ComplexRates(
        kappa_tilde=p.kappa * (1.0 + 1j * p.theta),
        gamma_tilde=p.gamma * (1.0 + 1j * p.delta),
    )


def default_time_step(p: SystemParams) -> float:
    """Integration step small against every rate in the problem.

    dt = 0.01 / max(kappa, gamma/2, g, epsilon_phys, |Delta_a|, |Delta_c|);
    falls back to 0.01 when every rate vanishes (free evolution).
    """
    delta_a, delta_c = detuning_terms(p)
    eps = saturation_scaled_drive(p)
    scale = max(p.kappa, p.gamma / 2.0, p.g, eps, abs(delta_a), abs(delta_c))
    if scale <= 0.0:
        return 0.01
    return float(0.01 / scale)


def vacuum_rabi(p: SystemParams) -> complex:
    """Complex vacuum Rabi frequency of the one-excitation manifold.

    Principal branch of sqrt( (kappa_tilde - gamma_tilde/2)^2 / 4 - g^2 ).
    A purely imaginary value means underdamped vacuum Rabi oscillation at
    its modulus.
    """
    r = complex_rates(p)
    d = 0.5 * (r.kappa_tilde - 0.5 * r.gamma_tilde)
    return complex(np.sqrt(complex(d * d - p.g ** 2)))
