"""Closed-form weak-driving results and the perturbative conditioned state.

Everything here is low-order perturbation theory in the drive for the
resonant system, kept deliberately independent of the trajectory engine so
the two can be compared in tests.  The conditioned pure state to second
order in the drive is

    |psi> = |g,0> + a_1g |g,1> + a_0e |e,0> + a_2g |g,2> + a_1e |e,1>,

left unnormalized with unit coefficient on |g,0> (normalize before feeding
it to any measure).  The amplitudes come from solving the no-jump generator
order by order on the 0-, 1- and 2-excitation manifolds, not from
transcribing closed forms, so they stay consistent with the Hamiltonian
conventions by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert, model
from .errors import InvalidParameterError, OutOfRegimeError

__all__ = [
    "cooperativity",
    "q_factor",
    "xi",
    "WeakFieldValidity",
    "weak_field_validity",
    "weak_concurrence",
    "weak_log_negativity",
    "WeakFieldAmplitudes",
    "weak_field_state",
]


def cooperativity(g: float, kappa: float, gamma: float) -> tuple[float, float]:
    """Cooperativity pair (C_1, C_1') of the driven one-atom system.

    C_1 = g^2 / (kappa gamma) is the single-excitation cooperativity and
    C_1' = 2 C_1 kappa / (2 kappa + gamma) its two-excitation analogue.
    """
    if kappa <= 0 or gamma <= 0:
        raise InvalidParameterError("cooperativity needs kappa > 0 and gamma > 0")
    c1 = g ** 2 / (kappa * gamma)
    c1_prime = 2.0 * c1 * kappa / (2.0 * kappa + gamma)
    return c1, c1_prime


def q_factor(g: float, kappa: float, gamma: float) -> float:
    """q = (1 + 2 C_1) / (1 + 2 C_1 - 2 C_1').

    Ratio of the actual two-excitation amplitude to the value it would take
    if the one-excitation response simply factorized; q != 1 signals
    entanglement of the weakly driven steady state.
    """
    c1, c1p = cooperativity(g, kappa, gamma)
    den = 1.0 + 2.0 * c1 - 2.0 * c1p
    if abs(den) < 1e-14:
        raise InvalidParameterError("q factor singular: 1 + 2C_1 - 2C_1' = 0")
    return (1.0 + 2.0 * c1) / den


def xi(g: float, kappa: float, gamma: float) -> float:
    """Entanglement susceptibility xi = [2g / (gamma (1 + 2 C_1)^2)] (q - 1)."""
    c1, _ = cooperativity(g, kappa, gamma)
    return 2.0 * g * (q_factor(g, kappa, gamma) - 1.0) / (gamma * (1.0 + 2.0 * c1) ** 2)


@dataclass(frozen=True)
class WeakFieldValidity:
    """Margins of the weak-driving validity window (e/k)^2 << |xi| < 1.

    valid is True when drive_squared < margin and xi_magnitude < 1, with
    "much less" operationalized as a factor of 10 (margin = |xi|/10).
    """

    valid: bool
    drive_squared: float
    margin: float
    xi_magnitude: float


def weak_field_validity(epsilon: float, kappa: float, xi_val: float) -> WeakFieldValidity:
    """Check (epsilon/kappa)^2 < |xi|/10 and |xi| < 1, returning the margins."""
    if kappa <= 0:
        raise InvalidParameterError("weak-field expressions need kappa > 0")
    drive_sq = (epsilon / kappa) ** 2
    margin = abs(xi_val) / 10.0
    ok = drive_sq < margin and abs(xi_val) < 1.0
    return WeakFieldValidity(valid=ok, drive_squared=drive_sq,
                             margin=margin, xi_magnitude=abs(xi_val))


def _check_weak_regime(epsilon: float, kappa: float, xi_val: float) -> None:
    v = weak_field_validity(epsilon, kappa, xi_val)
    if not v.valid:
        raise OutOfRegimeError(
            f"weak-field law out of regime: (epsilon/kappa)^2 = "
            f"{v.drive_squared:.3e} vs margin |xi|/10 = {v.margin:.3e}, "
            f"|xi| = {v.xi_magnitude:.3e} (must also be < 1)")


def weak_concurrence(epsilon: float, kappa: float, xi_val: float) -> float:
    """Weak-driving entanglement law C = -(e/k)^4 log2[(e/k)^4] xi^2.

    Valid only while (epsilon/kappa)^2 < |xi| / 10; outside that window an
    OutOfRegimeError reports both sides of the inequality.
    """
    if epsilon < 0:
        raise InvalidParameterError("epsilon must be non-negative")
    if epsilon == 0.0:
        return 0.0
    _check_weak_regime(epsilon, kappa, xi_val)
    x4 = (epsilon / kappa) ** 4
    return float(-x4 * np.log2(x4) * xi_val ** 2)


def weak_log_negativity(epsilon: float, kappa: float, xi_val: float) -> float:
    """log2(1 + C) with C the weak-driving law above."""
    return float(np.log2(1.0 + weak_concurrence(epsilon, kappa, xi_val)))


@dataclass(frozen=True)
class WeakFieldAmplitudes:
    """Perturbative amplitudes of the conditioned state (see module docstring).

    a_1g and a_0e are first order in the drive, a_2g and a_1e second order;
    the |g,0> coefficient is fixed at 1 (unnormalized convention).
    """

    a_1g: complex
    a_0e: complex
    a_2g: complex
    a_1e: complex
    epsilon_over_kappa: float

    def state_vector(self, n_max: int = 2) -> np.ndarray:
        """Assemble the unnormalized state on an n_max-photon truncation."""
        dims = hilbert.SpaceDims(n_max)
        if dims.n_max < 2:
            raise InvalidParameterError("weak-field state needs n_max >= 2")
        psi = np.zeros(dims.total_dim, dtype=complex)
        psi[hilbert.basis_index(dims, 0, 0)] = 1.0
        psi[hilbert.basis_index(dims, 0, 1)] = self.a_1g
        psi[hilbert.basis_index(dims, 1, 0)] = self.a_0e
        psi[hilbert.basis_index(dims, 0, 2)] = self.a_2g
        psi[hilbert.basis_index(dims, 1, 1)] = self.a_1e
        return psi

    def normalized_state(self, n_max: int = 2) -> np.ndarray:
        """Assemble the state and normalize it to unit norm."""
        psi = self.state_vector(n_max)
        return psi / np.linalg.norm(psi)


def weak_field_state(p: model.SystemParams) -> WeakFieldAmplitudes:
    """Order-by-order steady amplitudes of the no-jump evolution.

    First order: the driven one-excitation manifold {|g,1>, |e,0>}.
    Second order: the two-excitation manifold {|g,2>, |e,1>} driven by the
    first-order amplitudes.  Resonant operation only (delta = theta = 0).
    The linear solves are exact at any drive; whether the perturbative
    truncation is trustworthy is a separate question answered by
    weak_field_validity.
    """
    if p.delta != 0.0 or p.theta != 0.0:
        raise OutOfRegimeError(
            "weak-field amplitudes are implemented for the resonant system "
            f"only (delta = theta = 0), got delta={p.delta}, theta={p.theta}")
    if p.kappa <= 0:
        raise InvalidParameterError("weak-field amplitudes need kappa > 0")

    eps = model.saturation_scaled_drive(p)
    # Work on a dedicated 2-excitation space; amplitudes are independent of
    # n_max because the manifolds close under the undriven generator.
    pw = model.SystemParams(kappa=p.kappa, gamma=p.gamma, g=p.g, epsilon=0.0,
                            delta=0.0, theta=0.0, n_max=2)
    dims = pw.dims
    h0 = model.effective_hamiltonian(pw)
    a = hilbert.annihilation(dims.fock_dim)
    drive = hilbert.tensor(np.eye(2, dtype=complex), a.conj().T - a)

    i_g0 = hilbert.basis_index(dims, 0, 0)
    man1 = [hilbert.basis_index(dims, 0, 1), hilbert.basis_index(dims, 1, 0)]
    man2 = [hilbert.basis_index(dims, 0, 2), hilbert.basis_index(dims, 1, 1)]

    # 0 = -i H0 x_k + eps D x_{k-1} restricted to manifold k
    x0 = np.array([1.0 + 0.0j])
    lhs1 = 1j * h0[np.ix_(man1, man1)]
    lhs2 = 1j * h0[np.ix_(man2, man2)]
    try:
        rhs1 = eps * drive[np.ix_(man1, [i_g0])] @ x0
        x1 = np.linalg.solve(lhs1, rhs1.ravel())
        rhs2 = eps * drive[np.ix_(man2, man1)] @ x1
        x2 = np.linalg.solve(lhs2, rhs2)
    except np.linalg.LinAlgError as exc:
        raise InvalidParameterError(
            f"singular excitation-manifold system at these parameters: {exc}") from exc

    return WeakFieldAmplitudes(
        a_1g=complex(x1[0]), a_0e=complex(x1[1]),
        a_2g=complex(x2[0]), a_1e=complex(x2[1]),
        epsilon_over_kappa=eps / p.kappa,
    )
