"""Parameters, Hamiltonians, collapse channels and linearized rates."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavitytraj import hilbert, model
from cavitytraj.errors import InvalidParameterError


def unity() -> model.SystemParams:
    return model.SystemParams(kappa=1.0, gamma=1.0, g=1.0, epsilon=0.5, n_max=6)


class TestSystemParams:
    @pytest.mark.parametrize("kwargs", [
        dict(kappa=-1, gamma=1, g=1, epsilon=0),
        dict(kappa=1, gamma=-1, g=1, epsilon=0),
        dict(kappa=1, gamma=1, g=-1, epsilon=0),
        dict(kappa=1, gamma=1, g=1, epsilon=-0.1),
        dict(kappa=0, gamma=1, g=1, epsilon=0.5),           # driven lossless cavity
        dict(kappa=1, gamma=1, g=1, epsilon=0.5, drive_scaling="nonsense"),
        dict(kappa=1, gamma=1, g=0, epsilon=0.5, drive_scaling="saturation"),
        dict(kappa=1, gamma=1, g=1, epsilon=0.5, n_max=0),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises((InvalidParameterError, Exception)):
            model.SystemParams(**kwargs)

    def test_undriven_lossless_allowed(self):
        p = model.SystemParams(kappa=0, gamma=0, g=1, epsilon=0, n_max=2)
        assert p.dims.total_dim == 6

    def test_frozen(self):
        p = unity()
        with pytest.raises(Exception):
            p.kappa = 2.0


class TestDetunings:
    def test_physical_coefficients(self):
        p = model.SystemParams(kappa=1.0, gamma=1.0, g=1.0, epsilon=0.0,
                               delta=2.0, theta=0.5, n_max=4)
        delta_a, delta_c = model.detuning_terms(p)
        assert delta_a == pytest.approx(1.0)       # delta * gamma / 2
        assert delta_c == pytest.approx(0.5)       # theta * kappa

    def test_complex_rates(self):
        p = model.SystemParams(kappa=2.0, gamma=0.5, g=1.0, epsilon=0.0,
                               delta=-1.0, theta=3.0, n_max=4)
        r = model.complex_rates(p)
        assert r.kappa_tilde == pytest.approx(2.0 + 6.0j)
        assert r.gamma_tilde == pytest.approx(0.5 - 0.5j)

    def test_one_excitation_decay_matches_complex_rates(self):
        """The 1-excitation block of -iH_eff has eigen-decays kappa~ and gamma~/2
        when g = 0."""
        p = model.SystemParams(kappa=1.2, gamma=0.8, g=0.0, epsilon=0.0,
                               delta=0.7, theta=-0.4, n_max=3)
        h = model.effective_hamiltonian(p)
        dims = p.dims
        i_g0 = hilbert.basis_index(dims, 0, 0)
        i_g1 = hilbert.basis_index(dims, 0, 1)
        i_e0 = hilbert.basis_index(dims, 1, 0)
        r = model.complex_rates(p)
        # decay of each excited amplitude relative to the ground level:
        # d(c_k/c_g0)/dt = -i (h_kk - h_g0g0) (c_k/c_g0)
        om_g1 = complex(-1j * (h[i_g1, i_g1] - h[i_g0, i_g0]))
        om_e0 = complex(-1j * (h[i_e0, i_e0] - h[i_g0, i_g0]))
        assert om_g1 == pytest.approx(-r.kappa_tilde)
        assert om_e0 == pytest.approx(-0.5 * r.gamma_tilde)


class TestDriveScaling:
    def test_raw_passthrough(self):
        p = model.SystemParams(kappa=2.0, gamma=1.0, g=1.0, epsilon=0.37, n_max=4)
        assert model.saturation_scaled_drive(p) == 0.37

    def test_saturation_photon_number(self):
        p = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=0, n_max=4)
        assert model.saturation_photon_number(p) == pytest.approx(0.125)
        p2 = model.SystemParams(kappa=1, gamma=2, g=4, epsilon=0, n_max=4)
        assert model.saturation_photon_number(p2) == pytest.approx(4.0 / 128.0)

    def test_saturation_unit_at_unity_parameters(self):
        p = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=1.0, n_max=4,
                               drive_scaling="saturation")
        # kappa (1 + 2 C1) sqrt(n_sat) = 3 / (2 sqrt 2)
        assert model.saturation_scaled_drive(p) == pytest.approx(3.0 / (2.0 * np.sqrt(2.0)))

    def test_saturation_linear_in_epsilon(self):
        p1 = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=0.5, n_max=4,
                                drive_scaling="saturation")
        p2 = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=1.0, n_max=4,
                                drive_scaling="saturation")
        assert model.saturation_scaled_drive(p2) == pytest.approx(
            2.0 * model.saturation_scaled_drive(p1))

    def test_saturation_needs_gamma(self):
        p = model.SystemParams(kappa=1, gamma=0, g=1, epsilon=0.5, n_max=4,
                               drive_scaling="saturation")
        with pytest.raises(InvalidParameterError):
            model.saturation_scaled_drive(p)


class TestHamiltonians:
    def test_hermitian_part_is_hermitian(self):
        h = model.hermitian_hamiltonian(unity())
        assert np.allclose(h, h.conj().T, atol=1e-14)

    def test_effective_minus_hermitian_is_collapse_sum(self):
        p = model.SystemParams(kappa=0.8, gamma=1.3, g=1.1, epsilon=0.4,
                               delta=0.3, theta=-0.6, n_max=5)
        h_eff = model.effective_hamiltonian(p)
        h = model.hermitian_hamiltonian(p)
        csum = sum(c.conj().T @ c for _, c in model.collapse_operators(p))
        assert np.allclose(h_eff - h, -0.5j * csum, atol=1e-14)

    def test_anti_hermitian_part_negative_semidefinite(self):
        p = unity()
        h_eff = model.effective_hamiltonian(p)
        anti = (h_eff - h_eff.conj().T) / 2j   # Hermitian; must be <= 0
        assert np.linalg.eigvalsh(anti).max() <= 1e-14

    def test_undriven_conserves_excitation_number(self):
        p = model.SystemParams(kappa=0.7, gamma=1.1, g=0.9, epsilon=0.0,
                               delta=0.4, theta=0.2, n_max=5)
        h = model.hermitian_hamiltonian(p)
        f = p.dims.fock_dim
        n_exc = (hilbert.tensor(np.eye(2), hilbert.number_op(f))
                 + hilbert.tensor(hilbert.sigma_plus() @ hilbert.sigma_minus(), np.eye(f)))
        assert np.linalg.norm(h @ n_exc - n_exc @ h, np.inf) < 1e-13

    def test_drive_breaks_excitation_number(self):
        p = unity()
        h = model.hermitian_hamiltonian(p)
        f = p.dims.fock_dim
        n_exc = (hilbert.tensor(np.eye(2), hilbert.number_op(f))
                 + hilbert.tensor(hilbert.sigma_plus() @ hilbert.sigma_minus(), np.eye(f)))
        assert np.linalg.norm(h @ n_exc - n_exc @ h, np.inf) > 0.1


class TestCollapseOperators:
    def test_rates_and_order(self):
        p = unity()
        ops = model.collapse_operators(p)
        assert [name for name, _ in ops] == ["cavity", "atom"]
        dims = p.dims
        g1 = hilbert.basis_state(dims, 0, 1)
        e0 = hilbert.basis_state(dims, 1, 0)
        cav, atom = ops[0][1], ops[1][1]
        assert np.linalg.norm(cav @ g1) ** 2 == pytest.approx(2.0 * p.kappa)
        assert np.linalg.norm(atom @ e0) ** 2 == pytest.approx(p.gamma)

    def test_zero_rates_dropped(self):
        p = model.SystemParams(kappa=0.0, gamma=1.0, g=1.0, epsilon=0.0, n_max=3)
        assert [name for name, _ in model.collapse_operators(p)] == ["atom"]
        p2 = model.SystemParams(kappa=1.0, gamma=0.0, g=1.0, epsilon=0.2, n_max=3)
        assert [name for name, _ in model.collapse_operators(p2)] == ["cavity"]


class TestTimeStep:
    def test_fastest_rate_rules(self):
        p = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=0, n_max=4)
        assert model.default_time_step(p) == pytest.approx(0.01)
        p2 = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=5.0, n_max=4)
        assert model.default_time_step(p2) == pytest.approx(0.002)
        p3 = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=0, delta=400, n_max=4)
        assert model.default_time_step(p3) == pytest.approx(0.01 / 200.0)

    def test_free_evolution_fallback(self):
        p = model.SystemParams(kappa=0, gamma=0, g=0, epsilon=0, n_max=2)
        assert model.default_time_step(p) == pytest.approx(0.01)


class TestVacuumRabi:
    def test_resonant_underdamped(self):
        p = model.SystemParams(kappa=1, gamma=1, g=1, epsilon=0, n_max=2)
        om = model.vacuum_rabi(p)
        assert om.real == pytest.approx(0.0, abs=1e-12)
        assert om.imag == pytest.approx(np.sqrt(1.0 - 0.0625), abs=1e-10)

    def test_uncoupled_overdamped(self):
        p = model.SystemParams(kappa=1, gamma=1, g=0, epsilon=0, n_max=2)
        om = model.vacuum_rabi(p)
        assert om.imag == pytest.approx(0.0, abs=1e-12)
        assert om.real == pytest.approx(0.25, abs=1e-12)

    def test_detuning_sign_asymmetry(self):
        """theta = -delta and theta = +delta are physically inequivalent."""
        kwargs = dict(kappa=1.0, gamma=1.0, g=1.0, epsilon=0.0, delta=1.0, n_max=2)
        om_m = model.vacuum_rabi(model.SystemParams(theta=-1.0, **kwargs))
        om_p = model.vacuum_rabi(model.SystemParams(theta=+1.0, **kwargs))
        assert abs(abs(om_m) - abs(om_p)) > 0.05


@given(
    kappa=st.floats(0.1, 3.0),
    gamma=st.floats(0.1, 3.0),
    g=st.floats(0.0, 3.0),
    eps=st.floats(0.0, 2.0),
    delta=st.floats(-2.0, 2.0),
    theta=st.floats(-2.0, 2.0),
)
def test_effective_hamiltonian_invariants(kappa, gamma, g, eps, delta, theta):
    p = model.SystemParams(kappa=kappa, gamma=gamma, g=g, epsilon=eps,
                           delta=delta, theta=theta, n_max=3)
    h_eff = model.effective_hamiltonian(p)
    h = model.hermitian_hamiltonian(p)
    csum = sum((c.conj().T @ c for _, c in model.collapse_operators(p)),
               start=np.zeros_like(h))
    assert np.allclose(h_eff - h, -0.5j * csum, atol=1e-13)
    anti = (h_eff - h_eff.conj().T) / 2j
    assert np.linalg.eigvalsh(anti).max() <= 1e-12
