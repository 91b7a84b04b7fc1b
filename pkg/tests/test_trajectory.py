"""Stochastic wavefunction engine: stepping, jumps, ensembles, reproducibility."""

import numpy as np
import pytest

from cavitytraj import hilbert, measures, model, trajectory, weakfield
from cavitytraj.errors import (
    InvalidParameterError,
    TruncationError,
    ZeroNormError,
)


def params(**kw) -> model.SystemParams:
    base = dict(kappa=1.0, gamma=1.0, g=1.0, epsilon=0.3, n_max=8)
    base.update(kw)
    return model.SystemParams(**base)


class TestEvolveStep:
    def test_zero_hamiltonian_is_identity(self, rng):
        psi = rng.normal(size=6) + 1j * rng.normal(size=6)
        out = trajectory.evolve_step(psi, np.zeros((6, 6)), 0.1)
        assert np.allclose(out, psi, atol=1e-15)

    def test_pure_cavity_decay(self):
        p = params(g=0.0, epsilon=0.0, gamma=0.0, kappa=1.0, n_max=3)
        h_eff = model.effective_hamiltonian(p)
        psi = hilbert.basis_state(p.dims, 0, 1)
        dt = 1e-3
        for _ in range(1000):
            psi = trajectory.evolve_step(psi, h_eff, dt)
        # amplitude decays at kappa, population at 2 kappa
        assert float(np.vdot(psi, psi).real) == pytest.approx(np.exp(-2.0), abs=1e-6)

    def test_vacuum_rabi_oscillation(self):
        p = params(kappa=0.0, gamma=0.0, epsilon=0.0, g=1.0, n_max=3)
        h_eff = model.effective_hamiltonian(p)
        psi = hilbert.basis_state(p.dims, 1, 0)
        dt = 1e-3
        t = 0.0
        i_g1 = hilbert.basis_index(p.dims, 0, 1)
        for _ in range(1100):
            psi = trajectory.evolve_step(psi, h_eff, dt)
            t += dt
        assert abs(psi[i_g1]) ** 2 == pytest.approx(np.sin(t) ** 2, abs=1e-6)
        assert float(np.vdot(psi, psi).real) == pytest.approx(1.0, abs=1e-9)

    def test_dt_validation(self):
        with pytest.raises(InvalidParameterError):
            trajectory.evolve_step(np.ones(2), np.eye(2), 0.0)


class TestJumpSelection:
    def test_excited_atom_selects_atom_channel(self):
        p = params(epsilon=0.0)
        collapses = [c for _, c in model.collapse_operators(p)]
        psi = hilbert.basis_state(p.dims, 1, 0)
        for u in (0.0, 0.5, 0.99):
            assert trajectory.sample_jump_channel(psi, collapses, u) == 1

    def test_single_photon_selects_cavity_channel(self):
        p = params(epsilon=0.0)
        collapses = [c for _, c in model.collapse_operators(p)]
        psi = hilbert.basis_state(p.dims, 0, 1)
        for u in (0.0, 0.5, 0.99):
            assert trajectory.sample_jump_channel(psi, collapses, u) == 0

    def test_equal_rates_split_at_half(self):
        # 2 kappa = gamma makes both channels equally likely on
        # (|g,1> + |e,0>)/sqrt(2)
        p = params(kappa=0.5, gamma=1.0, epsilon=0.0)
        collapses = [c for _, c in model.collapse_operators(p)]
        psi = (hilbert.basis_state(p.dims, 0, 1)
               + hilbert.basis_state(p.dims, 1, 0)) / np.sqrt(2.0)
        assert trajectory.sample_jump_channel(psi, collapses, 0.25) == 0
        assert trajectory.sample_jump_channel(psi, collapses, 0.75) == 1

    def test_u_validation(self):
        p = params()
        collapses = [c for _, c in model.collapse_operators(p)]
        psi = hilbert.basis_state(p.dims, 1, 0)
        with pytest.raises(InvalidParameterError):
            trajectory.sample_jump_channel(psi, collapses, 1.0)
        with pytest.raises(InvalidParameterError):
            trajectory.sample_jump_channel(psi, collapses, -0.1)

    def test_dark_state_has_no_channel(self):
        p = params(epsilon=0.0)
        collapses = [c for _, c in model.collapse_operators(p)]
        psi = hilbert.basis_state(p.dims, 0, 0)
        with pytest.raises(ZeroNormError):
            trajectory.sample_jump_channel(psi, collapses, 0.5)


class TestApplyJump:
    def test_collapse_and_renormalize(self):
        p = params(epsilon=0.0)
        cav = model.collapse_operators(p)[0][1]
        psi = hilbert.basis_state(p.dims, 0, 2)
        out = trajectory.apply_jump(psi, cav)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)
        assert abs(out[hilbert.basis_index(p.dims, 0, 1)]) == pytest.approx(1.0, abs=1e-12)

    def test_annihilated_state_errors(self):
        p = params(epsilon=0.0)
        cav = model.collapse_operators(p)[0][1]
        vacuum = hilbert.basis_state(p.dims, 0, 0)
        with pytest.raises(ZeroNormError):
            trajectory.apply_jump(vacuum, cav)


class TestSingleTrajectory:
    def test_undriven_vacuum_stays_dark(self):
        p = params(epsilon=0.0)
        rec = trajectory.run_trajectory(p, 10.0, seed=1)
        assert rec.jumps == ()
        assert np.allclose(rec.photon, 0.0, atol=1e-14)
        assert np.allclose(rec.inversion, -1.0, atol=1e-14)
        assert np.allclose(rec.logneg, 0.0, atol=1e-14)

    def test_uncoupled_cavity_fills_to_drive_squared(self):
        # coherent states are jump-invariant, so a single trajectory is
        # already deterministic: <n> -> (epsilon/kappa)^2
        p = params(g=0.0, epsilon=0.5, n_max=8)
        rec = trajectory.run_trajectory(p, 15.0, seed=2)
        assert rec.photon[-1] == pytest.approx(0.25, abs=1e-3)
        assert rec.logneg[-1] == pytest.approx(0.0, abs=1e-9)

    def test_same_seed_bitwise_identical(self):
        p = params(epsilon=0.6)
        a = trajectory.run_trajectory(p, 8.0, seed=11, traj_index=3)
        b = trajectory.run_trajectory(p, 8.0, seed=11, traj_index=3)
        assert a.jumps == b.jumps
        assert np.array_equal(a.states, b.states)
        assert a.n_steps == b.n_steps

    def test_different_index_differs(self):
        p = params(epsilon=0.6)
        a = trajectory.run_trajectory(p, 8.0, seed=11, traj_index=0)
        b = trajectory.run_trajectory(p, 8.0, seed=11, traj_index=1)
        assert a.jumps != b.jumps or not np.array_equal(a.states, b.states)

    def test_snapshots_are_normalized(self):
        p = params(epsilon=0.7)
        rec = trajectory.run_trajectory(p, 10.0, seed=4)
        norms = np.linalg.norm(rec.states, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-10)

    def test_initial_state_and_record_fields(self):
        p = model.SystemParams(kappa=0.0, gamma=1.0, g=0.0, epsilon=0.0, n_max=2)
        psi0 = hilbert.basis_state(p.dims, 1, 0)
        rec = trajectory.run_trajectory(p, 20.0, sample_times=[20.0], seed=5,
                                        initial_state=psi0)
        assert rec.seed == 5
        assert len(rec.jumps) == 1
        assert rec.jumps[0].channel == "atom"
        assert 0.0 < rec.jumps[0].time < 20.0

    def test_overlap_reference_tracks_reference(self):
        p = params(epsilon=0.1, n_max=4)
        ref = weakfield.weak_field_state(p).normalized_state(p.n_max)
        rec = trajectory.run_trajectory(p, 5.0, seed=6, overlap_reference=ref)
        assert rec.overlap is not None
        # starts at |<ref|g,0>|^2 (close to 1) and stays high at weak drive
        assert rec.overlap[0] == pytest.approx(
            measures.weak_field_overlap(ref, hilbert.basis_state(p.dims, 0, 0)),
            abs=1e-12)
        assert rec.overlap.min() > 0.9

    def test_validation(self):
        p = params()
        with pytest.raises(InvalidParameterError):
            trajectory.run_trajectory(p, 0.0)
        with pytest.raises(InvalidParameterError):
            trajectory.run_trajectory(p, 5.0, sample_times=[3.0, 2.0])
        with pytest.raises(InvalidParameterError):
            trajectory.run_trajectory(p, 5.0, sample_times=[3.0, 7.0])
        with pytest.raises(InvalidParameterError):
            trajectory.run_trajectory(p, 5.0, dt=-0.01)
        with pytest.raises(InvalidParameterError):
            trajectory.run_trajectory(p, 5.0, initial_state=np.ones(3))

    def test_truncation_guard_fires(self):
        p = params(epsilon=10.0, n_max=2)
        with pytest.raises(TruncationError):
            trajectory.run_trajectory(p, 5.0, seed=1)

    def test_waiting_time_matches_exponential_rate(self):
        """First-jump times of a decaying excited atom follow Exp(gamma)."""
        p = model.SystemParams(kappa=0.0, gamma=2.0, g=0.0, epsilon=0.0, n_max=2)
        psi0 = hilbert.basis_state(p.dims, 1, 0)
        times = []
        for i in range(400):
            rec = trajectory.run_trajectory(p, 15.0, sample_times=[15.0],
                                            seed=77, traj_index=i,
                                            initial_state=psi0,
                                            collect_states=False)
            times.append(rec.jumps[0].time)
        mean = float(np.mean(times))
        # Exp(2) has mean 0.5; 400 samples give se ~ 0.025
        assert mean == pytest.approx(0.5, abs=0.08)


class TestEnsemble:
    def test_single_trajectory_rho_is_rank_one(self):
        p = params(epsilon=0.4)
        ens = trajectory.run_ensemble(p, 5.0, n_traj=1, master_seed=9)
        rec = trajectory.run_trajectory(p, 5.0, seed=9, traj_index=0)
        for k in range(ens.times.size):
            expect = np.outer(rec.states[k], rec.states[k].conj())
            assert np.linalg.norm(ens.rho[k] - expect, np.inf) < 1e-12

    def test_bitwise_reproducible_across_worker_counts(self):
        p = params(epsilon=0.4, n_max=8)
        ts = np.linspace(0.0, 3.0, 7)
        a = trajectory.run_ensemble(p, 3.0, n_traj=66, sample_times=ts,
                                    master_seed=21, n_jobs=1)
        b = trajectory.run_ensemble(p, 3.0, n_traj=66, sample_times=ts,
                                    master_seed=21, n_jobs=2)
        assert np.array_equal(a.rho, b.rho)
        assert np.array_equal(a.mean_photon, b.mean_photon)
        assert np.array_equal(a.logneg_traj.values, b.logneg_traj.values)
        assert a.jump_counts == b.jump_counts

    def test_series_kinds_and_stderr(self):
        p = params(epsilon=0.5)
        ens = trajectory.run_ensemble(p, 4.0, n_traj=32, master_seed=2)
        assert ens.logneg_rho.kind == "ensemble_rho"
        assert ens.logneg_rho.stderr is None
        assert ens.logneg_traj.kind == "per_trajectory_mean"
        assert ens.logneg_traj.stderr is not None
        assert np.all(ens.logneg_traj.stderr >= 0.0)
        # mixing can only lower the measured entanglement
        assert np.all(ens.logneg_rho.values <= ens.logneg_traj.values + 1e-9)

    def test_mean_photon_matches_rho_expectation(self):
        p = params(epsilon=0.5)
        ens = trajectory.run_ensemble(p, 4.0, n_traj=16, master_seed=8)
        f = p.dims.fock_dim
        n_op = hilbert.tensor(np.eye(2), hilbert.number_op(f))
        for k in range(ens.times.size):
            via_rho = hilbert.expectation(n_op, ens.rho[k]).real
            assert via_rho == pytest.approx(ens.mean_photon[k], abs=1e-10)

    def test_jump_log_matches_counts(self):
        p = params(epsilon=0.8, n_max=12)
        ens = trajectory.run_ensemble(p, 6.0, n_traj=24, master_seed=3)
        from collections import Counter
        by_channel = Counter(ch for _, _, ch in ens.jump_log)
        assert dict(by_channel) == {k: v for k, v in ens.jump_counts.items() if v}

    def test_validation(self):
        p = params()
        with pytest.raises(InvalidParameterError):
            trajectory.run_ensemble(p, 5.0, n_traj=0)
        with pytest.raises(InvalidParameterError):
            trajectory.run_ensemble(p, -1.0, n_traj=2)


class TestWindowReductions:
    def test_window_mean_values(self):
        times = np.linspace(0.0, 10.0, 11)
        values = times.copy()
        mean, err = trajectory.window_mean(times, values, (6.0, 10.0))
        assert mean == pytest.approx(8.0)
        assert err is None
        mean2, err2 = trajectory.window_mean(times, values, (6.0, 10.0),
                                             stderr=np.full(11, 0.5))
        assert err2 == pytest.approx(0.5)

    def test_window_mean_empty_window(self):
        with pytest.raises(InvalidParameterError):
            trajectory.window_mean(np.array([0.0, 1.0]), np.array([1.0, 2.0]),
                                   (3.0, 4.0))

    def test_steady_window_average_dark_ensemble(self):
        p = params(epsilon=0.0)
        ens = trajectory.run_ensemble(p, 6.0, n_traj=4, master_seed=1)
        dm = trajectory.steady_window_average(ens, (2.0, 6.0))
        expect = np.zeros((p.dims.total_dim,) * 2, dtype=complex)
        expect[0, 0] = 1.0
        assert np.linalg.norm(dm.matrix - expect, np.inf) < 1e-12

    def test_steady_window_average_is_valid_density_matrix(self):
        p = params(epsilon=0.6)
        ens = trajectory.run_ensemble(p, 8.0, n_traj=20, master_seed=14)
        dm = trajectory.steady_window_average(ens, (4.0, 8.0))
        assert np.trace(dm.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(dm.matrix).min() > -1e-10

    def test_default_t_max(self):
        assert trajectory.default_t_max(params()) == pytest.approx(30.0)
        assert trajectory.default_t_max(params(gamma=4.0)) == pytest.approx(15.0)
        with pytest.raises(InvalidParameterError):
            trajectory.default_t_max(
                model.SystemParams(kappa=0, gamma=0, g=1, epsilon=0, n_max=2))


class TestWeakFieldAgreement:
    def test_conditioned_state_tracks_weak_field_between_jumps(self):
        """At drive 0.1 the no-jump stretches stay within 1% of the
        perturbative wavefunction."""
        p = params(epsilon=0.1, n_max=4)
        ref = weakfield.weak_field_state(p).normalized_state(p.n_max)
        found = False
        for i in range(12):
            rec = trajectory.run_trajectory(p, 20.0, seed=31, traj_index=i,
                                            overlap_reference=ref,
                                            collect_states=False)
            if not rec.jumps:
                # settled, jump-free trajectory: overlap must stay high
                assert rec.overlap[-10:].min() > 0.99
                found = True
        assert found, "no jump-free trajectory among the probed seeds"

    @pytest.mark.xfail(
        strict=True,
        reason=(
            "the closed-form fourth-order entanglement law disagrees with "
            "the simulated conditioned state by orders of magnitude at any "
            "reachable drive (the simulation gives concurrence growing as "
            "drive^2, not drive^4 log drive); kept as a documented "
            "discrepancy, see README"))
    def test_weak_law_matches_simulated_entanglement(self):
        p = params(epsilon=0.05, n_max=4)
        xi_val = weakfield.xi(p.g, p.kappa, p.gamma)
        law = weakfield.weak_log_negativity(p.epsilon, p.kappa, xi_val)
        vals = []
        for i in range(8):
            rec = trajectory.run_trajectory(p, 25.0, seed=13, traj_index=i,
                                            collect_states=False)
            mask = rec.times >= 15.0
            vals.append(rec.logneg[mask].mean())
        sim = float(np.mean(vals))
        assert sim == pytest.approx(law, rel=0.2)
