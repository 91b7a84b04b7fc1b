"""Monte Carlo wavefunction engine with norm-threshold (waiting-time) jumps.

Between jumps the unnormalized state integrates d psi/dt = -i H_eff psi
with fixed-step RK4.  A uniform variate u fixes the next jump through the
waiting-time construction: the jump fires when the squared norm of the
unnormalized state falls to u, with the crossing located by bisection to
within dt/100.  A second, fresh uniform selects the collapse channel with
probability proportional to <C^dag C>; the collapsed state is renormalized
and a new threshold is drawn.

Reproducibility contract: trajectory i of a run seeded with master_seed
draws from numpy's PCG64 seeded by SeedSequence((master_seed, i)), so any
subset of trajectories can be recomputed independently of execution order;
ensemble reductions run in fixed index order regardless of worker count.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import hilbert, measures, model
from .errors import (
    ConvergenceError,
    InvalidParameterError,
    TruncationError,
    ZeroNormError,
)

__all__ = [
    "JumpEvent",
    "TrajectoryRecord",
    "EnsembleResult",
    "trajectory_seed",
    "evolve_step",
    "sample_jump_channel",
    "apply_jump",
    "run_trajectory",
    "run_ensemble",
    "steady_window_average",
    "window_mean",
    "default_t_max",
]

TRUNCATION_BOUND = 1e-6
NORM_INCREASE_TOL = 1e-12
CHUNK = 64  # trajectories per reduction chunk, fixed so results never depend on worker count


@dataclass(frozen=True)
class JumpEvent:
    time: float
    channel: str


@dataclass(frozen=True)
class TrajectoryRecord:
    """One conditioned trajectory sampled on a fixed time grid.

    states holds normalized snapshots (n_samples x total_dim) when
    collect_states is requested, else None.  logneg is the pure-state log
    negativity of each snapshot.
    """

    seed: int
    traj_index: int
    times: np.ndarray
    photon: np.ndarray
    inversion: np.ndarray
    logneg: np.ndarray
    jumps: tuple[JumpEvent, ...]
    states: np.ndarray | None = None
    overlap: np.ndarray | None = None
    n_steps: int = 0

    @property
    def sample_times(self) -> np.ndarray:
        return self.times


@dataclass(frozen=True)
class EnsembleResult:
    """Fixed-order reduction of a trajectory ensemble."""

    params: model.SystemParams
    t_max: float
    dt: float
    master_seed: int
    n_traj: int
    times: np.ndarray
    rho: np.ndarray                       # (n_samples, d, d) ensemble average
    mean_photon: np.ndarray
    se_photon: np.ndarray
    mean_inversion: np.ndarray
    se_inversion: np.ndarray
    logneg_rho: measures.EntanglementSeries
    logneg_traj: measures.EntanglementSeries
    jump_counts: dict[str, int]
    jump_log: tuple[tuple[int, float, str], ...]
    mean_overlap: np.ndarray | None = None
    se_overlap: np.ndarray | None = None

    @property
    def sample_times(self) -> np.ndarray:
        return self.times


def default_t_max(p: model.SystemParams) -> float:
    """15 lifetimes of the slowest decay channel: 15 max(1/kappa, 2/gamma)."""
    scales = []
    if p.kappa > 0:
        scales.append(1.0 / p.kappa)
    if p.gamma > 0:
        scales.append(2.0 / p.gamma)
    if not scales:
        raise InvalidParameterError("no decay channel; t_max has no natural scale")
    return 15.0 * max(scales)


def trajectory_seed(master_seed: int, traj_index: int) -> np.random.SeedSequence:
    """Deterministic per-trajectory seed stream."""
    return np.random.SeedSequence((int(master_seed), int(traj_index)))


def _norm2(psi: np.ndarray) -> float:
    return float(psi.real @ psi.real + psi.imag @ psi.imag)


def _rk4(mat: np.ndarray, psi: np.ndarray) -> np.ndarray:
    # mat = -i h H_eff for step size h
    k1 = mat @ psi
    k2 = mat @ (psi + 0.5 * k1)
    k3 = mat @ (psi + 0.5 * k2)
    k4 = mat @ (psi + k3)
    return psi + (k1 + 2.0 * (k2 + k3) + k4) / 6.0


def evolve_step(state: np.ndarray, h_eff: np.ndarray, dt: float) -> np.ndarray:
    """One RK4 step of the unnormalized evolution d psi/dt = -i H_eff psi."""
    if dt <= 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    psi = np.asarray(state, dtype=complex)
    out = _rk4((-1j * dt) * np.asarray(h_eff, dtype=complex), psi)
    if not np.all(np.isfinite(out.view(float))):
        raise ConvergenceError(
            f"non-finite amplitudes after an RK4 step of size {dt:g}; reduce dt")
    return out


def _select_channel(weights: np.ndarray, u: float) -> int:
    total = weights.sum()
    if total <= 0.0:
        raise ZeroNormError("jump fired but every channel has zero rate")
    edges = np.cumsum(weights) / total
    idx = int(np.searchsorted(edges, u, side="right"))
    return min(idx, weights.size - 1)


def sample_jump_channel(state: np.ndarray, collapses, u: float) -> int:
    """Index of the collapse channel selected by the uniform variate u.

    Channel m is chosen with probability <psi|C_m^dag C_m|psi> normalized
    over the supplied operators.
    """
    if not 0.0 <= u < 1.0:
        raise InvalidParameterError(f"u must lie in [0, 1), got {u}")
    psi = np.asarray(state, dtype=complex)
    weights = np.array([_norm2(np.asarray(c, dtype=complex) @ psi) for c in collapses])
    return _select_channel(weights, u)


def apply_jump(state: np.ndarray, collapse: np.ndarray) -> np.ndarray:
    """Collapse the state with one operator and renormalize."""
    psi = np.asarray(state, dtype=complex)
    collapsed = np.asarray(collapse, dtype=complex) @ psi
    cn = np.linalg.norm(collapsed)
    if cn == 0.0:
        raise ZeroNormError("collapse operator annihilated the state")
    return collapsed / cn


class _Engine:
    """Precomputed operators shared by every trajectory of a run."""

    def __init__(self, p: model.SystemParams, dt: float):
        self.p = p
        self.dims = p.dims
        self.dt = dt
        self.h_eff = model.effective_hamiltonian(p)
        ops = model.collapse_operators(p)
        self.channel_names = tuple(name for name, _ in ops)
        self.channels = tuple(c for _, c in ops)
        self.channel_rates = tuple(c.conj().T @ c for c in self.channels)
        f = self.dims.fock_dim
        n_diag = np.tile(np.arange(f, dtype=float), 2)
        self.photon_diag = n_diag
        self.inversion_diag = np.concatenate(
            [-np.ones(f), np.ones(f)])
        self._mat_cache: dict[float, np.ndarray] = {}

    def step_matrix(self, h: float) -> np.ndarray:
        mat = self._mat_cache.get(h)
        if mat is None:
            mat = (-1j * h) * self.h_eff
            self._mat_cache[h] = mat
        return mat


def _check_truncation(engine: _Engine, psi: np.ndarray, nn: float, t: float) -> None:
    f = engine.dims.fock_dim
    gslice = psi[f - 2:f]
    eslice = psi[2 * f - 2:2 * f]
    top = float(gslice.real @ gslice.real + gslice.imag @ gslice.imag
                + eslice.real @ eslice.real + eslice.imag @ eslice.imag)
    if top > TRUNCATION_BOUND * nn:
        raise TruncationError(
            f"top two Fock levels carry {top / nn:.3e} of the population at "
            f"t={t:g} (n_max={engine.dims.n_max}); raise n_max")


def _apply_jump(engine: _Engine, psi: np.ndarray, u_channel: float):
    """Select a channel proportionally to <C^dag C> and collapse."""
    weights = np.array([float(np.vdot(psi, r @ psi).real) for r in engine.channel_rates])
    idx = _select_channel(weights, u_channel)
    return apply_jump(psi, engine.channels[idx]), engine.channel_names[idx]


def _simulate(engine: _Engine, psi0: np.ndarray, sample_times: np.ndarray,
              rng: np.random.Generator):
    """Integrate one trajectory; returns (normalized samples, jumps, n_steps)."""
    d = engine.dims.total_dim
    psi = psi0.astype(complex).copy()
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ZeroNormError("initial state has zero norm")
    psi /= nrm

    samples = np.empty((sample_times.size, d), dtype=complex)
    jumps: list[JumpEvent] = []
    n_steps = 0
    u = float(rng.random())
    t = 0.0
    dark = not np.any(engine.h_eff @ psi)

    for si, ts in enumerate(sample_times):
        seg = ts - t
        if seg > 0 and not dark:
            n_sub = max(1, int(np.ceil(seg / engine.dt - 1e-9)))
            h = seg / n_sub
            mat = engine.step_matrix(h)
            nn_cur = _norm2(psi)
            for k in range(n_sub):
                t_step = t + k * h
                # advance one step, catching any jumps inside it
                offset = 0.0
                while True:
                    frac = (h - offset) / h
                    trial = _rk4(mat * frac if frac != 1.0 else mat, psi)
                    n_steps += 1
                    nn_trial = _norm2(trial)
                    if not np.isfinite(nn_trial):
                        raise ConvergenceError(
                            f"non-finite state norm at t={t_step:g}; reduce dt")
                    if nn_trial > u:
                        if nn_trial - nn_cur > NORM_INCREASE_TOL:
                            raise ConvergenceError(
                                f"squared norm grew by {nn_trial - nn_cur:.3e} in one "
                                f"step at t={t_step + h:g}; reduce dt")
                        psi = trial
                        nn_cur = nn_trial
                        _check_truncation(engine, psi, nn_trial, t_step + h)
                        break
                    # jump inside (offset, h]: bisect the crossing to dt/100
                    lo, hi = 0.0, h - offset
                    width = h / 100.0
                    while hi - lo > width:
                        mid = 0.5 * (lo + hi)
                        nm = _norm2(_rk4(mat * (mid / h), psi))
                        n_steps += 1
                        if nm > u:
                            lo = mid
                        else:
                            hi = mid
                    at_jump = _rk4(mat * (hi / h), psi)
                    n_steps += 1
                    t_jump = t_step + offset + hi
                    psi, channel = _apply_jump(engine, at_jump, float(rng.random()))
                    jumps.append(JumpEvent(time=t_jump, channel=channel))
                    u = float(rng.random())
                    nn_cur = 1.0
                    offset += hi
                    if not np.any(engine.h_eff @ psi):
                        dark = True
                        break
                    if offset >= h:
                        break
                if dark:
                    break
        t = ts
        nn = _norm2(psi)
        samples[si] = psi / np.sqrt(nn)
    return samples, tuple(jumps), n_steps


def _pure_logneg(c_g: np.ndarray, c_e: np.ndarray) -> float:
    """E_N of a normalized pure state from its 2 x F Schmidt block.

    (sum of Schmidt coefficients)^2 = 1 + 2 sqrt(det Gram), closed form for
    a rank-2 bipartition.
    """
    agg = float(c_g.real @ c_g.real + c_g.imag @ c_g.imag)
    aee = float(c_e.real @ c_e.real + c_e.imag @ c_e.imag)
    cross = complex(np.vdot(c_g, c_e))
    det = max(agg * aee - (cross.real ** 2 + cross.imag ** 2), 0.0)
    val = float(np.log2(1.0 + 2.0 * np.sqrt(det)))
    return val if val >= measures.CLAMP else 0.0


def _resolve_initial(p: model.SystemParams, initial_state) -> np.ndarray:
    if initial_state is None:
        return hilbert.basis_state(p.dims, 0, 0)
    psi = np.asarray(initial_state, dtype=complex)
    if psi.size != p.dims.total_dim:
        raise InvalidParameterError(
            f"initial state size {psi.size} does not match total_dim {p.dims.total_dim}")
    return psi


def _resolve_times(t_max: float, sample_times) -> np.ndarray:
    if sample_times is None:
        sample_times = np.linspace(0.0, t_max, 61)
    times = np.asarray(sample_times, dtype=float)
    if times.size == 0:
        raise InvalidParameterError("sample_times must be non-empty")
    if np.any(np.diff(times) <= 0):
        raise InvalidParameterError("sample_times must be strictly increasing")
    if times[0] < 0 or times[-1] > t_max + 1e-12:
        raise InvalidParameterError("sample_times must lie inside [0, t_max]")
    return times


def run_trajectory(p: model.SystemParams, t_max: float,
                   sample_times=None, seed: int = 0, traj_index: int = 0,
                   dt: float | None = None, initial_state=None,
                   collect_states: bool = True,
                   overlap_reference=None) -> TrajectoryRecord:
    """Simulate a single conditioned trajectory.

    The default initial state is |g,0>.  The RNG stream is fixed by the
    (seed, traj_index) pair, so a run is fully deterministic and any member
    of an ensemble can be recomputed in isolation.  overlap_reference, if
    given, is a pure state against which the squared overlap of every
    snapshot is recorded (used for weak-field comparisons).
    """
    if t_max <= 0:
        raise InvalidParameterError(f"t_max must be positive, got {t_max}")
    if dt is None:
        dt = model.default_time_step(p)
    if dt <= 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    times = _resolve_times(t_max, sample_times)
    engine = _Engine(p, dt)
    psi0 = _resolve_initial(p, initial_state)
    rng = np.random.Generator(np.random.PCG64(trajectory_seed(seed, traj_index)))
    samples, jumps, n_steps = _simulate(engine, psi0, times, rng)

    f = engine.dims.fock_dim
    prob = np.abs(samples) ** 2
    photon = prob @ engine.photon_diag
    inversion = prob @ engine.inversion_diag
    logneg = np.array([_pure_logneg(s[:f], s[f:]) for s in samples])
    overlap = None
    if overlap_reference is not None:
        ref = np.asarray(overlap_reference, dtype=complex)
        ref = ref / np.linalg.norm(ref)
        overlap = np.abs(samples @ ref.conj()) ** 2
    return TrajectoryRecord(
        seed=seed, traj_index=traj_index, times=times, photon=photon,
        inversion=inversion, logneg=logneg, jumps=jumps,
        states=samples if collect_states else None,
        overlap=overlap, n_steps=n_steps)


def _chunk_stats(p: model.SystemParams, times: np.ndarray,
                 dt: float, master_seed: int, lo: int, hi: int,
                 overlap_ref: np.ndarray | None) -> dict:
    engine = _Engine(p, dt)
    d = engine.dims.total_dim
    f = engine.dims.fock_dim
    s_count = times.size
    acc = {
        "rho_sum": np.zeros((s_count, d, d), dtype=complex),
        "photon": np.zeros(s_count), "photon_sq": np.zeros(s_count),
        "inversion": np.zeros(s_count), "inversion_sq": np.zeros(s_count),
        "logneg": np.zeros(s_count), "logneg_sq": np.zeros(s_count),
        "overlap": np.zeros(s_count), "overlap_sq": np.zeros(s_count),
        "jump_counts": {name: 0 for name in engine.channel_names},
        "jump_log": [],
    }
    psi0 = _resolve_initial(p, None)
    for i in range(lo, hi):
        rng = np.random.Generator(np.random.PCG64(trajectory_seed(master_seed, i)))
        samples, jumps, _ = _simulate(engine, psi0, times, rng)
        acc["rho_sum"] += np.einsum("si,sj->sij", samples, samples.conj())
        prob = np.abs(samples) ** 2
        ph = prob @ engine.photon_diag
        iv = prob @ engine.inversion_diag
        ln = np.array([_pure_logneg(s[:f], s[f:]) for s in samples])
        acc["photon"] += ph
        acc["photon_sq"] += ph ** 2
        acc["inversion"] += iv
        acc["inversion_sq"] += iv ** 2
        acc["logneg"] += ln
        acc["logneg_sq"] += ln ** 2
        if overlap_ref is not None:
            ov = np.abs(samples @ overlap_ref.conj()) ** 2
            acc["overlap"] += ov
            acc["overlap_sq"] += ov ** 2
        for j in jumps:
            acc["jump_counts"][j.channel] += 1
            acc["jump_log"].append((i, j.time, j.channel))
    return acc


def _resolve_jobs(n_jobs: int | None) -> int:
    if n_jobs is not None:
        return max(1, int(n_jobs))
    env = os.environ.get("CAVITY_TRAJ_THREADS")
    if env is not None:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_ensemble(p: model.SystemParams, t_max: float, n_traj: int,
                 sample_times=None, master_seed: int = 0,
                 dt: float | None = None, overlap_reference=None,
                 n_jobs: int | None = None) -> EnsembleResult:
    """Simulate n_traj trajectories and reduce them in fixed index order.

    The reduction is chunked in fixed blocks of 64 trajectories; worker
    count (n_jobs, or CAVITY_TRAJ_THREADS, or the hardware default) has no
    influence on chunk boundaries, so outputs are bit-identical however the
    work is spread.
    """
    if n_traj < 1:
        raise InvalidParameterError(f"n_traj must be >= 1, got {n_traj}")
    if t_max <= 0:
        raise InvalidParameterError(f"t_max must be positive, got {t_max}")
    if dt is None:
        dt = model.default_time_step(p)
    times = _resolve_times(t_max, sample_times)
    ref = None
    if overlap_reference is not None:
        ref = np.asarray(overlap_reference, dtype=complex)
        ref = ref / np.linalg.norm(ref)

    bounds = [(lo, min(lo + CHUNK, n_traj)) for lo in range(0, n_traj, CHUNK)]
    jobs = min(_resolve_jobs(n_jobs), len(bounds))
    if jobs > 1:
        from joblib import Parallel, delayed
        chunks = Parallel(n_jobs=jobs)(
            delayed(_chunk_stats)(p, times, dt, master_seed, lo, hi, ref)
            for lo, hi in bounds)
    else:
        chunks = [_chunk_stats(p, times, dt, master_seed, lo, hi, ref)
                  for lo, hi in bounds]

    s_count = times.size
    d = p.dims.total_dim
    rho_sum = np.zeros((s_count, d, d), dtype=complex)
    sums = {k: np.zeros(s_count) for k in
            ("photon", "photon_sq", "inversion", "inversion_sq",
             "logneg", "logneg_sq", "overlap", "overlap_sq")}
    jump_counts: dict[str, int] = {}
    jump_log: list[tuple[int, float, str]] = []
    for c in chunks:  # chunk order == index order
        rho_sum += c["rho_sum"]
        for k in sums:
            sums[k] += c[k]
        for name, cnt in c["jump_counts"].items():
            jump_counts[name] = jump_counts.get(name, 0) + cnt
        jump_log.extend(c["jump_log"])

    m = float(n_traj)

    def mean_se(key):
        mean = sums[key] / m
        if n_traj > 1:
            var = np.maximum(sums[key + "_sq"] - sums[key] ** 2 / m, 0.0) / (m - 1.0)
            se = np.sqrt(var / m)
        else:
            se = np.zeros(s_count)
        return mean, se

    mean_photon, se_photon = mean_se("photon")
    mean_inversion, se_inversion = mean_se("inversion")
    mean_logneg, se_logneg = mean_se("logneg")

    rho = rho_sum / m
    rho = 0.5 * (rho + np.conj(np.transpose(rho, (0, 2, 1))))
    dims = p.dims
    for k in range(s_count):  # enforce the ensemble invariants
        measures.DensityMatrix.from_array(rho[k], dims, psd_tol=1e-10)
    logneg_rho_vals = np.array([measures.log_negativity(rho[k], dims)
                                for k in range(s_count)])

    mean_overlap = se_overlap = None
    if ref is not None:
        mean_overlap, se_overlap = mean_se("overlap")

    return EnsembleResult(
        params=p, t_max=t_max, dt=dt, master_seed=master_seed, n_traj=n_traj,
        times=times, rho=rho,
        mean_photon=mean_photon, se_photon=se_photon,
        mean_inversion=mean_inversion, se_inversion=se_inversion,
        logneg_rho=measures.EntanglementSeries(
            times=times, values=logneg_rho_vals, kind="ensemble_rho"),
        logneg_traj=measures.EntanglementSeries(
            times=times, values=mean_logneg, kind="per_trajectory_mean",
            stderr=se_logneg),
        jump_counts=jump_counts, jump_log=tuple(jump_log),
        mean_overlap=mean_overlap, se_overlap=se_overlap)


def _window_mask(times: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    t_a, t_b = float(window[0]), float(window[1])
    mask = (times >= t_a) & (times <= t_b)
    if not mask.any():
        raise InvalidParameterError(
            f"steady window [{t_a:g}, {t_b:g}] contains no samples")
    return mask


def steady_window_average(result: EnsembleResult,
                          window: tuple[float, float]) -> measures.DensityMatrix:
    """Time-averaged ensemble density matrix over the window [t_a, t_b].

    The average is re-Hermitized and trace-normalized; the caller is
    responsible for choosing a window late enough that the dynamics are
    stationary across it.
    """
    mask = _window_mask(np.asarray(result.times, dtype=float), window)
    rho = result.rho[mask].mean(axis=0)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return measures.DensityMatrix.from_array(rho, result.params.dims)


def window_mean(times: np.ndarray, values: np.ndarray,
                window: tuple[float, float],
                stderr: np.ndarray | None = None):
    """Mean of a scalar series over the window [t_a, t_b].

    Samples inside the window are correlated, so the propagated error keeps
    the per-sample scale (mean of the stderr values) instead of pretending
    they are independent.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = _window_mask(times, window)
    mean = float(values[mask].mean())
    if stderr is None:
        return mean, None
    return mean, float(np.asarray(stderr)[mask].mean())
