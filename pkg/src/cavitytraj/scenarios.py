"""Named parameter sweeps and their reduction to flat result tables.

A scenario is a declarative description of a sweep: base system parameters,
the parameters swept over (with their value lists, in declaration order),
ensemble settings, and the named outputs to emit.  Running one produces a
CSV of result rows plus a JSON sidecar echoing the full effective
configuration, so any output file can be reproduced byte-for-byte from its
sidecar alone.

Two execution engines are available per scenario:

* "trajectory": Monte Carlo wavefunction ensembles (any n_max); emits both
  entanglement kinds (measure of the ensemble-averaged state, and the
  trajectory-averaged pure-state measure).
* "oracle": direct master-equation solution (steady state and/or time
  evolution); deterministic, restricted to n_max <= 30 by the dense
  superoperator guard.

Grid points execute sequentially in grid order so that output row order is
deterministic; trajectory-level parallelism inside each point is governed by
CAVITY_TRAJ_THREADS.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import hilbert, measures, model, steadystate, trajectory, weakfield
from .errors import ConfigError

__all__ = [
    "DEFAULT_N_TRAJ",
    "DEFAULT_SAMPLE_COUNT",
    "KNOWN_OUTPUTS",
    "ScenarioConfig",
    "ResultRow",
    "Diagnostic",
    "builtin_scenarios",
    "get_scenario",
    "run_scenario",
    "validate",
    "check_csv",
    "column_hints",
    "config_from_dict",
    "config_to_dict",
]

DEFAULT_N_TRAJ = 2000
DEFAULT_SAMPLE_COUNT = 61
DEFAULT_MASTER_SEED = 1

_PARAM_FIELDS = ("kappa", "gamma", "g", "epsilon", "delta", "theta",
                 "n_max", "drive_scaling")

# output name -> (time_resolved, has_stderr, engines that can produce it)
KNOWN_OUTPUTS: dict[str, tuple[bool, bool, tuple[str, ...]]] = {
    "photon": (True, True, ("trajectory", "oracle")),
    "inversion": (True, True, ("trajectory", "oracle")),
    "logneg_rho": (True, False, ("trajectory", "oracle")),
    "logneg_traj": (True, True, ("trajectory",)),
    "impurity": (True, False, ("trajectory", "oracle")),
    "weak_overlap": (True, True, ("trajectory",)),
    "photon_steady": (False, True, ("trajectory", "oracle")),
    "inversion_steady": (False, True, ("trajectory", "oracle")),
    "logneg_rho_steady": (False, False, ("trajectory", "oracle")),
    "logneg_rho_max": (False, False, ("trajectory", "oracle")),
    "logneg_traj_steady": (False, True, ("trajectory",)),
    "logneg_traj_max": (False, False, ("trajectory",)),
    "impurity_steady": (False, False, ("trajectory", "oracle")),
    "weak_overlap_steady": (False, True, ("trajectory",)),
    "g2tf_steady": (False, False, ("trajectory", "oracle")),
}

_ENGINES = ("trajectory", "oracle")

_TRAJ_SERIES = {"photon", "inversion", "logneg_rho", "logneg_traj",
                "impurity", "weak_overlap"}
_NEEDS_EVOLVE = {"photon", "inversion", "logneg_rho", "impurity",
                 "logneg_rho_max"}


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one sweep.

    params maps system-parameter names to either a scalar or a list; every
    list-valued entry is swept, in declaration order, and the full grid is
    their cross product.  t_max, dt, sample_times and steady_window fall
    back to documented defaults when omitted: t_max = 15 max(1/kappa,
    2/gamma), dt by the integrator step rule, sample_times a uniform grid of
    sample_count points, steady window the last third of [0, t_max].
    """

    name: str
    params: dict
    n_traj: int = DEFAULT_N_TRAJ
    t_max: float | None = None
    dt: float | None = None
    master_seed: int = DEFAULT_MASTER_SEED
    sample_count: int = DEFAULT_SAMPLE_COUNT
    sample_times: tuple[float, ...] | None = None
    steady_window: tuple[float, float] | None = None
    outputs: tuple[str, ...] = ("photon", "inversion", "logneg_rho", "logneg_traj")
    engine: str = "trajectory"
    description: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigError("scenario name must be non-empty")
        unknown = [k for k in self.params if k not in _PARAM_FIELDS]
        if unknown:
            raise ConfigError(
                f"unknown system parameters {unknown}; allowed: {list(_PARAM_FIELDS)}")
        for key, val in self.params.items():
            if isinstance(val, (list, tuple)) and len(val) == 0:
                raise ConfigError(f"swept parameter {key!r} has an empty value list")
        if self.engine not in _ENGINES:
            raise ConfigError(f"engine must be one of {_ENGINES}, got {self.engine!r}")
        if not self.outputs:
            raise ConfigError("a scenario must request at least one output")
        for out in self.outputs:
            if out not in KNOWN_OUTPUTS:
                raise ConfigError(
                    f"unknown output {out!r}; known outputs: {sorted(KNOWN_OUTPUTS)}")
            if self.engine not in KNOWN_OUTPUTS[out][2]:
                raise ConfigError(
                    f"output {out!r} is not available from the {self.engine!r} engine")
        if self.n_traj < 1:
            raise ConfigError(f"n_traj must be >= 1, got {self.n_traj}")
        if self.sample_count < 2:
            raise ConfigError(f"sample_count must be >= 2, got {self.sample_count}")

    @property
    def sweep_names(self) -> tuple[str, ...]:
        """Swept parameter names, in declaration order."""
        return tuple(k for k, v in self.params.items() if isinstance(v, (list, tuple)))

    def grid(self):
        """Yield (sweep_values, full_param_dict) in deterministic grid order."""
        names = self.sweep_names
        lists = [tuple(self.params[k]) for k in names]
        for combo in itertools.product(*lists) if names else [()]:
            point = dict(self.params)
            for k, v in zip(names, combo):
                point[k] = v
            yield combo, point

    def system_params(self, point: dict) -> model.SystemParams:
        return model.SystemParams(**point)

    def resolve_t_max(self, p: model.SystemParams) -> float:
        return float(self.t_max) if self.t_max is not None else trajectory.default_t_max(p)

    def resolve_window(self, t_max: float) -> tuple[float, float]:
        if self.steady_window is not None:
            return (float(self.steady_window[0]), float(self.steady_window[1]))
        return (2.0 * t_max / 3.0, t_max)

    def resolve_sample_times(self, t_max: float) -> np.ndarray:
        if self.sample_times is not None:
            return np.asarray(self.sample_times, dtype=float)
        return np.linspace(0.0, t_max, self.sample_count)


@dataclass(frozen=True)
class ResultRow:
    """One output value with the provenance needed to reproduce it."""

    scenario: str
    sweep: tuple[float, ...]
    time: float | None
    observable: str
    value: float
    stderr: float | None
    seed: int
    dt: float
    n_max: int
    n_traj: int
    drive_scaling: str


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; level is 'ok', 'warning' or 'error'."""

    level: str
    where: str
    message: str


def config_to_dict(config: ScenarioConfig) -> dict:
    """JSON-ready echo of a config (tuples become lists)."""
    return {
        "name": config.name,
        "params": {k: (list(v) if isinstance(v, (list, tuple)) else v)
                   for k, v in config.params.items()},
        "n_traj": config.n_traj,
        "t_max": config.t_max,
        "dt": config.dt,
        "master_seed": config.master_seed,
        "sample_count": config.sample_count,
        "sample_times": list(config.sample_times) if config.sample_times is not None else None,
        "steady_window": list(config.steady_window) if config.steady_window is not None else None,
        "outputs": list(config.outputs),
        "engine": config.engine,
        "description": config.description,
    }


def config_from_dict(data: dict) -> ScenarioConfig:
    """Inverse of config_to_dict; also accepts a result-file sidecar."""
    if "config" in data and "schema_version" in data:
        data = data["config"]
    try:
        return ScenarioConfig(
            name=data["name"],
            params=dict(data["params"]),
            n_traj=int(data.get("n_traj", DEFAULT_N_TRAJ)),
            t_max=data.get("t_max"),
            dt=data.get("dt"),
            master_seed=int(data.get("master_seed", DEFAULT_MASTER_SEED)),
            sample_count=int(data.get("sample_count", DEFAULT_SAMPLE_COUNT)),
            sample_times=tuple(data["sample_times"]) if data.get("sample_times") else None,
            steady_window=tuple(data["steady_window"]) if data.get("steady_window") else None,
            outputs=tuple(data.get("outputs",
                                   ("photon", "inversion", "logneg_rho", "logneg_traj"))),
            engine=data.get("engine", "trajectory"),
            description=data.get("description", ""),
        )
    except KeyError as exc:
        raise ConfigError(f"config is missing required key {exc}") from exc


# ---------------------------------------------------------------------------
# built-in scenarios


def builtin_scenarios() -> list[ScenarioConfig]:
    """The named sweeps shipped with the package.

    The figN names are fixed identifiers of the standard scan set for this
    system; each description says what the sweep measures.  Quantities the
    scan set does not pin down (trajectory counts, integrator steps, seeds,
    sweep grids) use the documented defaults recorded in each config.
    """
    scaled = {"kappa": 1.0, "gamma": 1.0, "g": 1.0, "drive_scaling": "saturation"}
    return [
        ScenarioConfig(
            name="fig2",
            description=(
                "Purity of the ensemble state and its overlap with the "
                "perturbative weak-field wavefunction, against raw drive "
                "strength at kappa = gamma = g = 1."),
            params={"kappa": 1.0, "gamma": 1.0, "g": 1.0, "n_max": 12,
                    "epsilon": [0.1, 0.2, 0.3, 0.4, 0.55, 0.7, 0.85, 1.0]},
            t_max=20.0,
            outputs=("impurity_steady", "weak_overlap_steady"),
        ),
        ScenarioConfig(
            name="fig3",
            description=(
                "Steady intracavity photon number and atomic inversion "
                "versus drive in saturation units, kappa = gamma = g = 1; "
                "master-equation engine."),
            params={**scaled, "n_max": 30,
                    "epsilon": [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5,
                                1.75, 2.0, 2.5, 3.0]},
            engine="oracle",
            outputs=("photon_steady", "inversion_steady"),
        ),
        ScenarioConfig(
            name="fig4a",
            description=(
                "Entanglement build-up: log negativity of the evolving "
                "state versus time at several drive strengths."),
            params={**scaled, "n_max": 25,
                    "epsilon": [0.25, 0.5, 1.0, 2.0]},
            engine="oracle",
            t_max=15.0,
            outputs=("logneg_rho",),
        ),
        ScenarioConfig(
            name="fig4b",
            description=(
                "Log negativity versus drive strength at fixed times "
                "gamma t = 1, 2 and 5."),
            params={**scaled, "n_max": 25,
                    "epsilon": [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5]},
            engine="oracle",
            t_max=5.0,
            sample_times=(1.0, 2.0, 5.0),
            outputs=("logneg_rho",),
        ),
        ScenarioConfig(
            name="fig5",
            description=(
                "Maximum-over-time and steady-state log negativity versus "
                "drive strength in saturation units."),
            params={**scaled, "n_max": 25,
                    "epsilon": [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5,
                                1.75, 2.0, 2.5]},
            engine="oracle",
            t_max=25.0,
            outputs=("logneg_rho_max", "logneg_rho_steady"),
        ),
        ScenarioConfig(
            name="fig6a",
            description=(
                "Saturation of entanglement at zero drive-cavity detuning; "
                "100-photon truncation, trajectory engine only."),
            params={**scaled, "n_max": 100, "theta": 0.0,
                    "epsilon": [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0]},
            t_max=24.0,
            outputs=("logneg_traj_steady", "logneg_rho_steady", "photon_steady"),
        ),
        ScenarioConfig(
            name="fig6b",
            description=(
                "As fig6a but with drive-cavity detuning theta = 0.5: the "
                "entanglement persists to slightly higher drive."),
            params={**scaled, "n_max": 100, "theta": 0.5,
                    "epsilon": [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0]},
            t_max=24.0,
            outputs=("logneg_traj_steady", "logneg_rho_steady", "photon_steady"),
        ),
        ScenarioConfig(
            name="fig7a",
            description=(
                "Opposite-sign detunings theta = -Delta (Delta = 1): "
                "vacuum-Rabi sideband driving sustains entanglement to "
                "higher drive."),
            params={**scaled, "n_max": 40, "delta": 1.0, "theta": -1.0,
                    "epsilon": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5]},
            t_max=16.0,
            outputs=("logneg_traj_steady", "logneg_rho_steady", "photon_steady"),
        ),
        ScenarioConfig(
            name="fig7b",
            description=(
                "Equal-sign detunings theta = +Delta (Delta = 1): behavior "
                "close to resonant driving."),
            params={**scaled, "n_max": 40, "delta": 1.0, "theta": 1.0,
                    "epsilon": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5]},
            t_max=16.0,
            outputs=("logneg_traj_steady", "logneg_rho_steady", "photon_steady"),
        ),
        ScenarioConfig(
            name="fig8",
            description=(
                "Strong coupling, far-detuned multiphoton regime: photon "
                "number and log negativity versus raw drive at kappa = 1, "
                "gamma = 2, g = 1000, theta = Delta = 447.2 (= g/sqrt(5), "
                "placing a low-order multiphoton resonance ladder inside "
                "the scanned drive range); 14-photon truncation, "
                "master-equation engine."),
            params={"kappa": 1.0, "gamma": 2.0, "g": 1000.0, "n_max": 14,
                    "delta": 447.2, "theta": 447.2,
                    "epsilon": [float(f"{v:.6g}") for v in
                                np.geomspace(80.0, 2500.0, 40)]},
            engine="oracle",
            outputs=("photon_steady", "inversion_steady", "logneg_rho_steady"),
        ),
        ScenarioConfig(
            name="fig9",
            description=(
                "Entanglement revival across the 2 epsilon / g = 1 "
                "demarcation: grid over raw drive and coupling at kappa = 1, "
                "gamma = 0.1."),
            params={"kappa": 1.0, "gamma": 0.1, "n_max": 80,
                    "g": [5.0, 10.0],
                    "epsilon": [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]},
            n_traj=256,
            t_max=50.0,
            steady_window=(20.0, 50.0),
            outputs=("logneg_traj_steady", "logneg_rho_steady", "photon_steady"),
        ),
    ]


def get_scenario(name: str) -> ScenarioConfig:
    for cfg in builtin_scenarios():
        if cfg.name == name:
            return cfg
    known = ", ".join(c.name for c in builtin_scenarios())
    raise ConfigError(f"unknown scenario {name!r}; built-ins: {known}")


# ---------------------------------------------------------------------------
# execution


def _series_for_trajectory(result: trajectory.EnsembleResult, window,
                           needs_overlap: bool):
    """Map series output names to (values, stderr) arrays."""
    dims = result.params.dims
    series = {
        "photon": (result.mean_photon, result.se_photon),
        "inversion": (result.mean_inversion, result.se_inversion),
        "logneg_rho": (result.logneg_rho.values, None),
        "logneg_traj": (result.logneg_traj.values, result.logneg_traj.stderr),
    }
    impur = np.array([measures.impurity(result.rho[k])
                      for k in range(result.times.size)])
    series["impurity"] = (impur, None)
    if needs_overlap:
        series["weak_overlap"] = (result.mean_overlap, result.se_overlap)
    return series


def _trajectory_point_rows(config: ScenarioConfig, combo, p: model.SystemParams,
                           dt_res: float, t_max: float,
                           sample_times: np.ndarray, window) -> list[ResultRow]:
    needs_overlap = any(o.startswith("weak_overlap") for o in config.outputs)
    overlap_ref = None
    if needs_overlap:
        overlap_ref = weakfield.weak_field_state(p).normalized_state(p.n_max)
    result = trajectory.run_ensemble(
        p, t_max, config.n_traj, sample_times=sample_times,
        master_seed=config.master_seed, dt=dt_res,
        overlap_reference=overlap_ref)
    series = _series_for_trajectory(result, window, needs_overlap)

    rho_window = None
    if any(o in ("logneg_rho_steady", "impurity_steady", "g2tf_steady")
           for o in config.outputs):
        rho_window = trajectory.steady_window_average(result, window)

    def meta_row(time, observable, value, stderr):
        return ResultRow(
            scenario=config.name, sweep=combo, time=time, observable=observable,
            value=float(value), stderr=None if stderr is None else float(stderr),
            seed=config.master_seed, dt=dt_res, n_max=p.n_max,
            n_traj=config.n_traj, drive_scaling=p.drive_scaling)

    rows: list[ResultRow] = []
    for out in config.outputs:
        if out in series:
            vals, errs = series[out]
            for k, t in enumerate(result.times):
                rows.append(meta_row(float(t), out, vals[k],
                                     None if errs is None else errs[k]))
        elif out in ("photon_steady", "inversion_steady", "weak_overlap_steady"):
            base = out[:-len("_steady")]
            vals, errs = series[base]
            mean, err = trajectory.window_mean(result.times, vals, window, errs)
            rows.append(meta_row(None, out, mean, err))
        elif out == "logneg_rho_steady":
            rows.append(meta_row(None, out, measures.log_negativity(
                rho_window, p.dims), None))
        elif out == "logneg_rho_max":
            rows.append(meta_row(None, out, float(np.max(series["logneg_rho"][0])), None))
        elif out == "logneg_traj_steady":
            mean, err = trajectory.window_mean(
                result.times, series["logneg_traj"][0], window,
                series["logneg_traj"][1])
            rows.append(meta_row(None, out, mean, err))
        elif out == "logneg_traj_max":
            rows.append(meta_row(None, out, float(np.max(series["logneg_traj"][0])), None))
        elif out == "impurity_steady":
            rows.append(meta_row(None, out, measures.impurity(rho_window.matrix), None))
        elif out == "g2tf_steady":
            rows.append(meta_row(None, out, measures.cross_correlation_g2tf(
                rho_window.matrix, p.dims), None))
    return rows


def _oracle_point_rows(config: ScenarioConfig, combo, p: model.SystemParams,
                       dt_res: float, t_max: float,
                       sample_times: np.ndarray, window) -> list[ResultRow]:
    sop = steadystate.liouvillian(p)
    dims = p.dims
    f = dims.fock_dim
    n_op = hilbert.tensor(np.eye(2, dtype=complex), hilbert.number_op(f))
    sz_op = hilbert.tensor(hilbert.sigma_z(), np.eye(f, dtype=complex))

    needs_evolve = any(o in _NEEDS_EVOLVE for o in config.outputs)
    evolved = None
    if needs_evolve:
        psi0 = hilbert.basis_state(dims, 0, 0)
        rho0 = np.outer(psi0, psi0.conj())
        evolved = steadystate.evolve_master(sop, rho0, sample_times, dt=dt_res)

    needs_steady = any(o.endswith("_steady") for o in config.outputs)
    rho_ss = steadystate.steady_state(sop).rho if needs_steady else None

    def meta_row(time, observable, value):
        return ResultRow(
            scenario=config.name, sweep=combo, time=time, observable=observable,
            value=float(value), stderr=None,
            seed=config.master_seed, dt=dt_res, n_max=p.n_max,
            n_traj=0, drive_scaling=p.drive_scaling)

    def series_values(out: str) -> np.ndarray:
        if out == "photon":
            return np.array([hilbert.expectation(n_op, r).real for r in evolved])
        if out == "inversion":
            return np.array([hilbert.expectation(sz_op, r).real for r in evolved])
        if out == "logneg_rho":
            return np.array([measures.log_negativity(r, dims) for r in evolved])
        if out == "impurity":
            return np.array([measures.impurity(r) for r in evolved])
        raise ConfigError(f"output {out!r} is not oracle-computable")

    rows: list[ResultRow] = []
    for out in config.outputs:
        if KNOWN_OUTPUTS[out][0]:
            vals = series_values(out)
            for k, t in enumerate(sample_times):
                rows.append(meta_row(float(t), out, vals[k]))
        elif out == "photon_steady":
            rows.append(meta_row(None, out, hilbert.expectation(n_op, rho_ss).real))
        elif out == "inversion_steady":
            rows.append(meta_row(None, out, hilbert.expectation(sz_op, rho_ss).real))
        elif out == "logneg_rho_steady":
            rows.append(meta_row(None, out, measures.log_negativity(rho_ss, dims)))
        elif out == "logneg_rho_max":
            rows.append(meta_row(None, out, float(series_values("logneg_rho").max())))
        elif out == "impurity_steady":
            rows.append(meta_row(None, out, measures.impurity(rho_ss)))
        elif out == "g2tf_steady":
            rows.append(meta_row(None, out, measures.cross_correlation_g2tf(rho_ss, dims)))
    return rows


def scenario_rows(config: ScenarioConfig) -> list[ResultRow]:
    """Execute every grid point and collect rows in deterministic order."""
    rows: list[ResultRow] = []
    for combo, point in config.grid():
        p = model.SystemParams(**point)
        t_max = config.resolve_t_max(p)
        dt_res = float(config.dt) if config.dt is not None else model.default_time_step(p)
        sample_times = config.resolve_sample_times(t_max)
        window = config.resolve_window(t_max)
        if config.engine == "trajectory":
            rows.extend(_trajectory_point_rows(
                config, combo, p, dt_res, t_max, sample_times, window))
        else:
            rows.extend(_oracle_point_rows(
                config, combo, p, dt_res, t_max, sample_times, window))
    return rows


CSV_FIXED_COLUMNS = ("time", "observable", "value", "stderr",
                     "seed", "dt", "n_max", "n_traj", "drive_scaling")


def csv_header(config: ScenarioConfig) -> list[str]:
    return ["scenario", *config.sweep_names, *CSV_FIXED_COLUMNS]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        # plain-float repr round-trips exactly; numpy scalars subclass float
        # but repr with a type wrapper, so coerce first
        return repr(float(x))
    return str(x)


def write_rows_csv(config: ScenarioConfig, rows: list[ResultRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(config))
        for r in rows:
            writer.writerow([
                r.scenario,
                *[_fmt(float(v)) for v in r.sweep],
                _fmt(r.time), r.observable, _fmt(r.value), _fmt(r.stderr),
                _fmt(r.seed), _fmt(r.dt), _fmt(r.n_max), _fmt(r.n_traj),
                r.drive_scaling,
            ])


def run_scenario(config: ScenarioConfig, out_dir=".") -> tuple[str, str]:
    """Run a scenario; write `<name>.csv` and `<name>.json`, return the paths.

    The sidecar echoes the effective configuration (after any CLI overrides
    were applied), so re-running from the sidecar reproduces the CSV
    byte-for-byte.
    """
    import os
    rows = scenario_rows(config)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{config.name}.csv")
    json_path = os.path.join(out_dir, f"{config.name}.json")
    write_rows_csv(config, rows, csv_path)
    sidecar = {
        "schema_version": 1,
        "scenario": config.name,
        "csv": os.path.basename(csv_path),
        "row_count": len(rows),
        "config": config_to_dict(config),
    }
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    return csv_path, json_path


# ---------------------------------------------------------------------------
# validation and self-checks


def _expected_photon_number(p: model.SystemParams) -> float:
    """Crude steady occupation estimate: detuned empty-cavity response.

    Ignores the atom, so it overestimates occupation for strongly coupled
    systems (vacuum-Rabi splitting blocks resonant buildup) and serves only
    as a conservative screen for the truncation warning.
    """
    eps = model.saturation_scaled_drive(p)
    if p.kappa <= 0:
        return 0.0
    return eps ** 2 / (p.kappa ** 2 * (1.0 + p.theta ** 2))


def validate(config: ScenarioConfig) -> list[Diagnostic]:
    """Static diagnostics for a config; never executes the sweep."""
    diags: list[Diagnostic] = []
    wants_weak = any(o.startswith("weak_overlap") for o in config.outputs)
    for combo, point in config.grid():
        label = config.name if not combo else (
            config.name + "[" + ", ".join(
                f"{k}={v:g}" for k, v in zip(config.sweep_names, combo)) + "]")
        try:
            p = model.SystemParams(**point)
        except Exception as exc:
            diags.append(Diagnostic("error", label, f"invalid parameters: {exc}"))
            continue

        n_exp = _expected_photon_number(p)
        # multiphoton margin: room for Poissonian spread plus a few levels
        needed = n_exp + 5.0 * np.sqrt(n_exp + 1.0) + 3.0
        if p.n_max < needed:
            diags.append(Diagnostic(
                "warning", label,
                f"truncation risk (coupling ignored): expected occupation "
                f"~{n_exp:.3g} wants n_max >= {int(np.ceil(needed))}, "
                f"configured n_max = {p.n_max}"))

        if wants_weak:
            if p.delta != 0.0 or p.theta != 0.0:
                diags.append(Diagnostic(
                    "error", label,
                    "weak-field comparison outputs need the resonant system "
                    "(delta = theta = 0)"))
            elif p.g > 0 and p.gamma > 0:
                xi_val = weakfield.xi(p.g, p.kappa, p.gamma)
                v = weakfield.weak_field_validity(
                    model.saturation_scaled_drive(p), p.kappa, xi_val)
                if not v.valid:
                    diags.append(Diagnostic(
                        "warning", label,
                        f"weak-field law out of regime: (eps/kappa)^2 = "
                        f"{v.drive_squared:.3g} vs margin |xi|/10 = {v.margin:.3g}"))

        if config.engine == "oracle" and p.n_max > steadystate.ORACLE_MAX_NMAX:
            diags.append(Diagnostic(
                "error", label,
                f"oracle engine disabled above n_max = "
                f"{steadystate.ORACLE_MAX_NMAX}; use the trajectory engine"))
    if not diags:
        diags.append(Diagnostic("ok", config.name, "no problems found"))
    return diags


def check_csv(path) -> list[str]:
    """Self-check a result file: header shape, metadata, numeric cells.

    Returns a list of problems; empty means the file passes.  Numeric
    columns must hold finite parseable numbers; `time` and `stderr` may be
    empty (steady-state rows and exact-engine rows respectively).
    """
    problems: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return ["file is empty"]
        if header[:1] != ["scenario"] or tuple(header[-len(CSV_FIXED_COLUMNS):]) != CSV_FIXED_COLUMNS:
            problems.append(
                "header must start with 'scenario' and end with "
                + ",".join(CSV_FIXED_COLUMNS))
            return problems
        meta_from = len(header) - 5  # seed, dt, n_max, n_traj, drive_scaling
        sweep_cols = range(1, len(header) - len(CSV_FIXED_COLUMNS))
        numeric = ([(i, header[i], True) for i in sweep_cols]
                   + [(header.index("time"), "time", False),
                      (header.index("value"), "value", True),
                      (header.index("stderr"), "stderr", False),
                      (meta_from, "seed", True), (meta_from + 1, "dt", True),
                      (meta_from + 2, "n_max", True),
                      (meta_from + 3, "n_traj", True)])

        def check_number(lineno: int, name: str, cell: str, required: bool):
            if cell == "":
                if required:
                    problems.append(f"line {lineno}: missing {name}")
                return
            try:
                v = float(cell)
            except ValueError:
                problems.append(f"line {lineno}: {name} is not a number: {cell!r}")
                return
            if not math.isfinite(v):
                problems.append(f"line {lineno}: {name} is not finite: {cell!r}")

        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                problems.append(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
                continue
            if row[header.index("observable")] == "":
                problems.append(f"line {lineno}: missing observable name")
            for idx, name, required in numeric:
                check_number(lineno, name, row[idx], required)
            if row[-1] not in ("raw", "saturation"):
                problems.append(
                    f"line {lineno}: drive_scaling must be raw or saturation, got {row[-1]!r}")
    return problems


def column_hints(config: ScenarioConfig) -> str:
    """Gnuplot-ready column map for a scenario's CSV output."""
    header = csv_header(config)
    lines = [f"# columns of {config.name}.csv (1-based, gnuplot `using` indices)"]
    for i, name in enumerate(header, start=1):
        lines.append(f"#   {i:2d}  {name}")
    t = header.index("time") + 1
    v = header.index("value") + 1
    e = header.index("stderr") + 1
    lines.append("set datafile separator ','")
    lines.append(f"# time series:    plot '{config.name}.csv' using {t}:{v} with lines")
    lines.append(f"# with error bars: using {t}:{v}:{e} with yerrorbars")
    if config.sweep_names:
        s = header.index(config.sweep_names[0]) + 1
        lines.append(f"# steady rows vs {config.sweep_names[0]}: using {s}:{v}")
    return "\n".join(lines) + "\n"
