"""Command-line front end: run, validate and inspect named scenarios.

Exit status is 0 on success and 1 on any reported failure (unknown
scenario, invalid config, truncation trip, non-convergence).  `validate`
is diagnostics-only: it prints findings but always exits 0 so it can be
used in pipelines to preview a config without gating on warnings.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import scenarios
from .errors import CavityTrajError

__all__ = ["main", "build_parser"]


def _load_config(args) -> scenarios.ScenarioConfig:
    name = args.scenario or getattr(args, "scenario_opt", None)
    if args.scenario and getattr(args, "scenario_opt", None):
        raise CavityTrajError("give the scenario name once, not twice")
    if args.config is not None:
        if name:
            raise CavityTrajError("give either a scenario name or --config, not both")
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        cfg = scenarios.config_from_dict(data)
    elif name is not None:
        cfg = scenarios.get_scenario(name)
    else:
        raise CavityTrajError("give a scenario name or --config FILE")
    return _apply_overrides(cfg, args)


def _apply_overrides(cfg: scenarios.ScenarioConfig, args) -> scenarios.ScenarioConfig:
    """Fold CLI overrides into the config before running.

    The sidecar echoes the post-override config, so a file produced with
    overrides still round-trips byte-for-byte from its sidecar.
    """
    changes = {}
    if getattr(args, "traj", None) is not None:
        changes["n_traj"] = args.traj
    if getattr(args, "seed", None) is not None:
        changes["master_seed"] = args.seed
    if getattr(args, "dt", None) is not None:
        changes["dt"] = args.dt
    if getattr(args, "t_max", None) is not None:
        changes["t_max"] = args.t_max
    params = dict(cfg.params)
    params_changed = False
    if getattr(args, "fock", None) is not None:
        params["n_max"] = args.fock
        params_changed = True
    if getattr(args, "drive_scaling", None) is not None:
        params["drive_scaling"] = args.drive_scaling
        params_changed = True
    if params_changed:
        changes["params"] = params
    return replace(cfg, **changes) if changes else cfg


def _add_selection(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("scenario", nargs="?",
                     help="built-in scenario name (see list-scenarios)")
    sub.add_argument("--scenario", dest="scenario_opt", metavar="NAME",
                     help="alternative spelling of the positional name")
    sub.add_argument("--config", metavar="FILE",
                     help="JSON config or result sidecar to load instead")


def _add_overrides(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--traj", type=int, metavar="M",
                     help="override trajectory count")
    sub.add_argument("--seed", type=int, metavar="S",
                     help="override master seed")
    sub.add_argument("--dt", type=float, metavar="DT",
                     help="override integrator step")
    sub.add_argument("--t-max", type=float, metavar="T", dest="t_max",
                     help="override simulated duration")
    sub.add_argument("--fock", type=int, metavar="N",
                     help="override photon-number truncation n_max")
    sub.add_argument("--drive-scaling", choices=("raw", "saturation"),
                     help="override drive-strength convention")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-traj",
        description=("Quantum-trajectory and master-equation sweeps for a "
                     "driven, lossy atom-cavity system."))
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="execute a scenario, write CSV + JSON sidecar")
    _add_selection(run)
    _add_overrides(run)
    run.add_argument("--out", default=".", metavar="DIR",
                     help="output directory (default: current directory)")

    val = subs.add_parser("validate",
                          help="print config diagnostics without running")
    _add_selection(val)
    _add_overrides(val)

    subs.add_parser("list-scenarios", help="list built-in scenarios")

    hints = subs.add_parser("column-hints",
                            help="print a gnuplot column map for a scenario's CSV")
    _add_selection(hints)

    chk = subs.add_parser("check", help="self-check a result CSV's structure")
    chk.add_argument("csv", help="result file to check")
    return parser


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    csv_path, json_path = scenarios.run_scenario(cfg, args.out)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load_config(args)
    for d in scenarios.validate(cfg):
        print(f"[{d.level}] {d.where}: {d.message}")
    return 0


def _cmd_list(_args) -> int:
    for cfg in scenarios.builtin_scenarios():
        sweep = ", ".join(cfg.sweep_names) or "none"
        print(f"{cfg.name:8s} engine={cfg.engine:10s} sweeps: {sweep}")
        print(f"         {cfg.description}")
    return 0


def _cmd_hints(args) -> int:
    cfg = _load_config(args)
    sys.stdout.write(scenarios.column_hints(cfg))
    return 0


def _cmd_check(args) -> int:
    problems = scenarios.check_csv(args.csv)
    if problems:
        for p in problems:
            print(f"problem: {p}")
        return 1
    print(f"{args.csv}: ok")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "list-scenarios": _cmd_list,
    "column-hints": _cmd_hints,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CavityTrajError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
