#!/usr/bin/env python3
"""Run built-in scenarios and write their CSV/JSON results.

Examples:
    python3 scripts/run_all_figures.py --out results/
    python3 scripts/run_all_figures.py --only fig3 fig5 --out results/
    python3 scripts/run_all_figures.py --only fig2 --traj 200   # quick look
"""

import argparse
import sys
import time

from cavitytraj import scenarios


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--only", nargs="*", metavar="NAME",
                    help="subset of scenario names (default: all)")
    ap.add_argument("--traj", type=int, default=None,
                    help="override trajectory count for a cheaper pass")
    args = ap.parse_args(argv)

    catalog = {c.name: c for c in scenarios.builtin_scenarios()}
    names = args.only or sorted(catalog)
    unknown = [n for n in names if n not in catalog]
    if unknown:
        ap.error(f"unknown scenario(s): {', '.join(unknown)}")

    for name in names:
        cfg = catalog[name]
        if args.traj is not None and cfg.engine == "trajectory":
            cfg = scenarios.config_from_dict(
                {**scenarios.config_to_dict(cfg), "n_traj": args.traj})
        problems = [d for d in scenarios.validate(cfg) if d.level == "error"]
        if problems:
            print(f"{name}: SKIPPED ({problems[0].message})")
            continue
        t0 = time.perf_counter()
        csv_path, _ = scenarios.run_scenario(cfg, out_dir=args.out)
        print(f"{name}: wrote {csv_path} ({time.perf_counter() - t0:.1f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
