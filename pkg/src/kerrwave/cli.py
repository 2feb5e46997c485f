"""Command line experiment runner.

::

    kerrwave run config.ini --scheme eh --k 2 --out results/eh
    kerrwave compare results/linear results/kerr --out lag.csv

``run`` writes ``snapshot.csv`` (columns ``x, solT<t>...`` at the dof nodes),
``energy.csv`` and a ``run.meta`` sidecar holding the resolved configuration.
Ladder modes additionally write ``convergence.csv`` and one subdirectory per
rung.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .config import MODES, RunConfig
from .diagnostics import default_workers, energy_audit, eoc_study, run_trajectory
from .errors import KerrwaveError

log = logging.getLogger("kerrwave")

# flags that override config attributes of the same name
_OVERRIDES = {
    "scheme": str,
    "p": int,
    "k": int,
    "cells": int,
    "tau": float,
    "T": float,
    "chi3": float,
    "mode": str,
    "out": str,
    "workers": int,
}


def snapshot_column(t):
    return f"solT{t:g}"


def write_snapshots(traj, config, path):
    steps = config.snapshot_steps()
    times = [t for t in config.snapshots if t <= config.T + 1e-12]
    x = traj.space_e.dof_coords
    names = ["x"] + [snapshot_column(t) for t in times]
    data = np.column_stack([x] + [traj.e[n] for n in steps])
    np.savetxt(path, data, delimiter=",", fmt="%.17g", header=",".join(names), comments="")


def write_run(traj, config, out):
    """Snapshots, energy history and metadata of one finished run."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_snapshots(traj, config, out / "snapshot.csv")
    report = energy_audit(traj)
    report.to_csv(out / "energy.csv")
    config.write(out / "run.meta")
    return report


def cmd_run(args):
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    changes = {name: getattr(args, name) for name in _OVERRIDES if getattr(args, name) is not None}
    if args.workers is None and "KERRWAVE_WORKERS" in os.environ:
        changes["workers"] = default_workers()
    lines = getattr(config, "_lines", {})
    config = config.replace(**changes)
    # overridden keys have no file line to point at
    config._lines = {key: n for key, n in lines.items() if key not in changes}
    config.validate()
    out = Path(config.out)

    if config.mode == "single":
        traj = run_trajectory(config)
        report = write_run(traj, config, out)
        print(f"{config.scheme}: {traj.steps} steps, energy {report.values[0]:.6g} -> "
              f"{report.values[-1]:.6g} (max drift {report.max_drift:.3g}); wrote {out}")
        return 0

    table, trajs = eoc_study(config, config.mode, config.workers)
    out.mkdir(parents=True, exist_ok=True)
    for i, traj in enumerate(trajs):
        write_run(traj, traj.config, out / f"rung{i}")
    table.to_csv(out / "convergence.csv")
    config.write(out / "run.meta")
    print(table)
    return 0


def read_snapshots(directory):
    path = Path(directory) / "snapshot.csv"
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return names, data


def centroid(x, u):
    """Centre of the intensity ``u**2`` along ``x``."""
    mass = np.trapezoid(u * u, x)
    return float(np.trapezoid(x * u * u, x) / mass) if mass > 0 else float("nan")


def compare_runs(dir_a, dir_b):
    """Per-snapshot L2 difference and intensity centroids of two runs.

    Returns a list of ``(column, l2_diff, centroid_a, centroid_b, lag)`` with
    ``lag = centroid_b - centroid_a``.
    """
    names_a, data_a = read_snapshots(dir_a)
    names_b, data_b = read_snapshots(dir_b)
    if names_a != names_b:
        raise ValueError(f"snapshot columns differ: {names_a} vs {names_b}")
    if data_a.shape != data_b.shape or not np.array_equal(data_a[:, 0], data_b[:, 0]):
        raise ValueError("runs are sampled at different points")
    x = data_a[:, 0]
    rows = []
    for j, name in enumerate(names_a[1:], start=1):
        ua, ub = data_a[:, j], data_b[:, j]
        diff = float(np.sqrt(np.trapezoid((ua - ub) ** 2, x)))
        ca, cb = centroid(x, ua), centroid(x, ub)
        rows.append((name, diff, ca, cb, cb - ca))
    return rows


def cmd_compare(args):
    rows = compare_runs(args.dir_a, args.dir_b)
    lines = ["snapshot,l2_diff,centroid_a,centroid_b,lag"]
    lines += [f"{n},{d:.17g},{a:.17g},{b:.17g},{lag:.17g}" for n, d, a, b, lag in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="kerrwave", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation or a refinement ladder")
    run.add_argument("config", nargs="?", help="configuration file (defaults are used if omitted)")
    run.add_argument("--scheme", choices=("eh", "ea", "oracle"))
    run.add_argument("--mode", choices=MODES)
    for name in ("p", "k", "cells", "tau", "T", "chi3", "workers"):
        run.add_argument(f"--{name}", type=_OVERRIDES[name])
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    cmp = sub.add_parser("compare", help="compare the snapshots of two runs")
    cmp.add_argument("dir_a")
    cmp.add_argument("dir_b")
    cmp.add_argument("--out", help="also write the report to this file")
    cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (KerrwaveError, ValueError, OSError, RuntimeError) as exc:
        print(f"kerrwave: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
