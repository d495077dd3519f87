"""Command-line harness: single solves, benchmark grids, performance profiles.

Subcommands:
    run      one solve, one CSV row appended
    bench    full problem x solver x seed grid from a JSON suite config
    profile  Dolan-More performance profile from a rows.csv
    check    finite-difference audit of a problem's derivatives

Exit codes: 0 success / stationary, 1 runtime or tolerance error,
2 iteration budget exhausted, 64 bad flags, 65 bad data, 66 unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .arc_solver import (ArcPracticalConfig, ArcTheoreticalConfig,
                         arc_solve_practical, arc_solve_theoretical)
from .cr_solver import CrConfig, cr_solve
from .problems import SUPPORTED_PROBLEMS, UnknownProblemError, fd_check, make_problem

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_NOINPUT = 66

SOLVERS = ("cr", "arc", "arc-practical")

CSV_COLUMNS = ["problem", "n", "solver", "seed", "f_final", "n_i", "n_prod",
               "n_f", "n_g", "n_eig", "time", "time_eig", "time_loop",
               "status"]
_FLOAT_COLUMNS = {"f_final", "time", "time_eig", "time_loop"}


@dataclass
class BenchRow:
    problem: str
    n: int
    solver: str
    seed: int
    f_final: float
    n_i: int
    n_prod: int
    n_f: int
    n_g: int
    n_eig: int
    time: float
    time_eig: float
    time_loop: float
    status: str

    def as_csv_fields(self):
        out = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            out.append("%.17g" % v if name in _FLOAT_COLUMNS else str(v))
        return out


def perturbed_start(problem, seed: int) -> np.ndarray:
    """Standard start plus a seeded uniform perturbation in 0.1*[-1,1]^n."""
    rng = np.random.default_rng(seed)
    return problem.x0_standard + 0.1 * rng.uniform(-1.0, 1.0, problem.dim)


def solve_one(problem_name: str, n: int, solver: str, subsolver: str,
              eps_g: float, lipschitz, seed: int,
              max_outer=None) -> BenchRow:
    problem = make_problem(problem_name, n)
    x0 = perturbed_start(problem, seed)
    if solver == "cr":
        report = cr_solve(problem, x0, CrConfig(
            eps_g=eps_g, lipschitz=lipschitz, subsolver=subsolver,
            rng_seed=seed, max_outer=max_outer))
    elif solver == "arc":
        cfg = ArcTheoreticalConfig(eps_g=eps_g, lipschitz=lipschitz,
                                   subsolver=subsolver, rng_seed=seed)
        if max_outer is not None:
            cfg.max_outer = max_outer
        report = arc_solve_theoretical(problem, x0, cfg)
    elif solver == "arc-practical":
        cfg = ArcPracticalConfig(grad_tol=eps_g, subsolver_reform=subsolver,
                                 rng_seed=seed)
        if max_outer is not None:
            cfg.max_outer = max_outer
        report = arc_solve_practical(problem, x0, cfg)
    else:
        raise ValueError("unknown solver %r" % solver)
    c = report.counters
    return BenchRow(problem=problem_name, n=n, solver=solver, seed=seed,
                    f_final=report.f_final, n_i=report.n_outer,
                    n_prod=c.n_prod, n_f=c.n_f, n_g=c.n_g, n_eig=c.n_eig,
                    time=c.time_total, time_eig=c.time_eig,
                    time_loop=c.time_total - c.time_eig,
                    status=report.status)


def _append_rows(path: str, rows) -> None:
    new_file = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new_file:
            w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow(row.as_csv_fields())


def cmd_run(args) -> int:
    if args.solver in ("cr", "arc") and args.lipschitz is None:
        print("error: --lipschitz is required for solver %r" % args.solver,
              file=sys.stderr)
        return EXIT_USAGE
    try:
        row = solve_one(args.problem, args.n, args.solver, args.subsolver,
                        args.eps_g, args.lipschitz, args.seed,
                        max_outer=args.max_outer)
    except (UnknownProblemError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report, don't traceback
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        _append_rows(args.out, [row])
    print("%s n=%d %s seed=%d: status=%s f=%.10g n_i=%d n_prod=%d" % (
        row.problem, row.n, row.solver, row.seed, row.status, row.f_final,
        row.n_i, row.n_prod))
    if row.status == "stationary":
        return EXIT_OK
    if row.status == "max_outer":
        return EXIT_BUDGET
    return EXIT_ERROR


def _solver_entry(entry):
    """A config solver entry is 'name' or {'solver': ..., 'subsolver': ...}."""
    if isinstance(entry, str):
        sub = "bb" if entry == "arc-practical" else "nag"
        return entry, sub
    return entry["solver"], entry.get(
        "subsolver", "bb" if entry["solver"] == "arc-practical" else "nag")


def cmd_bench(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print("error: cannot read config: %s" % exc, file=sys.stderr)
        return EXIT_NOINPUT
    reps = int(cfg.get("reps", 10))
    eps_g = float(cfg["eps_g"])
    lipschitz = cfg.get("lipschitz")
    cells = []
    for p in cfg["problems"]:
        for entry in cfg["solvers"]:
            solver, subsolver = _solver_entry(entry)
            for seed in range(1, reps + 1):
                cells.append((p["name"], int(p["n"]), solver, subsolver,
                              eps_g, lipschitz, seed))
    threads = int(os.environ.get("CUBICREG_THREADS", "1"))

    def work(cell):
        return solve_one(*cell)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, cells))
    else:
        rows = [work(c) for c in cells]
    rows.sort(key=lambda r: (r.problem, r.solver, r.seed))

    os.makedirs(args.out_dir, exist_ok=True)
    rows_path = os.path.join(args.out_dir, "rows.csv")
    if os.path.exists(rows_path):
        os.remove(rows_path)
    _append_rows(rows_path, rows)
    _write_means(os.path.join(args.out_dir, "means.csv"), rows)
    print("wrote %d rows to %s" % (len(rows), rows_path))
    return EXIT_OK


_MEAN_COLUMNS = ["f_final", "n_i", "n_prod", "n_f", "n_g", "n_eig",
                 "time", "time_eig", "time_loop"]


def _write_means(path: str, rows) -> None:
    groups = {}
    for r in rows:
        groups.setdefault((r.problem, r.n, r.solver), []).append(r)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["problem", "n", "solver", "reps", "n_stationary"]
                   + _MEAN_COLUMNS)
        for (problem, n, solver) in sorted(groups):
            g = groups[(problem, n, solver)]
            ok = sum(1 for r in g if r.status == "stationary")
            means = ["%.17g" % (sum(getattr(r, c) for r in g) / len(g))
                     for c in _MEAN_COLUMNS]
            w.writerow([problem, n, solver, len(g), ok] + means)


def read_rows(path: str):
    with open(path, encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def performance_profile(rows, metric: str):
    """Dolan-More profile: per-solver fraction of instances within tau of best.

    An instance is one (problem, n, seed) cell.  Runs with a non-stationary
    status get ratio infinity and never participate in the per-instance
    minimum.  Returns (solvers, taus, fractions[solver] -> list).
    """
    solvers = sorted({r["solver"] for r in rows})
    instances = {}
    for r in rows:
        key = (r["problem"], r["n"], r["seed"])
        instances.setdefault(key, {})[r["solver"]] = r
    ratios = {s: [] for s in solvers}
    for key, per_solver in instances.items():
        best = min((float(r[metric]) for r in per_solver.values()
                    if r["status"] == "stationary"), default=math.inf)
        for s in solvers:
            r = per_solver.get(s)
            if r is None or r["status"] != "stationary" or best == math.inf:
                ratios[s].append(math.inf)
            else:
                ratios[s].append(float(r[metric]) / best)
    n_inst = len(instances)
    taus = sorted({v for vs in ratios.values() for v in vs
                   if math.isfinite(v)} | {1.0})
    fractions = {
        s: [sum(1 for v in ratios[s] if v <= tau) / n_inst for tau in taus]
        for s in solvers}
    return solvers, taus, fractions


def head_to_head(rows, metric: str):
    """Pairwise win counts per instance, in the style of head-to-head tables.

    Returns {(a, b): count of instances where solver a's metric is strictly
    smaller than solver b's}.  A failed run loses to any stationary run and
    neither side scores when both fail.
    """
    solvers = sorted({r["solver"] for r in rows})
    instances = {}
    for r in rows:
        key = (r["problem"], r["n"], r["seed"])
        instances.setdefault(key, {})[r["solver"]] = r
    wins = {(a, b): 0 for a in solvers for b in solvers if a != b}
    for per_solver in instances.values():
        for a in solvers:
            for b in solvers:
                if a == b:
                    continue
                ra, rb = per_solver.get(a), per_solver.get(b)
                if ra is None or rb is None:
                    continue
                a_ok = ra["status"] == "stationary"
                b_ok = rb["status"] == "stationary"
                if a_ok and not b_ok:
                    wins[(a, b)] += 1
                elif a_ok and b_ok and float(ra[metric]) < float(rb[metric]):
                    wins[(a, b)] += 1
    return wins


def _profile_svg(solvers, taus, fractions, path: str) -> None:
    width, height, pad = 640, 420, 50
    t_max = max(taus[-1], 1.0 + 1e-9)
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b"]

    def px(tau):
        return pad + (tau - 1.0) / (t_max - 1.0) * (width - 2 * pad)

    def py(frac):
        return height - pad - frac * (height - 2 * pad)

    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">'
             % (width, height),
             '<rect width="100%" height="100%" fill="white"/>',
             '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
             % (pad, height - pad, width - pad, height - pad),
             '<line x1="%g" y1="%g" x2="%g" y2="%g" stroke="black"/>'
             % (pad, pad, pad, height - pad),
             '<text x="%g" y="%g" font-size="12">tau</text>'
             % (width / 2, height - 12),
             '<text x="12" y="%g" font-size="12" transform="rotate(-90 12 %g)"'
             '>fraction</text>' % (height / 2, height / 2)]
    for i, s in enumerate(solvers):
        color = palette[i % len(palette)]
        pts = []
        prev = 0.0
        for tau, frac in zip(taus, fractions[s]):
            pts.append("%g,%g" % (px(tau), py(prev)))  # step function
            pts.append("%g,%g" % (px(tau), py(frac)))
            prev = frac
        pts.append("%g,%g" % (px(t_max), py(prev)))
        parts.append('<polyline points="%s" fill="none" stroke="%s" '
                     'stroke-width="1.5"/>' % (" ".join(pts), color))
        parts.append('<text x="%g" y="%g" font-size="12" fill="%s">%s</text>'
                     % (width - pad - 120, pad + 16 * (i + 1), color, s))
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_profile(args) -> int:
    try:
        rows = read_rows(args.rows)
    except OSError as exc:
        print("error: cannot read rows: %s" % exc, file=sys.stderr)
        return EXIT_NOINPUT
    if not rows or args.metric not in rows[0]:
        print("error: metric column %r not present" % args.metric,
              file=sys.stderr)
        return EXIT_DATAERR
    solvers, taus, fractions = performance_profile(rows, args.metric)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["solver", "tau", "fraction"])
        for s in solvers:
            for tau, frac in zip(taus, fractions[s]):
                w.writerow([s, "%.17g" % tau, "%.17g" % frac])
    if args.svg:
        _profile_svg(solvers, taus, fractions, args.svg)
    print("profile over %d solvers, %d tau points -> %s"
          % (len(solvers), len(taus), args.out))
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        problem = make_problem(args.problem, args.n)
    except (UnknownProblemError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(args.seed)
    worst_g = worst_h = 0.0
    worst_point = None
    tol = 1e-4
    for _ in range(20):
        x = problem.x0_standard + rng.uniform(-1.0, 1.0, problem.dim)
        grad_err, hess_err = fd_check(problem, x)
        if max(grad_err, hess_err) > max(worst_g, worst_h):
            worst_point = x
        worst_g = max(worst_g, grad_err)
        worst_h = max(worst_h, hess_err)
    print("%s n=%d: worst grad rel-err %.3e, worst hess rel-err %.3e"
          % (args.problem, args.n, worst_g, worst_h))
    if max(worst_g, worst_h) > tol:
        print("tolerance %.1e exceeded at x = %s" % (tol, worst_point),
              file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubicreg",
                                description="cubic-regularization solvers "
                                            "and benchmark tools")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve one problem instance")
    run.add_argument("--problem", required=True, choices=SUPPORTED_PROBLEMS)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--solver", required=True, choices=SOLVERS)
    run.add_argument("--subsolver", default="nag", choices=("nag", "bb"))
    run.add_argument("--eps-g", type=float, default=1e-5)
    run.add_argument("--lipschitz", type=float, default=None)
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--max-outer", type=int, default=None)
    run.add_argument("--out", default=None, help="CSV file to append a row to")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="run a suite config grid")
    bench.add_argument("config", help="JSON suite config")
    bench.add_argument("--out-dir", required=True)
    bench.set_defaults(func=cmd_bench)

    prof = sub.add_parser("profile", help="performance profile from rows.csv")
    prof.add_argument("rows")
    prof.add_argument("--metric", required=True,
                      choices=("n_i", "n_prod", "n_g", "time"))
    prof.add_argument("--out", required=True)
    prof.add_argument("--svg", default=None)
    prof.set_defaults(func=cmd_profile)

    check = sub.add_parser("check", help="finite-difference derivative audit")
    check.add_argument("--problem", required=True)
    check.add_argument("--n", type=int, required=True)
    check.add_argument("--seed", type=int, default=1)
    check.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
