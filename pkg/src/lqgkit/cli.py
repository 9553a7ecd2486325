"""Command-line front end: scenario files in, CSV series and summaries out.

Subcommands: lqr, estimate, simulate, sweep, reproduce, validate.
Exit codes: 0 success, 2 scenario/validation problems, 1 runtime failures.
CSV output is RFC-4180 style (quoted where needed, CRLF, header row) with
locale-independent 12-significant-digit numbers; column schemas are listed
in README.md and asserted by the test suite.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from ._linalg import ConvergenceError
from .harness import RunResult, Scenario, run, sweep
from .lqr import solve_dare_lqr, solve_lqr
from .model import ValidationError, validate
from .scenario import ScenarioError, load_scenario

_MODE_TO_ESTIMATOR = {"predict": "predictor", "filter": "filter", "smooth": "smoother"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _vec_headers(prefix: str, count: int) -> list[str]:
    return [f"{prefix}_{i + 1}" for i in range(count)]


def _mat_headers(prefix: str, rows: int, cols: int) -> list[str]:
    return [f"{prefix}_{i + 1}_{j + 1}" for i in range(rows) for j in range(cols)]


def _cells(vec_or_none, count: int) -> list:
    if vec_or_none is None:
        return [None] * count
    return list(np.asarray(vec_or_none).reshape(-1))


def _load(args) -> Scenario:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    return scenario


def _stem(args) -> str:
    return Path(args.scenario).stem


# ---------------------------------------------------------------- subcommands

def _cmd_lqr(args) -> int:
    scenario = _load(args)
    if scenario.weights is None:
        raise ValidationError(["lqr subcommand requires a weights section"])
    report = validate(scenario.system, scenario.weights, scenario.noise)
    if report:
        raise ValidationError(report)
    system, weights = scenario.system, scenario.weights
    outdir = Path(args.output)

    if args.steady:
        if not all(s.is_constant for s in (system.A, system.B, weights.Q, weights.R)):
            raise ValidationError(["--steady requires constant A, B, Q, R schedules"])
        ss = solve_dare_lqr(system.A[0], system.B[0], weights.Q[0], weights.R[0],
                            tol=args.tol, max_iter=args.max_iter)
        header = (_mat_headers("K", system.m, system.n) + _vec_headers("Pdiag", system.n)
                  + ["iterations", "residual", "spectral_radius"])
        row = (_cells(ss.K, system.m * system.n) + _cells(np.diag(ss.P), system.n)
               + [ss.iterations, ss.residual, ss.closed_loop_spectral_radius])
        path = outdir / f"{_stem(args)}_lqr_steady.csv"
        _write_csv(path, header, [row])
        k_str = ", ".join(_fmt(v) for v in ss.K.reshape(-1))
        print(f"steady-state gain K = [{k_str}] "
              f"(iterations {ss.iterations}, residual {ss.residual:.3g})")
        print(f"closed-loop spectral radius = {ss.closed_loop_spectral_radius:.6f}")
        print(f"wrote {path}")
        return 0

    solution = solve_lqr(system, weights)
    N = system.N
    header = ["k"] + _mat_headers("K", system.m, system.n) + _vec_headers("Pdiag", system.n)
    rows = []
    for k in range(N + 1):
        gain = solution.K[k] if k < N else None
        rows.append([k] + _cells(gain, system.m * system.n)
                    + _cells(np.diag(solution.P[k]), system.n))
    path = outdir / f"{_stem(args)}_lqr.csv"
    _write_csv(path, header, rows)
    x0 = scenario.x0 if scenario.x0 is not None else (
        scenario.noise.x0_mean if scenario.noise is not None else None)
    if x0 is not None:
        print(f"J* = {solution.optimal_cost(x0):.2f} over N={N} steps")
    print(f"wrote {path}")
    return 0


def _estimator_csv(result: RunResult, scenario: Scenario, mode: str, path: Path) -> None:
    system = scenario.system
    n, p, N = system.n, system.p, system.N
    est = result.estimator_run
    traj = result.trajectory
    if mode == "smooth":
        header = (["k"] + _vec_headers("x", n) + _vec_headers("xhat", n)
                  + _vec_headers("Pdiag", n) + _vec_headers("Pfiltdiag", n)
                  + _mat_headers("Ls", n, n) + _vec_headers("innov", p))
        rows = []
        for k in range(N + 1):
            gain = est.gains[k] if k < N else None
            innov = est.innovations[k - 1] if k >= 1 else None
            rows.append([k] + _cells(traj.states[k], n)
                        + _cells(est.smoothed[k].mean, n)
                        + _cells(np.diag(est.smoothed[k].cov), n)
                        + _cells(np.diag(est.updated[k].cov), n)
                        + _cells(gain, n * n) + _cells(innov, p))
    else:
        header = (["k"] + _vec_headers("x", n) + _vec_headers("xhat", n)
                  + _vec_headers("Pdiag", n) + _mat_headers("L", n, p)
                  + _vec_headers("innov", p))
        beliefs = est.updated if mode == "filter" else est.predicted
        rows = []
        for k in range(N + 1):
            if mode == "filter":
                gain = est.gains[k - 1] if k >= 1 else None
                innov = est.innovations[k - 1] if k >= 1 else None
            else:
                gain = est.gains[k] if k < N else None
                innov = est.innovations[k] if k < N else None
            rows.append([k] + _cells(traj.states[k], n)
                        + _cells(beliefs[k].mean, n)
                        + _cells(np.diag(beliefs[k].cov), n)
                        + _cells(gain, n * p) + _cells(innov, p))
    _write_csv(path, header, rows)


def _cmd_estimate(args) -> int:
    scenario = _load(args)
    scenario = replace(scenario, estimator=_MODE_TO_ESTIMATOR[args.mode])
    result = run(scenario, tol=args.tol, max_iter=args.max_iter)
    path = Path(args.output) / f"{_stem(args)}_{args.mode}.csv"
    _estimator_csv(result, scenario, args.mode, path)
    trace = result.covariance_diagonals[-1].sum()
    print(f"{scenario.estimator} over N={scenario.system.N} steps, seed {scenario.seed}: "
          f"terminal covariance trace {trace:.6g}")
    print(f"wrote {path}")
    return 0


def _cmd_simulate(args) -> int:
    scenario = _load(args)
    result = run(scenario, tol=args.tol, max_iter=args.max_iter)
    system = scenario.system
    n, m, p, N = system.n, system.m, system.p, system.N
    traj = result.trajectory
    header = ["k"] + _vec_headers("x", n) + _vec_headers("u", m)
    has_outputs = traj.outputs is not None
    filter_convention = scenario.estimator in ("filter", "smoother")
    if has_outputs:
        header += _vec_headers("y", p)
    has_estimates = traj.estimates is not None
    if has_estimates:
        header += _vec_headers("xhat", n)
        if result.covariance_diagonals is not None:
            header += _vec_headers("Pdiag", n)
    rows = []
    for k in range(N + 1):
        row = [k] + _cells(traj.states[k], n)
        row += _cells(traj.inputs[k] if k < N else None, m)
        if has_outputs:
            j = k - 1 if filter_convention else k
            row += _cells(traj.outputs[j] if 0 <= j < N else None, p)
        if has_estimates:
            row += _cells(traj.estimates[k], n)
            if result.covariance_diagonals is not None:
                row += _cells(result.covariance_diagonals[k], n)
        rows.append(row)
    path = Path(args.output) / f"{_stem(args)}_run.csv"
    _write_csv(path, header, rows)
    if result.cost is not None:
        print(f"cost = {result.cost:.2f}")
    if result.settling is not None:
        sr = result.settling
        print(f"settling: k_x = {sr.k_x}, k_K = {sr.k_K}, epsilon = {sr.epsilon:.6g}, "
              f"gain constant over state transient: {sr.gain_constant_over_transient}")
    print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    scenario = _load(args)
    values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    points = sweep(scenario, args.axis, values, tol=args.tol, max_iter=args.max_iter)
    header = ["value", "cost", "k_x", "k_K", "terminal_covariance_trace"]
    rows = [[pt.value, pt.cost, pt.k_x, pt.k_K, pt.terminal_covariance_trace]
            for pt in points]
    path = Path(args.output) / f"{_stem(args)}_sweep_{args.axis}.csv"
    _write_csv(path, header, rows)
    for pt in points:
        print(f"{args.axis}={pt.value:g}: cost={_fmt(pt.cost)} k_x={pt.k_x} k_K={pt.k_K} "
              f"terminal_cov_trace={_fmt(pt.terminal_covariance_trace)}")
    print(f"wrote {path}")
    return 0


def _bundled_scenario(name: str) -> Scenario:
    text = (resources.files("lqgkit") / "scenarios" / f"{name}.scn").read_text(encoding="utf-8")
    from .scenario import parse_scenario
    return parse_scenario(text)


def _reproduce_fig1(args) -> int:
    from .harness import _with_horizon
    base = _bundled_scenario("fig1")
    if args.seed is not None:
        base = replace(base, seed=args.seed)
    outdir = Path(args.output)
    system = base.system
    costs = {}
    for N in (5, 50):
        scn = _with_horizon(base, N)
        for label, controller in (("optimal", "lqr"), ("steady", "steady")):
            result = run(replace(scn, controller=controller),
                         tol=args.tol, max_iter=args.max_iter)
            costs[(N, label)] = result.cost
            traj = result.trajectory
            header = (["k"] + _vec_headers("x", system.n) + _vec_headers("u", system.m)
                      + _mat_headers("K", system.m, system.n))
            if controller == "lqr":
                header += _vec_headers("Pdiag", system.n)
            rows = []
            for k in range(N + 1):
                gain = result.controller_gains[k] if k < N else None
                row = ([k] + _cells(traj.states[k], system.n)
                       + _cells(traj.inputs[k] if k < N else None, system.m)
                       + _cells(gain, system.m * system.n))
                if controller == "lqr":
                    row += _cells(np.diag(result.riccati.P[k]), system.n)
                rows.append(row)
            path = outdir / f"fig1_n{N}_{label}.csv"
            _write_csv(path, header, rows)
            print(f"wrote {path}")
    print("cost comparison (optimal schedule vs converged steady gain):")
    for N in (5, 50):
        print(f"  N={N:<3d} J(K_k) = {costs[(N, 'optimal')]:.2f}   "
              f"J(K) = {costs[(N, 'steady')]:.2f}")
    return 0


def _reproduce_fig4(args) -> int:
    base = _bundled_scenario("fig4")
    if args.seed is not None:
        base = replace(base, seed=args.seed)
    outdir = Path(args.output)
    for mode, estimator in (("predict", "predictor"), ("filter", "filter"),
                            ("smooth", "smoother")):
        scenario = replace(base, estimator=estimator)
        result = run(scenario, tol=args.tol, max_iter=args.max_iter)
        path = outdir / f"fig4_{estimator}.csv"
        _estimator_csv(result, scenario, mode, path)
        trace = result.covariance_diagonals[-1].sum()
        print(f"{estimator}: terminal covariance trace {trace:.6g} -> {path}")
    print(f"seed {base.seed if args.seed is None else args.seed}; "
          "covariance ordering: smoother <= filter <= predictor")
    return 0


def _cmd_reproduce(args) -> int:
    if args.figure == "fig1":
        return _reproduce_fig1(args)
    return _reproduce_fig4(args)


def _cmd_validate(args) -> int:
    scenario = _load(args)
    report = validate(scenario.system, scenario.weights, scenario.noise)
    if report:
        for line in report:
            print(f"violation: {line}", file=sys.stderr)
        return 2
    print("scenario is valid")
    return 0


# -------------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqgkit",
        description="Discrete-time LQR synthesis, Kalman estimation, and LQG simulation.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the scenario file's seed")
    common.add_argument("--output", default=".", help="directory for CSV output")
    common.add_argument("--tol", type=float, default=1e-10,
                        help="steady-state solver tolerance")
    common.add_argument("--max-iter", type=int, default=100_000,
                        help="steady-state solver iteration cap")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lqr", parents=[common], help="finite-horizon or steady LQR synthesis")
    p.add_argument("scenario")
    p.add_argument("--steady", action="store_true", help="solve the steady-state problem")
    p.set_defaults(func=_cmd_lqr)

    p = sub.add_parser("estimate", parents=[common], help="run a Kalman estimator")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=("predict", "filter", "smooth"), required=True)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("simulate", parents=[common], help="run the scenario as configured")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="rerun along one parameter axis")
    p.add_argument("scenario")
    p.add_argument("--axis", choices=("N", "seed", "R-scale", "Q-scale"), required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("reproduce", parents=[common], help="rerun a bundled experiment")
    p.add_argument("figure", choices=("fig1", "fig4"))
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("validate", parents=[common], help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, np.linalg.LinAlgError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
