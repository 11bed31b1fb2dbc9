"""Command-line interface.

    delayqp build   --problem P --params F [--out PREFIX]
    delayqp check   (--problem P | --network N) --params F [--search-alpha]
    delayqp solve   --problem P --params F --out PREFIX [--seed S]
    delayqp oracle  --problem P
    delayqp compare --problem P --params F [--seed S]

Exit codes: 0 success, 1 unparsable input, 2 invalid input or infeasible
problem, 3 divergence, 4 non-convergence, 5 stability condition not met.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from delayqp.config import load_params
from delayqp.estimator import DelayedProjectionQP
from delayqp.exceptions import (
    DelayQPError,
    DivergenceError,
    InfeasibleError,
    UndefinedDecayError,
)
from delayqp.integrator import write_trajectory_csv
from delayqp.network import NetworkParams, build_network, load_network
from delayqp.oracle import kkt_residuals, solve
from delayqp.problem import load_problem
from delayqp.stability import fit_decay_rate, search_alpha, stability_report

logger = logging.getLogger("delayqp")

EXIT_OK = 0
EXIT_DIVERGED = 3
EXIT_NOT_CONVERGED = 4
EXIT_UNSTABLE = 5

EMPIRICAL_NOTE = "margin >= 0: stability certificate inapplicable; convergence is empirical"


def _problem_id(path, problem):
    return problem.meta.get("id", Path(path).stem)


def _oracle_dict(problem, sol):
    out = sol.to_dict()
    out["residuals"] = kkt_residuals(problem, sol).to_dict()
    return out


def _dump(obj):
    return json.dumps(obj, indent=2)


def cmd_build(problem_path, params_path, out=None):
    problem = load_problem(problem_path)
    params = load_params(params_path)
    alpha = 1.0 if params.search or params.alpha == 0 else params.alpha
    net = build_network(problem, NetworkParams(alpha, params.gamma, params.kappa),
                        params.selector)
    data = net.to_dict()
    if out:
        Path(f"{out}_network.json").write_text(_dump(data) + "\n")
    return data


def cmd_check(params_path, problem_path=None, network_path=None, search=False):
    """Return ``(report_dict, exit_code)``."""
    params = load_params(params_path)
    if network_path is not None:
        net = load_network(network_path)
        W = net.W
    else:
        problem = load_problem(problem_path)
        net = build_network(problem, NetworkParams(1.0, params.gamma, params.kappa),
                            params.selector)
        W = net.W
    alpha = net.params.alpha if params.search else params.alpha
    out = {}
    if not params.search:
        rep = stability_report(W, alpha, params.kappa)
        out.update(rep.to_dict())
        code = EXIT_OK if rep.stable else EXIT_UNSTABLE
    else:
        code = EXIT_UNSTABLE
    if search or params.search:
        found = search_alpha(net, kappa=params.kappa)
        if found is None:
            out["search"] = "none found"
        else:
            out["search"] = found[1].to_dict()
            if params.search:
                out.update(found[1].to_dict())
                code = EXIT_OK
    return out, code


def _run_network(problem, params, n_jobs=None):
    est = DelayedProjectionQP.from_params(params, n_jobs=n_jobs)
    return est.fit(problem)


def cmd_solve(problem_path, params_path, out_prefix, seed=None, n_jobs=None):
    """Integrate every history, write CSVs and a JSON report.

    Returns ``(report, exit_code)``; the report is also written to
    ``<out_prefix>_report.json``.
    """
    t0 = time.perf_counter()
    problem = load_problem(problem_path)
    params = load_params(params_path)
    if seed is not None:
        params = params.with_seed(seed)
    sol = solve(problem)
    est = _run_network(problem, params, n_jobs)
    n = problem.n
    y_star = sol.y_star
    tol = params.integration.converge_tol
    per_history = []
    for i, traj in enumerate(est.trajectories_):
        x_final = traj.final_state[:n]
        try:
            decay = fit_decay_rate(traj, y_star)
        except UndefinedDecayError:
            decay = None
        per_history.append({
            "seed_index": i,
            "converged": bool(traj.final_residual <= tol),
            "final_residual": traj.final_residual,
            "final_x": x_final.tolist(),
            "distance_to_oracle": float(np.linalg.norm(x_final - sol.x_star)),
            "fitted_decay": decay,
            "stop_time": float(traj.times[-1]),
            "stop_reason": traj.stop_reason,
        })
    echo = params.to_dict()
    echo["alpha"] = est.alpha_
    ok = all(h["converged"] and h["distance_to_oracle"] <= params.distance_tol
             for h in per_history)
    report = {
        "problem_id": _problem_id(problem_path, problem),
        "params": echo,
        "stability": est.stability_.to_dict(),
        "note": None if est.stability_.stable else EMPIRICAL_NOTE,
        "per_history": per_history,
        "summary": {
            "converged": sum(h["converged"] for h in per_history),
            "total": len(per_history),
            "max_distance_to_oracle": max(h["distance_to_oracle"] for h in per_history),
            "all_within_tolerance": ok,
        },
        "oracle": _oracle_dict(problem, sol),
    }
    if out_prefix:
        out_prefix = str(out_prefix)
        Path(out_prefix).parent.mkdir(parents=True, exist_ok=True)
        for i, traj in enumerate(est.trajectories_):
            write_trajectory_csv(traj, f"{out_prefix}_h{i:02d}.csv")
    report["wall_time_ms"] = int(round(1000 * (time.perf_counter() - t0)))
    if out_prefix:
        Path(f"{out_prefix}_report.json").write_text(_dump(report) + "\n")
    return report, EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_oracle(problem_path):
    problem = load_problem(problem_path)
    return _oracle_dict(problem, solve(problem))


def cmd_compare(problem_path, params_path, seed=None, n_jobs=None):
    problem = load_problem(problem_path)
    params = load_params(params_path)
    if seed is not None:
        params = params.with_seed(seed)
    try:
        sol = solve(problem)
    except InfeasibleError as exc:
        sol, oracle_status = None, f"infeasible: {exc}"
    else:
        oracle_status = "optimal"
    try:
        est = _run_network(problem, params, n_jobs)
    except DivergenceError as exc:
        est, network_status = None, f"diverged at t={exc.time:.6g}"
    else:
        n_conv = int(est.converged_.sum())
        network_status = "converged" if n_conv else "not converged"
    out = {"oracle_status": oracle_status, "network_status": network_status}
    if sol is None:
        out["network_converged_histories"] = None if est is None else int(est.converged_.sum())
        return out, InfeasibleError.exit_code
    if est is None:
        return out, EXIT_DIVERGED
    if not est.converged_.any():
        return out, EXIT_NOT_CONVERGED
    f_star = problem.objective(sol.x_star)
    f_net = problem.objective(est.x_)
    out.update({
        "x_oracle": sol.x_star.tolist(),
        "x_network": est.x_.tolist(),
        "delta": (est.x_ - sol.x_star).tolist(),
        "v_oracle": sol.v_star.tolist(),
        "v_network": est.v_.tolist(),
        "objective_oracle": f_star,
        "objective_network": f_net,
        "objective_gap": f_net - f_star,
        "converged_histories": int(est.converged_.sum()),
        "total_histories": int(est.converged_.size),
    })
    return out, EXIT_OK


def _table(out):
    if "x_oracle" not in out:
        return _dump(out)
    lines = [f"{'i':>3} {'oracle':>16} {'network':>16} {'delta':>12}"]
    for i, (a, b, d) in enumerate(zip(out["x_oracle"], out["x_network"], out["delta"])):
        lines.append(f"{i + 1:>3} {a:>16.10f} {b:>16.10f} {d:>12.3e}")
    lines.append(f"objective gap f(x_net) - f(x*) = {out['objective_gap']:.3e}")
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(prog="delayqp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, params=True, out=False, seed=False, problem_required=True):
        p.add_argument("--problem", required=problem_required)
        if params:
            p.add_argument("--params", required=True)
        if out:
            p.add_argument("--out")
        if seed:
            p.add_argument("--seed", type=int)
        return p

    common(sub.add_parser("build", help="assemble W and p, print as JSON"), out=True)
    chk = common(sub.add_parser("check", help="evaluate the stability margin"),
                 problem_required=False)
    chk.add_argument("--network", help="network JSON written by 'build'")
    chk.add_argument("--search-alpha", action="store_true")
    slv = common(sub.add_parser("solve", help="integrate the network"), out=True, seed=True)
    slv.add_argument("--jobs", type=int, default=None)
    common(sub.add_parser("oracle", help="exact KKT solution"), params=False)
    cmp_ = common(sub.add_parser("compare", help="oracle versus network"), seed=True)
    cmp_.add_argument("--json", action="store_true", help="print JSON instead of a table")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "build":
            print(_dump(cmd_build(args.problem, args.params, args.out)))
            return EXIT_OK
        if args.command == "check":
            if (args.problem is None) == (args.network is None):
                parser.error("check needs exactly one of --problem or --network")
            out, code = cmd_check(args.params, args.problem, args.network, args.search_alpha)
            print(_dump(out))
            return code
        if args.command == "solve":
            if not args.out:
                parser.error("solve needs --out")
            report, code = cmd_solve(args.problem, args.params, args.out, args.seed, args.jobs)
            s = report["summary"]
            print(f"{report['problem_id']}: {s['converged']}/{s['total']} converged, "
                  f"max distance to oracle {s['max_distance_to_oracle']:.3e}, "
                  f"margin {report['stability']['margin']:.4f}")
            return code
        if args.command == "oracle":
            print(_dump(cmd_oracle(args.problem)))
            return EXIT_OK
        if args.command == "compare":
            out, code = cmd_compare(args.problem, args.params, args.seed)
            print(_dump(out) if args.json else _table(out))
            return code
    except DelayQPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
