"""Acceptance criteria, one test per criterion.

Every test records a PASS/FAIL line before asserting, and the lines are
printed in the pytest terminal summary.  Run just this file with

    pytest tests/test_acceptance.py -v
"""

import json
import time

import numpy as np
import pytest

import properties
from delayqp.cli import cmd_solve
from delayqp.fixtures import fixture_path, load_example
from delayqp.network import NetworkParams, build_network, build_projectors, fixed_point_residual
from delayqp.oracle import kkt_residuals, solve
from helpers import make_random_problem

PRINTED_EX1_M = np.array([[0.3333, -0.3333, 0.3333],
                          [-0.3333, 0.3333, -0.3333],
                          [0.3333, -0.3333, 0.3333]])
PRINTED_EX1_N = np.array([0.3333, -0.3333, 0.3333])
PRINTED_EX1_W_TOP_LEFT = np.array([[0.8133, -0.1333, 0.2000],
                                   [-0.0933, 0.7333, -0.2000],
                                   [0.0933, -0.1333, 0.6000]])
PRINTED_EX2_X = np.array([2.6080, 1.8757, -0.5792, 0.1317])


def best_time(fn, repeat=20):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


@pytest.fixture(scope="module")
def solve_runs(tmp_path_factory):
    """Both bundled examples through ``cmd_solve``, each run twice."""
    out = {"first_pass_seconds": 0.0}
    for name in ("example1", "example2"):
        runs = []
        for rep in ("a", "b"):
            prefix = tmp_path_factory.mktemp(f"{name}_{rep}") / name
            t0 = time.perf_counter()
            report, code = cmd_solve(fixture_path(name), fixture_path(f"{name}_params"), prefix)
            if rep == "a":
                out["first_pass_seconds"] += time.perf_counter() - t0
            runs.append((report, code, prefix))
        out[name] = runs
    return out


def test_criterion_1_example1_projectors(criterion):
    p = load_example("example1")
    M, N = build_projectors(p)
    err = max(np.abs(M - PRINTED_EX1_M).max(), np.abs(N[:, 0] - PRINTED_EX1_N).max())
    seconds = best_time(lambda: build_projectors(p))
    criterion(1, "Example 1 projectors M, N", err <= 1e-4 and seconds < 1e-3,
              f"max |err| {err:.2e} (tol 1e-4), runtime {seconds * 1e3:.3f} ms (limit 1 ms)")


def test_criterion_2_example1_w_block(criterion):
    p = load_example("example1")
    net = build_network(p, NetworkParams(0.45, gamma=1.0), "first_h_rows")
    err = np.abs(net.W[:3, :3] - PRINTED_EX1_W_TOP_LEFT).max()
    criterion(2, "Example 1 W top-left block", err <= 1e-3, f"max |err| {err:.2e} (tol 1e-3)")


def test_criterion_3_example2_optimum(criterion):
    p = load_example("example2")
    sol = solve(p)
    err = np.abs(sol.x_star - PRINTED_EX2_X).max()
    kkt = kkt_residuals(p, sol).max()
    seconds = best_time(lambda: solve(p))
    ok = err <= 1e-3 and kkt <= 1e-8 and seconds < 1e-2
    criterion(3, "Example 2 optimum matches printed x*", ok,
              f"max |x* - printed| {err:.3e} (tol 1e-3), KKT {kkt:.1e} (tol 1e-8), "
              f"runtime {seconds * 1e3:.2f} ms (limit 10 ms); oracle x* "
              f"{np.round(sol.x_star, 4).tolist()}, f={sol.objective:.4f} vs printed "
              f"f={p.objective(PRINTED_EX2_X):.4f}")


def test_criterion_4_example1_optimum(criterion):
    p = load_example("example1")
    sol = solve(p)
    eq = np.abs(p.A @ sol.x_star - p.b).max()
    kkt = kkt_residuals(p, sol).max()
    frozen = np.abs(sol.x_star - np.array(p.meta["expected_x"])).max()
    ok = eq <= 1e-8 and kkt <= 1e-8 and frozen <= 1e-12
    criterion(4, "Example 1 oracle KKT point", ok,
              f"|Ax-b| {eq:.1e}, KKT {kkt:.1e}, drift from frozen value {frozen:.1e}")


def test_criterion_5_end_to_end(criterion, solve_runs):
    lines, ok = [], True
    for name, count in (("example1", 10), ("example2", 20)):
        report, code, _ = solve_runs[name][0]
        hist = report["per_history"]
        good = [h["converged"] and h["distance_to_oracle"] <= 5e-3
                and h["fitted_decay"] is not None and h["fitted_decay"] < 0 for h in hist]
        ok &= len(hist) == count and all(good) and code == 0
        worst = max(h["distance_to_oracle"] for h in hist)
        slowest = max(h["fitted_decay"] if h["fitted_decay"] is not None else np.inf
                      for h in hist)
        lines.append(f"{name} {sum(good)}/{len(hist)} ok, max dist {worst:.1e}, "
                     f"max decay {slowest:.3f}")
    seconds = solve_runs["first_pass_seconds"]
    ok &= seconds < 60
    criterion(5, "End-to-end convergence", ok, "; ".join(lines) + f"; total {seconds:.1f} s")


def test_criterion_6_keystone(criterion):
    rng = np.random.default_rng(7)
    problems = [load_example(n) for n in ("example1", "example1_prose_B", "example2")]
    problems += [make_random_problem(rng) for _ in range(20)]
    worst = 0.0
    for p in problems:
        y = solve(p).y_star
        for gamma, selector in ((0.0, "zero"), (1.0, "first_h_rows")):
            net = build_network(p, NetworkParams(0.45, gamma, 2.0), selector)
            worst = max(worst, fixed_point_residual(y, net))
    criterion(6, "Oracle point is a network equilibrium", worst <= 1e-7,
              f"max residual {worst:.1e} over {len(problems)} problems x 2 builds (tol 1e-7)")


def test_criterion_7_property_suites(criterion):
    checks = {}
    checks["projector laws"] = (properties.projector_law_violation(), 1e-9)
    expand, idem, _ = properties.box_projection_violation(count=1000)
    checks["box nonexpansive"] = (expand, 1e-12)
    checks["box idempotent"] = (idem, 0.0)
    homog, excess, _ = properties.spectral_norm_violation()
    checks["norm homogeneity"] = (homog, 1e-9)
    checks["norm lower bound"] = (excess, 1e-9)
    coarse, fine = properties.linear_dde_errors()
    checks["RK4 order (1/ratio)"] = (fine / coarse, 1 / 8)
    checks["equilibrium drift"] = (max(properties.equilibrium_drift(n)
                                       for n in ("example1", "example2")), 1e-9)
    checks["step halving"] = (max(properties.step_halving_gap(n)
                                  for n in ("example1", "example2")), 1e-4)
    checks["oracle vs grid"] = (properties.oracle_grid_gap()[0], 1e-4)
    failed = [k for k, (v, tol) in checks.items() if not v <= tol]
    detail = ", ".join(f"{k} {v:.1e}" for k, (v, _) in checks.items())
    criterion(7, "Property suites", not failed,
              detail + (f"; failing: {failed}" if failed else ""))


def test_criterion_8_determinism(criterion, solve_runs):
    mismatches = []
    for name in ("example1", "example2"):
        (ra, _, pa), (rb, _, pb) = solve_runs[name]
        for i in range(len(ra["per_history"])):
            a = pa.with_name(f"{name}_h{i:02d}.csv").read_bytes()
            b = pb.with_name(f"{name}_h{i:02d}.csv").read_bytes()
            if a != b:
                mismatches.append(f"{name} h{i:02d}")
        ja = json.loads(pa.with_name(f"{name}_report.json").read_text())
        jb = json.loads(pb.with_name(f"{name}_report.json").read_text())
        ja.pop("wall_time_ms"), jb.pop("wall_time_ms")
        if ja != jb:
            mismatches.append(f"{name} report")
    criterion(8, "Repeated solves are byte-identical", not mismatches,
              "all CSVs and reports identical" if not mismatches else f"differ: {mismatches}")
