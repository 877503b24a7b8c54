"""Command-line runner: configuration in, deterministic JSON report out.

Exit codes: 0 all checks passed, 1 at least one check ran to completion and
failed (a genuine margin violation), 2 configuration error or numerical
failure (solver divergence, hypothesis violation, infeasible data).  The
distinction matters: exit 1 talks about the mathematics, exit 2 about the run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from .checks import (
    check_extremum_on_boundary,
    check_gradient_monotonicity,
    check_harmonic_psi_2d,
    convergence_study,
    corollary_bound_minimal,
    corollary_bound_poisson,
)
from .config import (
    RunConfig,
    boundary_value_radial,
    boundary_values_ring2d,
    build_domain,
    build_rhs,
    build_spec,
    parse_config,
)
from .errors import ConfigError, LevelCurvError, NonpositiveCurvature
from .fields import RadialMinimalField, ScherkField
from .geometry import TestFunctionSpec
from .identities import (
    QuadraticBoundInstance,
    codazzi_residual,
    lemma_quadratic_bound,
    minimal_master_identity_residual,
    phi_gradient_identity_residual,
    quadratic_max_oracle,
    uiia_residual,
)
from .polyfield import random_test_jet
from .radial import solve_minimal_radial, solve_semilinear_radial
from .report import emit_report
from .ring2d import solve_minimal_ring2d, solve_semilinear_ring2d

# identity-suite thresholds (absolute residuals)
CODAZZI_TOL = 1e-9
PHI_GRAD_TOL = 1e-8
UIIA_TOL = 1e-9
MASTER_TRIVIAL_TOL = 1e-10
MASTER_TOL = 1e-6
LEMMA32_SLACK = 1e-9
LEMMA32_EQUALITY = 1e-12


def _check_entry(name: str, margin: float, tolerance: float, passed: bool, **extra) -> dict:
    entry = {"name": name, "margin": margin, "tolerance": tolerance, "pass": passed}
    entry.update(extra)
    return entry


# ---------------------------------------------------------------------------
# problem solving
# ---------------------------------------------------------------------------

def solve_problem(cfg: RunConfig, grid=None, initial=None):
    problem = cfg.problem
    geom = problem["geometry"]
    eq = problem["equation"]
    boundary = problem.get("boundary") or {"outer": "constant:0", "inner": "constant:1"}
    tols = cfg.tolerances
    solver_tol = tols.get("solver_tol") or 1e-10

    if geom["kind"] == "radial":
        n = int(geom["n"])
        a, b = float(geom["a"]), float(geom["b"])
        samples = int(geom.get("samples", 401))
        if grid is not None:
            samples = int(grid[0])
        u_b = boundary_value_radial(boundary["outer"], b, geom)
        u_a = boundary_value_radial(boundary["inner"], a, geom)
        if eq == "minimal":
            return solve_minimal_radial(n, a, b, u_a, u_b, samples=samples)
        return solve_semilinear_radial(
            n, a, b, u_a, u_b, build_rhs(problem.get("rhs")), samples=samples, tol=solver_tol
        )

    geom = dict(geom)
    if grid is not None:
        geom["grid"] = list(grid)
    domain = build_domain(geom)
    outer = boundary_values_ring2d(boundary["outer"], domain.outer, domain.n_t, geom)
    inner = boundary_values_ring2d(boundary["inner"], domain.inner, domain.n_t, geom)
    if eq == "minimal":
        return solve_minimal_ring2d(domain, outer, inner, tol=solver_tol, initial=initial)
    return solve_semilinear_ring2d(
        domain, outer, inner, build_rhs(problem.get("rhs")), tol=solver_tol, initial=initial
    )


def _solver_meta(sol) -> dict:
    return {
        "kind": sol.kind,
        "equation": sol.equation,
        "iterations": sol.iterations,
        "residual_norm": sol.residual_norm,
        "h": sol.h,
        "max_principle_violation": sol.max_principle_violation(),
    }


# ---------------------------------------------------------------------------
# per-command pipelines
# ---------------------------------------------------------------------------

def _run_solve(cfg: RunConfig):
    sol = solve_problem(cfg)
    return [], {"solver": _solver_meta(sol)}, {"solution": sol}


def _run_curvature(cfg: RunConfig):
    from .checks import _psi_field_radial, _psi_field_ring2d

    sol = solve_problem(cfg)
    spec = build_spec(cfg.spec)
    if sol.kind == "ring2d":
        psi, k, gnorm, _, notes = _psi_field_ring2d(sol, spec)
    else:
        psi, k, gnorm, _, notes = _psi_field_radial(sol, spec)
    details = {
        "solver": _solver_meta(sol),
        "curvature": {
            "K_min": float(np.min(k)),
            "K_max": float(np.max(k)),
            "grad_min": float(np.min(gnorm)),
            "grad_max": float(np.max(gnorm)),
            "notes": notes,
        },
    }
    if spec is not None:
        details["curvature"]["psi_min"] = float(np.min(psi))
        details["curvature"]["psi_max"] = float(np.max(psi))
    return [], details, {"solution": sol}


def _run_check_theorem(cfg: RunConfig):
    tols = cfg.tolerances
    c_tol = tols.get("c_tol")
    tol_abs = tols.get("tol_abs")
    spec = build_spec(cfg.spec)
    checks = []
    solutions = {}
    sol = None
    for name in cfg.checks:
        if name in ("min", "max", "both"):
            if spec is None:
                raise ConfigError("extremum checks need a spec block")
            if sol is None:
                sol = solve_problem(cfg)
                solutions["solution"] = sol
            rep = check_extremum_on_boundary(sol, spec, which=name, c_tol=c_tol, tol_abs=tol_abs)
            checks.append(rep.to_dict())
        elif name == "gradient-monotonicity":
            if sol is None:
                sol = solve_problem(cfg)
                solutions["solution"] = sol
            checks.append(check_gradient_monotonicity(sol, c_tol=c_tol).to_dict())
        elif name == "harmonic-psi":
            grids = cfg.grids or []
            if len(grids) < 2:
                raise ConfigError("harmonic-psi needs a grids list with >= 2 grids")
            family = [solve_problem(cfg, grid=g) for g in grids]
            checks.append(check_harmonic_psi_2d(family).to_dict())
    meta = {"solver": _solver_meta(sol)} if sol is not None else {}
    return checks, meta, solutions


def _run_check_corollary(cfg: RunConfig):
    tols = cfg.tolerances
    sol = solve_problem(cfg)
    if cfg.problem["equation"] == "minimal":
        bound = corollary_bound_minimal(sol, tol=tols.get("tol_abs") or 1e-6)
    else:
        bound = corollary_bound_poisson(sol, rel_tol=tols.get("corollary_rel") or 1e-3)
    return [bound.to_dict()], {"solver": _solver_meta(sol)}, {"solution": sol}


def _run_jet_verify(cfg: RunConfig):
    n_fields = int(cfg.options.get("fields", 100))
    dims = cfg.options.get("dims", [2, 3])
    seed0 = cfg.seed
    checks = []
    spec = TestFunctionSpec.minimal_theta(-0.5)
    for n in dims:
        worst_cod = worst_uiia = worst_phi = 0.0
        admissible = 0
        origin = np.zeros(n)
        for k in range(n_fields):
            fld = random_test_jet(seed0 + k, n)
            worst_cod = max(worst_cod, codazzi_residual(fld, origin))
            worst_uiia = max(worst_uiia, uiia_residual(fld, origin))
            try:
                worst_phi = max(worst_phi, phi_gradient_identity_residual(fld, origin, spec))
                admissible += 1
            except NonpositiveCurvature:
                continue
        checks.append(_check_entry(
            f"codazzi:n={n}", -worst_cod, CODAZZI_TOL, worst_cod < CODAZZI_TOL,
            residual=worst_cod, fields=n_fields))
        checks.append(_check_entry(
            f"uiia:n={n}", -worst_uiia, UIIA_TOL, worst_uiia < UIIA_TOL,
            residual=worst_uiia, fields=n_fields))
        checks.append(_check_entry(
            f"phi-gradient:n={n}", -worst_phi, PHI_GRAD_TOL, worst_phi < PHI_GRAD_TOL,
            residual=worst_phi, fields=admissible))

    # master identity on the closed-form suppliers
    cat2 = RadialMinimalField(2, flux=-1.0)
    r_cat = minimal_master_identity_residual(2, cat2, np.array([1.8, 2.4]), -0.5)
    checks.append(_check_entry("master:catenoid-2d", -r_cat, MASTER_TRIVIAL_TOL,
                               r_cat < MASTER_TRIVIAL_TOL, residual=r_cat))
    r_sch = minimal_master_identity_residual(2, ScherkField(), np.array([0.4, 0.9]), -0.5)
    checks.append(_check_entry("master:scherk-2d", -r_sch, MASTER_TOL,
                               r_sch < MASTER_TOL, residual=r_sch))
    cat3 = RadialMinimalField(3, flux=-1.0)
    r_rad = minimal_master_identity_residual(3, cat3, np.array([0.0, 0.0, 3.0]), 0.0)
    checks.append(_check_entry("master:radial-3d", -r_rad, MASTER_TOL,
                               r_rad < MASTER_TOL, residual=r_rad))
    return checks, {}, {}


def _run_lemma32(cfg: RunConfig):
    instances = int(cfg.options.get("instances", 200))
    rng = np.random.default_rng(cfg.seed)
    worst = -np.inf
    for _ in range(instances):
        m = int(rng.integers(1, 7))
        inst = QuadraticBoundInstance(
            lam=float(rng.uniform(0.0, 3.0)),
            mu=float(rng.uniform(-2.0, 2.0)),
            b=rng.uniform(0.1, 5.0, size=m),
            c=rng.uniform(-3.0, 3.0, size=m),
        )
        res = lemma_quadratic_bound(inst)
        worst = max(worst, quadratic_max_oracle(inst) - res.bound)
    checks = [_check_entry("lemma32:random-suite", -worst, LEMMA32_SLACK,
                           worst <= LEMMA32_SLACK, excess=float(worst), instances=instances)]
    for name, inst in (
        ("lemma32:worked-free", QuadraticBoundInstance(0.0, 1.0, np.array([1.0]), np.array([1.0]))),
        ("lemma32:worked-coupled", QuadraticBoundInstance(1.0, 1.0, np.array([1.0]), np.array([1.0]))),
    ):
        res = lemma_quadratic_bound(inst)
        gap = abs(quadratic_max_oracle(inst) - res.bound)
        checks.append(_check_entry(name, -gap, LEMMA32_EQUALITY, gap <= LEMMA32_EQUALITY,
                                   gamma=res.gamma, bound=res.bound))
    return checks, {}, {}


def _run_convergence(cfg: RunConfig):
    problem = cfg.options.get("problem", "laplace-annulus")
    rows = convergence_study(problem, cfg.grids)
    return [], {"convergence": {"problem": problem, "rows": rows}}, {}


_PIPELINES = {
    "solve": _run_solve,
    "curvature": _run_curvature,
    "check-theorem": _run_check_theorem,
    "check-corollary": _run_check_corollary,
    "jet-verify": _run_jet_verify,
    "lemma32": _run_lemma32,
    "convergence": _run_convergence,
}


def run(cfg: RunConfig) -> tuple[dict, dict]:
    """Execute a validated config; returns (report, solutions)."""
    report: dict = {"config": cfg.echo()}
    try:
        checks, details, solutions = _PIPELINES[cfg.command](cfg)
    except ConfigError:
        raise
    except LevelCurvError as exc:
        report["checks"] = []
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["verdict"] = "NumericalFailure"
        return report, {}
    report["checks"] = checks
    report.update(details)
    failed = [c for c in checks if not c.get("pass", True)]
    report["verdict"] = "Violation" if failed else "AllPass"
    return report, solutions


# ---------------------------------------------------------------------------
# argparse front end
# ---------------------------------------------------------------------------

def _parse_grid(text: str):
    try:
        ns, nt = text.lower().split("x")
        return [int(ns), int(nt)]
    except ValueError as exc:
        raise ConfigError(f"--grid expects NsxNt, got {text!r}") from exc


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levelcurv",
        description="Gaussian curvature of convex level sets: solvers and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "curvature", "check-theorem", "check-corollary",
                 "jet-verify", "lemma32", "convergence"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path prefix for JSON/CSV artifacts")
        p.add_argument("--seed", type=int, help="seed override")
        p.add_argument("--grid", help="NsxNt grid override")
        p.add_argument("--tol", type=float, help="check tolerance coefficient override (c_tol)")
        p.add_argument("--quiet", action="store_true", help="suppress console lines")
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        raw = {}
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        raw.setdefault("command", args.command)
        if raw["command"] != args.command:
            raise ConfigError(
                f"config command {raw['command']!r} disagrees with subcommand {args.command!r}"
            )
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.out is not None:
            raw["output"] = args.out
        if args.grid is not None:
            grid = _parse_grid(args.grid)
            problem = raw.get("problem")
            if problem and problem.get("geometry", {}).get("kind") == "ring2d":
                problem["geometry"]["grid"] = grid
            elif problem and problem.get("geometry", {}).get("kind") == "radial":
                problem["geometry"]["samples"] = grid[0]
            else:
                raw.setdefault("grids", []).append(grid)
        if args.tol is not None:
            raw.setdefault("tolerances", {})["c_tol"] = args.tol
        cfg = parse_config(raw)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    report, solutions = run(cfg)
    wall = time.perf_counter() - t0

    if not args.quiet:
        for check in report.get("checks", []):
            status = "PASS" if check.get("pass", True) else "FAIL"
            margin = check.get("margin")
            detail = f" margin={margin:.3e}" if isinstance(margin, float) else ""
            print(f"{status} {check['name']}{detail}")
        if "error" in report:
            print(f"ERROR {report['error']['type']}: {report['error']['message']}")
        print(f"verdict: {report['verdict']} ({wall:.2f}s)")

    if cfg.output:
        paths = emit_report(report, cfg.output, solutions=solutions)
        if not args.quiet:
            for p in paths:
                print(f"wrote {p}")

    if report["verdict"] == "AllPass":
        return 0
    if report["verdict"] == "Violation":
        return 1
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
