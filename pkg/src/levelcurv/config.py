"""Run configuration: one strict JSON document per run.

Unknown keys are rejected anywhere in the tree and every numeric field must
be finite; boundary data and right-hand sides are named closed forms (or
sampled arrays), so a config file fully reproduces a run without embedding
code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .fields import catenoid_value
from .geometry import TestFunctionSpec
from .rhs import SemilinearRHS, inverse_square_rhs, linear_u_rhs, zero_rhs
from .ring2d import Circle, Ellipse, RingDomain2D

COMMANDS = (
    "solve",
    "curvature",
    "check-theorem",
    "check-corollary",
    "jet-verify",
    "lemma32",
    "convergence",
)

CHECK_NAMES = ("min", "max", "both", "gradient-monotonicity", "harmonic-psi")


def _require_keys(node: dict, allowed: set, path: str):
    unknown = set(node) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} at {path or '<root>'}")


def _finite(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ConfigError(f"{path}: number must be finite")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


@dataclass
class RunConfig:
    command: str
    problem: dict | None = None
    spec: dict | None = None
    checks: list = field(default_factory=list)
    grids: list = field(default_factory=list)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    options: dict = field(default_factory=dict)

    def echo(self) -> dict:
        out: dict = {"command": self.command, "seed": self.seed}
        if self.problem is not None:
            out["problem"] = self.problem
        if self.spec is not None:
            out["spec"] = self.spec
        if self.checks:
            out["checks"] = list(self.checks)
        if self.grids:
            out["grids"] = [list(g) for g in self.grids]
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        if self.output is not None:
            out["output"] = self.output
        if self.options:
            out["options"] = dict(self.options)
        return out


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(
        raw,
        {"command", "problem", "spec", "checks", "grids", "seed", "tolerances",
         "output", "options"},
        "",
    )
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    cfg = RunConfig(command=command)

    if "seed" in raw:
        cfg.seed = _integer(raw["seed"], "seed")
    if "output" in raw and raw["output"] is not None:
        if not isinstance(raw["output"], str):
            raise ConfigError("output: expected a path string")
        cfg.output = raw["output"]

    if "problem" in raw and raw["problem"] is not None:
        cfg.problem = _validate_problem(raw["problem"])
    if "spec" in raw and raw["spec"] is not None:
        cfg.spec = _validate_spec(raw["spec"])
    if "checks" in raw:
        checks = raw["checks"]
        if not isinstance(checks, list) or not all(c in CHECK_NAMES for c in checks):
            raise ConfigError(f"checks: expected a list drawn from {CHECK_NAMES}")
        cfg.checks = checks
    if "grids" in raw:
        cfg.grids = _validate_grids(raw["grids"])
    if "tolerances" in raw:
        tol = raw["tolerances"]
        if not isinstance(tol, dict):
            raise ConfigError("tolerances: expected an object")
        _require_keys(tol, {"c_tol", "tol_abs", "solver_tol", "corollary_rel"}, "tolerances")
        for k, v in tol.items():
            if v is not None:
                _finite(v, f"tolerances.{k}")
        cfg.tolerances = tol
    if "options" in raw:
        opts = raw["options"]
        if not isinstance(opts, dict):
            raise ConfigError("options: expected an object")
        _require_keys(opts, {"fields", "dims", "instances", "theta", "problem"}, "options")
        cfg.options = opts
    _check_command_requirements(cfg)
    return cfg


def _check_command_requirements(cfg: RunConfig):
    needs_problem = cfg.command in ("solve", "curvature", "check-theorem", "check-corollary")
    if needs_problem and cfg.problem is None:
        raise ConfigError(f"{cfg.command} requires a problem block")
    if cfg.command == "check-theorem" and not cfg.checks:
        raise ConfigError("check-theorem requires a checks list")
    if cfg.command == "convergence" and not cfg.grids:
        raise ConfigError("convergence requires a grids list")


def _validate_grids(grids) -> list:
    if not isinstance(grids, list):
        raise ConfigError("grids: expected a list of [n_s, n_t] pairs")
    out = []
    for k, g in enumerate(grids):
        if not (isinstance(g, list) and len(g) == 2):
            raise ConfigError(f"grids[{k}]: expected [n_s, n_t]")
        out.append((_integer(g[0], f"grids[{k}][0]"), _integer(g[1], f"grids[{k}][1]")))
    return out


def _validate_problem(problem) -> dict:
    if not isinstance(problem, dict):
        raise ConfigError("problem: expected an object")
    _require_keys(problem, {"equation", "geometry", "boundary", "rhs"}, "problem")
    eq = problem.get("equation")
    if eq not in ("minimal", "semilinear"):
        raise ConfigError("problem.equation must be 'minimal' or 'semilinear'")
    geom = problem.get("geometry")
    if not isinstance(geom, dict):
        raise ConfigError("problem.geometry: expected an object")
    kind = geom.get("kind")
    if kind == "radial":
        _require_keys(geom, {"kind", "n", "a", "b", "samples"}, "problem.geometry")
        _integer(geom["n"], "geometry.n")
        a = _finite(geom["a"], "geometry.a")
        b = _finite(geom["b"], "geometry.b")
        if not 0 < a < b:
            raise ConfigError("geometry: need 0 < a < b")
        if "samples" in geom:
            _integer(geom["samples"], "geometry.samples")
    elif kind == "ring2d":
        _require_keys(geom, {"kind", "outer", "inner", "grid", "center"}, "problem.geometry")
        for side in ("outer", "inner"):
            _validate_curve(geom.get(side), f"problem.geometry.{side}")
        grid = geom.get("grid")
        if not (isinstance(grid, list) and len(grid) == 2):
            raise ConfigError("geometry.grid: expected [n_s, n_t]")
        _integer(grid[0], "geometry.grid[0]")
        _integer(grid[1], "geometry.grid[1]")
    else:
        raise ConfigError("geometry.kind must be 'radial' or 'ring2d'")
    boundary = problem.get("boundary")
    if boundary is not None:
        if not isinstance(boundary, dict):
            raise ConfigError("problem.boundary: expected an object")
        _require_keys(boundary, {"outer", "inner"}, "problem.boundary")
        for side in ("outer", "inner"):
            _validate_boundary_data(boundary.get(side), f"problem.boundary.{side}")
    rhs = problem.get("rhs")
    if rhs is not None:
        if eq != "semilinear":
            raise ConfigError("problem.rhs only applies to semilinear problems")
        if not isinstance(rhs, dict):
            raise ConfigError("problem.rhs: expected an object")
        _require_keys(rhs, {"name", "scale"}, "problem.rhs")
        if rhs.get("name") not in ("zero", "linear-u", "inverse-square"):
            raise ConfigError("rhs.name must be zero | linear-u | inverse-square")
        if "scale" in rhs:
            _finite(rhs["scale"], "rhs.scale")
    return problem


def _validate_curve(curve, path: str):
    if not isinstance(curve, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = curve.get("kind")
    if kind == "circle":
        _require_keys(curve, {"kind", "radius", "center"}, path)
        if _finite(curve["radius"], f"{path}.radius") <= 0:
            raise ConfigError(f"{path}.radius must be positive")
    elif kind == "ellipse":
        _require_keys(curve, {"kind", "rx", "ry", "center"}, path)
        for k in ("rx", "ry"):
            if _finite(curve[k], f"{path}.{k}") <= 0:
                raise ConfigError(f"{path}.{k} must be positive")
    else:
        raise ConfigError(f"{path}.kind must be 'circle' or 'ellipse'")
    if "center" in curve:
        c = curve["center"]
        if not (isinstance(c, list) and len(c) == 2):
            raise ConfigError(f"{path}.center: expected [x, y]")
        for k, v in enumerate(c):
            _finite(v, f"{path}.center[{k}]")


def _validate_boundary_data(data, path: str):
    if isinstance(data, str):
        if data in ("catenoid", "harmonic-annulus"):
            return
        if data.startswith("constant:"):
            _finite(float_or_error(data.split(":", 1)[1], path), path)
            return
        raise ConfigError(
            f"{path}: named data must be 'catenoid', 'harmonic-annulus' or 'constant:<v>'"
        )
    if isinstance(data, dict):
        _require_keys(data, {"samples"}, path)
        samples = data.get("samples")
        if not isinstance(samples, list) or not samples:
            raise ConfigError(f"{path}.samples: expected a nonempty list")
        for k, v in enumerate(samples):
            _finite(v, f"{path}.samples[{k}]")
        return
    raise ConfigError(f"{path}: expected a name string or a samples object")


def float_or_error(text: str, path: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{path}: bad number {text!r}") from exc


# ---------------------------------------------------------------------------
# materializing validated configs into objects
# ---------------------------------------------------------------------------

def build_spec(spec_cfg: dict | None) -> TestFunctionSpec | None:
    if spec_cfg is None:
        return None
    if not isinstance(spec_cfg, dict):
        raise ConfigError("spec: expected an object")
    kind = spec_cfg.get("kind")
    if kind == "minimal-theta":
        _require_keys(spec_cfg, {"kind", "theta"}, "spec")
        return TestFunctionSpec.minimal_theta(_finite(spec_cfg["theta"], "spec.theta"))
    if kind == "poisson-power":
        _require_keys(spec_cfg, {"kind", "power"}, "spec")
        return TestFunctionSpec.poisson_power(_finite(spec_cfg["power"], "spec.power"))
    raise ConfigError("spec.kind must be 'minimal-theta' or 'poisson-power'")


def _validate_spec(spec_cfg) -> dict:
    build_spec(spec_cfg)
    return spec_cfg


def build_curve(curve_cfg: dict):
    center = tuple(curve_cfg.get("center", [0.0, 0.0]))
    if curve_cfg["kind"] == "circle":
        return Circle(float(curve_cfg["radius"]), center)
    return Ellipse(float(curve_cfg["rx"]), float(curve_cfg["ry"]), center)


def build_domain(geom_cfg: dict) -> RingDomain2D:
    grid = geom_cfg["grid"]
    return RingDomain2D(
        outer=build_curve(geom_cfg["outer"]),
        inner=build_curve(geom_cfg["inner"]),
        n_s=int(grid[0]),
        n_t=int(grid[1]),
        center=tuple(geom_cfg.get("center", [0.0, 0.0])),
    )


def build_rhs(rhs_cfg: dict | None) -> SemilinearRHS:
    if rhs_cfg is None:
        return zero_rhs()
    name = rhs_cfg["name"]
    scale = float(rhs_cfg.get("scale", 1.0))
    if name == "zero":
        return zero_rhs()
    if name == "linear-u":
        return linear_u_rhs(scale)
    return inverse_square_rhs(scale if "scale" in rhs_cfg else 2.0)


def boundary_values_ring2d(data, curve, n_t: int, geom_cfg: dict) -> np.ndarray:
    """Resolve named/sampled boundary data on one curve's angular nodes."""
    t = np.arange(n_t) * (2.0 * math.pi / n_t)
    pts = curve.point(t)
    if isinstance(data, dict):
        samples = np.asarray(data["samples"], dtype=float)
        if samples.shape != (n_t,):
            raise ConfigError(
                f"boundary samples length {samples.shape[0]} != angular nodes {n_t}"
            )
        return samples
    if data.startswith("constant:"):
        return np.full(n_t, float(data.split(":", 1)[1]))
    radii = np.linalg.norm(pts, axis=-1)
    if data == "catenoid":
        return np.array([catenoid_value(float(r)) for r in radii])
    if data == "harmonic-annulus":
        outer_r = float(np.mean(np.linalg.norm(build_curve(geom_cfg["outer"]).point(t), axis=-1)))
        inner_r = float(np.mean(np.linalg.norm(build_curve(geom_cfg["inner"]).point(t), axis=-1)))
        return np.log(outer_r / radii) / math.log(outer_r / inner_r)
    raise ConfigError(f"unsupported boundary data {data!r}")


def boundary_value_radial(data, radius: float, geom_cfg: dict) -> float:
    if isinstance(data, dict):
        raise ConfigError("sampled boundary data is only for 2D rings")
    if data.startswith("constant:"):
        return float(data.split(":", 1)[1])
    n = int(geom_cfg["n"])
    a = float(geom_cfg["a"])
    if data == "catenoid":
        if n == 2:
            return catenoid_value(radius, anchor=a)
        from scipy.integrate import quad

        val, _ = quad(
            lambda s: 1.0 / math.sqrt(s ** (2 * (n - 1)) - 1.0),
            a,
            radius,
            epsabs=1e-12,
            epsrel=1e-12,
        )
        return float(val)
    if data == "harmonic-annulus":
        b = float(geom_cfg["b"])
        return math.log(b / radius) / math.log(b / a)
    raise ConfigError(f"unsupported boundary data {data!r}")
