"""Semilinear right-hand sides f(x, u) and their structure flags.

The theorems hypothesize structure (nonnegativity, monotonicity in u,
convexity of t^3 f(x)); since f is user-supplied code those flags are
verified by dense sampling, never trusted, and reports mark them as sampled.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

import numpy as np

FLAG_TOL = 1e-12


@dataclass(frozen=True)
class RHSFlags:
    nonnegative: bool
    f_of_u_only: bool
    f_of_x_only: bool
    f_u_nonneg: bool
    f_u_nonpos: bool
    f0_zero: bool
    t3f_convex: bool

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


@dataclass(frozen=True)
class SemilinearRHS:
    """f and its u-derivative, both vectorized over (points, values)."""

    name: str
    f: object  # callable (x: (m, n), u: (m,)) -> (m,)
    f_u: object
    is_zero: bool = False

    def __repr__(self):
        return f"SemilinearRHS({self.name})"


def zero_rhs() -> SemilinearRHS:
    return SemilinearRHS(
        name="zero",
        f=lambda x, u: np.zeros_like(np.asarray(u, dtype=float)),
        f_u=lambda x, u: np.zeros_like(np.asarray(u, dtype=float)),
        is_zero=True,
    )


def linear_u_rhs(scale: float = 1.0) -> SemilinearRHS:
    return SemilinearRHS(
        name=f"linear-u:{scale:g}",
        f=lambda x, u: scale * np.asarray(u, dtype=float),
        f_u=lambda x, u: np.full_like(np.asarray(u, dtype=float), scale),
    )


def inverse_square_rhs(shift: float = 2.0, axis: int = 0) -> SemilinearRHS:
    """f(x) = (shift + x_axis)^-2: f^(-1/2) is linear, so t^3 f(x) is convex."""

    def f(x, u):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return (shift + x[:, axis]) ** -2.0

    def f_u(x, u):
        return np.zeros_like(np.asarray(u, dtype=float))

    return SemilinearRHS(name=f"inverse-square:{shift:g}", f=f, f_u=f_u)


RHS_REGISTRY = {
    "zero": lambda scale=1.0: zero_rhs(),
    "linear-u": lambda scale=1.0: linear_u_rhs(scale),
    "inverse-square": lambda scale=2.0: inverse_square_rhs(scale),
}


def admissibility_check(
    rhs: SemilinearRHS,
    box: np.ndarray,
    u_range: tuple[float, float] = (0.0, 1.0),
    samples: int = 1000,
    seed: int = 0,
) -> RHSFlags:
    """Sample f and f_u over box x u_range and fill the structure flags.

    box has shape (n, 2) of [lo, hi] per coordinate.  The t^3 f(x) convexity
    flag samples the (x, t)-Hessian of t^3 f at random points and tests
    positive semidefiniteness; the x-derivatives of f come from central
    differences, so that test uses an FD-scaled tolerance rather than 1e-12.
    """
    box = np.asarray(box, dtype=float)
    n = box.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.uniform(box[:, 0], box[:, 1], size=(samples, n))
    u = rng.uniform(u_range[0], u_range[1], size=samples)
    fv = np.asarray(rhs.f(x, u), dtype=float)
    fuv = np.asarray(rhs.f_u(x, u), dtype=float)

    nonnegative = bool(np.min(fv) >= -FLAG_TOL)
    f_u_nonneg = bool(np.min(fuv) >= -FLAG_TOL)
    f_u_nonpos = bool(np.max(fuv) <= FLAG_TOL)
    f0_zero = bool(np.max(np.abs(rhs.f(x, np.zeros(samples)))) <= FLAG_TOL)

    # dependence flags: shuffle one argument, hold the other
    x_alt = rng.uniform(box[:, 0], box[:, 1], size=(samples, n))
    u_alt = rng.uniform(u_range[0], u_range[1], size=samples)
    scale = 1.0 + float(np.max(np.abs(fv)))
    f_of_u_only = bool(
        np.max(np.abs(np.asarray(rhs.f(x_alt, u)) - fv)) <= FLAG_TOL * scale
    )
    f_of_x_only = bool(
        np.max(np.abs(np.asarray(rhs.f(x, u_alt)) - fv)) <= FLAG_TOL * scale
    )

    t3f_convex = _t3f_convex_sampled(rhs, box, rng)
    return RHSFlags(
        nonnegative=nonnegative,
        f_of_u_only=f_of_u_only,
        f_of_x_only=f_of_x_only,
        f_u_nonneg=f_u_nonneg,
        f_u_nonpos=f_u_nonpos,
        f0_zero=f0_zero,
        t3f_convex=t3f_convex,
    )


def _t3f_convex_sampled(rhs: SemilinearRHS, box: np.ndarray, rng, points: int = 200) -> bool:
    n = box.shape[0]
    widths = box[:, 1] - box[:, 0]
    h = 1e-4 * float(np.max(widths))
    # keep stencils inside the box
    lo = box[:, 0] + 2 * h
    hi = box[:, 1] - 2 * h
    if np.any(hi <= lo):
        return False
    xs = rng.uniform(lo, hi, size=(points, n))
    ts = rng.uniform(0.1, 3.0, size=points)
    zeros = np.zeros(points)

    def f_at(pts):
        return np.asarray(rhs.f(pts, zeros), dtype=float)

    f0 = f_at(xs)
    if np.any(f0 <= 0.0):
        return False  # the equivalence with concave f^(-1/2) needs f > 0
    grad = np.zeros((points, n))
    hess_x = np.zeros((points, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fp, fm = f_at(xs + e), f_at(xs - e)
        grad[:, i] = (fp - fm) / (2 * h)
        hess_x[:, i, i] = (fp - 2 * f0 + fm) / h**2
        for j in range(i + 1, n):
            e2 = np.zeros(n)
            e2[j] = h
            fpp = f_at(xs + e + e2)
            fpm = f_at(xs + e - e2)
            fmp = f_at(xs - e + e2)
            fmm = f_at(xs - e - e2)
            val = (fpp - fpm - fmp + fmm) / (4 * h**2)
            hess_x[:, i, j] = hess_x[:, j, i] = val
    # Hessian of g(x, t) = t^3 f(x)
    tol = -1e-6 * (1.0 + float(np.max(np.abs(f0))))
    for k in range(points):
        t = ts[k]
        g = np.zeros((n + 1, n + 1))
        g[:n, :n] = t**3 * hess_x[k]
        g[:n, n] = g[n, :n] = 3 * t**2 * grad[k]
        g[n, n] = 6 * t * f0[k]
        if np.min(np.linalg.eigvalsh(g)) < tol * max(1.0, t**3):
            return False
    return True
