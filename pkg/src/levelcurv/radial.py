"""Radial solvers on annuli a < r < b for any dimension n >= 2.

The minimal surface equation reduces to a first integral: r^(n-1) u' /
sqrt(1 + u'^2) is a constant c, so u'(r) = c / sqrt(r^(2(n-1)) - c^2) and the
boundary data pin c through one scalar quadrature equation, solved here by
bisection.  Graph solutions exist only for |c| < a^(n-1); data steeper than
that is reported as NoSolution, a legitimate outcome rather than a failure.

The semilinear equation u'' + (n-1) u'/r = f(x, u) is solved by damped Newton
on a second-order central-difference discretization.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.linalg import solve_banded

from .errors import DidNotConverge, NoSolution
from .solution import RingSolution

_QUAD_TOL = 1e-12
_FLUX_EDGE = 1.0 - 1e-12


def _profile_integral(c: float, n: int, a: float, b: float) -> float:
    """integral_a^b c / sqrt(s^(2(n-1)) - c^2) ds (adaptive quadrature)."""
    if c == 0.0:
        return 0.0
    m = 2 * (n - 1)
    with warnings.catch_warnings():
        # near the flux limit the integrand is root-singular at s = a; the
        # feasibility probe only needs a few digits there
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            lambda s: c / math.sqrt(s**m - c * c),
            a,
            b,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
    return float(val)


def solve_minimal_radial(
    n: int,
    a: float,
    b: float,
    u_a: float,
    u_b: float,
    samples: int = 401,
) -> RingSolution:
    """Radial minimal-surface profile with u(a) = u_a, u(b) = u_b.

    Finds the flux constant by bisection so the profile integral matches the
    data, then samples u (panelwise Gauss quadrature) and u' (closed form).
    """
    if not (0.0 < a < b):
        raise ValueError(f"need 0 < a < b, got a={a:g}, b={b:g}")
    if n < 2:
        raise ValueError("minimal radial solver needs n >= 2")
    delta = u_b - u_a
    c_max = a ** (n - 1)
    if delta == 0.0:
        c = 0.0
    else:
        target = abs(delta)
        hi = c_max * _FLUX_EDGE
        reachable = _profile_integral(hi, n, a, b)
        if reachable < target:
            raise NoSolution(
                f"boundary jump {target:g} exceeds the steepest radial graph "
                f"({reachable:g}); no graph solution on [{a:g}, {b:g}]"
            )
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _profile_integral(mid, n, a, b) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-16 * c_max:
                break
        c = math.copysign(0.5 * (lo + hi), delta)

    r = np.linspace(a, b, samples)
    m = 2 * (n - 1)
    u_prime = c / np.sqrt(r**m - c * c) if c != 0.0 else np.zeros_like(r)

    # cumulative profile by fixed Gauss-Legendre panels (integrand is smooth)
    u = np.empty_like(r)
    u[0] = u_a
    if c == 0.0:
        u[:] = u_a
    else:
        nodes, weights = np.polynomial.legendre.leggauss(12)
        for i in range(samples - 1):
            mid = 0.5 * (r[i] + r[i + 1])
            half = 0.5 * (r[i + 1] - r[i])
            s = mid + half * nodes
            u[i + 1] = u[i] + half * float(
                weights @ (c / np.sqrt(s**m - c * c))
            )

    # pointwise residual of div(grad u / sqrt(1 + |grad u|^2)) in radial form
    u_second = -(c * m / 2.0) * r ** (m - 1) * (r**m - c * c) ** -1.5 if c != 0.0 else np.zeros_like(r)
    w3 = (1.0 + u_prime**2) ** 1.5
    residual = ((n - 1) * u_prime * (1.0 + u_prime**2) / r + u_second) / w3
    res_norm = float(np.max(np.abs(residual)))

    return RingSolution(
        kind="radial",
        equation="minimal",
        values=u,
        residual_norm=res_norm,
        h=float(r[1] - r[0]),
        iterations=0,
        n=n,
        a=a,
        b=b,
        r=r,
        u_prime=np.asarray(u_prime),
        flux=c,
    )


def solve_semilinear_radial(
    n: int,
    a: float,
    b: float,
    u_a: float,
    u_b: float,
    rhs,
    samples: int = 401,
    tol: float = 1e-10,
    max_iter: int = 30,
) -> RingSolution:
    """Damped Newton for u'' + (n-1) u'/r = f(x, u), u(a) = u_a, u(b) = u_b.

    f is evaluated at x = r e_1; radially nonsymmetric right-hand sides belong
    to the 2D solver.
    """
    if not (0.0 < a < b):
        raise ValueError(f"need 0 < a < b, got a={a:g}, b={b:g}")
    r = np.linspace(a, b, samples)
    h = float(r[1] - r[0])
    u = u_a + (u_b - u_a) * (r - a) / (b - a)
    x = np.zeros((samples, n))
    x[:, 0] = r

    def residual(uv: np.ndarray) -> np.ndarray:
        f_vals = rhs.f(x[1:-1], uv[1:-1])
        return (
            (uv[2:] - 2.0 * uv[1:-1] + uv[:-2]) / h**2
            + (n - 1) / r[1:-1] * (uv[2:] - uv[:-2]) / (2.0 * h)
            - f_vals
        )

    # rounding floor of the discrete operator: the residual cannot be driven
    # below ~eps * |u| / h^2 in double precision on fine grids
    u_scale = 1.0 + max(abs(u_a), abs(u_b))
    tol = max(tol, 32.0 * np.finfo(float).eps * u_scale * (4.0 / h**2 + (n - 1) / (h * a)))
    res = residual(u)
    res_norm = float(np.max(np.abs(res))) if res.size else 0.0
    it = 0
    while res_norm > tol:
        if it >= max_iter:
            raise DidNotConverge(
                f"radial Newton stalled at residual {res_norm:.3e}",
                iterations=it,
                residual=res_norm,
            )
        fu = rhs.f_u(x[1:-1], u[1:-1])
        lower = 1.0 / h**2 - (n - 1) / (2.0 * h * r[1:-1])
        diag = -2.0 / h**2 - fu
        upper = 1.0 / h**2 + (n - 1) / (2.0 * h * r[1:-1])
        m = samples - 2
        ab = np.zeros((3, m))
        ab[0, 1:] = upper[:-1]
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        delta = solve_banded((1, 1), ab, -res)
        step = 1.0
        for _ in range(8):
            trial = u.copy()
            trial[1:-1] += step * delta
            trial_res = residual(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < res_norm:
                u, res, res_norm = trial, trial_res, trial_norm
                break
            step *= 0.5
        else:
            raise DidNotConverge(
                f"radial Newton line search failed at residual {res_norm:.3e}",
                iterations=it,
                residual=res_norm,
            )
        it += 1

    u_prime = np.gradient(u, r, edge_order=2)
    u_prime[2:-2] = (u[:-4] - 8.0 * u[1:-3] + 8.0 * u[3:-1] - u[4:]) / (12.0 * h)
    return RingSolution(
        kind="radial",
        equation="semilinear",
        values=u,
        residual_norm=res_norm,
        h=h,
        iterations=it,
        rhs=rhs,
        n=n,
        a=a,
        b=b,
        r=r,
        u_prime=u_prime,
        flux=None,
    )
