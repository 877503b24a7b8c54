"""Jet recovery from discrete solutions.

All recovery is local weighted least-squares polynomial fitting in physical
coordinates, centered and scaled at the evaluation point: a degree-(order+1)
fit reproduces polynomial data of that degree exactly (to conditioning), and
on smooth data the Hessian converges at second order.

Two granularities are provided: a single-point API, and batched recovery at
every grid node (the hot path of the theorem checks) which fits one small
normal-equation system per node with shared windows per row.
"""

from __future__ import annotations

import numpy as np

from .errors import TooCloseToBoundary
from .fields import radial_jet
from .geometry import Jet, make_jet
from .solution import RingSolution

_MIN_LAYERS = {2: 2, 3: 3}


# ---------------------------------------------------------------------------
# polynomial bases
# ---------------------------------------------------------------------------

def _basis_exponents_2d(degree: int) -> list[tuple[int, int]]:
    return [(i, j) for total in range(degree + 1) for i in range(total + 1) for j in [total - i]]


def _design_matrix_2d(dx: np.ndarray, dy: np.ndarray, degree: int) -> np.ndarray:
    cols = [dx**i * dy**j for i, j in _basis_exponents_2d(degree)]
    return np.stack(cols, axis=-1)


def _jet_from_coeffs_2d(coeffs: np.ndarray, scale: float, degree: int):
    """Gradient/Hessian/third at the expansion center from fit coefficients."""
    exps = _basis_exponents_2d(degree)
    index = {e: k for k, e in enumerate(exps)}

    def c(i, j):
        k = index.get((i, j))
        return coeffs[..., k] if k is not None else 0.0

    grad = np.stack([c(1, 0), c(0, 1)], axis=-1) / scale
    hess = np.empty(coeffs.shape[:-1] + (2, 2))
    hess[..., 0, 0] = 2.0 * c(2, 0)
    hess[..., 1, 1] = 2.0 * c(0, 2)
    hess[..., 0, 1] = hess[..., 1, 0] = c(1, 1)
    hess = hess / scale**2
    third = None
    if degree >= 3:
        third = np.empty(coeffs.shape[:-1] + (2, 2, 2))
        third[..., 0, 0, 0] = 6.0 * c(3, 0)
        third[..., 1, 1, 1] = 6.0 * c(0, 3)
        t001 = 2.0 * c(2, 1)
        t011 = 2.0 * c(1, 2)
        third[..., 0, 0, 1] = third[..., 0, 1, 0] = third[..., 1, 0, 0] = t001
        third[..., 0, 1, 1] = third[..., 1, 0, 1] = third[..., 1, 1, 0] = t011
        third = third / scale**3
    return grad, hess, third


# ---------------------------------------------------------------------------
# batched recovery on 2D grids
# ---------------------------------------------------------------------------

def _row_window(i: int, ns: int, half: int) -> slice:
    lo = min(max(i - half, 0), ns - (2 * half + 1))
    return slice(lo, lo + 2 * half + 1)


def grid_field_fit(
    solution: RingSolution,
    field: np.ndarray,
    degree: int = 3,
    rows: slice | None = None,
    with_third: bool = False,
):
    """Weighted LSQ fit of a node field at every grid node of selected rows.

    Returns (grad, hess[, third]) arrays over (rows, N_t).  Rows near the s
    boundaries use inward-shifted (one-sided) windows, so boundary rows are
    legal evaluation points.
    """
    if solution.kind != "ring2d":
        raise ValueError("grid_field_fit expects a 2D ring solution")
    x = solution.coords
    ns, nt = field.shape
    half = 2 if degree <= 3 else 3
    if ns < 2 * half + 1:
        raise TooCloseToBoundary(f"grid has too few s-layers for degree {degree}")
    row_range = range(ns)[rows] if rows is not None else range(ns)
    n_basis = len(_basis_exponents_2d(degree))
    grads = np.empty((len(row_range), nt, 2))
    hesses = np.empty((len(row_range), nt, 2, 2))
    thirds = np.empty((len(row_range), nt, 2, 2, 2)) if with_third else None

    # column windows are periodic shifts: build index offsets once
    offs = np.arange(-half, half + 1)
    for out_i, i in enumerate(row_range):
        rws = _row_window(i, ns, half)
        cols = (np.arange(nt)[:, None] + offs[None, :]) % nt     # (nt, w)
        xw = x[rws][:, cols]                                     # (w, nt, w, 2)
        fw = field[rws][:, cols]                                 # (w, nt, w)
        xw = np.transpose(xw, (1, 0, 2, 3)).reshape(nt, -1, 2)   # (nt, w*w, 2)
        fw = np.transpose(fw, (1, 0, 2)).reshape(nt, -1)         # (nt, w*w)
        center = x[i]                                            # (nt, 2)
        d = xw - center[:, None, :]
        scale = np.median(np.linalg.norm(d, axis=-1), axis=1)    # (nt,)
        scale = np.maximum(scale, 1e-300)
        dx = d[..., 0] / scale[:, None]
        dy = d[..., 1] / scale[:, None]
        b = _design_matrix_2d(dx, dy, degree)                    # (nt, w*w, nb)
        w = np.exp(-(dx**2 + dy**2))
        bw = b * w[..., None]
        g = np.einsum("pki,pkj->pij", bw, b)
        rhsv = np.einsum("pki,pk->pi", bw, fw)
        coeffs = np.linalg.solve(g, rhsv[..., None])[..., 0]     # (nt, nb)
        grad, hess, third = _jet_from_coeffs_2d(coeffs, 1.0, degree)
        grads[out_i] = grad / scale[:, None]
        hesses[out_i] = hess / scale[:, None, None] ** 2
        if with_third:
            thirds[out_i] = third / scale[:, None, None, None] ** 3
    if with_third:
        return grads, hesses, thirds
    return grads, hesses


# ---------------------------------------------------------------------------
# radial profile recovery
# ---------------------------------------------------------------------------

def radial_profile_fit(solution: RingSolution, degree: int = 3):
    """(up, upp, uppp) at every radius sample by sliding 1D polynomial fits."""
    r = solution.r
    u = solution.values
    m = r.shape[0]
    half = max(2, (degree + 2) // 2)
    width = 2 * half + 1
    if m < width:
        raise TooCloseToBoundary("too few radial samples for the fit window")
    up = np.empty(m)
    upp = np.empty(m)
    uppp = np.empty(m)
    for i in range(m):
        lo = min(max(i - half, 0), m - width)
        rw = r[lo : lo + width] - r[i]
        uw = u[lo : lo + width]
        scale = float(np.max(np.abs(rw))) or 1.0
        coeffs = np.polynomial.polynomial.polyfit(rw / scale, uw, degree)
        up[i] = coeffs[1] / scale
        upp[i] = 2.0 * coeffs[2] / scale**2
        uppp[i] = (6.0 * coeffs[3] / scale**3) if degree >= 3 else 0.0
    return up, upp, uppp


# ---------------------------------------------------------------------------
# single-point API
# ---------------------------------------------------------------------------

def recover_jet(solution: RingSolution, point, order: int = 2) -> Jet:
    """Jet of the discrete solution at a physical point.

    order 2 fits a cubic, order 3 a quartic; the point must sit at least
    2 (order 2) or 3 (order 3) grid layers away from the boundaries.  Exact
    (to ~1e-11) when the solution samples a polynomial of degree order+1.
    """
    if order not in (2, 3):
        raise ValueError("recover_jet supports order 2 or 3")
    min_layers = _MIN_LAYERS[order]
    degree = order + 1
    if solution.kind == "radial":
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape == (1,):
            x = np.zeros(solution.n)
            x[0] = point[0]
        else:
            x = point
        radius = float(np.linalg.norm(x))
        r = solution.r
        h = solution.h
        idx = int(round((radius - r[0]) / h))
        if idx < min_layers or idx > r.shape[0] - 1 - min_layers:
            raise TooCloseToBoundary(
                f"point at r={radius:g} is within {min_layers} layers of the boundary"
            )
        half = max(min_layers, (degree + 2) // 2)
        lo = min(max(idx - half, 0), r.shape[0] - (2 * half + 1))
        rw = r[lo : lo + 2 * half + 1] - radius
        uw = solution.values[lo : lo + 2 * half + 1]
        scale = float(np.max(np.abs(rw))) or 1.0
        coeffs = np.polynomial.polynomial.polyfit(rw / scale, uw, degree)
        up = coeffs[1] / scale
        upp = 2.0 * coeffs[2] / scale**2
        uppp = 6.0 * coeffs[3] / scale**3 if degree >= 3 else None
        return radial_jet(x, up, upp, uppp if order >= 3 else None, order)

    # 2D ring
    point = np.asarray(point, dtype=float)
    x = solution.coords
    ns, nt = solution.values.shape
    d2 = np.sum((x - point) ** 2, axis=-1)
    i0, j0 = np.unravel_index(int(np.argmin(d2)), d2.shape)
    if i0 < min_layers or i0 > ns - 1 - min_layers:
        raise TooCloseToBoundary(
            f"point maps to s-layer {i0}, within {min_layers} layers of the boundary"
        )
    half = 2 if degree <= 3 else 3
    rws = _row_window(i0, ns, half)
    cols = (j0 + np.arange(-half, half + 1)) % nt
    xw = x[rws][:, cols].reshape(-1, 2)
    fw = solution.values[rws][:, cols].reshape(-1)
    d = xw - point
    scale = float(np.median(np.linalg.norm(d, axis=-1)))
    dx, dy = d[:, 0] / scale, d[:, 1] / scale
    b = _design_matrix_2d(dx, dy, degree)
    w = np.exp(-(dx**2 + dy**2))
    bw = b * w[:, None]
    coeffs = np.linalg.solve(bw.T @ b, bw.T @ fw)
    grad, hess, third = _jet_from_coeffs_2d(coeffs, 1.0, degree)
    grad = grad / scale
    hess = hess / scale**2
    if order >= 3 and third is not None:
        third = third / scale**3
        return make_jet(grad, hess, third)
    return make_jet(grad, hess)
