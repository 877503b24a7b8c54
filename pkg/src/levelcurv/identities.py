"""Pointwise identity checks on exact fields.

Each residual pits two independent computations of the same quantity against
each other:

* the Codazzi symmetry of the curvature-matrix derivatives, computed both
  from the closed-form derivative expression and by exact (dual-number)
  differentiation of the chart formula,
* the gradient identity for phi = rho(|grad u|^2) + log det(a), where the
  reference side is Jacobi's formula d(log det a) = tr(a^{-1} da),
* the third-derivative exchange relation u_iia = -u_n a_ii,a + 2 u_n^{-1}
  u_ni u_ia - u_na a_ii at aligned points,
* the full-strength master identity for the linearized minimal surface
  operator applied to phi, with derivatives of a and phi taken by sixth-order
  central differences on a closed-form supplier,
* the quadratic-polynomial bound Q <= 4 mu^2 Gamma.

All identity checks use the pre-flip sign convention of the curvature matrix,
because that is the convention the formulas are derived in; the orientation
flip is a presentation device for user-facing K only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual import Dual, dual_log, dual_sqrt
from .errors import (
    GradientTooSmall,
    InvalidInstance,
    NonpositiveCurvature,
    NotAMinimalJet,
)
from .geometry import (
    GRAD_FLOOR,
    Jet,
    TestFunctionSpec,
    align_frame,
    level_curve_curvature_2d,
    rotate_jet,
)
from .polyfield import PolyField

# ---------------------------------------------------------------------------
# generic curvature-matrix entries (float or Dual scalars, u_n > 0 chart)
# ---------------------------------------------------------------------------


def _entries_generic(grad: list, hess: list, n: int) -> list:
    """Level-set curvature matrix entries from scalar jet entries.

    Works elementwise over any scalar type supporting +,-,*,/ and dual_sqrt
    (floats and Duals).  Assumes the u_n > 0 branch, which holds at and near
    aligned points.
    """
    un = grad[n - 1]
    g2 = grad[0] * grad[0]
    for gi in grad[1:]:
        g2 = g2 + gi * gi
    norm = dual_sqrt(g2)
    w = norm / un
    m = n - 1
    h = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            h[i][j] = (
                un * un * hess[i][j]
                + hess[n - 1][n - 1] * grad[i] * grad[j]
                - un * grad[j] * hess[i][n - 1]
                - un * grad[i] * hess[j][n - 1]
            )
    hg = [None] * m
    for i in range(m):
        acc = h[i][0] * grad[0]
        for l in range(1, m):
            acc = acc + h[i][l] * grad[l]
        hg[i] = acc
    quad = hg[0] * grad[0]
    for i in range(1, m):
        quad = quad + hg[i] * grad[i]
    denom = w * (1.0 + w) * un * un
    scale = norm * un * un
    a = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            bij = (grad[i] * hg[j] + grad[j] * hg[i]) / denom
            cij = grad[i] * grad[j] * quad / (denom * denom)
            a[i][j] = (-h[i][j] + bij - cij) / scale
    return a


def _det_generic(a: list, m: int):
    if m == 1:
        return a[0][0]
    if m == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if m == 3:
        return (
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        )
    raise ValueError("determinant expansion implemented for sizes 1-3")


def curvature_entries_float(jet: Jet) -> np.ndarray:
    """Pre-flip curvature matrix from a jet with u_n > 0 (e.g. an aligned jet)."""
    n = jet.dim
    a = _entries_generic(list(jet.grad), [list(row) for row in jet.hess], n)
    return np.array([[float(a[i][j]) for j in range(n - 1)] for i in range(n - 1)])


def curvature_entries_dual(jet: Jet, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Value and exact directional derivative of the curvature-matrix field.

    Seeds each jet entry with its own derivative along coordinate ``axis``
    (so third derivatives feed the Hessian seeds) and pushes dual numbers
    through the chart formula: the derivative part is the exact chain-rule
    derivative of a_ij along that axis, with no truncation error.
    """
    if jet.third is None:
        raise ValueError("order-3 jet required to differentiate the curvature field")
    n = jet.dim
    grad = [Dual(jet.grad[al], jet.hess[al, axis]) for al in range(n)]
    hess = [
        [Dual(jet.hess[al, be], jet.third[al, be, axis]) for be in range(n)]
        for al in range(n)
    ]
    a = _entries_generic(grad, hess, n)
    m = n - 1
    val = np.array([[a[i][j].val for j in range(m)] for i in range(m)])
    der = np.array([[a[i][j].der for j in range(m)] for i in range(m)])
    return val, der


@dataclass(frozen=True)
class CurvatureDerivatives:
    """Spatial derivatives a_ij,k of the curvature-matrix field, plus sigma1."""

    a_k: np.ndarray  # shape (n, n-1, n-1): derivative along each axis
    sigma1: float


def curvature_derivatives(jet: Jet) -> CurvatureDerivatives:
    n = jet.dim
    ders = []
    val = None
    for axis in range(n):
        val, der = curvature_entries_dual(jet, axis)
        ders.append(der)
    return CurvatureDerivatives(a_k=np.array(ders), sigma1=float(np.trace(val)))


# ---------------------------------------------------------------------------
# Codazzi symmetry
# ---------------------------------------------------------------------------


def _aligned_order3(field: PolyField, point) -> Jet:
    jet = field.jet(np.asarray(point, dtype=float), order=3)
    return align_frame(jet).aligned_jet


def codazzi_closed_form(jet: Jet) -> np.ndarray:
    """a_ij,k at an aligned point via the closed form
    -u_n^{-1} u_ijk + u_n^{-2} (u_ij u_kn + u_ik u_jn + u_jk u_in)."""
    n = jet.dim
    un = float(jet.grad[-1])
    m = n - 1
    h = jet.hess
    t = jet.third
    out = np.empty((m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                out[i, j, k] = -t[i, j, k] / un + (
                    h[i, j] * h[k, n - 1] + h[i, k] * h[j, n - 1] + h[j, k] * h[i, n - 1]
                ) / (un * un)
    return out


def codazzi_field_form(jet: Jet) -> np.ndarray:
    """a_ij,k by exact differentiation of the curvature-matrix field."""
    n = jet.dim
    m = n - 1
    out = np.empty((m, m, m))
    for k in range(m):
        _, der = curvature_entries_dual(jet, k)
        out[:, :, k] = der
    return out


def _commutator(t: np.ndarray) -> float:
    return float(np.max(np.abs(t - np.transpose(t, (0, 2, 1)))))


def codazzi_residual(field: PolyField, point) -> float:
    """max |a_ij,k - a_ik,j| at the aligned point, worst of the two routes."""
    aj = _aligned_order3(field, point)
    return max(_commutator(codazzi_closed_form(aj)), _commutator(codazzi_field_form(aj)))


# ---------------------------------------------------------------------------
# phi-gradient identity
# ---------------------------------------------------------------------------


def _rho_dual(spec: TestFunctionSpec, t: Dual) -> Dual:
    if spec.kind == "minimal-theta":
        return (dual_log(t) - dual_log(1.0 + t)) * spec.param
    return dual_log(t) * (0.5 * spec.param)


def _convex_oriented(field: PolyField, point) -> tuple[PolyField, Jet, np.ndarray]:
    """Return the field (possibly negated) whose pre-flip matrix is positive
    definite at the point, with its aligned jet and matrix."""
    aj = _aligned_order3(field, point)
    a0 = curvature_entries_float(aj)
    eig = np.linalg.eigvalsh(a0)
    if eig[-1] < 0.0:
        field = -field
        aj = _aligned_order3(field, point)
        a0 = curvature_entries_float(aj)
        eig = np.linalg.eigvalsh(a0)
    if eig[0] <= 0.0:
        raise NonpositiveCurvature(
            "level set not strictly convex at the point (eigenvalues "
            f"{np.array2string(eig, precision=3)})"
        )
    return field, aj, a0


def phi_gradient_identity_residual(field: PolyField, point, spec: TestFunctionSpec) -> float:
    """Residual of phi_a = sum a^{ij} a_ij,a + rho'(t) t_a, maximized over axes.

    The left side differentiates phi = rho(t) + log det(a) directly through
    the composite expression with dual numbers; the right side contracts the
    matrix inverse with the field derivatives (Jacobi's formula), so the two
    sides share no linear algebra.
    """
    _, aj, a0 = _convex_oriented(field, point)
    n = aj.dim
    a0inv = np.linalg.inv(a0)
    t0 = aj.grad_norm**2
    worst = 0.0
    for axis in range(n):
        grad = [Dual(aj.grad[al], aj.hess[al, axis]) for al in range(n)]
        hess = [
            [Dual(aj.hess[al, be], aj.third[al, be, axis]) for be in range(n)]
            for al in range(n)
        ]
        a_dual = _entries_generic(grad, hess, n)
        t_dual = grad[0] * grad[0]
        for gi in grad[1:]:
            t_dual = t_dual + gi * gi
        det_dual = _det_generic(a_dual, n - 1)
        if det_dual.val <= 0.0:
            raise NonpositiveCurvature("det(a) <= 0 while forming log K")
        lhs = (_rho_dual(spec, t_dual) + dual_log(det_dual)).der
        a_der = np.array(
            [[a_dual[i][j].der for j in range(n - 1)] for i in range(n - 1)]
        )
        rhs = float(np.sum(a0inv * a_der)) + spec.rho_prime(t0) * t_dual.der
        worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# third-derivative exchange relation at aligned points
# ---------------------------------------------------------------------------


def uiia_residual(field: PolyField, point) -> float:
    """Residual of u_iia = -u_n a_ii,a + 2 u_n^{-1} u_ni u_ia - u_na a_ii.

    All ingredients come from exact polynomial derivatives at the aligned
    point; a_ii and a_ii,a use the pre-flip sign convention the relation is
    derived in.
    """
    aj = _aligned_order3(field, point)
    n = aj.dim
    un = float(aj.grad[-1])
    a0 = curvature_entries_float(aj)
    worst = 0.0
    for axis in range(n):
        _, a_der = curvature_entries_dual(aj, axis)
        for i in range(n - 1):
            lhs = aj.third[i, i, axis]
            rhs = (
                -un * a_der[i, i]
                + 2.0 / un * aj.hess[i, n - 1] * aj.hess[i, axis]
                - aj.hess[n - 1, axis] * a0[i, i]
            )
            worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# quadratic-polynomial bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticBoundInstance:
    """Q(X) = -sum b_i X_i^2 - lam (sum X_i)^2 + 4 mu sum c_i X_i."""

    lam: float
    mu: float
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if self.lam < 0.0:
            raise InvalidInstance(f"lambda must be >= 0, got {self.lam:g}")
        if b.shape != c.shape:
            raise InvalidInstance("b and c must have the same length")
        if np.any(b <= 0.0):
            raise InvalidInstance("all b_i must be positive")

    def q(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(
            -np.sum(self.b * x * x) - self.lam * np.sum(x) ** 2 + 4.0 * self.mu * np.sum(self.c * x)
        )


@dataclass(frozen=True)
class QuadraticBoundResult:
    gamma: float
    bound: float


def lemma_quadratic_bound(inst: QuadraticBoundInstance) -> QuadraticBoundResult:
    """Gamma = sum c_i^2/b_i - lam (1 + lam sum 1/b_i)^{-1} (sum c_i/b_i)^2;
    the bound 4 mu^2 Gamma dominates sup Q."""
    inv_b = 1.0 / inst.b
    gamma = float(
        np.sum(inst.c**2 * inv_b)
        - inst.lam / (1.0 + inst.lam * np.sum(inv_b)) * np.sum(inst.c * inv_b) ** 2
    )
    return QuadraticBoundResult(gamma=gamma, bound=4.0 * inst.mu**2 * gamma)


def quadratic_max_oracle(inst: QuadraticBoundInstance) -> float:
    """Independent maximization of the concave quadratic.

    Normally solves the stationarity system of Q exactly; falls back to a
    dense grid search on [-10, 10]^m if the quadratic form is near-singular.
    """
    m = inst.b.shape[0]
    if m == 0:
        return 0.0
    if np.min(inst.b) < 1e-8:
        pts_per_dim = 41 if m <= 3 else 9
        axes = [np.linspace(-10.0, 10.0, pts_per_dim)] * m
        grids = np.meshgrid(*axes, indexing="ij")
        x = np.stack([g.ravel() for g in grids], axis=-1)
        s = x.sum(axis=1)
        q = -(x * x) @ inst.b - inst.lam * s * s + 4.0 * inst.mu * (x @ inst.c)
        return float(np.max(q))
    a = np.diag(inst.b) + inst.lam * np.ones((m, m))
    x_star = np.linalg.solve(2.0 * a, 4.0 * inst.mu * inst.c)
    return inst.q(x_star)


# ---------------------------------------------------------------------------
# sixth-order finite differences
# ---------------------------------------------------------------------------

_FD_OFFSETS = np.array([-3, -2, -1, 0, 1, 2, 3], dtype=float)
_FD1_W = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_FD2_W = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0


def fd6_first(values: np.ndarray, h: float):
    return np.tensordot(_FD1_W, values, axes=(0, 0)) / h


def fd6_second(values: np.ndarray, h: float):
    return np.tensordot(_FD2_W, values, axes=(0, 0)) / (h * h)


def _richardson(coarse, fine):
    """One halving step for an O(h^6) formula: error drops to O(h^8)."""
    return (64.0 * fine - coarse) / 63.0


# ---------------------------------------------------------------------------
# jets of phi = rho(|grad u|^2) + log det(a)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhiJet:
    """Value, gradient and (symmetric) Hessian of phi at one point."""

    phi: float
    grad_phi: np.ndarray
    hess_phi: np.ndarray

    def __post_init__(self):
        asym = float(np.max(np.abs(self.hess_phi - self.hess_phi.T)))
        if asym > 1e-12 * (1.0 + float(np.max(np.abs(self.hess_phi)))):
            raise ValueError(f"hess_phi asymmetric by {asym:.3e}")


def phi_jet_fd(
    n: int,
    supplier,
    point,
    spec: TestFunctionSpec,
    fd_step: float | None = None,
) -> PhiJet:
    """Jet of phi on a closed-form supplier, in the frame aligned at the point.

    Diagonal second derivatives use the sixth-order stencil directly; mixed
    ones nest two first-derivative stencils (still sixth order).  The result
    is symmetrized from its one-sided evaluations, which agree to rounding.
    """
    point = np.asarray(point, dtype=float)
    jet0 = supplier.jet(point, order=2)
    if jet0.grad_norm < GRAD_FLOOR:
        raise GradientTooSmall("gradient below floor at the phi-jet point")
    frame = align_frame(jet0)
    rot = frame.rotation

    def phi_at(y: np.ndarray) -> float:
        j = rotate_jet(supplier.jet(point + rot.T @ y, order=2), rot)
        a = curvature_entries_float(j)
        m = a.shape[0]
        det = _det_generic(a.tolist(), m) if m <= 3 else float(np.linalg.det(a))
        if det <= 0.0:
            raise NonpositiveCurvature("det(a) <= 0 while forming phi")
        t = float(j.grad @ j.grad)
        return float(spec.rho(t) + math.log(det))

    h = fd_step if fd_step is not None else 1e-2 * max(1.0, float(np.linalg.norm(point)))
    eye = np.eye(n)
    grad_phi = np.zeros(n)
    hess_phi = np.zeros((n, n))
    lines = {}
    for axis in range(n):
        vals = np.array([phi_at(off * h * eye[axis]) for off in _FD_OFFSETS])
        lines[axis] = vals
        grad_phi[axis] = fd6_first(vals, h)
        hess_phi[axis, axis] = fd6_second(vals, h)
    for a_ax in range(n):
        for b_ax in range(a_ax + 1, n):
            inner = np.array(
                [
                    fd6_first(
                        np.array(
                            [
                                phi_at(oa * h * eye[a_ax] + ob * h * eye[b_ax])
                                for ob in _FD_OFFSETS
                            ]
                        ),
                        h,
                    )
                    for oa in _FD_OFFSETS
                ]
            )
            val = fd6_first(inner, h)
            hess_phi[a_ax, b_ax] = hess_phi[b_ax, a_ax] = val
    phi0 = float(lines[0][3])
    return PhiJet(phi=phi0, grad_phi=grad_phi, hess_phi=hess_phi)


# ---------------------------------------------------------------------------
# master identity for the minimal surface operator
# ---------------------------------------------------------------------------

MINIMAL_RESIDUAL_LIMIT = 1e-8


def minimal_equation_residual(jet: Jet) -> float:
    """Residual of div(grad u / sqrt(1 + |grad u|^2)) from an order-2 jet."""
    g = jet.grad
    h = jet.hess
    w2 = 1.0 + float(g @ g)
    f_contract = w2 * float(np.trace(h)) - float(g @ h @ g)
    return f_contract / w2**1.5


def _diagonalizing_rotation(jet: Jet) -> tuple[np.ndarray, Jet]:
    """Rotation aligning the gradient and diagonalizing the tangential Hessian."""
    frame = align_frame(jet)
    n = jet.dim
    ht = frame.aligned_jet.hess[: n - 1, : n - 1]
    _, vecs = np.linalg.eigh((ht + ht.T) / 2.0)
    r2 = np.eye(n)
    r2[: n - 1, : n - 1] = vecs.T
    rot = r2 @ frame.rotation
    return rot, rotate_jet(jet, rot)


def minimal_master_identity_residual(
    n: int,
    supplier,
    point,
    theta: float,
    fd_step: float | None = None,
) -> float:
    """|LHS - RHS| of the second-order identity for F^{ab} phi_ab on a minimal jet.

    LHS is sum_a F^{aa} phi_aa (F is diagonal in the normalized frame) and RHS
    is the expanded right-hand side in terms of a_ij, its first derivatives,
    u_ni, sigma1 and grad phi, with rho(t) = theta (log t - log(1+t)).
    Derivatives of the a and phi fields are sixth-order central differences on
    the supplier; when fd_step is not given, the default 1e-2 * length-scale
    step is combined with one halving via Richardson extrapolation.
    """
    point = np.asarray(point, dtype=float)
    spec = TestFunctionSpec.minimal_theta(theta)
    jet0 = supplier.jet(point, order=2)
    if jet0.dim != n:
        raise ValueError(f"supplier dimension {jet0.dim} != n = {n}")
    if jet0.grad_norm < GRAD_FLOOR:
        raise GradientTooSmall("gradient below floor at the master-identity point")
    eq_res = minimal_equation_residual(jet0)
    if abs(eq_res) > MINIMAL_RESIDUAL_LIMIT:
        raise NotAMinimalJet(f"minimal equation residual {eq_res:.3e} at the point")

    rot, aligned0 = _diagonalizing_rotation(jet0)
    m = n - 1
    un = float(aligned0.grad[-1])
    diag = np.diag(aligned0.hess)[:m]
    if np.max(diag) >= 0.0:
        raise NonpositiveCurvature(
            "tangential Hessian not negative definite: level set not strictly convex"
        )
    a_ii = -diag / un
    a_inv = 1.0 / a_ii
    sigma1 = float(np.sum(a_ii))
    uni = aligned0.hess[:m, n - 1].copy()
    t0 = un * un
    rho_p = spec.rho_prime(t0)
    rho_pp = spec.rho_double_prime(t0)

    def field_at(y: np.ndarray) -> tuple[np.ndarray, float]:
        x = point + rot.T @ y
        j = rotate_jet(supplier.jet(x, order=2), rot)
        a = curvature_entries_float(j)
        return a, float(j.grad @ j.grad)

    def phi_of(a: np.ndarray, t: float) -> float:
        det = float(np.linalg.det(a)) if m > 3 else _det_generic(a.tolist(), m)
        if det <= 0.0:
            raise NonpositiveCurvature("det(a) <= 0 inside the FD stencil")
        return float(spec.rho(t) + math.log(det))

    def derivatives(h: float):
        phi1 = np.zeros(n)
        phi2 = np.zeros(n)
        a_der = np.zeros((n, m, m))
        for axis in range(n):
            samples = []
            for off in _FD_OFFSETS:
                y = np.zeros(n)
                y[axis] = off * h
                samples.append(field_at(y))
            a_stack = np.array([s[0] for s in samples])
            phi_vals = np.array([phi_of(a, t) for a, t in samples])
            phi1[axis] = fd6_first(phi_vals, h)
            phi2[axis] = fd6_second(phi_vals, h)
            a_der[axis] = fd6_first(a_stack, h)
        return phi1, phi2, a_der

    if fd_step is None:
        h = 1e-2 * max(1.0, float(np.linalg.norm(point)))
        coarse = derivatives(h)
        fine = derivatives(h / 2.0)
        phi1, phi2, a_der = (_richardson(c, f) for c, f in zip(coarse, fine))
    else:
        phi1, phi2, a_der = derivatives(float(fd_step))

    f_diag = np.full(n, 1.0 + un * un)
    f_diag[n - 1] = 1.0
    lhs = float(f_diag @ phi2)

    tang = a_der[:m]  # derivatives along tangential axes
    norm_der = a_der[n - 1]  # derivatives along the normal axis
    aij_sq_tang = 0.0
    for k in range(m):
        aij_sq_tang += float(np.sum(np.outer(a_inv, a_inv) * tang[k] ** 2))
    aij_sq_norm = float(np.sum(np.outer(a_inv, a_inv) * norm_der**2))

    t1 = -(1.0 + un * un) * aij_sq_tang
    t2 = -aij_sq_norm
    t3 = 4.0 * float(np.trace(norm_der))
    t4 = 4.0 / un * float(np.sum(a_inv * uni * np.array([np.trace(tang[i]) for i in range(m)])))
    t5 = ((2.0 * rho_p * t0 - n - 1.0) + (2.0 * rho_p * t0 - n + 1.0) * t0) * float(
        np.sum(a_ii**2)
    )
    t6 = (
        (6.0 * rho_p * t0 + 4.0 * rho_pp * t0 * t0)
        + (8.0 * rho_p * t0 + 4.0 * rho_pp * t0 * t0 - n + 3.0) / t0
    ) * float(np.sum(uni**2))
    t7 = (
        4.0 * rho_pp * t0 * t0 * (1.0 + t0) ** 2
        + 6.0 * rho_p * t0 * (1.0 + t0) ** 2
        + 2.0
    ) * sigma1**2
    t8 = -2.0 / t0 * sigma1 * float(np.sum(a_inv * uni**2))
    t9 = -2.0 / un * float(np.sum(uni * phi1[:m])) - 2.0 * sigma1 * phi1[n - 1]

    rhs = t1 + t2 + t3 + t4 + t5 + t6 + t7 + t8 + t9
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Laplace-Beltrami harmonicity of psi on 2D minimal graphs (closed form)
# ---------------------------------------------------------------------------


def lb_psi_residual_2d(
    supplier,
    points,
    theta: float = -0.5,
    fd_step: float | None = None,
) -> float:
    """max |sum F^{ab} psi_ab| over sample points, psi = (t/(1+t))^theta * k.

    Works in the frame aligned at each sample point so that F is diagonal;
    the level-curve curvature k is evaluated chart-free at the stencil nodes
    with a fixed global sign so the psi field stays smooth.
    """
    spec = TestFunctionSpec.minimal_theta(theta)
    points = [np.asarray(p, dtype=float) for p in np.atleast_2d(points)]
    jet_first = supplier.jet(points[0], order=2)
    k0 = level_curve_curvature_2d(jet_first.grad[None, :], jet_first.hess[None, :, :])[0]
    if k0 == 0.0:
        raise NonpositiveCurvature("level curve is flat at the first sample point")
    sign = math.copysign(1.0, k0)

    def psi_at(x: np.ndarray) -> float:
        j = supplier.jet(x, order=2)
        k = sign * level_curve_curvature_2d(j.grad[None, :], j.hess[None, :, :])[0]
        if k <= 0.0:
            raise NonpositiveCurvature("level curve lost convexity inside the stencil")
        t = float(j.grad @ j.grad)
        return float(spec.weight(t) * k)

    worst = 0.0
    for p in points:
        jet0 = supplier.jet(p, order=2)
        if jet0.grad_norm < GRAD_FLOOR:
            raise GradientTooSmall("gradient below floor at a psi-harmonicity point")
        frame = align_frame(jet0)
        rot = frame.rotation
        un = frame.aligned_jet.grad[-1]
        f_diag = np.array([1.0 + un * un, 1.0])

        def second_derivs(h: float) -> np.ndarray:
            out = np.zeros(2)
            for axis in range(2):
                vals = np.array(
                    [psi_at(p + rot.T @ (off * h * np.eye(2)[axis])) for off in _FD_OFFSETS]
                )
                out[axis] = fd6_second(vals, h)
            return out

        if fd_step is None:
            h = 1e-2 * max(1.0, float(np.linalg.norm(p)))
            d2 = _richardson(second_derivs(h), second_derivs(h / 2.0))
        else:
            d2 = second_derivs(float(fd_step))
        worst = max(worst, abs(float(f_diag @ d2)))
    return worst
