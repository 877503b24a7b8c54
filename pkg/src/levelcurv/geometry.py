"""Pointwise differential geometry of level sets.

Everything here is a pure function of a jet (point values of grad/Hess/third
derivatives of a scalar field u).  The central object is the symmetric
curvature matrix a of the level hypersurface {u = const}: its eigenvalues are
the principal curvatures and det(a) the Gaussian curvature K.

Two charts are supported:

* raw      -- the matrix is assembled directly from the jet in the given
              coordinates (requires u_n != 0),
* aligned  -- the jet is first rotated so grad u = (0, ..., 0, |grad u|);
              there the matrix collapses to -(tangential Hessian)/u_n.

Sign convention: the raw formula produces a matrix that is positive definite
when the level set is convex with respect to the upward normal grad u.  Fields
that grow away from their convex level sets (e.g. the outward-increasing
catenoid) produce a negative definite matrix instead; we then negate it and
record the flip, so that a strictly convex level set always reports K > 0 and
log K is well defined.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateChart,
    GradientTooSmall,
    NonpositiveCurvature,
    OutOfDomain,
)

GRAD_FLOOR = 1e-8
CLASSIFY_TOL = 1e-9
_JACOBI_TOL = 1e-13


# ---------------------------------------------------------------------------
# jets and frames
# ---------------------------------------------------------------------------

def _symmetrize_matrix(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def _symmetrize_third(t: np.ndarray) -> np.ndarray:
    # One canonical average per sorted triple, assigned to every permutation,
    # so the result is bitwise symmetric.
    n = t.shape[0]
    out = np.empty_like(t)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                perms = set(itertools.permutations((i, j, k)))
                v = math.fsum(t[p] for p in perms) / len(perms)
                for p in perms:
                    out[p] = v
    return out


@dataclass(frozen=True)
class Jet:
    """Derivatives of a scalar field at one point, up to third order.

    grad has shape (n,), hess (n, n) exactly symmetric, third (n, n, n)
    exactly symmetric under all index permutations (or None when only a
    second-order jet is available).
    """

    grad: np.ndarray
    hess: np.ndarray
    third: np.ndarray | None = None

    def __post_init__(self):
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", hess)
        n = grad.shape[0]
        if n < 2:
            raise ValueError("jets require dimension n >= 2")
        if n > 9:
            raise ValueError("frames with n - 1 > 8 are out of scope")
        if hess.shape != (n, n):
            raise ValueError(f"hess shape {hess.shape} does not match n={n}")
        if not np.array_equal(hess, hess.T):
            raise ValueError("hess must be exactly symmetric")
        if self.third is not None:
            third = np.asarray(self.third, dtype=float)
            object.__setattr__(self, "third", third)
            if third.shape != (n, n, n):
                raise ValueError(f"third shape {third.shape} does not match n={n}")
            for perm in [(0, 2, 1), (1, 0, 2), (2, 1, 0)]:
                if not np.array_equal(third, np.transpose(third, perm)):
                    raise ValueError("third must be symmetric under index permutations")

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.grad))


def make_jet(grad, hess, third=None) -> Jet:
    """Build a Jet, symmetrizing hess/third so the exact-equality invariant holds."""
    hess = _symmetrize_matrix(np.asarray(hess, dtype=float))
    if third is not None:
        third = _symmetrize_third(np.asarray(third, dtype=float))
    return Jet(np.asarray(grad, dtype=float), hess, third)


def rotate_jet(jet: Jet, q: np.ndarray) -> Jet:
    """Covariant transform of a jet under y = Q x (grad -> Q grad, etc.)."""
    grad = q @ jet.grad
    hess = _symmetrize_matrix(q @ jet.hess @ q.T)
    third = None
    if jet.third is not None:
        third = np.einsum("ai,bj,ck,ijk->abc", q, q, q, jet.third)
        third = _symmetrize_third(third)
    return Jet(grad, hess, third)


@dataclass(frozen=True)
class LevelSetFrame:
    """Orthogonal change of coordinates putting grad u on the last axis."""

    rotation: np.ndarray
    aligned_jet: Jet


def align_frame(jet: Jet) -> LevelSetFrame:
    """Rotate coordinates so the gradient becomes (0, ..., 0, |grad|).

    Built from a deterministic sequence of Givens rotations in the (k, n)
    planes, with a final 180-degree rotation in the (1, n) plane if needed to
    make the last component positive.

    Raises GradientTooSmall when |grad| < 1e-8: the theorems assume a
    nonvanishing gradient and silently regularizing would mask that.
    """
    n = jet.dim
    gnorm = jet.grad_norm
    if gnorm < GRAD_FLOOR:
        raise GradientTooSmall(f"|grad| = {gnorm:.3e} below floor {GRAD_FLOOR:.0e}")
    g = jet.grad / gnorm
    q = np.eye(n)
    for k in range(n - 1):
        gk, gn = g[k], g[n - 1]
        r = math.hypot(gk, gn)
        if r == 0.0 or gk == 0.0:
            continue
        c, s = gn / r, gk / r
        rot = np.eye(n)
        rot[k, k] = c
        rot[k, n - 1] = -s
        rot[n - 1, k] = s
        rot[n - 1, n - 1] = c
        q = rot @ q
        g = rot @ g
    if g[n - 1] < 0.0:
        rot = np.eye(n)
        rot[0, 0] = -1.0
        rot[n - 1, n - 1] = -1.0
        q = rot @ q
        g = rot @ g
    aligned = rotate_jet(jet, q)
    # Pin the rounding dust so downstream aligned-point formulas are exact.
    grad = aligned.grad.copy()
    grad[: n - 1] = 0.0
    grad[n - 1] = gnorm
    aligned = Jet(grad, aligned.hess, aligned.third)
    return LevelSetFrame(rotation=q, aligned_jet=aligned)


# ---------------------------------------------------------------------------
# symmetric eigenvalues (closed form for sizes 1-3, cyclic Jacobi above)
# ---------------------------------------------------------------------------

def sym_eigvals(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a small symmetric matrix.

    Sizes 1-3 use closed forms; larger sizes use cyclic Jacobi sweeps iterated
    to an off-diagonal norm of 1e-13 relative to the Frobenius scale.  Both
    routes are deterministic.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if m == 1:
        return a[0, :1].copy()
    if m == 2:
        half_tr = (a[0, 0] + a[1, 1]) / 2.0
        d = math.hypot((a[0, 0] - a[1, 1]) / 2.0, a[0, 1])
        return np.array([half_tr - d, half_tr + d])
    if m == 3:
        return _eigvals3(a)
    return _jacobi_eigvals(a)


def _eigvals3(a: np.ndarray) -> np.ndarray:
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if p1 == 0.0:
        return np.sort(np.diag(a))
    q = np.trace(a) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = _det3(b) / 2.0
    r = min(1.0, max(-1.0, r))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.sort(np.array([e1, e2, e3]))


def _jacobi_eigvals(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    m = a.shape[0]
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(64):
        off = math.sqrt(max(0.0, (a * a).sum() - (np.diag(a) ** 2).sum()))
        if off <= _JACOBI_TOL * scale:
            break
        for p in range(m - 1):
            for qi in range(p + 1, m):
                if abs(a[p, qi]) <= 1e-18 * scale:
                    continue
                tau = (a[qi, qi] - a[p, p]) / (2.0 * a[p, qi])
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot = np.eye(m)
                rot[p, p] = rot[qi, qi] = c
                rot[p, qi] = s
                rot[qi, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def _det3(a: np.ndarray) -> float:
    return float(
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )


def sym_det(a: np.ndarray) -> float:
    """Determinant matching the eigenvalue route (closed form up to 3x3)."""
    m = a.shape[0]
    if m == 1:
        return float(a[0, 0])
    if m == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if m == 3:
        return _det3(a)
    return float(np.prod(_jacobi_eigvals(a)))


# ---------------------------------------------------------------------------
# curvature matrices
# ---------------------------------------------------------------------------

def graph_curvature_matrix(v_grad: np.ndarray, v_hess: np.ndarray) -> np.ndarray:
    """Curvature matrix of the graph x_n = v(x') with respect to the upward normal.

    a_il = (1/W) { v_il - v_i v_j v_jl / (W(1+W)) - v_l v_k v_ki / (W(1+W))
                   + v_i v_l v_j v_k v_jk / (W^2 (1+W)^2) },   W = sqrt(1+|grad v|^2).

    Its eigenvalues are the principal curvatures of the graph.
    """
    v_grad = np.asarray(v_grad, dtype=float)
    v_hess = np.asarray(v_hess, dtype=float)
    w = math.sqrt(1.0 + float(v_grad @ v_grad))
    hv = v_hess @ v_grad                      # (H v)_i = v_k v_ki
    quad = float(v_grad @ hv)                 # v_j v_k v_jk
    a = (
        v_hess
        - (np.outer(v_grad, hv) + np.outer(hv, v_grad)) / (w * (1.0 + w))
        + np.outer(v_grad, v_grad) * quad / (w * (1.0 + w)) ** 2
    ) / w
    return _symmetrize_matrix(a)


def level_set_normal(grad: np.ndarray) -> np.ndarray:
    """Upward unit normal of the level set: sign(u_n) * grad / |grad|."""
    grad = np.asarray(grad, dtype=float)
    gnorm = float(np.linalg.norm(grad))
    if gnorm < GRAD_FLOOR:
        raise GradientTooSmall(f"|grad| = {gnorm:.3e} below floor {GRAD_FLOOR:.0e}")
    un = grad[-1]
    if un == 0.0:
        raise DegenerateChart("u_n = 0: re-chart or align before taking the normal")
    return math.copysign(1.0, un) * grad / gnorm


def second_fundamental_h(jet: Jet) -> np.ndarray:
    """The (n-1)x(n-1) form h_ij = u_n^2 u_ij + u_nn u_i u_j - u_n u_j u_in - u_n u_i u_jn.

    Unnormalized: the actual second fundamental form of the level set is
    b_ij = -|u_n| h_ij / (|grad u| u_n^3), so the sign of h (relative to u_n)
    encodes convexity with respect to the chosen normal.
    """
    un = float(jet.grad[-1])
    if un == 0.0:
        raise DegenerateChart("u_n = 0: h_ij is chart-degenerate here")
    n = jet.dim
    gt = jet.grad[: n - 1]
    ht = jet.hess[: n - 1, : n - 1]
    hn = jet.hess[: n - 1, n - 1]
    unn = jet.hess[n - 1, n - 1]
    h = un * un * ht + unn * np.outer(gt, gt) - un * np.outer(hn, gt) - un * np.outer(gt, hn)
    return _symmetrize_matrix(h)


def _raw_curvature_entries(jet: Jet) -> np.ndarray:
    """Level-set curvature matrix in the raw chart (u_n != 0 required)."""
    n = jet.dim
    un = float(jet.grad[-1])
    gnorm = jet.grad_norm
    w = gnorm / abs(un)
    h = second_fundamental_h(jet)
    gt = jet.grad[: n - 1]
    hg = h @ gt
    denom = w * (1.0 + w) * un * un
    b = (np.outer(gt, hg) + np.outer(hg, gt)) / denom
    c = np.outer(gt, gt) * float(gt @ hg) / (w * (1.0 + w) * un * un) ** 2
    return _symmetrize_matrix((-h + b - c) / (gnorm * un * un))


class Convexity(Enum):
    STRICTLY_CONVEX = "StrictlyConvex"
    CONVEX = "Convex"
    NON_CONVEX = "NonConvex"


@dataclass(frozen=True)
class CurvatureData:
    """Curvature package of one level-set point.

    ``a`` and the derived quantities use the geometric orientation: if the raw
    matrix came out negative definite it was negated and ``flipped`` records
    that, so strictly convex level sets always have positive definite ``a``
    and K > 0.
    """

    w: float
    normal: np.ndarray
    h: np.ndarray
    a: np.ndarray
    principal: np.ndarray
    gauss: float
    flipped: bool

    @property
    def a_raw(self) -> np.ndarray:
        """Curvature matrix before the orientation flip."""
        return -self.a if self.flipped else self.a


def _orient(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
    kappa = sym_eigvals(a)
    if kappa[-1] < 0.0:  # negative definite: flip to the geometric convention
        a = -a
        kappa = np.sort(-kappa)
        return a, kappa, True
    return a, kappa, False


def curvature_matrix(jet: Jet, mode: str = "aligned") -> CurvatureData:
    """Full curvature data of the level set through a point.

    mode="aligned" rotates the jet first (works whenever |grad| is above the
    floor); mode="raw" evaluates the chart formula directly and requires
    u_n != 0 in the given coordinates.
    """
    gnorm = jet.grad_norm
    if gnorm < GRAD_FLOOR:
        raise GradientTooSmall(f"|grad| = {gnorm:.3e} below floor {GRAD_FLOOR:.0e}")
    if mode == "raw":
        un = float(jet.grad[-1])
        if un == 0.0:
            raise DegenerateChart("u_n = 0 in raw mode; align first")
        w = gnorm / abs(un)
        normal = math.copysign(1.0, un) * jet.grad / gnorm
        h = second_fundamental_h(jet)
        a_pre = _raw_curvature_entries(jet)
    elif mode == "aligned":
        frame = align_frame(jet)
        aj = frame.aligned_jet
        un = gnorm
        w = 1.0
        normal = jet.grad / gnorm
        ht = aj.hess[: jet.dim - 1, : jet.dim - 1]
        h = un * un * ht
        a_pre = -ht / un
    else:
        raise ValueError(f"unknown mode {mode!r}")
    a, kappa, flipped = _orient(a_pre)
    gauss = sym_det(a)
    return CurvatureData(w=w, normal=normal, h=h, a=a, principal=kappa, gauss=gauss, flipped=flipped)


def convexity_classify(a: np.ndarray, tol: float = CLASSIFY_TOL) -> Convexity:
    """Classify a (geometric-orientation) curvature matrix.

    StrictlyConvex when the smallest eigenvalue clearly dominates the noise
    scale, Convex when it is only degenerate to within that scale, NonConvex
    otherwise.
    """
    kappa = sym_eigvals(np.asarray(a, dtype=float))
    kmin, kmax = float(kappa[0]), float(kappa[-1])
    kabs = float(np.max(np.abs(kappa))) if kappa.size else 0.0
    if kmin > tol * max(1.0, kmax):
        return Convexity.STRICTLY_CONVEX
    if kmin >= -tol * max(1.0, kabs):
        return Convexity.CONVEX
    return Convexity.NON_CONVEX


# ---------------------------------------------------------------------------
# weighted test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunctionSpec:
    """Weight attached to the Gaussian curvature in the boundary-extremum checks.

    kind="minimal-theta":  psi = (t/(1+t))^theta * K,  rho(t) = theta*(log t - log(1+t))
    kind="poisson-power":  psi = t^(p/2) * K,          rho(t) = (p/2) * log t

    with t = |grad u|^2, so that log psi = rho(t) + log K always.
    """

    __test__ = False  # despite the name, not a pytest fixture

    kind: str
    param: float

    @staticmethod
    def minimal_theta(theta: float) -> "TestFunctionSpec":
        return TestFunctionSpec("minimal-theta", float(theta))

    @staticmethod
    def poisson_power(power: float) -> "TestFunctionSpec":
        return TestFunctionSpec("poisson-power", float(power))

    def rho(self, t):
        if self.kind == "minimal-theta":
            return self.param * (np.log(t) - np.log1p(t))
        return 0.5 * self.param * np.log(t)

    def rho_prime(self, t):
        if self.kind == "minimal-theta":
            return self.param * (1.0 / t - 1.0 / (1.0 + t))
        return 0.5 * self.param / t

    def rho_double_prime(self, t):
        if self.kind == "minimal-theta":
            return self.param * (-1.0 / t**2 + 1.0 / (1.0 + t) ** 2)
        return -0.5 * self.param / t**2

    def weight(self, t):
        if self.kind == "minimal-theta":
            return (t / (1.0 + t)) ** self.param
        return t ** (0.5 * self.param)

    def describe(self) -> str:
        if self.kind == "minimal-theta":
            return f"(t/(1+t))^{self.param:g} K"
        return f"|grad u|^{self.param:g} K"


def weighted_curvature(spec: TestFunctionSpec, grad_norm_sq, gauss):
    """psi = weight(|grad u|^2) * K.  Accepts scalars or arrays."""
    t = np.asarray(grad_norm_sq, dtype=float)
    if np.any(t <= 0.0):
        raise GradientTooSmall("weighted curvature needs |grad u|^2 > 0")
    out = spec.weight(t) * np.asarray(gauss, dtype=float)
    return float(out) if out.ndim == 0 else out


def log_weighted_curvature(spec: TestFunctionSpec, grad_norm_sq: float, gauss: float) -> float:
    """phi = rho(|grad u|^2) + log K; raises NonpositiveCurvature for K <= 0."""
    if gauss <= 0.0:
        raise NonpositiveCurvature(f"log K undefined for K = {gauss:.3e}")
    if grad_norm_sq <= 0.0:
        raise GradientTooSmall("phi needs |grad u|^2 > 0")
    return float(spec.rho(grad_norm_sq) + math.log(gauss))


# ---------------------------------------------------------------------------
# catenoid oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatenoidPoint:
    grad_norm_sq: float
    gauss: float
    psi_minus_half: float
    u_prime: float


def catenoid_oracle(n: int, r: float) -> CatenoidPoint:
    """Closed-form data of the n-dimensional catenoid at radius r > 1.

    The radial minimal graph with unit flux has u'(r) = 1/sqrt(r^(2(n-1)) - 1),
    level sets are spheres of radius r with K = r^(1-n), and the weight
    (t/(1+t))^(-1/2) equals r^(n-1) exactly, so psi_minus_half == 1.  The
    returned psi is recomputed through weighted_curvature rather than pinned,
    so it really exercises the pipeline.
    """
    if n < 2:
        raise ValueError("catenoid oracle needs n >= 2")
    if r <= 1.0:
        raise OutOfDomain(f"catenoid closed form needs r > 1, got r = {r:g}")
    denom = r ** (2 * (n - 1)) - 1.0
    grad_norm_sq = 1.0 / denom
    gauss = r ** (1 - n)
    u_prime = 1.0 / math.sqrt(denom)
    spec = TestFunctionSpec.minimal_theta(-0.5)
    psi = weighted_curvature(spec, grad_norm_sq, gauss)
    return CatenoidPoint(
        grad_norm_sq=grad_norm_sq, gauss=gauss, psi_minus_half=psi, u_prime=u_prime
    )


# ---------------------------------------------------------------------------
# vectorized 2D curvature (hot path of the 2D theorem checks)
# ---------------------------------------------------------------------------

def level_curve_curvature_2d(grads: np.ndarray, hesses: np.ndarray) -> np.ndarray:
    """Signed curvature of 2D level curves w.r.t. the normal grad u / |grad u|.

    kappa = -(u_xx u_y^2 - 2 u_x u_y u_xy + u_yy u_x^2) / |grad u|^3.

    This is the chart-free value of the 1x1 curvature matrix before the
    orientation flip; positive means convex toward grad u.  Vectorized over
    leading axes; agreement with curvature_matrix is covered by tests.
    """
    gx = grads[..., 0]
    gy = grads[..., 1]
    uxx = hesses[..., 0, 0]
    uxy = hesses[..., 0, 1]
    uyy = hesses[..., 1, 1]
    norm = np.sqrt(gx * gx + gy * gy)
    return -(uxx * gy * gy - 2.0 * gx * gy * uxy + uyy * gx * gx) / norm**3
