import math

import numpy as np
import pytest
from scipy.integrate import quad

from levelcurv.errors import DidNotConverge, NoSolution
from levelcurv.fields import catenoid_value
from levelcurv.radial import solve_minimal_radial, solve_semilinear_radial
from levelcurv.rhs import linear_u_rhs, zero_rhs
from levelcurv.ring2d import (
    Circle,
    Ellipse,
    RingDomain2D,
    boundary_gradients,
    solve_minimal_ring2d,
    solve_semilinear_ring2d,
)


class TestMinimalRadial:
    def test_catenoid_flux_n3(self):
        target = quad(lambda s: 1 / math.sqrt(s**4 - 1), 2, 5, epsabs=1e-13, epsrel=1e-13)[0]
        sol = solve_minimal_radial(3, 2, 5, 0.0, target)
        assert sol.flux == pytest.approx(1.0, abs=1e-9)
        assert sol.residual_norm < 1e-9
        exact_up = 1.0 / np.sqrt(sol.r**4 - 1.0)
        assert np.max(np.abs(sol.u_prime - exact_up)) < 1e-9

    def test_constant_data(self):
        sol = solve_minimal_radial(3, 2, 5, 1.0, 1.0)
        assert sol.flux == 0.0
        assert np.ptp(sol.values) == 0.0

    def test_catenoid_closed_form_n2(self):
        sol = solve_minimal_radial(2, 2, 4, 0.0, catenoid_value(4.0, anchor=2.0))
        assert sol.flux == pytest.approx(1.0, abs=1e-10)
        exact = np.arccosh(sol.r) - math.acosh(2.0)
        assert np.max(np.abs(sol.values - exact)) < 1e-9

    def test_too_steep_data(self):
        with pytest.raises(NoSolution):
            solve_minimal_radial(3, 1.0, 8.0, 0.0, 100.0)

    def test_decreasing_data(self):
        sol = solve_minimal_radial(3, 2, 4, 1.0, 0.0)
        assert sol.flux < 0
        assert sol.values[0] == pytest.approx(1.0)
        assert sol.values[-1] == pytest.approx(0.0, abs=1e-11)

    def test_determinism(self):
        s1 = solve_minimal_radial(3, 2, 4, 1.0, 0.0)
        s2 = solve_minimal_radial(3, 2, 4, 1.0, 0.0)
        assert np.array_equal(s1.values, s2.values)
        assert s1.flux == s2.flux


class TestSemilinearRadial:
    def test_harmonic_annulus_n2(self):
        # log solution needs a fine grid for 1e-9 agreement at second order
        sol = solve_semilinear_radial(2, 1.0, math.e, 1.0, 0.0, zero_rhs(), samples=8001)
        exact = 1.0 - np.log(sol.r)
        assert np.max(np.abs(sol.values - exact)) < 1e-9

    def test_harmonic_n3_exact_at_nodes(self):
        # the discrete operator annihilates r^-1 exactly
        sol = solve_semilinear_radial(3, 1.0, 2.0, 1.0, 0.0, zero_rhs(), samples=201)
        exact = (1.0 / sol.r - 0.5) / 0.5
        assert np.max(np.abs(sol.values - exact)) < 1e-9

    def test_linear_u_matches_dense_direct_solve(self):
        lam = 0.3
        sol = solve_semilinear_radial(2, 1.0, 2.0, 1.0, 0.0, linear_u_rhs(lam), samples=101)
        m = sol.r.shape[0] - 2
        h = sol.h
        r = sol.r
        a = np.zeros((m, m))
        b = np.zeros(m)
        for i in range(m):
            ri = r[i + 1]
            a[i, i] = -2 / h**2 - lam
            if i > 0:
                a[i, i - 1] = 1 / h**2 - 1 / (2 * h * ri)
            else:
                b[i] -= (1 / h**2 - 1 / (2 * h * ri)) * 1.0
            if i < m - 1:
                a[i, i + 1] = 1 / h**2 + 1 / (2 * h * ri)
        direct = np.linalg.solve(a, b)
        assert np.max(np.abs(sol.values[1:-1] - direct)) < 1e-8

    def test_max_principle(self):
        sol = solve_semilinear_radial(2, 1.0, 2.0, 1.0, 0.0, linear_u_rhs(1.0), samples=201)
        assert sol.max_principle_violation() <= 1e-12

    def test_iteration_cap(self):
        with pytest.raises(DidNotConverge):
            solve_semilinear_radial(2, 1.0, 2.0, 1.0, 0.0, linear_u_rhs(1.0), max_iter=0)


class TestRingDomain:
    def test_rejects_inner_outside_outer(self):
        with pytest.raises(ValueError):
            RingDomain2D(Circle(1.0), Circle(2.0), n_s=9, n_t=16)

    def test_rejects_offcenter_star_violation(self):
        with pytest.raises(ValueError):
            RingDomain2D(Circle(2.0), Circle(0.5, center=(1.8, 0.0)), n_s=9, n_t=16)

    def test_accepts_ellipse_ring(self):
        dom = RingDomain2D(Ellipse(4.0, 3.2), Circle(1.5), n_s=9, n_t=16)
        assert dom.min_gap > 0


class TestRing2D:
    def test_laplace_annulus_order_two(self):
        errs = []
        hs = []
        for ns, nt in [(17, 32), (33, 64), (65, 128)]:
            dom = RingDomain2D(Circle(math.e), Circle(1.0), n_s=ns, n_t=nt)
            sol = solve_semilinear_ring2d(dom, np.zeros(nt), np.ones(nt), zero_rhs())
            r = np.linalg.norm(sol.coords, axis=-1)
            errs.append(np.max(np.abs(sol.values - (1.0 - np.log(r)))))
            hs.append(sol.h)
        orders = [math.log(errs[i] / errs[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(2)]
        assert min(orders) > 1.8

    def test_minimal_circles_match_radial(self):
        errs = []
        for ns, nt in [(17, 32), (33, 64)]:
            dom = RingDomain2D(Circle(4.0), Circle(2.0), n_s=ns, n_t=nt)
            outer = np.full(nt, catenoid_value(4.0, anchor=2.0))
            sol = solve_minimal_ring2d(dom, outer, np.zeros(nt))
            r = np.linalg.norm(sol.coords, axis=-1)
            errs.append(np.max(np.abs(sol.values - (np.arccosh(r) - math.acosh(2.0)))))
        assert errs[1] < errs[0] / 3.0  # about h^2

    def test_constant_data_zero_iterations(self):
        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=9, n_t=16)
        sol = solve_minimal_ring2d(dom, np.full(16, 0.7), np.full(16, 0.7))
        assert sol.iterations == 0
        assert np.all(sol.values == 0.7)

    def test_ellipse_ring_bounds_and_max_principle(self):
        dom = RingDomain2D(Ellipse(4.0, 3.2), Circle(1.5), n_s=33, n_t=64)
        sol = solve_minimal_ring2d(dom, np.zeros(64), np.ones(64))
        assert sol.residual_norm < 1e-10
        assert sol.values.min() >= -1e-12
        assert sol.values.max() <= 1.0 + 1e-12
        assert sol.max_principle_violation() <= 1e-12

    def test_semilinear_matches_radial(self):
        lam = 0.5
        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=33, n_t=64)
        sol2d = solve_semilinear_ring2d(dom, np.zeros(64), np.ones(64), linear_u_rhs(lam))
        sol1d = solve_semilinear_radial(2, 1.0, 2.0, 1.0, 0.0, linear_u_rhs(lam), samples=2001)
        r = np.linalg.norm(sol2d.coords, axis=-1)
        interp = np.interp(r.ravel(), sol1d.r, sol1d.values)
        err = np.max(np.abs(sol2d.values.ravel() - interp))
        assert err < 40.0 * sol2d.h**2

    def test_boundary_gradient_accuracy(self):
        dom = RingDomain2D(Circle(4.0), Circle(2.0), n_s=65, n_t=128)
        outer = np.full(128, catenoid_value(4.0, anchor=2.0))
        sol = solve_minimal_ring2d(dom, outer, np.zeros(128))
        g_out, g_in = boundary_gradients(sol)
        assert np.max(np.abs(g_out - 1 / math.sqrt(15.0))) < 5e-4
        assert np.max(np.abs(g_in - 1 / math.sqrt(3.0))) < 5e-3

    def test_determinism_bitwise(self):
        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=17, n_t=32)
        s1 = solve_semilinear_ring2d(dom, np.zeros(32), np.ones(32), linear_u_rhs(1.0))
        s2 = solve_semilinear_ring2d(dom, np.zeros(32), np.ones(32), linear_u_rhs(1.0))
        assert np.array_equal(s1.values, s2.values)
