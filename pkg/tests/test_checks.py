import math

import numpy as np
import pytest

from levelcurv.checks import (
    CheckReport,
    check_extremum_on_boundary,
    check_gradient_monotonicity,
    check_harmonic_psi_2d,
    convergence_study,
    corollary_bound_minimal,
    corollary_bound_poisson,
)
from levelcurv.errors import HypothesisViolated, TooCoarse
from levelcurv.fields import RadialMinimalField, catenoid_value
from levelcurv.geometry import TestFunctionSpec
from levelcurv.radial import solve_minimal_radial, solve_semilinear_radial
from levelcurv.rhs import linear_u_rhs, zero_rhs
from levelcurv.ring2d import Circle, Ellipse, RingDomain2D, solve_minimal_ring2d, solve_semilinear_ring2d

THETA_HALF = TestFunctionSpec.minimal_theta(-0.5)


@pytest.fixture(scope="module")
def harmonic_annulus_2d():
    dom = RingDomain2D(Circle(math.e), Circle(1.0), n_s=33, n_t=64)
    return solve_semilinear_ring2d(dom, np.zeros(64), np.ones(64), zero_rhs())


@pytest.fixture(scope="module")
def catenoid_ring_2d():
    dom = RingDomain2D(Circle(4.0), Circle(2.0), n_s=33, n_t=64)
    outer = np.full(64, catenoid_value(4.0, anchor=2.0))
    return solve_minimal_ring2d(dom, outer, np.zeros(64))


@pytest.fixture(scope="module")
def radial_minimal_ring():
    return solve_minimal_radial(3, 2.0, 4.0, 1.0, 0.0, samples=201)


class TestExtremumChecks:
    def test_catenoid_ring_min_and_max(self, catenoid_ring_2d):
        rep = check_extremum_on_boundary(catenoid_ring_2d, THETA_HALF, which="both")
        assert rep.passed
        # psi is identically 1 on the catenoid: both margins are O(h^2) noise
        assert abs(rep.margin) < rep.tolerance

    def test_harmonic_annulus_power_minus2(self, harmonic_annulus_2d):
        # psi = |grad u|^-2 K = r / C^2 grows outward: min on the inner boundary
        rep = check_extremum_on_boundary(
            harmonic_annulus_2d, TestFunctionSpec.poisson_power(-2), which="min"
        )
        assert rep.passed
        assert rep.margin > 0
        assert np.linalg.norm(rep.boundary_location) == pytest.approx(1.0, abs=0.02)

    def test_harmonic_annulus_power_n_minus_1(self, harmonic_annulus_2d):
        # psi = |grad u| K = C / r^2 decays outward: min on the outer boundary
        rep = check_extremum_on_boundary(
            harmonic_annulus_2d, TestFunctionSpec.poisson_power(1), which="min"
        )
        assert rep.passed
        assert np.linalg.norm(rep.boundary_location) == pytest.approx(math.e, abs=0.05)

    @pytest.mark.parametrize("theta", [-0.5, 0.0, 0.5, 1.0])
    def test_radial_theta_family(self, radial_minimal_ring, theta):
        rep = check_extremum_on_boundary(
            radial_minimal_ring, TestFunctionSpec.minimal_theta(theta),
            which="min", tol_abs=1e-6,
        )
        assert rep.passed

    def test_too_coarse_guard(self):
        sol = solve_minimal_radial(3, 2.0, 4.0, 1.0, 0.0, samples=11)
        with pytest.raises(TooCoarse):
            check_extremum_on_boundary(sol, THETA_HALF, which="min")

    def test_thin_ring_guard(self):
        # gap far below the angular spacing starves the recovery stencils
        dom = RingDomain2D(Circle(1.03), Circle(1.0), n_s=33, n_t=16)
        sol = solve_semilinear_ring2d(dom, np.zeros(16), np.ones(16), zero_rhs())
        with pytest.raises(TooCoarse):
            corollary_bound_poisson(sol)

    def test_orientation_stability(self, catenoid_ring_2d):
        """Negating the field flips the raw sign convention but not verdicts."""
        sol = catenoid_ring_2d
        flipped = type(sol)(
            kind=sol.kind, equation=sol.equation, values=-sol.values,
            residual_norm=sol.residual_norm, h=sol.h, iterations=sol.iterations,
            rhs=sol.rhs, domain=sol.domain, coords=sol.coords,
        )
        rep = check_extremum_on_boundary(sol, THETA_HALF, which="min")
        rep_f = check_extremum_on_boundary(flipped, THETA_HALF, which="min")
        assert rep.passed == rep_f.passed
        assert rep.margin == pytest.approx(rep_f.margin, abs=1e-12)
        notes = set(rep.notes) ^ set(rep_f.notes)
        assert "orientation flipped" in notes  # exactly one of the two flipped

    def test_tolerance_scaling_under_refinement(self):
        """Where a check passes only by tolerance, halving h halves the shortfall."""
        shortfalls = []
        for ns, nt in [(17, 32), (33, 64)]:
            dom = RingDomain2D(Circle(4.0), Circle(2.0), n_s=ns, n_t=nt)
            outer = np.full(nt, catenoid_value(4.0, anchor=2.0))
            sol = solve_minimal_ring2d(dom, outer, np.zeros(nt))
            rep = check_extremum_on_boundary(sol, THETA_HALF, which="both")
            assert rep.passed
            shortfalls.append(max(0.0, -rep.margin))
        if shortfalls[0] > 0:
            assert shortfalls[1] <= 0.55 * shortfalls[0]


class TestCorollaryBounds:
    def test_harmonic_annulus_closed_form(self, harmonic_annulus_2d):
        cb = corollary_bound_poisson(harmonic_annulus_2d)
        assert cb.passed
        # closed form: |grad u| = 1/r, K = 1/r on (1, e)
        assert cb.grad_max_inner == pytest.approx(1.0, abs=0.01)
        assert cb.grad_min_outer == pytest.approx(1.0 / math.e, abs=0.01)
        assert cb.min_k_boundary == pytest.approx(1.0 / math.e, abs=0.01)
        assert cb.bound_value == pytest.approx(
            (cb.grad_min_outer / cb.grad_max_inner) ** 2 * cb.min_k_boundary, abs=1e-14
        )
        assert cb.min_k_interior >= cb.bound_value

    def test_linear_u_ring(self):
        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=33, n_t=64)
        sol = solve_semilinear_ring2d(dom, np.zeros(64), np.ones(64), linear_u_rhs(1.0))
        cb = corollary_bound_poisson(sol)
        assert cb.passed

    def test_rejects_bad_rhs(self):
        from levelcurv.rhs import SemilinearRHS

        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=33, n_t=64)
        decay = SemilinearRHS(
            name="decay",
            f=lambda x, u: 0.2 * (1.0 - np.asarray(u, dtype=float)),
            f_u=lambda x, u: np.full_like(np.asarray(u, dtype=float), -0.2),
        )
        sol = solve_semilinear_ring2d(dom, np.zeros(64), np.ones(64), decay)
        with pytest.raises(HypothesisViolated):
            corollary_bound_poisson(sol)

    def test_rejects_wrong_boundary_data(self):
        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=33, n_t=64)
        sol = solve_semilinear_ring2d(dom, np.full(64, 0.2), np.ones(64), zero_rhs())
        with pytest.raises(HypothesisViolated):
            corollary_bound_poisson(sol)

    @pytest.mark.parametrize("n", [3, 4])
    def test_minimal_radial_bound(self, n):
        sol = solve_minimal_radial(n, 2.0, 4.0, 1.0, 0.0, samples=201)
        cb = corollary_bound_minimal(sol)
        assert cb.passed
        assert cb.min_k_interior >= cb.bound_value - 1e-6
        expected = (
            (cb.grad_min_outer / cb.grad_max_inner)
            * math.sqrt(1 + cb.grad_min_outer**2)
            / math.sqrt(1 + cb.grad_max_inner**2)
            * cb.min_k_boundary
        )
        assert cb.bound_value == pytest.approx(expected, abs=1e-14)

    def test_minimal_bound_rejects_n2(self):
        sol = solve_minimal_radial(2, 2.0, 4.0, 1.0, 0.0, samples=201)
        with pytest.raises(HypothesisViolated):
            corollary_bound_minimal(sol)


class TestGradientMonotonicity:
    def test_harmonic_annulus(self, harmonic_annulus_2d):
        rep = check_gradient_monotonicity(harmonic_annulus_2d)
        assert rep.passed
        assert rep.interior_extremum > 0  # strict positivity of the derivative

    def test_linear_u_radial(self):
        sol = solve_semilinear_radial(2, 1.0, 2.0, 1.0, 0.0, linear_u_rhs(1.0), samples=201)
        rep = check_gradient_monotonicity(sol)
        assert rep.passed

    def test_constant_data_guard(self):
        dom = RingDomain2D(Circle(2.0), Circle(1.0), n_s=33, n_t=64)
        sol = solve_semilinear_ring2d(dom, np.zeros(64), np.zeros(64), zero_rhs())
        with pytest.raises(HypothesisViolated):
            check_gradient_monotonicity(sol)


class TestHarmonicPsi:
    def test_closed_form_catenoid(self):
        cat = RadialMinimalField(2, flux=-1.0)
        pts = [np.array([2.5, 0.4]), np.array([-1.8, 2.2])]
        rep = check_harmonic_psi_2d(cat, pts)
        assert rep.passed
        assert rep.interior_extremum < 1e-10

    def test_discrete_refinement(self):
        sols = []
        for ns, nt in [(25, 48), (49, 96), (97, 192)]:
            dom = RingDomain2D(Ellipse(4.0, 3.2), Circle(1.5), n_s=ns, n_t=nt)
            sols.append(solve_minimal_ring2d(dom, np.zeros(nt), np.ones(nt)))
        rep = check_harmonic_psi_2d(sols)
        assert rep.passed
        assert rep.margin >= 0  # measured order above 1.5


class TestConvergenceStudy:
    def test_laplace_annulus_order_two(self):
        rows = convergence_study("laplace-annulus", [(17, 32), (33, 64), (65, 128)])
        assert rows[0]["order"] is None
        assert all(r["order"] > 1.8 for r in rows[1:])

    def test_sphere_curvature_order_two(self):
        rows = convergence_study("sphere-curvature", [(17, 32), (33, 64), (65, 128)])
        assert all(r["order"] > 1.7 for r in rows[1:])

    def test_constant_zero_error(self):
        rows = convergence_study("constant", [(9, 16), (17, 32)])
        assert all(r["error"] == 0.0 for r in rows)


class TestReportInvariant:
    def test_pass_iff_margin_within_tolerance(self):
        rep = CheckReport(
            name="x", interior_extremum=1.0, interior_location=(0.0,),
            boundary_extremum=1.0, boundary_location=(0.0,),
            margin=-2.0, tolerance=1.0, passed=False, grid_h=0.1,
        )
        assert rep.passed == (rep.margin >= -rep.tolerance)
