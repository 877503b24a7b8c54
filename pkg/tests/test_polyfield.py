import numpy as np
import pytest

from levelcurv.polyfield import PolyField, quadratic_field, random_test_jet


def brute_partial(field, point, order, h=1e-4):
    """Central finite differences, the slow independent way."""
    if sum(order) == 0:
        return field.evaluate(point)
    axis = next(i for i, p in enumerate(order) if p)
    lower = list(order)
    lower[axis] -= 1
    e = np.zeros(field.dim)
    e[axis] = h
    return (
        brute_partial(field, np.asarray(point) + e, tuple(lower), h)
        - brute_partial(field, np.asarray(point) - e, tuple(lower), h)
    ) / (2 * h)


class TestPolyField:
    def test_evaluate(self):
        f = PolyField(2, {(0, 0): 1.0, (1, 0): 2.0, (1, 1): -3.0, (0, 2): 0.5})
        x = np.array([1.5, -2.0])
        assert f.evaluate(x) == pytest.approx(1 + 3.0 + 9.0 + 2.0)

    def test_exact_derivative_matches_finite_differences(self):
        f = random_test_jet(3, 3)
        p = np.array([0.2, -0.1, 0.3])
        for order in [(1, 0, 0), (0, 1, 1), (2, 0, 0), (1, 1, 1), (0, 0, 3)]:
            exact = f.partial(order).evaluate(p)
            approx = brute_partial(f, p, order, h=1e-3 if sum(order) > 2 else 1e-5)
            assert exact == pytest.approx(approx, rel=1e-4, abs=1e-4)

    def test_jet_symmetry_is_exact(self):
        f = random_test_jet(11, 3)
        jet = f.jet(np.array([0.1, 0.2, -0.3]), order=3)
        assert np.array_equal(jet.hess, jet.hess.T)
        for perm in [(0, 2, 1), (1, 0, 2), (2, 1, 0)]:
            assert np.array_equal(jet.third, np.transpose(jet.third, perm))

    def test_degree_cap(self):
        with pytest.raises(ValueError):
            PolyField(2, {(3, 2): 1.0})

    def test_negation(self):
        f = random_test_jet(5, 2)
        g = -f
        p = np.array([0.3, 0.4])
        assert g.evaluate(p) == pytest.approx(-f.evaluate(p))

    def test_quadratic_field_jet(self):
        grad = np.array([1.0, -2.0])
        hess = np.array([[2.0, 0.5], [0.5, -1.0]])
        f = quadratic_field(2, grad, hess)
        jet = f.jet(np.zeros(2), order=3)
        assert np.allclose(jet.grad, grad)
        assert np.allclose(jet.hess, hess)
        assert np.allclose(jet.third, 0.0)


class TestRandomTestJet:
    def test_deterministic(self):
        f1 = random_test_jet(1, 2)
        f2 = random_test_jet(1, 2)
        assert f1.coeffs == f2.coeffs

    def test_valid_field(self):
        f = random_test_jet(1, 2)
        jet = f.jet(np.zeros(2), order=2)
        assert jet.grad_norm >= 0.1

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError):
            random_test_jet(2, 5)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_nondegenerate_curvature(self, n):
        from levelcurv.geometry import align_frame

        for seed in range(5):
            f = random_test_jet(seed, n)
            jet = f.jet(np.zeros(n), order=2)
            aj = align_frame(jet).aligned_jet
            a_pre = -aj.hess[: n - 1, : n - 1] / aj.grad[-1]
            assert abs(np.linalg.det(a_pre)) >= 1e-4
