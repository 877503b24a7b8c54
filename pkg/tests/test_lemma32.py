import numpy as np
import pytest

from levelcurv.errors import InvalidInstance
from levelcurv.identities import (
    QuadraticBoundInstance,
    lemma_quadratic_bound,
    quadratic_max_oracle,
)


class TestWorkedInstances:
    def test_free_instance(self):
        inst = QuadraticBoundInstance(0.0, 1.0, np.array([1.0]), np.array([1.0]))
        res = lemma_quadratic_bound(inst)
        assert res.gamma == pytest.approx(1.0)
        assert res.bound == pytest.approx(4.0)
        # Q(X) = -X^2 + 4X peaks at X = 2 with value 4
        assert quadratic_max_oracle(inst) == pytest.approx(4.0, abs=1e-12)
        assert inst.q(np.array([2.0])) == pytest.approx(4.0)

    def test_coupled_instance(self):
        inst = QuadraticBoundInstance(1.0, 1.0, np.array([1.0]), np.array([1.0]))
        res = lemma_quadratic_bound(inst)
        assert res.gamma == pytest.approx(0.5)
        assert res.bound == pytest.approx(2.0)
        assert quadratic_max_oracle(inst) == pytest.approx(2.0, abs=1e-12)
        assert inst.q(np.array([1.0])) == pytest.approx(2.0)

    def test_zero_mu(self):
        inst = QuadraticBoundInstance(0.5, 0.0, np.array([1.0, 2.0]), np.array([1.0, -1.0]))
        res = lemma_quadratic_bound(inst)
        assert res.bound == 0.0
        assert quadratic_max_oracle(inst) <= 1e-15


class TestRandomSuite:
    def test_bound_dominates_maximum(self):
        rng = np.random.default_rng(7)
        worst = -np.inf
        for _ in range(200):
            m = int(rng.integers(1, 7))
            inst = QuadraticBoundInstance(
                lam=float(rng.uniform(0.0, 3.0)),
                mu=float(rng.uniform(-2.0, 2.0)),
                b=rng.uniform(0.1, 5.0, size=m),
                c=rng.uniform(-3.0, 3.0, size=m),
            )
            res = lemma_quadratic_bound(inst)
            worst = max(worst, quadratic_max_oracle(inst) - res.bound)
        assert worst <= 1e-9

    def test_bound_is_attained(self):
        # the stationarity maximum always equals the bound, not just below it
        rng = np.random.default_rng(17)
        for _ in range(50):
            m = int(rng.integers(1, 5))
            inst = QuadraticBoundInstance(
                lam=float(rng.uniform(0.0, 2.0)),
                mu=float(rng.uniform(-2.0, 2.0)),
                b=rng.uniform(0.5, 3.0, size=m),
                c=rng.uniform(-2.0, 2.0, size=m),
            )
            res = lemma_quadratic_bound(inst)
            scale = 1.0 + abs(res.bound)
            assert quadratic_max_oracle(inst) == pytest.approx(res.bound, abs=1e-9 * scale)


class TestValidation:
    def test_negative_lambda(self):
        with pytest.raises(InvalidInstance):
            QuadraticBoundInstance(-0.1, 1.0, np.array([1.0]), np.array([1.0]))

    def test_nonpositive_b(self):
        with pytest.raises(InvalidInstance):
            QuadraticBoundInstance(0.0, 1.0, np.array([0.0]), np.array([1.0]))

    def test_length_mismatch(self):
        with pytest.raises(InvalidInstance):
            QuadraticBoundInstance(0.0, 1.0, np.array([1.0, 2.0]), np.array([1.0]))

    def test_grid_fallback_still_bounds(self):
        # near-singular quadratic form takes the dense-grid oracle path
        inst = QuadraticBoundInstance(
            0.0, 0.5, np.array([1e-10, 1.0]), np.array([0.3, -0.2])
        )
        res = lemma_quadratic_bound(inst)
        assert quadratic_max_oracle(inst) <= res.bound + 1e-9 * (1 + abs(res.bound))

    def test_empty_instance(self):
        inst = QuadraticBoundInstance(1.0, 2.0, np.array([]), np.array([]))
        res = lemma_quadratic_bound(inst)
        assert res.bound == 0.0
        assert quadratic_max_oracle(inst) == 0.0
