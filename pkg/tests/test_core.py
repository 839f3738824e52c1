"""Norms, order statistics, and distance functions."""

import numpy as np
import pytest

from drjcc import (
    AmbiguityConfig,
    NormKind,
    SafetySystem,
    ScenarioSet,
    distance,
    distance_hat,
    distance_profile,
    dual_norm,
    order_data,
)
from drjcc.core import primal_norm

from conftest import random_instance


class TestDualNorm:
    def test_l2_self_dual(self):
        assert dual_norm(np.array([3.0, 4.0]), NormKind.L2) == pytest.approx(5.0)

    def test_l1_dual_is_linf(self):
        assert dual_norm(np.array([1.0, -2.0]), NormKind.L1) == pytest.approx(2.0)

    def test_linf_dual_is_l1(self):
        assert dual_norm(np.array([1.0, -2.0]), NormKind.LINF) == pytest.approx(3.0)

    def test_zero_vector(self):
        for kind in NormKind:
            assert dual_norm(np.zeros(3), kind) == 0.0

    def test_holder_inequality(self):
        # |b.y| <= ||b||_* ||y|| for 1000 random pairs per norm kind
        rng = np.random.default_rng(7)
        for kind in NormKind:
            for _ in range(1000):
                dim = int(rng.integers(1, 6))
                b = rng.normal(size=dim)
                y = rng.normal(size=dim)
                lhs = abs(float(b @ y))
                rhs = dual_norm(b, kind) * primal_norm(y, kind)
                assert lhs <= rhs + 1e-12


class TestOrderData:
    def test_t1_by_hand(self, t1):
        od = order_data(*t1.parts)
        assert od.k == 2
        assert od.q[0] == pytest.approx(0.2)
        assert sorted(od.below_q[0].tolist()) == [0, 1]

    def test_degenerate_k_zero(self):
        scen = ScenarioSet(np.array([[0.5], [0.1], [0.9]]))
        sys = SafetySystem(a=[[1.0]], b=[[1.0]], d=[0.0])
        amb = AmbiguityConfig(0.2, 0.1)  # k = floor(0.6) = 0
        od = order_data(scen, sys, amb)
        assert od.k == 0
        assert od.q[0] == pytest.approx(0.1)
        assert od.below_q[0].size == 0

    def test_ties_shrink_strict_set(self):
        scen = ScenarioSet(np.array([[0.2], [0.2], [0.2], [0.3]]))
        sys = SafetySystem(a=[[1.0]], b=[[1.0]], d=[0.0])
        amb = AmbiguityConfig(0.5, 0.1)  # k = 2
        od = order_data(scen, sys, amb)
        assert od.q[0] == pytest.approx(0.2)
        assert od.below_q[0].size == 0

    def test_counts_and_bounds(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            inst = random_instance(rng)
            od = order_data(*inst.parts)
            proj = inst.scen.samples @ inst.sys.b.T
            for p in range(inst.sys.n_rows):
                vals = proj[:, p]
                assert od.below_q[p].size <= od.k
                # exactly N - (first position of q in sorted order) values >= q
                pos = int(np.searchsorted(np.sort(vals), od.q[p], side="left"))
                assert int(np.sum(vals >= od.q[p])) == inst.scen.n - pos
                if np.unique(vals).size == vals.size:
                    assert od.below_q[p].size == od.k

    def test_floor_robust_to_float_products(self):
        # 0.29 * 100 is 28.999999999999996 in floats; k must still be 29
        assert AmbiguityConfig(0.29, 0.1).k(100) == 29
        assert AmbiguityConfig(0.05, 0.1).k(20) == 1
        assert AmbiguityConfig(0.3, 0.1).k(10) == 3


class TestDistance:
    def test_hand_value(self, t1):
        assert distance(np.array([0.9]), np.array([0.0]), t1.sys) == pytest.approx(0.1)

    def test_boundary_is_zero(self, t1):
        # a.x equals b.xi + d exactly
        assert distance(np.array([1.1]), np.array([0.1]), t1.sys) == 0.0

    def test_min_over_rows(self):
        sys = SafetySystem(
            a=[[1.0], [1.0]], b=[[1.0, 0.0], [0.0, 1.0]], d=[0.5, 0.2], norm=NormKind.L2
        )
        # slacks 0.5 and 0.2 with unit dual norms
        assert distance(np.array([0.0]), np.array([0.0, 0.0]), sys) == pytest.approx(0.2)

    def test_profile_matches_scalar(self, t1):
        x = np.array([0.9])
        prof = distance_profile(x, t1.scen, t1.sys)
        expect = [distance(x, xi, t1.sys) for xi in t1.scen.samples]
        assert prof == pytest.approx(expect)
        assert prof == pytest.approx([0.1, 0.2, 0.3, 0.4])

    def test_lipschitz_in_xi(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            inst = random_instance(rng, norm=NormKind(rng.choice(["l1", "l2", "linf"])))
            x = rng.uniform(-1, 1, size=inst.sys.x_dim)
            for _ in range(20):
                xi1 = rng.normal(0, 1, size=inst.sys.xi_dim)
                xi2 = rng.normal(0, 1, size=inst.sys.xi_dim)
                gap = abs(distance(x, xi1, inst.sys) - distance(x, xi2, inst.sys))
                assert gap <= primal_norm(xi1 - xi2, inst.sys.norm) + 1e-9


class TestDistanceHat:
    def test_kappa_one_interior_equals_distance(self, t1):
        x, xi = np.array([0.9]), np.array([0.3])
        assert distance_hat(x, xi, t1.sys, 1.0) == pytest.approx(distance(x, xi, t1.sys))

    def test_kappa_zero(self, t1):
        assert distance_hat(np.array([1.7]), np.array([0.0]), t1.sys, 0.0) == 0.0

    def test_conservative_negative_value(self, t1):
        x, xi = np.array([1.5]), np.array([0.0])
        assert distance_hat(x, xi, t1.sys, 1.0) == pytest.approx(-0.5)
        assert distance(x, xi, t1.sys) == 0.0

    def test_kappa_out_of_range(self, t1):
        with pytest.raises(ValueError):
            distance_hat(np.array([0.9]), np.array([0.0]), t1.sys, 1.5)

    def test_dominance_property(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            inst = random_instance(rng)
            x = rng.uniform(-1, 1, size=inst.sys.x_dim)
            xi = rng.normal(0, 1, size=inst.sys.xi_dim)
            kap = float(rng.uniform(0, 1))
            assert distance_hat(x, xi, inst.sys, kap) <= distance(x, xi, inst.sys) + 1e-12


class TestValidation:
    def test_zero_row_rejected(self):
        with pytest.raises(ValueError):
            SafetySystem(a=[[1.0]], b=[[0.0]], d=[0.0])

    def test_epsilon_theta_domains(self):
        with pytest.raises(ValueError):
            AmbiguityConfig(0.0, 0.1)
        with pytest.raises(ValueError):
            AmbiguityConfig(1.0, 0.1)
        with pytest.raises(ValueError):
            AmbiguityConfig(0.5, 0.0)

    def test_nonfinite_samples_rejected(self):
        with pytest.raises(ValueError):
            ScenarioSet(np.array([[np.nan]]))

    def test_inverted_x_bounds_rejected(self):
        with pytest.raises(ValueError):
            SafetySystem(a=[[1.0]], b=[[1.0]], d=[0.0], x_bounds=[[2.0, 1.0]])
