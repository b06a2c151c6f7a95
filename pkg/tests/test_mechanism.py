import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tworev import (
    ProductInstance,
    build_revenue_lp,
    bundle_revenue,
    equal_revenue_discrete,
    optimal_price,
    optimal_revenue,
    point_mass,
    random_distribution,
    separate_sale_revenue,
    uniform_on,
    verify_mechanism,
)
from tworev.errors import GridSizeError
from tworev.mechanism import Mechanism, posted_price_mechanism

from .helpers import distributions, seeded_instance
from .test_lp import highs

TOL = 1e-7


def full_surplus(inst):
    xs, ys = inst.grid()
    return float(np.sum(inst.joint() * (xs + ys)))


def bundle_by_enumeration(inst):
    """p * P(X + Y >= p) over every candidate sum, summing joint mass directly."""
    pairs = [(x + y, px * py) for (x, px), (y, py) in itertools.product(
        zip(inst.d1.values, inst.d1.probs), zip(inst.d2.values, inst.d2.probs))]
    return max(p * sum(f for s, f in pairs if s >= p) for p, _ in pairs)


class TestBuildLP:
    @pytest.mark.parametrize("n, m, nvars, ncons", [(1, 1, 3, 0), (2, 2, 12, 12), (10, 10, 300, 9900)])
    def test_sizes(self, n, m, nvars, ncons):
        inst = ProductInstance(equal_revenue_discrete(n), uniform_on(list(range(1, m + 1))))
        lp = build_revenue_lp(inst)
        assert lp.num_vars == nvars
        assert lp.num_constraints == ncons

    def test_grid_limit(self):
        inst = ProductInstance(uniform_on(list(range(15))), uniform_on(list(range(14))))
        with pytest.raises(GridSizeError) as info:
            build_revenue_lp(inst)
        assert info.value.size == 210 and info.value.limit == 200
        assert "210" in str(info.value)
        assert build_revenue_lp(inst, grid_limit=210).num_vars == 630

    def test_variable_names(self, iid_u12):
        lp = build_revenue_lp(iid_u12)
        assert lp.names[:3] == ["q1_0_0", "q2_0_0", "u_0_0"]
        assert lp.names[-1] == "u_1_1"


class TestOptimalRevenue:
    def test_known_types(self):
        rev, mech = optimal_revenue(ProductInstance(point_mass(3), point_mass(7)))
        assert rev == pytest.approx(10.0, abs=TOL)
        assert verify_mechanism(ProductInstance(point_mass(3), point_mass(7)), mech).ok

    def test_iid_uniform_beats_bundle_bound(self, iid_u12):
        rev, mech = optimal_revenue(iid_u12)
        # bundle price 3 sells with probability 3/4
        assert rev >= 2.25 - TOL
        assert rev <= 4.0
        assert verify_mechanism(iid_u12, mech).ok

    def test_zero_second_item_is_myerson(self):
        for seed in range(50):
            d = random_distribution(np.random.default_rng([11, seed]), 6)
            rev, _ = optimal_revenue(ProductInstance(d, point_mass(0)))
            assert rev == pytest.approx(optimal_price(d).revenue, abs=TOL)

    def test_matches_highs(self):
        for seed in range(40):
            inst = seeded_instance(seed, max_support=6, tag=12)
            lp = build_revenue_lp(inst)
            status, value = highs(lp)
            rev, _ = optimal_revenue(inst)
            assert status == "optimal"
            assert rev == pytest.approx(value, abs=1e-8)

    def test_properties_on_seeded_instances(self):
        for seed in range(40):
            inst = seeded_instance(seed, max_support=5, tag=13)
            rev, mech = optimal_revenue(inst)
            srev, _ = separate_sale_revenue(inst)
            report = verify_mechanism(inst, mech, TOL)
            assert report.ok, report
            assert report.revenue == pytest.approx(rev, abs=1e-9)
            assert rev >= srev - TOL
            assert rev >= bundle_revenue(inst) - TOL
            assert rev <= 2 * srev + TOL
            assert rev <= full_surplus(inst) + 1e-9
            rev_swapped, _ = optimal_revenue(inst.swapped())
            assert rev_swapped == pytest.approx(rev, abs=TOL)

    @settings(max_examples=25, deadline=None)
    @given(distributions(max_size=4, max_value=10), distributions(max_size=4, max_value=10), st.floats(0.1, 10))
    def test_scaling(self, d1, d2, c):
        inst = ProductInstance(d1, d2)
        rev, _ = optimal_revenue(inst)
        scaled, _ = optimal_revenue(inst.scaled(c))
        assert scaled == pytest.approx(c * rev, abs=TOL * max(1.0, c))


class TestVerifyMechanism:
    def test_posted_prices_are_ic_ir(self):
        for seed in range(20):
            inst = seeded_instance(seed, tag=14)
            _, mech = separate_sale_revenue(inst)
            rep = verify_mechanism(inst, mech)
            # exact up to round-off in x*q - s
            assert rep.ic_violation <= 1e-12 and rep.ir_violation <= 1e-12

    def test_inflated_payment_breaks_ir(self, iid_u12):
        _, mech = separate_sale_revenue(iid_u12)
        bad = Mechanism(mech.x, mech.y, mech.q1, mech.q2, mech.s + 1.0)
        rep = verify_mechanism(iid_u12, bad, TOL)
        assert rep.ir_violation >= 1.0 - TOL
        assert not rep.ok

    def test_detects_ic_violation(self, iid_u12):
        # high types pay more for the same allocation: they would misreport low
        xs, ys = iid_u12.grid()
        ones = np.ones_like(xs)
        mech = Mechanism(xs, ys, ones, ones, xs + ys)
        rep = verify_mechanism(iid_u12, mech, TOL)
        assert rep.ir_violation == 0.0
        assert rep.ic_violation == pytest.approx(2.0)

    def test_allocation_bounds(self, iid_u12):
        xs, ys = iid_u12.grid()
        mech = Mechanism(xs, ys, np.full_like(xs, 1.5), np.zeros_like(xs), np.zeros_like(xs))
        assert verify_mechanism(iid_u12, mech).allocation_violation == pytest.approx(0.5)


class TestSeparateSale:
    def test_known_types(self):
        srev, _ = separate_sale_revenue(ProductInstance(point_mass(3), point_mass(7)))
        assert srev == 10.0

    def test_iid_uniform(self, iid_u12):
        srev, mech = separate_sale_revenue(iid_u12)
        assert srev == 2.0
        assert verify_mechanism(iid_u12, mech).revenue == pytest.approx(2.0, abs=1e-15)

    def test_equal_revenue_with_point_mass(self):
        srev, _ = separate_sale_revenue(ProductInstance(equal_revenue_discrete(3, 1), point_mass(5)))
        assert srev == 6.0


class TestBundle:
    def test_iid_uniform(self, iid_u12):
        assert bundle_revenue(iid_u12) == pytest.approx(2.25, abs=1e-15)

    def test_known_types(self):
        assert bundle_revenue(ProductInstance(point_mass(3), point_mass(7))) == 10.0

    def test_zero_partner(self):
        for seed in range(10):
            d = random_distribution(seed, 5)
            assert bundle_revenue(ProductInstance(d, point_mass(0))) == pytest.approx(optimal_price(d).revenue, abs=1e-12)

    def test_matches_enumeration(self):
        for seed in range(30):
            inst = seeded_instance(seed, tag=15)
            assert bundle_revenue(inst) == pytest.approx(bundle_by_enumeration(inst), abs=1e-12)

    def test_bundle_mechanism_feasible(self, iid_u12):
        xs, ys = iid_u12.grid()
        buy = (xs + ys >= 3).astype(float)
        mech = Mechanism(xs, ys, buy, buy, 3 * buy)
        rep = verify_mechanism(iid_u12, mech)
        assert rep.ok and rep.revenue == pytest.approx(2.25)


def test_posted_price_mechanism_revenue_matches_srev():
    for seed in range(10):
        inst = seeded_instance(seed, tag=16)
        srev, mech = separate_sale_revenue(inst)
        assert verify_mechanism(inst, mech).revenue == pytest.approx(srev, abs=1e-12)
    mech = posted_price_mechanism(ProductInstance(point_mass(3), point_mass(7)), 3, 7)
    assert mech.s.item() == 10.0
