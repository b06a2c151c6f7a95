import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tworev.distribution import (
    _expected_min_pairs,
    _expected_min_survival,
    distribution_from_json,
    equal_revenue_discrete,
    expectation,
    expected_min,
    make_distribution,
    point_mass,
    random_distribution,
    tail,
    uniform_on,
)
from tworev.errors import ValidationError
from tworev.myerson import revenue_at_price

from .helpers import distributions


class TestMakeDistribution:
    def test_point_mass(self):
        d = make_distribution([5], [1.0])
        assert d.values == (5.0,) and d.probs == (1.0,)

    def test_sorts(self):
        d = make_distribution([2, 1], [0.5, 0.5])
        assert d.values == (1.0, 2.0) and d.probs == (0.5, 0.5)

    def test_merges_duplicates(self):
        d = make_distribution([1, 1, 2], [0.25, 0.25, 0.5])
        assert d.values == (1.0, 2.0) and d.probs == (0.5, 0.5)

    @pytest.mark.parametrize(
        "values, probs, field",
        [
            ([-1, 2], [0.5, 0.5], "values"),
            ([1, 2], [0.0, 1.0], "probs"),
            ([1, 2], [-0.5, 1.5], "probs"),
            ([1, 2], [0.5, 0.6], "probs"),
            ([], [], "values"),
            ([1, 2], [1.0], "probs"),
        ],
    )
    def test_rejects(self, values, probs, field):
        with pytest.raises(ValidationError) as info:
            make_distribution(values, probs)
        assert info.value.field == field

    def test_sum_tolerance_and_renormalization(self):
        d = make_distribution([1, 2, 3], [0.3, 0.3, 0.4 + 5e-10])
        assert sum(d.probs) == 1.0
        with pytest.raises(ValidationError):
            make_distribution([1, 2, 3], [0.3, 0.3, 0.4 + 5e-9])

    @given(distributions())
    def test_idempotent(self, d):
        again = make_distribution(d.values, d.probs)
        assert again == d

    def test_json_format(self):
        d = distribution_from_json({"values": [2, 1], "probs": [0.25, 0.75]})
        assert d.to_json() == {"values": [1.0, 2.0], "probs": [0.75, 0.25]}
        with pytest.raises(ValidationError):
            distribution_from_json({"values": [1]})
        with pytest.raises(ValidationError):
            distribution_from_json({"values": ["a"], "probs": [1]})


class TestTail:
    def test_atom_counts_at_threshold(self):
        assert tail(point_mass(5), 5) == 1.0

    def test_between_atoms(self):
        assert tail(uniform_on([1, 2]), 1.5) == 0.5

    def test_at_zero(self):
        assert tail(uniform_on([1, 2]), 0) == 1.0

    @given(distributions(), st.floats(0, 25), st.floats(0, 25))
    def test_monotone_and_limits(self, d, u, v):
        lo, hi = min(u, v), max(u, v)
        assert tail(d, lo) >= tail(d, hi)
        assert tail(d, 0) == pytest.approx(1.0, abs=1e-12)
        assert tail(d, d.values[-1] + 1e-9) == 0.0


class TestExpectation:
    def test_point_mass(self):
        assert expectation(point_mass(5)) == 5.0

    def test_uniform(self):
        assert expectation(uniform_on([1, 2])) == 1.5

    def test_three_atoms(self):
        d = make_distribution([1, 2, 4], [0.5, 0.25, 0.25])
        # 0.5 + 0.5 + 1.0
        assert expectation(d) == pytest.approx(2.0, abs=1e-15)


class TestExpectedMin:
    def test_constants(self):
        assert expected_min(point_mass(3), point_mass(7)) == 3.0

    def test_uniform_pair(self):
        # pairs (1,1) (1,2) (2,1) (2,2) with mins 1 1 1 2, each 1/4
        assert expected_min(uniform_on([1, 2]), uniform_on([1, 2])) == pytest.approx(1.25, abs=1e-15)

    def test_zero_partner(self):
        assert expected_min(uniform_on([1, 2, 7]), point_mass(0)) == 0.0

    def test_forms_agree_on_seeded_instances(self):
        worst = 0.0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            d1 = random_distribution(rng, int(rng.integers(1, 9)))
            d2 = random_distribution(rng, int(rng.integers(1, 9)))
            worst = max(worst, abs(_expected_min_pairs(d1, d2) - _expected_min_survival(d1, d2)))
        assert worst <= 1e-10

    @given(distributions(), distributions())
    def test_properties(self, d1, d2):
        m = expected_min(d1, d2)
        assert m == pytest.approx(expected_min(d2, d1), abs=1e-12)
        assert m <= min(expectation(d1), expectation(d2)) + 1e-12
        assert expected_min(d1, d1) <= expectation(d1) + 1e-12


class TestGenerators:
    def test_equal_revenue_three(self):
        d = equal_revenue_discrete(3, 1)
        assert d.values == (1.0, 2.0, 4.0)
        assert d.probs == (0.5, 0.25, 0.25)
        for p in d.values:
            assert revenue_at_price(d, p) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n, base", [(1, 1.0), (4, 1.0), (6, 2.5)])
    def test_equal_revenue_constant_curve(self, n, base):
        d = equal_revenue_discrete(n, base)
        assert len(d.values) == n
        for k, v in enumerate(d.values):
            assert v == base * 2**k
            assert tail(d, v) == pytest.approx(2.0**-k, abs=1e-15)
            assert revenue_at_price(d, v) == pytest.approx(base, rel=1e-14)

    @pytest.mark.parametrize("n, base", [(0, 1.0), (2, 0.0), (1.5, 1.0)])
    def test_equal_revenue_invalid(self, n, base):
        with pytest.raises(ValidationError):
            equal_revenue_discrete(n, base)

    def test_random_deterministic(self):
        a = random_distribution(1, 4, (0, 10))
        b = random_distribution(1, 4, (0, 10))
        assert a == b
        assert all(0 <= v <= 10 for v in a.values)

    @pytest.mark.parametrize("size, rng_", [(0, (0, 10)), (3, (5, 5)), (3, (-1, 2))])
    def test_random_invalid(self, size, rng_):
        with pytest.raises(ValidationError):
            random_distribution(0, size, rng_)

    def test_uniform_on(self):
        d = uniform_on([3, 1, 2])
        assert d.values == (1.0, 2.0, 3.0)
        assert all(math.isclose(p, 1 / 3) for p in d.probs)
