import numpy as np
from hypothesis import strategies as st

from tworev import ProductInstance, make_distribution, random_distribution


@st.composite
def distributions(draw, max_size=6, max_value=20.0):
    n = draw(st.integers(1, max_size))
    values = draw(st.lists(st.floats(0, max_value, allow_nan=False), min_size=n, max_size=n))
    weights = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    total = sum(weights)
    return make_distribution(values, [w / total for w in weights])


def seeded_instance(seed, max_support=5, tag=0):
    rng = np.random.default_rng([tag, seed])
    n1, n2 = rng.integers(1, max_support + 1, size=2)
    return ProductInstance(random_distribution(rng, int(n1)), random_distribution(rng, int(n2)))
