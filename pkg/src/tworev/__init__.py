"""Revenue of optimal two-item mechanisms versus selling items separately."""

from .bounds import (
    BoundReport,
    algebraic_identity_check,
    analyze,
    check_lemma1,
    check_lemma2,
    check_theorem,
    guarantee_factor,
)
from .distribution import (
    DiscreteDistribution,
    equal_revenue_discrete,
    expectation,
    expected_min,
    make_distribution,
    point_mass,
    random_distribution,
    tail,
    uniform_on,
)
from .harness import ExperimentConfig, run_random_suite, worst_case_search
from .lp import LinearProgram, LPSolution, solve_lp
from .mechanism import (
    Mechanism,
    ProductInstance,
    build_revenue_lp,
    bundle_revenue,
    optimal_revenue,
    separate_sale_revenue,
    verify_mechanism,
)
from .myerson import MyersonResult, optimal_price, revenue_at_price, tail_revenue_check

__version__ = "0.1.0"
