"""Optimal posted price for a single item.

Under the "value >= price buys" convention the revenue p * P(X >= p) is
linear and increasing in p between consecutive support points, so a
maximizing price is always found on the support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import DiscreteDistribution, tail

# relative tolerance used to decide that two candidate prices tie
TIE_TOL = 1e-12


@dataclass(frozen=True)
class MyersonResult:
    price: float
    revenue: float
    argmax_prices: tuple[float, ...]


def revenue_at_price(d: DiscreteDistribution, p: float) -> float:
    return float(p) * tail(d, p)


def revenue_curve(d: DiscreteDistribution) -> np.ndarray:
    """Posted-price revenue at every support point, in support order."""
    values, probs = d.as_arrays()
    tails = np.cumsum(probs[::-1])[::-1]
    return values * tails


def optimal_price(d: DiscreteDistribution) -> MyersonResult:
    values, _ = d.as_arrays()
    curve = revenue_curve(d)
    best = float(curve.max())
    winners = np.flatnonzero(curve >= best - TIE_TOL * max(1.0, best))
    prices = tuple(float(values[i]) for i in winners)
    price = prices[0]
    return MyersonResult(price=price, revenue=revenue_at_price(d, price), argmax_prices=prices)


def tail_revenue_check(d: DiscreteDistribution, revenue: float) -> float:
    """Largest excess of u * P(X >= u) over ``revenue`` across the support."""
    return float(np.max(revenue_curve(d) - revenue))
