"""Finite discrete value distributions and their elementary statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDistribution:
    """Distribution with strictly increasing nonnegative ``values`` and positive ``probs``.

    Instances are canonical: build them with :func:`make_distribution`.
    """

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValidationError("values", "support must contain at least one point")
        if len(self.values) != len(self.probs):
            raise ValidationError("probs", "length differs from values")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValidationError("values", "must be strictly increasing")
        if self.values[0] < 0:
            raise ValidationError("values", "must be nonnegative")
        if any(p <= 0 for p in self.probs):
            raise ValidationError("probs", "must be positive")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValidationError("probs", "must sum to 1")

    @property
    def size(self) -> int:
        return len(self.values)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.values, dtype=float), np.asarray(self.probs, dtype=float)

    def scaled(self, c: float) -> "DiscreteDistribution":
        if not c > 0:
            raise ValidationError("c", "scale factor must be positive")
        return make_distribution([v * c for v in self.values], self.probs)

    def to_json(self) -> dict:
        return {"values": list(self.values), "probs": list(self.probs)}


def make_distribution(values: Sequence[float], probs: Sequence[float]) -> DiscreteDistribution:
    """Sort, merge duplicate values and renormalize to an exact unit mass."""
    values = [float(v) for v in values]
    probs = [float(p) for p in probs]
    if len(values) == 0:
        raise ValidationError("values", "must be nonempty")
    if len(values) != len(probs):
        raise ValidationError("probs", f"length {len(probs)} differs from values length {len(values)}")
    for v in values:
        if not np.isfinite(v) or v < 0:
            raise ValidationError("values", f"{v!r} is not a finite nonnegative number")
    for p in probs:
        if not np.isfinite(p) or p <= 0:
            raise ValidationError("probs", f"{p!r} is not a positive probability")
    total = float(np.sum(probs))
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValidationError("probs", f"sum {total!r} deviates from 1 by more than {PROB_SUM_TOL}")

    merged: dict[float, float] = {}
    for v, p in zip(values, probs):
        merged[v] = merged.get(v, 0.0) + p
    support = sorted(merged)
    mass = [merged[v] for v in support]
    if abs(sum(mass) - 1.0) > 1e-15:
        mass = [p / total for p in mass]
        # leave the rounding residue on the largest atom
        k = max(range(len(mass)), key=mass.__getitem__)
        mass[k] += 1.0 - sum(mass)
    return DiscreteDistribution(tuple(support), tuple(mass))


def tail(d: DiscreteDistribution, u: float) -> float:
    """P(X >= u); an atom located at ``u`` is counted."""
    return float(sum(p for v, p in zip(d.values, d.probs) if v >= u))


def expectation(d: DiscreteDistribution) -> float:
    values, probs = d.as_arrays()
    return float(values @ probs)


def _expected_min_pairs(d1: DiscreteDistribution, d2: DiscreteDistribution) -> float:
    v1, p1 = d1.as_arrays()
    v2, p2 = d2.as_arrays()
    return float(p1 @ np.minimum.outer(v1, v2) @ p2)


def _expected_min_survival(d1: DiscreteDistribution, d2: DiscreteDistribution) -> float:
    # integral of P(X>=u)P(Y>=u) du; the integrand is constant on each open gap
    # between consecutive breakpoints and takes the value at the gap's right end
    points = np.union1d(np.concatenate(([0.0], d1.values)), d2.values)
    total = 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        total += tail(d1, hi) * tail(d2, hi) * (hi - lo)
    return float(total)


def expected_min(d1: DiscreteDistribution, d2: DiscreteDistribution, check: bool = True) -> float:
    """E[min(X, Y)] for independent X ~ d1, Y ~ d2.

    Computed by pair enumeration; with ``check`` the survival-integral form is
    evaluated too and the two must agree to 1e-10.
    """
    value = _expected_min_pairs(d1, d2)
    if check:
        other = _expected_min_survival(d1, d2)
        if abs(value - other) > 1e-10 * max(1.0, abs(value)):
            raise ArithmeticError(f"E[min] forms disagree: pairs={value!r} survival={other!r}")
    return value


def point_mass(v: float) -> DiscreteDistribution:
    return make_distribution([v], [1.0])


def uniform_on(values: Sequence[float]) -> DiscreteDistribution:
    if len(values) == 0:
        raise ValidationError("values", "must be nonempty")
    return make_distribution(values, [1.0 / len(values)] * len(values))


def equal_revenue_discrete(n: int, base: float = 1.0) -> DiscreteDistribution:
    """Support ``base * 2**k`` for k < n with P(X >= v_k) = 2**-k.

    Posting any support point as a price earns exactly ``base``.
    """
    if int(n) != n or n < 1:
        raise ValidationError("n", "must be a positive integer")
    if not base > 0:
        raise ValidationError("base", "must be positive")
    n = int(n)
    values = [base * 2.0**k for k in range(n)]
    probs = [2.0 ** -(k + 1) for k in range(n - 1)] + [2.0 ** -(n - 1)]
    return make_distribution(values, probs)


def random_distribution(
    rng: np.random.Generator | int,
    support_size: int,
    value_range: tuple[float, float] = (0.0, 10.0),
    decimals: int = 3,
) -> DiscreteDistribution:
    """Random support drawn uniformly from ``value_range`` with Dirichlet(1) masses.

    Values are rounded to ``decimals`` places, so the merged support can be
    smaller than ``support_size``.
    """
    if int(support_size) != support_size or support_size < 1:
        raise ValidationError("support_size", "must be a positive integer")
    lo, hi = (float(x) for x in value_range)
    if lo < 0 or not hi > lo:
        raise ValidationError("value_range", f"need 0 <= lo < hi, got {value_range!r}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    values = np.round(rng.uniform(lo, hi, size=int(support_size)), decimals)
    probs = rng.dirichlet(np.ones(int(support_size)))
    # Dirichlet draws can underflow to exactly 0
    probs = np.maximum(probs, 1e-6)
    probs = probs / probs.sum()
    return make_distribution(values.tolist(), probs.tolist())


def load_distribution(path) -> DiscreteDistribution:
    """Read ``{"values": [...], "probs": [...]}`` from a JSON file."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError("json", str(exc)) from exc
    return distribution_from_json(data)


def distribution_from_json(data) -> DiscreteDistribution:
    if not isinstance(data, dict):
        raise ValidationError("json", "expected an object with 'values' and 'probs'")
    for key in ("values", "probs"):
        if not isinstance(data.get(key), list):
            raise ValidationError(key, "missing or not a list")
    try:
        return make_distribution(data["values"], data["probs"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError("json", str(exc)) from exc
