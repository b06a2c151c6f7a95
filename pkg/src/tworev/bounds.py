"""Approximation guarantee g(alpha) for separate selling and its checks.

For per-item optimal revenues R1 >= R2 > 0 and alpha = R1 / R2, the chain

    Rev <= R1 + R2 + E[min(X, Y)]          (lemma1_slack >= 0)
    E[min(X, Y)] <= (2 + ln alpha) R2      (lemma2_slack >= 0)
    R1 + (3 + ln alpha) R2 = g(alpha) (R1 + R2)

gives Rev <= g(alpha) SRev. Every check returns a slack; a slack below
``-CHECK_TOL`` is a violation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .distribution import expected_min
from .errors import DegenerateInstanceError, DomainError
from .mechanism import DEFAULT_GRID_LIMIT, ProductInstance, optimal_revenue
from .myerson import optimal_price

CHECK_TOL = 1e-7


def guarantee_factor(alpha: float) -> float:
    """g(alpha) = 2 - (alpha - 1 - ln alpha) / (1 + alpha), for alpha >= 1."""
    if not alpha >= 1.0:
        raise DomainError(f"alpha must be >= 1, got {alpha!r}")
    if alpha == 1.0:
        return 2.0
    return 2.0 - (alpha - 1.0 - math.log(alpha)) / (1.0 + alpha)


def _ordered_revenues(inst: ProductInstance) -> tuple[float, float, bool]:
    r1 = optimal_price(inst.d1).revenue
    r2 = optimal_price(inst.d2).revenue
    if r2 > r1:
        return r2, r1, True
    return r1, r2, False


def check_lemma1(inst: ProductInstance, rev: float) -> float:
    """r1 + r2 + E[min(X, Y)] - rev."""
    r1, r2, _ = _ordered_revenues(inst)
    return r1 + r2 + expected_min(inst.d1, inst.d2) - rev


def check_lemma2(inst: ProductInstance) -> float:
    """(2 + ln(r1 / r2)) r2 - E[min(X, Y)], with r1 >= r2 after relabeling."""
    r1, r2, _ = _ordered_revenues(inst)
    if r2 <= 0.0:
        raise DegenerateInstanceError("weaker item has zero revenue; the bound is vacuous")
    return (2.0 + math.log(r1 / r2)) * r2 - expected_min(inst.d1, inst.d2)


def check_theorem(inst: ProductInstance, rev: float) -> float:
    """g(alpha) (r1 + r2) - rev."""
    r1, r2, _ = _ordered_revenues(inst)
    if r2 <= 0.0:
        raise DegenerateInstanceError("weaker item has zero revenue; alpha is undefined")
    return guarantee_factor(r1 / r2) * (r1 + r2) - rev


def algebraic_identity_check(r1: float, r2: float) -> float:
    """|r1 + (3 + ln(r1/r2)) r2 - g(r1/r2)(r1 + r2)|."""
    if not r1 >= r2 > 0:
        raise DomainError(f"need r1 >= r2 > 0, got r1={r1!r}, r2={r2!r}")
    alpha = r1 / r2
    return abs(r1 + (3.0 + math.log(alpha)) * r2 - guarantee_factor(alpha) * (r1 + r2))


@dataclass(frozen=True)
class BoundReport:
    r1: float
    r2: float
    alpha: float | None
    srev: float
    rev: float
    emin: float
    g_alpha: float | None
    theorem_slack: float | None
    lemma1_slack: float
    lemma2_slack: float | None
    labels_swapped: bool
    degenerate: bool

    @property
    def ratio(self) -> float | None:
        return self.rev / self.srev if self.srev > 0 else None

    @property
    def passed(self) -> bool:
        slacks = (self.theorem_slack, self.lemma1_slack, self.lemma2_slack)
        return all(s is None or s >= -CHECK_TOL for s in slacks)

    def consistency_error(self) -> float:
        """Largest gap between a stored slack and its recomputation from the other fields."""
        gaps = [abs(self.srev - (self.r1 + self.r2)), abs(self.lemma1_slack - (self.r1 + self.r2 + self.emin - self.rev))]
        if not self.degenerate:
            gaps.append(abs(self.alpha - self.r1 / self.r2))
            gaps.append(abs(self.g_alpha - guarantee_factor(self.alpha)))
            gaps.append(abs(self.theorem_slack - (self.g_alpha * self.srev - self.rev)))
            gaps.append(abs(self.lemma2_slack - ((2.0 + math.log(self.alpha)) * self.r2 - self.emin)))
        return max(gaps)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def analyze(inst: ProductInstance, grid_limit: int = DEFAULT_GRID_LIMIT, rev: float | None = None) -> BoundReport:
    """Solve for Rev and evaluate every bound on ``inst``.

    Items are relabeled so that r1 >= r2; the instance itself is untouched.
    When r2 == 0 the report is flagged degenerate and only the first lemma
    is evaluated.
    """
    r1, r2, swapped = _ordered_revenues(inst)
    if rev is None:
        rev, _ = optimal_revenue(inst, grid_limit)
    emin = expected_min(inst.d1, inst.d2)
    srev = r1 + r2
    lemma1 = r1 + r2 + emin - rev
    if r2 <= 0.0:
        return BoundReport(r1, r2, None, srev, rev, emin, None, None, lemma1, None, swapped, True)
    alpha = r1 / r2
    g = guarantee_factor(alpha)
    return BoundReport(
        r1=r1,
        r2=r2,
        alpha=alpha,
        srev=srev,
        rev=rev,
        emin=emin,
        g_alpha=g,
        theorem_slack=g * srev - rev,
        lemma1_slack=lemma1,
        lemma2_slack=(2.0 + math.log(alpha)) * r2 - emin,
        labels_swapped=swapped,
        degenerate=False,
    )
