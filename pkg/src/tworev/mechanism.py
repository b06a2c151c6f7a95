"""Optimal and benchmark mechanisms for two independent items.

``optimal_revenue`` solves the revenue LP over all IC/IR mechanisms on
the finite product type grid. For a finite type space the LP optimum is
exactly the best revenue over arbitrary (possibly randomized, infinite
menu) mechanisms, since any mechanism induces one feasible point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import DiscreteDistribution
from .errors import GridSizeError, ValidationError
from .lp import OPTIMAL, LinearProgram, LPSolution, solve_lp
from .myerson import optimal_price

DEFAULT_GRID_LIMIT = 200
MECH_TOL = 1e-7


@dataclass(frozen=True)
class ProductInstance:
    d1: DiscreteDistribution
    d2: DiscreteDistribution

    @property
    def shape(self) -> tuple[int, int]:
        return self.d1.size, self.d2.size

    @property
    def num_types(self) -> int:
        return self.d1.size * self.d2.size

    def joint(self) -> np.ndarray:
        """Joint mass f(x, y) = f1(x) f2(y) as an n x m matrix."""
        _, p1 = self.d1.as_arrays()
        _, p2 = self.d2.as_arrays()
        return np.outer(p1, p2)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        v1, _ = self.d1.as_arrays()
        v2, _ = self.d2.as_arrays()
        return np.meshgrid(v1, v2, indexing="ij")

    def swapped(self) -> "ProductInstance":
        return ProductInstance(self.d2, self.d1)

    def scaled(self, c: float) -> "ProductInstance":
        return ProductInstance(self.d1.scaled(c), self.d2.scaled(c))


@dataclass
class Mechanism:
    """Allocation probabilities and payments on the n x m type grid."""

    x: np.ndarray
    y: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    s: np.ndarray

    def utility(self) -> np.ndarray:
        return self.x * self.q1 + self.y * self.q2 - self.s


@dataclass(frozen=True)
class MechanismReport:
    ic_violation: float
    ir_violation: float
    allocation_violation: float
    revenue: float
    tol: float

    @property
    def ok(self) -> bool:
        return max(self.ic_violation, self.ir_violation, self.allocation_violation) <= self.tol


def _var(t: int, k: int) -> int:
    return 3 * t + k


def build_revenue_lp(inst: ProductInstance, grid_limit: int = DEFAULT_GRID_LIMIT) -> LinearProgram:
    """Revenue LP in utility form.

    Per type t = (x, y): q1(t), q2(t) in [0, 1] and u(t) >= 0, with
    payment s = x q1 + y q2 - u. IC for every ordered pair t != t':
    u(t) >= u(t') + (x - x') q1(t') + (y - y') q2(t').
    """
    n, m = inst.shape
    nm = n * m
    if nm > grid_limit:
        raise GridSizeError(nm, grid_limit)
    xs, ys = inst.grid()
    xs, ys, f = xs.ravel(), ys.ravel(), inst.joint().ravel()

    objective = np.zeros(3 * nm)
    objective[0::3] = f * xs
    objective[1::3] = f * ys
    objective[2::3] = -f
    names = []
    bounds = []
    for i in range(n):
        for j in range(m):
            names += [f"q1_{i}_{j}", f"q2_{i}_{j}", f"u_{i}_{j}"]
            bounds += [(0.0, 1.0), (0.0, 1.0), (0.0, math.inf)]
    lp = LinearProgram(3 * nm, objective, bounds=bounds, names=names)
    for t in range(nm):
        for r in range(nm):
            if r == t:
                continue
            idx = (_var(t, 2), _var(r, 2), _var(r, 0), _var(r, 1))
            coefs = (1.0, -1.0, -(xs[t] - xs[r]), -(ys[t] - ys[r]))
            lp.add_constraint((idx, coefs), ">=", 0.0)
    return lp


def mechanism_from_assignment(inst: ProductInstance, assignment: np.ndarray) -> Mechanism:
    n, m = inst.shape
    xs, ys = inst.grid()
    q1 = np.clip(assignment[0::3], 0.0, 1.0).reshape(n, m)
    q2 = np.clip(assignment[1::3], 0.0, 1.0).reshape(n, m)
    u = np.maximum(assignment[2::3], 0.0).reshape(n, m)
    return Mechanism(xs, ys, q1, q2, xs * q1 + ys * q2 - u)


def mechanism_revenue(inst: ProductInstance, mech: Mechanism) -> float:
    return float(np.sum(inst.joint() * mech.s))


def verify_mechanism(inst: ProductInstance, mech: Mechanism, tol: float = MECH_TOL) -> MechanismReport:
    """Exhaustive IC/IR check; violations are reported, never raised."""
    if mech.q1.shape != inst.shape:
        raise ValidationError("mech", f"grid shape {mech.q1.shape} does not match instance {inst.shape}")
    x, y = mech.x.ravel(), mech.y.ravel()
    q1, q2, s = mech.q1.ravel(), mech.q2.ravel(), mech.s.ravel()
    # misreport[t, r]: utility of true type t when reporting r
    misreport = np.outer(x, q1) + np.outer(y, q2) - s[None, :]
    truthful = np.diag(misreport).copy()
    ic = float(np.max(misreport - truthful[:, None]))
    ir = float(max(0.0, -truthful.min()))
    alloc = float(max(0.0, -q1.min(), -q2.min(), q1.max() - 1.0, q2.max() - 1.0))
    return MechanismReport(max(ic, 0.0), ir, alloc, mechanism_revenue(inst, mech), tol)


class LPFailure(RuntimeError):
    def __init__(self, solution: LPSolution):
        super().__init__(f"revenue LP ended with status {solution.status}")
        self.solution = solution


def optimal_revenue(inst: ProductInstance, grid_limit: int = DEFAULT_GRID_LIMIT) -> tuple[float, Mechanism]:
    """Rev(F1 x F2) and an optimal mechanism."""
    lp = build_revenue_lp(inst, grid_limit)
    sol = solve_lp(lp)
    if sol.status != OPTIMAL:
        raise LPFailure(sol)
    mech = mechanism_from_assignment(inst, sol.assignment)
    return sol.objective_value, mech


def posted_price_mechanism(inst: ProductInstance, p1: float, p2: float) -> Mechanism:
    xs, ys = inst.grid()
    q1 = (xs >= p1).astype(float)
    q2 = (ys >= p2).astype(float)
    return Mechanism(xs, ys, q1, q2, p1 * q1 + p2 * q2)


def separate_sale_revenue(inst: ProductInstance) -> tuple[float, Mechanism]:
    m1, m2 = optimal_price(inst.d1), optimal_price(inst.d2)
    return m1.revenue + m2.revenue, posted_price_mechanism(inst, m1.price, m2.price)


def bundle_revenue(inst: ProductInstance) -> float:
    """Best single bundle price, searched over all achievable sums x + y."""
    xs, ys = inst.grid()
    sums = (xs + ys).ravel()
    f = inst.joint().ravel()
    order = np.argsort(sums, kind="stable")
    sums, f = sums[order], f[order]
    tails = np.cumsum(f[::-1])[::-1]
    # equal sums share the tail of their first occurrence
    first = np.searchsorted(sums, sums, side="left")
    return float(np.max(sums * tails[first]))
