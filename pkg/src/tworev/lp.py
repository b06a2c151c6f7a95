"""Dense primal simplex for small maximization LPs.

Constraints are first rewritten as ``A z <= b, z >= 0``. The solver
keeps a dense inverse of the active-constraint matrix (revised form)
rather than a full tableau, and recomputes slacks from the original data
on each refactorization, which keeps the highly degenerate revenue LPs
from drifting. Pricing is steepest edge with a fallback to Bland's
anti-cycling rule on degenerate stalls. Rows with a negative right-hand
side trigger a phase one with a single auxiliary variable."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegeneratePivotError, ValidationError

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-12
# basic values this close to zero are treated as exactly degenerate
ZERO_TOL = 1e-11
# pivots smaller than this, relative to the direction, are treated as zero
PIVOT_REL_TOL = 1e-7
TIE_PIVOT_RATIO = 1e-2
# consecutive degenerate pivots before switching to Bland's rule
STALL_LIMIT = 300

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

RELATIONS = ("<=", ">=", "=")


@dataclass
class Constraint:
    indices: np.ndarray
    coefs: np.ndarray
    rel: str
    rhs: float


@dataclass
class LinearProgram:
    """maximize ``objective @ x`` subject to ``constraints`` and per-variable ``bounds``.

    Lower bounds are 0 or -inf, upper bounds 1 or +inf.
    """

    num_vars: int
    objective: np.ndarray
    constraints: list[Constraint] = field(default_factory=list)
    bounds: list[tuple[float, float]] = field(default_factory=list)
    names: list[str] | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValidationError("objective", f"expected {self.num_vars} coefficients")
        if not np.all(np.isfinite(self.objective)):
            raise ValidationError("objective", "coefficients must be finite")
        if not self.bounds:
            self.bounds = [(0.0, math.inf)] * self.num_vars
        if len(self.bounds) != self.num_vars:
            raise ValidationError("bounds", f"expected {self.num_vars} entries")
        for lo, hi in self.bounds:
            if lo not in (0.0, -math.inf) or hi not in (1.0, math.inf):
                raise ValidationError("bounds", f"unsupported bound pair ({lo}, {hi})")

    def add_constraint(self, coefs: dict[int, float] | tuple[Sequence[int], Sequence[float]], rel: str, rhs: float):
        if isinstance(coefs, dict):
            idx, val = list(coefs.keys()), list(coefs.values())
        else:
            idx, val = coefs
        idx = np.asarray(idx, dtype=np.int64)
        val = np.asarray(val, dtype=float)
        if rel not in RELATIONS:
            raise ValidationError("rel", f"unknown relation {rel!r}")
        if idx.shape != val.shape:
            raise ValidationError("coefs", "index and coefficient lengths differ")
        if idx.size and (idx.min() < 0 or idx.max() >= self.num_vars):
            raise ValidationError("coefs", "variable index out of range")
        if not np.all(np.isfinite(val)) or not math.isfinite(rhs):
            raise ValidationError("coefs", "coefficients must be finite")
        self.constraints.append(Constraint(idx, val, rel, float(rhs)))

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def var_name(self, j: int) -> str:
        return self.names[j] if self.names else f"x{j}"

    def dense(self) -> tuple[np.ndarray, list[str], np.ndarray]:
        a = np.zeros((self.num_constraints, self.num_vars))
        for i, con in enumerate(self.constraints):
            np.add.at(a[i], con.indices, con.coefs)
        rels = [con.rel for con in self.constraints]
        b = np.array([con.rhs for con in self.constraints])
        return a, rels, b

    def max_violation(self, x: np.ndarray) -> float:
        """Largest violation of any constraint or bound at ``x`` (0 when feasible)."""
        worst = 0.0
        for con in self.constraints:
            lhs = float(con.coefs @ x[con.indices])
            if con.rel == "<=":
                worst = max(worst, lhs - con.rhs)
            elif con.rel == ">=":
                worst = max(worst, con.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - con.rhs))
        for j, (lo, hi) in enumerate(self.bounds):
            worst = max(worst, lo - x[j], x[j] - hi)
        return worst

    def dump(self) -> str:
        """Plain-text listing: objective, one line per constraint, then bounds."""

        def terms(idx, val):
            return " ".join(f"{c:+.17g}*{self.var_name(j)}" for j, c in zip(idx, val) if c != 0) or "0"

        nz = np.flatnonzero(self.objective)
        lines = [f"max: {terms(nz, self.objective[nz])}"]
        for con in self.constraints:
            lines.append(f"{terms(con.indices, con.coefs)} {con.rel} {con.rhs:.17g}")
        for j, (lo, hi) in enumerate(self.bounds):
            lines.append(f"bound: {lo:g} <= {self.var_name(j)} <= {hi:g}")
        return "\n".join(lines) + "\n"


@dataclass
class LPSolution:
    status: str
    objective_value: float
    assignment: np.ndarray
    iterations: int = 0
    max_violation: float = math.nan


class _Simplex:
    """Revised primal simplex over ``max c z`` s.t. ``A z <= b``, ``z >= 0``.

    A vertex is described by ``n`` active constraints. Labels ``0..n-1``
    are the bounds ``z_j >= 0`` and ``n + i`` is row ``i`` of ``A``; a label
    is nonbasic exactly when its constraint is in the active set. Row
    slacks are carried incrementally and recomputed from the original data
    at every refactorization.
    """

    def __init__(self, a, b, c, active, rule: str = "auto", refactor_every: int = 64):
        self.a, self.b, self.c = a, b, c
        self.m, self.n = a.shape
        self.active = np.array(active, dtype=np.int64)
        self.refactor_every = refactor_every
        self.iterations = 0
        self.stalled = 0
        self.always_bland = rule == "bland"
        self.bland = self.always_bland
        self.refactor()

    def _rows(self, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g = np.zeros((labels.size, self.n))
        h = np.zeros(labels.size)
        bound = labels < self.n
        g[np.flatnonzero(bound), labels[bound]] = -1.0
        rows = labels[~bound] - self.n
        g[~bound] = self.a[rows]
        h[~bound] = self.b[rows]
        return g, h

    def refactor(self):
        g, h = self._rows(self.active)
        try:
            self.inv = np.linalg.inv(g)
        except np.linalg.LinAlgError:
            # report the active constraint whose row is most dependent on the rest
            _, r = np.linalg.qr(g.T)
            k = int(np.argmin(np.abs(np.diag(r))))
            raise DegeneratePivotError(int(self.active[k]), k, float(r[k, k])) from None
        self.z = self.inv @ h
        self.slack = self.b - self.a @ self.z
        self.is_active = np.zeros(self.n + self.m, dtype=bool)
        self.is_active[self.active] = True

    def entering(self) -> int | None:
        # multipliers of the active constraints; releasing a constraint with a
        # negative multiplier improves the objective
        lam = self.inv.T @ self.c
        cand = np.flatnonzero(lam < -OPT_TOL)
        if cand.size == 0:
            return None
        if self.bland:
            return int(cand[np.argmin(self.active[cand])])
        # steepest edge: best objective gain per unit step length in z
        norms = np.linalg.norm(self.inv[:, cand], axis=0)
        return int(cand[np.argmin(lam[cand] / norms)])

    def leaving(self, d: np.ndarray, ad: np.ndarray) -> tuple[int | None, float]:
        n = self.n
        rate = np.concatenate((-d, ad))
        room = np.concatenate((self.z, self.slack))
        # rates below this are round-off of a zero entry, never pivots
        min_rate = PIVOT_REL_TOL * max(1.0, float(np.abs(d).max()))
        cand = np.flatnonzero((rate > min_rate) & ~self.is_active)
        if cand.size == 0:
            return None, math.inf
        ratios = np.maximum(room[cand], 0.0) / rate[cand]
        best = ratios.min()
        ties = cand[ratios <= best + ZERO_TOL]
        # Bland's smallest label among ties, restricted to pivots of reasonable
        # size; degenerate vertices here tie thousands of rows and an
        # arbitrarily small pivot wrecks the basis conditioning
        if self.bland:
            big = rate[ties] >= TIE_PIVOT_RATIO * rate[ties].max()
            label = int(ties[big].min())
        else:
            label = int(ties[np.argmax(rate[ties])])
        return label, max(float(room[label]), 0.0) / float(rate[label])

    def pivot(self, pos: int, label: int, d: np.ndarray, ad: np.ndarray, step: float):
        g_new, _ = self._rows(np.array([label]))
        g_new = g_new[0]
        denom = g_new @ self.inv[:, pos]
        if abs(denom) < PIVOT_TOL:
            raise DegeneratePivotError(label, int(self.active[pos]), float(denom))
        self.z = self.z + step * d
        self.slack = self.slack - step * ad
        u = g_new @ self.inv
        u[pos] -= 1.0
        self.inv -= np.outer(self.inv[:, pos], u) / denom
        self.is_active[self.active[pos]] = False
        self.is_active[label] = True
        self.active[pos] = label
        self.iterations += 1
        if self.iterations % self.refactor_every == 0:
            self.refactor()

    def run(self, limit: int) -> str:
        while True:
            pos = self.entering()
            if pos is None:
                self.refactor()
                # a stale product-form inverse can hide an improving direction
                pos = self.entering()
                if pos is None:
                    return OPTIMAL
            d = -self.inv[:, pos]
            ad = self.a @ d
            label, step = self.leaving(d, ad)
            if label is None:
                return UNBOUNDED
            if self.iterations >= limit:
                return ITERATION_LIMIT
            self.pivot(pos, label, d, ad, step)
            if step > ZERO_TOL:
                self.stalled = 0
                self.bland = self.always_bland
            else:
                self.stalled += 1
                if self.stalled >= STALL_LIMIT:
                    self.bland = True

    @property
    def objective(self) -> float:
        return float(self.c @ self.z)


def _standard_form(lp: LinearProgram):
    """Rewrite as ``max c z`` s.t. ``A z <= b``, ``z >= 0``.

    Returns the arrays and a map ``x = T z`` back to the original variables.
    """
    a, rels, b = lp.dense()
    cols = []
    for j, (lo, _) in enumerate(lp.bounds):
        cols.append((j, 1.0))
        if lo == -math.inf:
            cols.append((j, -1.0))
    t = np.zeros((lp.num_vars, len(cols)))
    for k, (j, sign) in enumerate(cols):
        t[j, k] = sign
    rows, rhs = [], []
    for i, rel in enumerate(rels):
        if rel in ("<=", "="):
            rows.append(a[i])
            rhs.append(b[i])
        if rel in (">=", "="):
            rows.append(-a[i])
            rhs.append(-b[i])
    for j, (_, hi) in enumerate(lp.bounds):
        if hi == 1.0:
            e = np.zeros(lp.num_vars)
            e[j] = 1.0
            rows.append(e)
            rhs.append(1.0)
    big_a = np.array(rows).reshape(len(rows), lp.num_vars) @ t
    return big_a, np.array(rhs, dtype=float), lp.objective @ t, t


def _phase_one(a: np.ndarray, b: np.ndarray, limit: int, rule: str) -> tuple[np.ndarray | None, str, int]:
    """Find a feasible vertex using one auxiliary column ``w``: ``A z - w <= b``.

    Returns the active set of a feasible vertex of the original system.
    """
    m, n = a.shape
    aux = np.hstack([a, -np.ones((m, 1))])
    c = np.zeros(n + 1)
    c[n] = -1.0
    # z = 0, w = -min(b): bounds of z active plus the most violated row
    start = np.concatenate((np.arange(n), [n + 1 + int(np.argmin(b))]))
    sx = _Simplex(aux, b, c, start, rule)
    status = sx.run(limit)
    if status == ITERATION_LIMIT:
        return None, status, sx.iterations
    if sx.objective < -FEAS_TOL:
        return None, INFEASIBLE, sx.iterations
    if not sx.is_active[n]:
        # w sits at zero but is basic: swap its bound into the active set
        pos = int(np.argmax(np.abs(sx.inv[n, :])))
        sx.active[pos] = n
        sx.refactor()
    active = sx.active[sx.active != n]
    # aux labels: rows start at n + 1; shift back to the original numbering
    return np.where(active > n, active - 1, active), OPTIMAL, sx.iterations


def solve_lp(lp: LinearProgram, max_iterations: int | None = None, rule: str = "auto") -> LPSolution:
    """Solve ``lp`` by a two-phase dense primal simplex.

    ``rule="auto"`` prices by steepest edge and falls back to Bland's rule
    after ``STALL_LIMIT`` consecutive degenerate pivots, until the objective
    moves again; ``rule="bland"`` uses Bland's rule throughout. The default
    iteration limit is ``50 * (num_vars + num_constraints)``.
    """
    if rule not in ("auto", "bland"):
        raise ValidationError("rule", f"unknown pivot rule {rule!r}")
    if max_iterations is None:
        max_iterations = 50 * (lp.num_vars + lp.num_constraints)
    a, b, c, t = _standard_form(lp)
    m, n = a.shape
    empty = np.full(lp.num_vars, math.nan)

    used = 0
    active = np.arange(n)
    if m and b.min() < -FEAS_TOL:
        active, status, used = _phase_one(a, b, max_iterations, rule)
        if active is None:
            return LPSolution(status, math.nan, empty, used)
    sx = _Simplex(a, b, c, active, rule)
    status = sx.run(max_iterations - used)
    iterations = used + sx.iterations
    if status != OPTIMAL:
        return LPSolution(status, math.nan, empty, iterations)

    x = t @ np.maximum(sx.z, 0.0)
    return LPSolution(
        status=OPTIMAL,
        objective_value=float(lp.objective @ x),
        assignment=x,
        iterations=iterations,
        max_violation=lp.max_violation(x),
    )
