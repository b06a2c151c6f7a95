"""Seeded instance suites, the random sweep and the worst-case search."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import CHECK_TOL, BoundReport, analyze
from .distribution import (
    DiscreteDistribution,
    equal_revenue_discrete,
    make_distribution,
    random_distribution,
)
from .errors import ValidationError
from .mechanism import DEFAULT_GRID_LIMIT, LPFailure, ProductInstance
from .myerson import optimal_price

log = logging.getLogger(__name__)

COLUMNS = [
    "instance_id", "n1", "n2", "r1", "r2", "alpha", "srev", "rev", "emin", "g_alpha",
    "theorem_slack", "lemma1_slack", "lemma2_slack", "ratio", "status",
]

# stream tags keep sweep and search draws apart for the same seed
_SWEEP, _SEARCH = 0, 1
STEP_SIZES = (0.1, -0.1, 0.01, -0.01)


@dataclass
class ExperimentConfig:
    seed: int = 0
    num_instances: int = 200
    support_sizes: tuple[int, int] = (1, 8)
    value_range: tuple[float, float] = (0.0, 10.0)
    alpha_window: tuple[float, float] | None = None
    grid_limit: int = DEFAULT_GRID_LIMIT
    output_path: str | None = None
    format: str = "csv"
    restarts: int = 20
    steps: int = 200
    start: str = "random"
    workers: int = 1

    def __post_init__(self):
        lo, hi = self.support_sizes
        if not 1 <= lo <= hi:
            raise ValidationError("support_sizes", f"need 1 <= lo <= hi, got {self.support_sizes}")
        vlo, vhi = self.value_range
        if vlo < 0 or not vhi > vlo:
            raise ValidationError("value_range", f"need 0 <= lo < hi, got {self.value_range}")
        if self.alpha_window is not None:
            alo, ahi = self.alpha_window
            if not 1.0 <= alo <= ahi:
                raise ValidationError("alpha_window", f"need 1 <= lo <= hi, got {self.alpha_window}")
        if self.num_instances < 0:
            raise ValidationError("num_instances", "must be nonnegative")
        if not 1 <= self.grid_limit <= DEFAULT_GRID_LIMIT:
            raise ValidationError("grid_limit", f"must be in [1, {DEFAULT_GRID_LIMIT}]")
        if self.format not in ("csv", "json"):
            raise ValidationError("format", f"unknown format {self.format!r}")
        if self.start not in ("random", "equal_revenue"):
            raise ValidationError("start", f"unknown start {self.start!r}")
        if self.restarts < 0 or self.steps < 0 or self.workers < 1:
            raise ValidationError("restarts", "restarts and steps must be >= 0, workers >= 1")


@dataclass
class InstanceResult:
    instance_id: int
    instance: ProductInstance
    report: BoundReport | None
    status: str
    error: str = ""

    def row(self) -> dict:
        n1, n2 = self.instance.shape
        row = {"instance_id": self.instance_id, "n1": n1, "n2": n2}
        rep = self.report
        for name in COLUMNS[3:-2]:
            row[name] = getattr(rep, name) if rep is not None else None
        row["ratio"] = rep.ratio if rep is not None else None
        row["status"] = self.status
        return row


def rescale_to_alpha(inst: ProductInstance, alpha: float) -> ProductInstance:
    """Scale the weaker item's values so that max(R1/R2, R2/R1) equals ``alpha``."""
    r1, r2 = optimal_price(inst.d1).revenue, optimal_price(inst.d2).revenue
    if min(r1, r2) <= 0:
        return inst
    if r1 >= r2:
        return ProductInstance(inst.d1, inst.d2.scaled(r1 / (r2 * alpha)))
    return ProductInstance(inst.d1.scaled(r2 / (r1 * alpha)), inst.d2)


def _draw_sizes(rng: np.random.Generator, cfg: ExperimentConfig) -> tuple[int, int]:
    lo, hi = cfg.support_sizes
    while True:
        n1, n2 = (int(k) for k in rng.integers(lo, hi + 1, size=2))
        if n1 * n2 <= cfg.grid_limit:
            return n1, n2


def _draw_alpha(rng: np.random.Generator, window: tuple[float, float]) -> float:
    lo, hi = window
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def make_instance(cfg: ExperimentConfig, index: int) -> ProductInstance:
    """Instance ``index`` of the suite; depends only on ``(cfg.seed, index)``."""
    rng = np.random.default_rng([cfg.seed, _SWEEP, index])
    n1, n2 = _draw_sizes(rng, cfg)
    inst = ProductInstance(
        random_distribution(rng, n1, cfg.value_range),
        random_distribution(rng, n2, cfg.value_range),
    )
    if cfg.alpha_window is not None:
        inst = rescale_to_alpha(inst, _draw_alpha(rng, cfg.alpha_window))
    return inst


def evaluate(instance_id: int, inst: ProductInstance, grid_limit: int = DEFAULT_GRID_LIMIT) -> InstanceResult:
    """Analyze one instance; solver failures are recorded, not raised."""
    try:
        rep = analyze(inst, grid_limit)
    except (LPFailure, ArithmeticError) as exc:
        return InstanceResult(instance_id, inst, None, "unsolved", str(exc))
    if not rep.passed:
        status = "violation"
    elif rep.degenerate:
        status = "degenerate"
    else:
        status = "ok"
    return InstanceResult(instance_id, inst, rep, status)


def _evaluate_index(args) -> InstanceResult:
    cfg, index = args
    return evaluate(index, make_instance(cfg, index), cfg.grid_limit)


@dataclass
class SuiteSummary:
    results: list[InstanceResult]
    max_ratio: float | None
    argmax_id: int | None
    counts: dict[str, int]
    alpha_deciles: list[dict] = field(default_factory=list)

    @property
    def reports(self) -> list[BoundReport]:
        return [r.report for r in self.results if r.report is not None]

    @property
    def violations(self) -> list[int]:
        return [r.instance_id for r in self.results if r.status == "violation"]

    @property
    def unsolved(self) -> list[int]:
        return [r.instance_id for r in self.results if r.status == "unsolved"]

    @property
    def argmax_instance(self) -> ProductInstance | None:
        for r in self.results:
            if r.instance_id == self.argmax_id:
                return r.instance
        return None


def alpha_decile_maxima(reports: list[BoundReport]) -> list[dict]:
    """Largest observed rev/srev within each decile of the observed alphas."""
    pairs = [(r.alpha, r.ratio) for r in reports if not r.degenerate and r.ratio is not None]
    if not pairs:
        return []
    alphas = np.array([a for a, _ in pairs])
    ratios = np.array([q for _, q in pairs])
    edges = np.quantile(alphas, np.linspace(0.0, 1.0, 11))
    bins = np.clip(np.searchsorted(edges, alphas, side="right") - 1, 0, 9)
    out = []
    for k in range(10):
        mask = bins == k
        if mask.any():
            out.append({
                "alpha_lo": float(edges[k]),
                "alpha_hi": float(edges[k + 1]),
                "count": int(mask.sum()),
                "max_ratio": float(ratios[mask].max()),
            })
    return out


def summarize(results: list[InstanceResult]) -> SuiteSummary:
    counts = {s: 0 for s in ("ok", "degenerate", "violation", "unsolved")}
    best, best_id = None, None
    for r in results:
        counts[r.status] += 1
        ratio = r.report.ratio if r.report is not None else None
        if ratio is not None and (best is None or ratio > best):
            best, best_id = ratio, r.instance_id
    reports = [r.report for r in results if r.report is not None]
    return SuiteSummary(results, best, best_id, counts, alpha_decile_maxima(reports))


def run_random_suite(cfg: ExperimentConfig) -> SuiteSummary:
    """Analyze ``cfg.num_instances`` seeded random instances, in index order."""
    jobs = [(cfg, i) for i in range(cfg.num_instances)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_evaluate_index, jobs, chunksize=8))
    else:
        results = [_evaluate_index(job) for job in jobs]
    summary = summarize(results)
    if summary.violations:
        log.error("bound violated on instances %s", summary.violations)
    if summary.unsolved:
        log.warning("LP unsolved on instances %s", summary.unsolved)
    if cfg.output_path:
        write_rows([r.row() for r in results], cfg.output_path, cfg.format)
    return summary


# -- worst-case search --------------------------------------------------------


@dataclass
class SearchResult:
    best_instance: ProductInstance | None
    best_report: BoundReport | None
    trajectories: list[list[float]]
    violations: list[BoundReport] = field(default_factory=list)
    unsolved: int = 0

    @property
    def best_ratio(self) -> float | None:
        return self.best_report.ratio if self.best_report is not None else None


def _alpha_of(inst: ProductInstance) -> float | None:
    r1, r2 = optimal_price(inst.d1).revenue, optimal_price(inst.d2).revenue
    if min(r1, r2) <= 0:
        return None
    return max(r1, r2) / min(r1, r2)


def _in_window(alpha: float | None, window: tuple[float, float] | None) -> bool:
    if window is None:
        return alpha is not None
    # rescaling lands on the window edge only up to round-off
    return alpha is not None and window[0] * (1 - 1e-12) <= alpha <= window[1] * (1 + 1e-12)


def _start_instance(rng: np.random.Generator, cfg: ExperimentConfig) -> ProductInstance:
    n1, n2 = _draw_sizes(rng, cfg)
    if cfg.start == "equal_revenue":
        dists = []
        for n in (n1, n2):
            base = equal_revenue_discrete(n, 1.0)
            mass = np.asarray(base.probs) * rng.uniform(0.9, 1.1, size=n)
            dists.append(make_distribution(base.values, (mass / mass.sum()).tolist()))
        inst = ProductInstance(*dists)
    else:
        inst = ProductInstance(
            random_distribution(rng, n1, cfg.value_range),
            random_distribution(rng, n2, cfg.value_range),
        )
    if cfg.alpha_window is not None:
        inst = rescale_to_alpha(inst, _draw_alpha(rng, cfg.alpha_window))
    return inst


def perturb(rng: np.random.Generator, inst: ProductInstance) -> ProductInstance:
    """Scale one atom's mass by 1 +/- 10% or 1 +/- 1% and renormalize; supports are kept."""
    item = int(rng.integers(2))
    d: DiscreteDistribution = inst.d1 if item == 0 else inst.d2
    probs = np.array(d.probs)
    probs[int(rng.integers(d.size))] *= 1.0 + STEP_SIZES[int(rng.integers(len(STEP_SIZES)))]
    moved = make_distribution(d.values, (probs / probs.sum()).tolist())
    return ProductInstance(moved, inst.d2) if item == 0 else ProductInstance(inst.d1, moved)


def worst_case_search(cfg: ExperimentConfig) -> SearchResult:
    """Hill-climb on atom masses to find a large rev/srev; returns the best seen.

    Each restart draws a starting instance (rescaled into ``alpha_window``
    when one is given) and accepts a move only if the ratio strictly
    increases and alpha stays in the window. Nothing here certifies a
    global maximum.
    """
    best: tuple[ProductInstance, BoundReport] | None = None
    trajectories: list[list[float]] = []
    violations: list[BoundReport] = []
    unsolved = 0
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, _SEARCH, restart])
        current = _start_instance(rng, cfg)
        res = evaluate(restart, current, cfg.grid_limit)
        if res.report is None or res.report.ratio is None or not _in_window(res.report.alpha, cfg.alpha_window):
            unsolved += res.report is None
            trajectories.append([])
            continue
        report = res.report
        if not report.passed:
            violations.append(report)
        path = [report.ratio]
        for _ in range(cfg.steps):
            candidate = perturb(rng, current)
            if not _in_window(_alpha_of(candidate), cfg.alpha_window):
                continue
            res = evaluate(restart, candidate, cfg.grid_limit)
            if res.report is None:
                unsolved += 1
                continue
            if res.report.ratio > report.ratio:
                current, report = candidate, res.report
                path.append(report.ratio)
                if not report.passed:
                    violations.append(report)
        trajectories.append(path)
        if best is None or report.ratio > best[1].ratio:
            best = (current, report)
    if violations:
        log.error("bound violated on %d accepted search states", len(violations))
    result = SearchResult(
        best[0] if best else None, best[1] if best else None, trajectories, violations, unsolved
    )
    if cfg.output_path:
        rows = []
        if best is not None:
            rows.append(InstanceResult(0, best[0], best[1], "violation" if not best[1].passed else "ok").row())
        write_rows(rows, cfg.output_path, cfg.format)
    return result


# -- output -------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_rows(rows: list[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in COLUMNS])
    return buf.getvalue()


def read_rows(text: str, fmt: str = "csv") -> list[dict]:
    """Inverse of :func:`format_rows`."""
    if fmt == "json":
        return json.loads(text)
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row = {}
        for key, val in raw.items():
            if key == "status":
                row[key] = val
            elif key in ("instance_id", "n1", "n2"):
                row[key] = int(val)
            else:
                row[key] = float(val) if val != "" else None
        rows.append(row)
    return rows


def atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_rows(rows: list[dict], path: str, fmt: str = "csv"):
    atomic_write(path, format_rows(rows, fmt))
