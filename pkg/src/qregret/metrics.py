"""Error reports, lambda and valuation-range sweeps, comparison tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .game import ValidationError, ValueGrid, make_uniform_grid
from .tasks import Method, TaskItem, estimate_item

HIT_TOL = 1e-9  # absorbs float noise at the +-K boundary


@dataclass(frozen=True)
class ErrorEntry:
    id: str
    estimate: float
    true_value: float
    abs_error: float
    rel_error: Optional[float]


@dataclass(frozen=True)
class ErrorReport:
    entries: tuple[ErrorEntry, ...]
    rmse: float
    avg_error: float
    hit_rate: float
    hit_delta: float
    relative: bool = False

    def as_dict(self) -> dict:
        return {
            "rmse": self.rmse,
            "avg_error": self.avg_error,
            "hit_rate": self.hit_rate,
            "hit_delta": self.hit_delta,
            "error": "rel" if self.relative else "abs",
            "n": len(self.entries),
        }


def compute_report(pairs: Sequence[tuple[float, float]], hit_delta: float, relative: bool = False,
                   ids: Optional[Sequence[str]] = None) -> ErrorReport:
    """RMSE, mean error and boundary-inclusive +-``hit_delta`` hit rate.

    ``pairs`` are (estimate, true value). With ``relative`` the errors are
    divided by the true value and ``hit_delta`` is a fraction (0.2 for 20%).
    """
    pairs = [(float(e), float(v)) for e, v in pairs]
    if not pairs:
        raise ValidationError("cannot report on zero estimates")
    ids = list(ids) if ids is not None else [str(k) for k in range(len(pairs))]
    entries = []
    for pid, (est, truth) in zip(ids, pairs):
        abs_err = abs(est - truth)
        if relative and truth == 0:
            raise ValidationError(f"relative error undefined for true value 0 ({pid})")
        rel = abs_err / abs(truth) if truth != 0 else None
        entries.append(ErrorEntry(pid, est, truth, abs_err, rel))
    errs = np.array([e.rel_error if relative else e.abs_error for e in entries])
    # sorted fsum: the aggregates do not depend on entry order
    rmse = math.sqrt(math.fsum(sorted(errs ** 2)) / errs.size)
    avg = math.fsum(sorted(errs)) / errs.size
    hits = int(np.sum(errs <= hit_delta + HIT_TOL))
    return ErrorReport(tuple(entries), rmse, avg, hits / errs.size, float(hit_delta), relative)


def report_items(items: Sequence[TaskItem], method: Method, lam: float, hit_delta: float,
                 relative: bool = False) -> ErrorReport:
    scored = [it for it in items if it.true_value is not None]
    pairs = [(estimate_item(it, method, lam), it.true_value) for it in scored]
    ids = [f"{it.group}/{it.session_id}/{it.subject}" for it in scored]
    return compute_report(pairs, hit_delta, relative, ids)


def rmse_of(items: Sequence[TaskItem], method: Method, lam: float, relative: bool = False) -> float:
    return report_items(items, method, lam, 0.0, relative).rmse


@dataclass(frozen=True)
class LambdaSweep:
    lambdas: tuple[float, ...]
    rmse: tuple[float, ...]
    best_lambda: float
    best_rmse: float

    def rows(self):
        return list(zip(self.lambdas, self.rmse))


def sweep_lambda(items: Sequence[TaskItem], lambdas: Sequence[float], relative: bool = False) -> LambdaSweep:
    """QR RMSE at each lambda over cached regret curves; ties go to the first lambda listed."""
    lambdas = [float(l) for l in lambdas]
    if not lambdas:
        raise ValidationError("need at least one lambda")
    if any(not (math.isfinite(l) and l >= 0) for l in lambdas):
        raise ValidationError("lambdas must be finite and >= 0")
    rmse = [rmse_of(items, Method.QR, l, relative) for l in lambdas]
    j = int(np.argmin(rmse))
    return LambdaSweep(tuple(lambdas), tuple(rmse), lambdas[j], rmse[j])


@dataclass(frozen=True)
class RangeRow:
    upper_bound: float
    optimal_lambda: float
    rmse: float
    sweep: LambdaSweep = field(repr=False, compare=False)


def sweep_range(build: Callable[[ValueGrid], Sequence[TaskItem]], upper_bounds: Sequence[float],
                lambdas: Sequence[float], lower: float = 0.0, step: float = 1.0,
                relative: bool = False) -> list[RangeRow]:
    """For each upper bound, rebuild the curves on ``[lower, upper]`` and sweep lambda."""
    rows = []
    for ub in upper_bounds:
        grid = make_uniform_grid(lower, float(ub), step)
        sw = sweep_lambda(build(grid), lambdas, relative)
        rows.append(RangeRow(float(ub), sw.best_lambda, sw.best_rmse, sw))
    return rows


METRIC_ROWS = ("RMSE", "Average Error", "Hit Rate")


def comparison_table(reports: Mapping[str, ErrorReport]) -> tuple[list[str], list[list]]:
    """Rows {RMSE, Average Error, Hit Rate} x one column per method."""
    header = ["metric"] + [m.upper() for m in reports]
    rows = [
        ["RMSE"] + [r.rmse for r in reports.values()],
        ["Average Error"] + [r.avg_error for r in reports.values()],
        ["Hit Rate"] + [r.hit_rate for r in reports.values()],
    ]
    return header, rows
