"""Point estimates from regret curves.

``quantal_regret`` is the posterior mean under a prior reweighted by
``exp(-lambda * total regret)``; ``min_regret`` is its lambda -> infinity limit
and ``prior_mean`` its lambda = 0 limit.
"""
from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .game import ValidationError, ValueGrid
from .regret import RegretCurve

Curves = Union[RegretCurve, Sequence[RegretCurve]]


def _as_list(curves: Curves) -> list[RegretCurve]:
    if isinstance(curves, RegretCurve):
        return [curves]
    curves = list(curves)
    if not curves:
        raise ValidationError("need at least one regret curve")
    return curves


def total_regret(curves: Curves) -> tuple[ValueGrid, np.ndarray]:
    """Pointwise sum of regrets over curves sharing one grid."""
    curves = _as_list(curves)
    grid = curves[0].grid
    for c in curves[1:]:
        if c.grid != grid:
            raise ValidationError("regret curves are on different grids")
    total = curves[0].regrets.copy()
    for c in curves[1:]:
        total = total + c.regrets
    return grid, total


def _weighted_mean(points: np.ndarray, w: np.ndarray) -> float:
    # exactly rounded sums: symmetric grids give their exact midpoint
    return math.fsum(w * points) / math.fsum(w)


def prior_mean(grid: ValueGrid) -> float:
    return _weighted_mean(grid.points, grid.prior)


def quantal_weights(curves: Curves, lam: float) -> np.ndarray:
    """Normalised posterior weights over the grid."""
    if not (math.isfinite(lam) and lam >= 0):
        raise ValidationError(f"lambda must be finite and >= 0, got {lam!r}")
    grid, r = total_regret(curves)
    support = grid.prior > 0
    # shift by the smallest regret with prior mass; the estimate is shift invariant
    shift = r[support].min()
    w = grid.prior * np.exp(-lam * (r - shift))
    return w / w.sum()


def quantal_regret(curves: Curves, lam: float) -> float:
    if not (math.isfinite(lam) and lam >= 0):
        raise ValidationError(f"lambda must be finite and >= 0, got {lam!r}")
    if lam == 0:
        return prior_mean(total_regret(curves)[0])
    w = quantal_weights(curves, lam)
    return _weighted_mean(_as_list(curves)[0].grid.points, w)


def min_regret(curves: Curves) -> float:
    """Grid value of least (total) regret; ties go to the smallest value."""
    grid, r = total_regret(curves)
    return float(grid.points[int(np.argmin(r))])


def min_relative_regret(curves: Curves, optimal_fixed_utilities=None, eps: float = 1e-9) -> float:
    """Grid value minimising regret divided by the best fixed-action utility.

    With several curves both numerator and denominator are summed. When
    ``optimal_fixed_utilities`` is omitted the curves' own values are used.
    """
    curves = _as_list(curves)
    grid, r = total_regret(curves)
    if optimal_fixed_utilities is None:
        if any(c.optimal_utilities is None for c in curves):
            raise ValidationError("curves carry no optimal fixed-action utilities")
        opt = sum(c.optimal_utilities for c in curves)
    else:
        opt = np.asarray(optimal_fixed_utilities, dtype=float)
        if opt.shape != r.shape:
            raise ValidationError("optimal utilities must align with the grid")
    rel = r / np.maximum(opt, eps)
    return float(grid.points[int(np.argmin(rel))])
