"""Estimation targets with cached regret curves, and dispatch over methods.

A :class:`TaskItem` is one hidden quantity (a payoff slot or a bidder's
value). Its regret curves do not depend on lambda, so sweeps reuse them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .estimators import min_regret, min_relative_regret, quantal_regret
from .game import ValidationError
from .regret import RegretCurve


class Method(str, enum.Enum):
    QR = "qr"
    MR = "mr"
    MR_REL = "mr_rel"
    EQ = "eq"
    EQ1 = "eq1"
    EQ2 = "eq2"

    @classmethod
    def parse(cls, text: str) -> "Method":
        try:
            return cls(text.strip().lower().replace("-", "_"))
        except ValueError:
            raise ValidationError(f"unknown method {text!r}; choose from {[m.value for m in cls]}") from None


CURVE_METHODS = (Method.QR, Method.MR, Method.MR_REL)


@dataclass(frozen=True)
class TaskItem:
    group: str  # game_id, or the auction mechanism
    session_id: str
    subject: str  # payoff slot or player id
    true_value: Optional[float]
    curves: tuple[RegretCurve, ...]
    lambda_scale: float = 1.0
    baselines: Mapping[str, float] = field(default_factory=dict)  # equilibrium estimates by method


def estimate_item(item: TaskItem, method: Method, lam: float) -> float:
    method = Method(method)
    if method is Method.QR:
        return quantal_regret(item.curves, lam * item.lambda_scale)
    if method is Method.MR:
        return min_regret(item.curves)
    if method is Method.MR_REL:
        return min_relative_regret(item.curves)
    try:
        return item.baselines[method.value]
    except KeyError:
        raise ValidationError(f"method {method.value} is not available for {item.subject}") from None
