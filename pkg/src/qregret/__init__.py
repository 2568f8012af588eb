"""Estimate hidden parameters of repeated games from observed play via quantal regret."""
from .estimators import min_regret, min_relative_regret, prior_mean, quantal_regret, quantal_weights
from .game import (
    AuctionSpec,
    BidLog,
    Freq2x2,
    GameSpec2x2,
    Mechanism,
    ValidationError,
    ValueGrid,
    make_uniform_grid,
    validate_freq,
)
from .regret import RegretCurve, TaskError, regret_2x2_row, regret_curve_2x2, regret_curve_auction
from .tasks import Method, TaskItem

__all__ = [
    "AuctionSpec", "BidLog", "Freq2x2", "GameSpec2x2", "Mechanism", "Method", "RegretCurve", "TaskError",
    "TaskItem", "ValidationError", "ValueGrid", "make_uniform_grid", "min_regret", "min_relative_regret",
    "prior_mean", "quantal_regret", "quantal_weights", "regret_2x2_row", "regret_curve_2x2",
    "regret_curve_auction", "validate_freq",
]
__version__ = "0.1.0"
