"""Per-bidder estimation targets for repeated ad auctions."""
from __future__ import annotations

import logging
from typing import Mapping, Optional

from .auctions import EstimatorFailure, eq1_varian, eq2_best_response, eq_vcg_average_bid
from .game import AuctionSpec, BidLog, Mechanism, ValueGrid, make_uniform_grid
from .regret import regret_curve_auction
from .tasks import TaskItem

log = logging.getLogger(__name__)

DEFAULT_RANGE = (1.0, 60.0)
DEFAULT_LAMBDA = 1.0
DEFAULT_HIT_DELTA = 6.0
DEFAULT_REL_HIT_DELTA = 0.2


def build_auction_items(logs: Mapping[str, BidLog], spec: AuctionSpec, grid: Optional[ValueGrid] = None,
                        values: Optional[Mapping[tuple[str, str], float]] = None,
                        equilibrium: bool = True) -> list[TaskItem]:
    """One item per (session, bidder) with its regret curve and equilibrium baselines.

    ``values`` maps ``(session_id, player_id)`` to the true value when known.
    EQ (mean bid) is always attached; EQ1 and EQ2 only for GSP.
    """
    grid = grid or make_uniform_grid(*DEFAULT_RANGE, 1.0)
    values = values or {}
    items = []
    for sid, blog in logs.items():
        eq1 = None
        if equilibrium and spec.mechanism is Mechanism.GSP:
            try:
                eq1 = eq1_varian(blog, spec, (grid.lower, grid.upper)).estimates
            except EstimatorFailure as e:
                log.warning("session %s: %s", sid, e)
        for pid in blog.player_ids:
            curve = regret_curve_auction(blog, spec, pid, grid)
            base = {}
            if equilibrium:
                base["eq"] = eq_vcg_average_bid(blog, pid)
                if eq1 is not None:
                    base["eq1"] = eq1[pid]
                if spec.mechanism is Mechanism.GSP:
                    base["eq2"] = eq2_best_response(blog, spec, pid, grid)
            items.append(TaskItem(spec.mechanism.value, sid, pid, values.get((sid, pid)), (curve,), 1.0, base))
    return items
