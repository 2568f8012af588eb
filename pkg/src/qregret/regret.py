"""Regret of a player as a function of a hypothesised hidden value.

Regret is per round: the best fixed action's average utility in hindsight
minus the realised average utility, with the other players' play held fixed.
Values below zero are clamped to zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .auctions import bid_statistics, default_candidates
from .game import (
    AuctionSpec,
    BidLog,
    Freq2x2,
    GameSpec2x2,
    Mechanism,
    ValidationError,
    ValueGrid,
    parse_slot,
)


class TaskError(ValueError):
    """The requested estimation task is not well posed for this game."""


@dataclass(frozen=True, eq=False)
class RegretCurve:
    grid: ValueGrid
    regrets: np.ndarray
    player_id: str = ""
    # best fixed-action utility per grid point; denominators for relative regret
    optimal_utilities: Optional[np.ndarray] = None

    def __post_init__(self):
        r = np.array(self.regrets, dtype=float)
        if r.shape != self.grid.points.shape:
            raise ValidationError("regrets must align with the grid")
        r.setflags(write=False)
        object.__setattr__(self, "regrets", r)
        if self.optimal_utilities is not None:
            u = np.array(self.optimal_utilities, dtype=float)
            u.setflags(write=False)
            object.__setattr__(self, "optimal_utilities", u)

    def __len__(self):
        return self.regrets.size


def _clamp(r: np.ndarray) -> np.ndarray:
    return np.maximum(r, 0.0)


# --- 2x2 games -------------------------------------------------------------

def row_utilities(payoffs, freq: Freq2x2):
    """``(util_Up, util_Down, util_Emp)`` for the row player.

    ``payoffs`` is (UL, UR, DL, DR); entries may be arrays, which broadcast.
    """
    a_ul, a_ur, a_dl, a_dr = payoffs
    p_left = freq.f_UL + freq.f_DL
    p_right = freq.f_UR + freq.f_DR
    up = p_left * a_ul + p_right * a_ur
    down = p_left * a_dl + p_right * a_dr
    emp = freq.f_UL * a_ul + freq.f_UR * a_ur + freq.f_DL * a_dl + freq.f_DR * a_dr
    return up, down, emp


def regret_2x2_row(payoffs, freq: Freq2x2):
    """``max(util_Up, util_Down) - util_Emp``, clamped at zero."""
    up, down, emp = row_utilities(payoffs, freq)
    return _clamp(np.maximum(up, down) - emp)


def _owner_view(spec: GameSpec2x2, slot: str, freq: Freq2x2):
    """Payoffs, frequencies and cell index as seen by the slot's owner acting as row player."""
    role, k = parse_slot(slot)
    others = [s for s in spec.hidden_slots(role) if s != slot]
    if others:
        raise TaskError(f"{role} player has other hidden slots {others}; cannot estimate {slot}")
    if role == "row":
        return list(spec.row_payoffs), freq, k
    t = spec.transposed()
    return list(t.row_payoffs), freq.transposed(), (0, 2, 1, 3)[k]


def regret_values_2x2(spec: GameSpec2x2, hidden_slot: str, freq: Freq2x2, candidates: np.ndarray):
    """Regret and best fixed-row utility of the slot's owner at each candidate payoff."""
    pay, f, k = _owner_view(spec, hidden_slot, freq)
    cand = np.asarray(candidates, dtype=float)
    pay = [np.full(cand.shape, v if v is not None else 0.0) for v in pay]
    pay[k] = cand
    up, down, emp = row_utilities(pay, f)
    best = np.maximum(up, down)
    return _clamp(best - emp), best


def regret_curve_2x2(spec: GameSpec2x2, hidden_slot: str, freq: Freq2x2, grid: ValueGrid,
                     player_id: Optional[str] = None) -> RegretCurve:
    """Regret of the slot owner with the hidden payoff set to each grid value.

    The column player's curve is the row computation on the transposed game.
    """
    reg, best = regret_values_2x2(spec, hidden_slot, freq, grid.points)
    return RegretCurve(grid, reg, player_id or hidden_slot.split("_")[0], best)


# --- auctions --------------------------------------------------------------

def _auction_curve(log, spec, player, grid, candidates, player_wins_ties):
    k = log.index(player)
    if candidates is None:
        candidates = default_candidates(log, k, grid)
    candidates = np.asarray(candidates, dtype=float)
    if candidates.size == 0:
        raise ValidationError("need at least one candidate bid")
    Q, TE, Qe, TEe = bid_statistics(log, spec, k, candidates, player_wins_ties)
    theta = grid.points
    best = (theta[:, None] * Q[None, :] - TE[None, :]).max(axis=1)
    emp = theta * Qe - TEe
    T = log.n_rounds
    return RegretCurve(grid, _clamp((best - emp) / T), str(player), best / T)


def regret_curve_first_price(log: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                             bid_candidates: Optional[Sequence[float]] = None) -> RegretCurve:
    """First-price regret, the player winning every tie at the top bid."""
    if spec.mechanism is not Mechanism.FIRST_PRICE:
        raise ValidationError("expected a FIRST_PRICE auction spec")
    return _auction_curve(log, spec, player, grid, bid_candidates, player_wins_ties=True)


def regret_curve_position_auction(log: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                                  bid_candidates: Optional[Sequence[float]] = None) -> RegretCurve:
    """GSP/VCG regret with utility ``ctr(slot) * theta - payment`` per round."""
    if spec.mechanism is Mechanism.FIRST_PRICE:
        raise ValidationError("use regret_curve_first_price for first-price auctions")
    return _auction_curve(log, spec, player, grid, bid_candidates, player_wins_ties=False)


def regret_curve_auction(log: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                         bid_candidates: Optional[Sequence[float]] = None) -> RegretCurve:
    if spec.mechanism is Mechanism.FIRST_PRICE:
        return regret_curve_first_price(log, spec, player, grid, bid_candidates)
    return regret_curve_position_auction(log, spec, player, grid, bid_candidates)
