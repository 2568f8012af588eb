"""Position-auction mechanics and the equilibrium-based value estimators.

Payments are expected payments per auction (CTR-weighted), so a player with
value ``v`` in a slot with click rate ``c`` paying ``p`` gets utility ``c*v - p``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .game import AuctionSpec, BidLog, Mechanism, ValidationError, ValueGrid

log = logging.getLogger(__name__)


class EstimatorFailure(RuntimeError):
    """An estimator could not produce a value for the given data."""


@dataclass(frozen=True)
class RoundOutcome:
    allocation: tuple[Optional[int], ...]  # 0-based slot per player, None if unallocated
    payments: tuple[float, ...]
    ctr_awarded: tuple[float, ...]


def ranking(bids: Sequence[float], spec: AuctionSpec) -> list[int]:
    """Player indices from highest to lowest bid, ties ordered by ``spec.tie_rule``."""
    sign = 1 if spec.tie_rule == "lower_index" else -1
    return sorted(range(len(bids)), key=lambda i: (-bids[i], sign * i))


def run_round(bids: Sequence[float], spec: AuctionSpec) -> RoundOutcome:
    bids = [float(b) for b in bids]
    if len(bids) != spec.n_players:
        raise ValidationError(f"expected {spec.n_players} bids, got {len(bids)}")
    order = ranking(bids, spec)
    ctrs = spec.ctrs
    m = len(ctrs)
    alloc: list[Optional[int]] = [None] * len(bids)
    pay = [0.0] * len(bids)
    got = [0.0] * len(bids)
    ranked = [bids[i] for i in order]

    def bid_at(pos):  # 0-based position in the ranking; 0 past the last bidder
        return ranked[pos] if pos < len(ranked) else 0.0

    for s, i in enumerate(order[:m]):
        alloc[i] = s
        got[i] = ctrs[s]
        if spec.mechanism is Mechanism.FIRST_PRICE:
            pay[i] = bids[i]
        elif spec.mechanism is Mechanism.GSP:
            pay[i] = ctrs[s] * bid_at(s + 1)
        else:
            # externality: each lower bidder moves up one slot
            total = 0.0
            for k in range(s + 1, m + 1):
                below = ctrs[k] if k < m else 0.0
                total += (ctrs[k - 1] - below) * bid_at(k)
            pay[i] = total
    return RoundOutcome(tuple(alloc), tuple(pay), tuple(got))


def tie_priority(spec: AuctionSpec, player: int, n_players: int) -> np.ndarray:
    """For each opponent (in column order, player removed): does it win a tie against ``player``?"""
    return np.array([spec.beats_on_tie(k, player) for k in range(n_players) if k != player], dtype=bool)


def fixed_bid_outcomes(
    spec: AuctionSpec,
    opponent_bids: np.ndarray,
    priority: np.ndarray,
    bids: np.ndarray,
    chunk: int = 256,
) -> tuple[np.ndarray, np.ndarray]:
    """Replay hypothetical bids against each round's opponent bids.

    ``opponent_bids`` has shape (T, n-1); ``bids`` is either a vector of K
    candidate bids (each held fixed across all rounds) or a (K, T) matrix of
    per-round bids. Returns (ctr, payment), both (K, T).
    """
    opp = np.asarray(opponent_bids, dtype=float)
    T, n_opp = opp.shape
    b = np.asarray(bids, dtype=float)
    if b.ndim == 1:
        b = np.broadcast_to(b[:, None], (b.size, T))
    K = b.shape[0]
    m = spec.n_slots
    ctr0 = np.zeros(max(m, n_opp) + 2)
    ctr0[:m] = spec.ctrs

    width = max(m, n_opp) + 1
    below = np.zeros((T, width))  # opponents sorted descending, zero-padded
    below[:, :n_opp] = -np.sort(-opp, axis=1)
    if spec.mechanism is Mechanism.VCG:
        d = ctr0[:width] - ctr0[1:width + 1]
        terms = below * d[None, :]
        # suffix[t, r] = sum_{j >= r} (c_j - c_{j+1}) * below[t, j]
        suffix = np.zeros((T, width + 1))
        suffix[:, :width] = np.cumsum(terms[:, ::-1], axis=1)[:, ::-1]

    ctr_out = np.empty((K, T))
    pay_out = np.empty((K, T))
    rows = np.arange(T)[None, :]
    for lo in range(0, K, chunk):
        bb = b[lo:lo + chunk]
        ob = opp[None, :, :]
        beats = (ob > bb[:, :, None]) | ((ob == bb[:, :, None]) & priority[None, None, :])
        r = beats.sum(axis=2)  # opponents ranked above the player
        in_slot = r < m
        c = np.where(in_slot, ctr0[np.minimum(r, m)], 0.0)
        if spec.mechanism is Mechanism.FIRST_PRICE:
            p = np.where(in_slot, bb, 0.0)
        elif spec.mechanism is Mechanism.GSP:
            p = np.where(in_slot, c * below[rows, np.minimum(r, width - 1)], 0.0)
        else:
            p = np.where(in_slot, suffix[rows, np.minimum(r, width)], 0.0)
        ctr_out[lo:lo + chunk] = c
        pay_out[lo:lo + chunk] = p
    return ctr_out, pay_out


def default_candidates(log: BidLog, player: int, grid: ValueGrid, extra: Sequence[float] = ()) -> np.ndarray:
    """Fixed bids to search: the value grid, 0, the player's own bids, and every
    opponent bid both as-is and raised by one grid step."""
    opp = np.delete(log.bids, player, axis=1).ravel()
    tick = grid.step
    parts = [grid.points, [0.0], log.bids[:, player], opp, opp + tick, np.asarray(extra, dtype=float)]
    return np.unique(np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts]))


def bid_statistics(
    log: BidLog, spec: AuctionSpec, player: int, candidates: np.ndarray, player_wins_ties: bool = False
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Summed click rate and spend for each fixed candidate bid, and for the actual play.

    Returns ``(Q, TE, Q_emp, TE_emp)`` where ``Q[k]``/``TE[k]`` total the awarded
    CTR/payment over all rounds when always bidding ``candidates[k]``.
    """
    opp = np.delete(log.bids, player, axis=1)
    if player_wins_ties:
        prio = np.zeros(opp.shape[1], dtype=bool)
    else:
        prio = tie_priority(spec, player, log.n_players)
    ctr, pay = fixed_bid_outcomes(spec, opp, prio, candidates)
    ectr, epay = fixed_bid_outcomes(spec, opp, prio, log.bids[:, player][None, :])
    # exactly rounded totals, so a log repeated k times gives exactly k times the sums
    Q = np.array([math.fsum(r) for r in ctr])
    TE = np.array([math.fsum(r) for r in pay])
    return Q, TE, math.fsum(ectr[0]), math.fsum(epay[0])


# --- EQ: truthful-bidding inversion for VCG ---------------------------------

def eq_vcg_average_bid(log: BidLog, player: str) -> float:
    """Mean bid of ``player``; bidding one's value is dominant under VCG."""
    k = log.index(player)
    return math.fsum(log.bids[:, k]) / log.n_rounds


# --- EQ1: VCG-like equilibrium of the full-information GSP game --------------

def value_map(ctrs: Sequence[float], n: int) -> np.ndarray:
    """Linear map from position-ordered bids to the values that make them the
    VCG-like (lowest envy-free) GSP equilibrium.

    Position s >= 2 is indifferent to moving up one slot:
    ``b_s x_{s-1} = v_s (x_{s-1} - x_s) + b_{s+1} x_s``. The top bidder is taken
    to bid its value; positions with no click rate above them bid truthfully.
    """
    x = np.zeros(n + 1)
    x[:min(len(ctrs), n)] = list(ctrs)[:n]
    M = np.zeros((n, n))
    M[0, 0] = 1.0
    for s in range(1, n):
        gap = x[s - 1] - x[s]
        if gap > 0:
            M[s, s] = x[s - 1] / gap
            if s + 1 < n:
                M[s, s + 1] = -x[s] / gap
        else:
            M[s, s] = 1.0
    return M


def equilibrium_bids(values_desc: Sequence[float], ctrs: Sequence[float]) -> np.ndarray:
    """Forward recursion: the VCG-like equilibrium bids for descending values."""
    v = np.asarray(values_desc, dtype=float)
    n = v.size
    x = np.zeros(n + 1)
    x[:min(len(ctrs), n)] = list(ctrs)[:n]
    b = np.zeros(n + 1)
    for s in range(n - 1, 0, -1):
        if x[s - 1] > 0:
            b[s] = (v[s] * (x[s - 1] - x[s]) + b[s + 1] * x[s]) / x[s - 1]
        else:
            b[s] = v[s]
    b[0] = v[0]
    return b[:n]


def equilibrium_constraints(ctrs: Sequence[float], n: int) -> np.ndarray:
    """Rows ``a`` with ``a @ b >= 0`` iff position-ordered bids ``b`` are a
    VCG-like equilibrium: bids stay ordered and nonnegative, deduced values
    are non-increasing down the page."""
    M = value_map(ctrs, n)
    rows = []
    for s in range(n - 1):
        rows.append(M[s] - M[s + 1])
        e = np.zeros(n)
        e[s], e[s + 1] = 1.0, -1.0
        rows.append(e)
    e = np.zeros(n)
    e[n - 1] = 1.0
    rows.append(e)
    return np.array(rows)


def project_onto_cone(y: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``y`` onto ``{b : A b >= 0}``.

    Solved through the dual: ``b = y + A^T mu`` with ``mu >= 0`` minimising
    ``||A^T mu + y||``, a nonnegative least-squares problem.
    """
    y = np.asarray(y, dtype=float)
    if A.size == 0 or np.all(A @ y >= 0):
        return y.copy()
    mu, _ = nnls(A.T, -y, maxiter=50 * A.shape[0])
    return y + A.T @ mu


@dataclass(frozen=True)
class EQ1Result:
    estimates: dict[str, float]
    consistent_rounds: int
    perturbed_rounds: int
    skipped_rounds: int


def eq1_varian(log: BidLog, spec: AuctionSpec, value_range: tuple[float, float] = (1.0, 60.0),
               tol: float = 1e-8) -> EQ1Result:
    """Per-round value deduction under the VCG-like GSP equilibrium.

    Rounds whose bids violate the equilibrium inequalities are replaced by the
    nearest (least squares) consistent bids first. Each player's estimate is the
    mean of its per-round values, clipped to ``value_range``.
    """
    if spec.mechanism is not Mechanism.GSP:
        raise ValidationError("EQ1 applies to GSP auctions only")
    n = log.n_players
    A = equilibrium_constraints(spec.ctrs, n)
    M = value_map(spec.ctrs, n)

    @lru_cache(maxsize=None)
    def solve(bids: tuple[float, ...]):
        order = ranking(bids, spec)
        y = np.array([bids[i] for i in order])
        perturbed = False
        if np.any(A @ y < -tol):
            perturbed = True
            try:
                y = project_onto_cone(y, A)
            except RuntimeError:
                return None
            if np.any(A @ y < -1e-6 * (1 + np.abs(y).max())):
                return None
        vals = np.empty(n)
        vals[order] = M @ y
        return vals, perturbed

    sums = [[] for _ in range(n)]
    consistent = perturbed = skipped = 0
    for row in log.bids:
        res = solve(tuple(float(b) for b in row))
        if res is None:
            skipped += 1
            continue
        vals, was_perturbed = res
        perturbed += was_perturbed
        consistent += not was_perturbed
        for i in range(n):
            sums[i].append(vals[i])
    if skipped > log.n_rounds / 2:
        raise EstimatorFailure(f"EQ1 skipped {skipped} of {log.n_rounds} rounds")
    lo, hi = value_range
    est = {
        pid: float(np.clip(math.fsum(sums[i]) / len(sums[i]), lo, hi))
        for i, pid in enumerate(log.player_ids)
    }
    return EQ1Result(est, consistent, perturbed, skipped)


# --- EQ2: best response to the empirical bid distribution --------------------

def eq2_best_response(log: BidLog, spec: AuctionSpec, player: str, grid: ValueGrid,
                      candidates: Optional[np.ndarray] = None) -> float:
    """Smallest grid value for which the player's mean bid is (closest to) a best
    response against the empirical distribution of opponents' bids.

    For each value ``v`` the best-response set is every candidate bid maximising
    ``Q(b) v - TE(b)``, with ``Q``/``TE`` the total CTR and spend from replaying
    ``b`` against every round. The estimate minimises the distance from the mean
    bid to that set.
    """
    k = log.index(player)
    mean_bid = math.fsum(log.bids[:, k]) / log.n_rounds
    if candidates is None:
        candidates = default_candidates(log, k, grid, extra=[mean_bid])
    candidates = np.asarray(candidates, dtype=float)
    Q, TE, _, _ = bid_statistics(log, spec, k, candidates)
    util = grid.points[:, None] * Q[None, :] - TE[None, :]
    best = util.max(axis=1, keepdims=True)
    is_best = util >= best - 1e-9 * (1.0 + np.abs(best))
    gap = np.abs(candidates - mean_bid)[None, :]
    dist = np.where(is_best, gap, np.inf).min(axis=1)
    j = int(np.flatnonzero(dist <= dist.min() + 1e-12)[0])
    return float(grid.points[j])
