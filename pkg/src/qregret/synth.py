"""Synthetic repeated play with known ground truth.

Randomness comes from numpy's PCG64 bit generator. Each agent draws from its
own stream seeded by ``SeedSequence([seed, agent.seed, agent_index])``; the
2x2 re-matching draws from ``SeedSequence([seed, MATCH_STREAM])``. The same
inputs therefore always give the same log.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .auctions import fixed_bid_outcomes, tie_priority
from .game import (
    AuctionSpec,
    BidLog,
    Freq2x2,
    GameSpec2x2,
    ValidationError,
    ValueGrid,
    make_uniform_grid,
)
from .matrix2x2 import PlayerFreq, Session2x2

MATCH_STREAM = 0x5EED


class AgentKind(str, enum.Enum):
    EXP_WEIGHTS = "EXP_WEIGHTS"
    TRUTHFUL = "TRUTHFUL"
    FIXED_BID = "FIXED_BID"
    UNIFORM_RANDOM = "UNIFORM_RANDOM"
    EPSILON_BEST_RESPONSE = "EPSILON_BEST_RESPONSE"


@dataclass(frozen=True)
class AgentSpec:
    kind: AgentKind
    true_value: float = 0.0
    learning_rate: Optional[float] = None  # EXP_WEIGHTS; None picks the standard Hedge rate
    seed: int = 0
    bid: Optional[float] = None  # FIXED_BID; in 2x2 games the action index (0 = Up/Left)
    epsilon: float = 0.0  # EPSILON_BEST_RESPONSE
    player_id: Optional[str] = None
    role: Optional[str] = None  # 2x2 only

    def __post_init__(self):
        object.__setattr__(self, "kind", AgentKind(self.kind))
        if self.kind is AgentKind.EXP_WEIGHTS and self.learning_rate is not None and not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError("epsilon must lie in [0, 1]")
        if self.kind is AgentKind.FIXED_BID and self.bid is None:
            raise ValidationError("FIXED_BID agents need a bid")


def hedge_rate(n_actions: int, rounds: int, utility_range: float) -> float:
    """sqrt(8 ln K / T) scaled to utilities spanning ``utility_range``."""
    return math.sqrt(8.0 * math.log(max(n_actions, 2)) / rounds) / max(utility_range, 1e-12)


def _rng(seed: int, agent: AgentSpec, idx: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, agent.seed, idx])))


class _Learner:
    """Shared bookkeeping for agents that choose among a finite action set."""

    def __init__(self, agent: AgentSpec, actions: np.ndarray, rng, rounds: int, utility_range: float):
        self.agent = agent
        self.actions = actions
        self.rng = rng
        self.score = np.zeros(actions.size)  # cumulative utility of each fixed action
        self.eta = agent.learning_rate or hedge_rate(actions.size, rounds, utility_range)

    def choose(self) -> int:
        kind = self.agent.kind
        if kind is AgentKind.UNIFORM_RANDOM:
            return int(self.rng.integers(self.actions.size))
        if kind is AgentKind.EXP_WEIGHTS:
            z = self.eta * (self.score - self.score.max())
            p = np.exp(z)
            p /= p.sum()
            return int(self.rng.choice(self.actions.size, p=p))
        if kind is AgentKind.EPSILON_BEST_RESPONSE:
            if self.rng.random() < self.agent.epsilon:
                return int(self.rng.integers(self.actions.size))
            return int(np.argmax(self.score))
        raise AssertionError(kind)

    def update(self, utilities: np.ndarray) -> None:
        self.score += utilities


def simulate_auction(agents: Sequence[AgentSpec], spec: AuctionSpec, rounds: int, seed: int,
                     bid_grid: Optional[ValueGrid] = None) -> BidLog:
    n = len(agents)
    if n != spec.n_players:
        raise ValidationError(f"{n} agents for an auction with {spec.n_players} players")
    if rounds < 1:
        raise ValidationError("rounds must be >= 1")
    grid = bid_grid or make_uniform_grid(0.0, 60.0, 1.0)
    actions = grid.points
    top = max(spec.ctrs) * max(actions.max(), max(a.true_value for a in agents))
    learners = {}
    for i, a in enumerate(agents):
        if a.kind is AgentKind.TRUTHFUL or a.kind is AgentKind.FIXED_BID:
            continue
        learners[i] = _Learner(a, actions, _rng(seed, a, i), rounds, top)
    prio = [tie_priority(spec, i, n) for i in range(n)]
    bids = np.empty((rounds, n))
    for t in range(rounds):
        for i, a in enumerate(agents):
            if a.kind is AgentKind.TRUTHFUL:
                bids[t, i] = a.true_value
            elif a.kind is AgentKind.FIXED_BID:
                bids[t, i] = a.bid
            else:
                bids[t, i] = actions[learners[i].choose()]
        for i, lr in learners.items():
            opp = np.delete(bids[t], i)[None, :]
            ctr, pay = fixed_bid_outcomes(spec, opp, prio[i], actions)
            lr.update(ctr[:, 0] * agents[i].true_value - pay[:, 0])
    ids = tuple(a.player_id or f"p{i + 1}" for i, a in enumerate(agents))
    return BidLog(bids, ids)


def simulate_2x2(agents: Sequence[AgentSpec], spec: GameSpec2x2, rounds: int, seed: int,
                 game_id: str = "sim", session_id: str = "sim") -> Session2x2:
    """Row and column populations re-matched at random every period.

    Each player's table counts the joint profiles it took part in.
    """
    if spec.hidden_slots():
        raise ValidationError("simulation needs a fully specified game")
    roles = [a.role for a in agents]
    if any(r is None for r in roles):
        half = len(agents) // 2
        roles = ["row"] * half + ["col"] * (len(agents) - half)
    rows = [i for i, r in enumerate(roles) if r == "row"]
    cols = [i for i, r in enumerate(roles) if r == "col"]
    if len(rows) != len(cols) or not rows or len(rows) + len(cols) != len(agents):
        raise ValidationError("2x2 simulation needs equally many row and col agents")
    if rounds < 1:
        raise ValidationError("rounds must be >= 1")
    A = np.array(spec.row_payoffs, dtype=float).reshape(2, 2)  # [row action, col action]
    B = np.array(spec.col_payoffs, dtype=float).reshape(2, 2)
    span = max(np.ptp(A), np.ptp(B), 1e-9)
    actions = np.array([0.0, 1.0])
    learners = {}
    for i, a in enumerate(agents):
        if a.kind is AgentKind.TRUTHFUL:
            raise ValidationError("TRUTHFUL agents have no meaning in a 2x2 game")
        if a.kind is not AgentKind.FIXED_BID:
            learners[i] = _Learner(a, actions, _rng(seed, a, i), rounds, span)
    match = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, MATCH_STREAM])))
    counts = np.zeros((len(agents), 4))
    act = np.zeros(len(agents), dtype=int)
    for _ in range(rounds):
        for i, a in enumerate(agents):
            act[i] = int(a.bid) if a.kind is AgentKind.FIXED_BID else learners[i].choose()
        partner = match.permutation(cols)
        for r, c in zip(rows, partner):
            cell = 2 * act[r] + act[c]
            counts[r, cell] += 1
            counts[c, cell] += 1
            if r in learners:
                learners[r].update(A[:, act[c]])
            if c in learners:
                learners[c].update(B[act[r], :])
    players = []
    for i, a in enumerate(agents):
        freq = Freq2x2.from_array(counts[i] / rounds, periods=rounds)
        players.append(PlayerFreq(a.player_id or f"{roles[i]}{i + 1}", roles[i], freq))
    return Session2x2(game_id, session_id, tuple(players))


def simulate(agents: Sequence[AgentSpec], spec: Union[AuctionSpec, GameSpec2x2], rounds: int, seed: int,
             **kwargs) -> Union[BidLog, Session2x2]:
    if isinstance(spec, AuctionSpec):
        return simulate_auction(agents, spec, rounds, seed, **kwargs)
    if isinstance(spec, GameSpec2x2):
        return simulate_2x2(agents, spec, rounds, seed, **kwargs)
    raise ValidationError(f"cannot simulate {type(spec).__name__}")


# --- scenario files ------------------------------------------------------------

def agent_from_dict(d: dict) -> AgentSpec:
    known = {"kind", "true_value", "learning_rate", "seed", "bid", "epsilon", "player_id", "role"}
    extra = set(d) - known
    if extra:
        raise ValidationError(f"unknown agent keys {sorted(extra)}")
    try:
        return AgentSpec(**d)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"bad agent spec {d}: {e}") from None


def random_mixed_game(rng: np.random.Generator, high: int = 22, constant_sum: bool = False) -> GameSpec2x2:
    """A random integer-payoff 2x2 game with a unique completely mixed equilibrium."""
    while True:
        if constant_sum:
            C = int(rng.integers(high // 2, high + 1))
            a = rng.integers(0, C + 1, size=4)
            b = C - a
        else:
            a = rng.integers(0, high + 1, size=4)
            b = rng.integers(0, high + 1, size=4)
        # mixed equilibrium is interior iff neither player has a weakly dominant action
        # and the best-response cycle runs around the matrix
        ra = (a[0] - a[2], a[1] - a[3])
        cb = (b[0] - b[1], b[2] - b[3])
        if ra[0] * ra[1] < 0 and cb[0] * cb[1] < 0 and ra[0] * cb[0] < 0:
            return GameSpec2x2(tuple(a), tuple(b), float(C) if constant_sum else None)
