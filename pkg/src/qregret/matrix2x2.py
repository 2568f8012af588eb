"""Payoff estimation in repeated 2x2 games from empirical play frequencies.

Each payoff slot is hidden in turn and estimated from the remaining seven and
the observed frequencies, at one of several aggregation levels.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .game import (
    CELLS,
    Freq2x2,
    GameSpec2x2,
    ValidationError,
    ValueGrid,
    make_uniform_grid,
    parse_slot,
    validate_freq,
)
from .regret import RegretCurve, TaskError, regret_curve_2x2, regret_values_2x2
from .tasks import Method, TaskItem, estimate_item

log = logging.getLogger(__name__)

DEFAULT_RANGE = (0.0, 22.0)
DEFAULT_LAMBDA = 3.0
DEFAULT_HIT_DELTA = 3.0


class Level(str, enum.Enum):
    GAME = "game"
    SESSION = "session"
    FINE_GRAINED = "fine_grained"
    PLAYER = "player"
    CONSTANT_SUM_SESSION = "constant_sum_session"

    @classmethod
    def parse(cls, text: str) -> "Level":
        try:
            return cls(text.strip().lower().replace("-", "_"))
        except ValueError:
            raise ValidationError(f"unknown level {text!r}; choose from {[l.value for l in cls]}") from None


@dataclass(frozen=True)
class PlayerFreq:
    player_id: str
    role: str
    freq: Freq2x2


@dataclass(frozen=True)
class Session2x2:
    game_id: str
    session_id: str
    players: tuple[PlayerFreq, ...]

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        n_row = sum(p.role == "row" for p in self.players)
        n_col = sum(p.role == "col" for p in self.players)
        if n_row + n_col != len(self.players) or n_row != n_col or n_row == 0:
            raise ValidationError(
                f"session {self.session_id}: need equally many row and col players, got {n_row}/{n_col}")
        for p in self.players:
            validate_freq(p.freq)

    def role_players(self, role: str) -> list[PlayerFreq]:
        return [p for p in self.players if p.role == role]


def sessions_from_records(records: Iterable[tuple[str, str, str, Freq2x2]], game_of: dict[str, str]) -> list[Session2x2]:
    """Group Freq2x2 CSV rows into sessions; ``game_of`` maps session_id -> game_id."""
    grouped: dict[str, list[PlayerFreq]] = {}
    for sid, pid, role, freq in records:
        grouped.setdefault(sid, []).append(PlayerFreq(pid, role, freq))
    out = []
    for sid, players in grouped.items():
        if sid not in game_of:
            raise ValidationError(f"session {sid!r} is not assigned to any game")
        out.append(Session2x2(game_of[sid], sid, tuple(players)))
    return out


def mean_freq(freqs: Sequence[Freq2x2]) -> Freq2x2:
    arr = np.array([f.as_array() for f in freqs])
    # column-wise fsum keeps the mean independent of record order
    mean = [math.fsum(arr[:, k]) / len(freqs) for k in range(4)]
    return Freq2x2.from_array(mean, periods=max(f.periods for f in freqs))


def aggregate_session(session: Session2x2) -> Freq2x2:
    """Per-profile mean of all players' frequency tables."""
    return mean_freq([p.freq for p in session.players])


# --- equilibrium inversion ----------------------------------------------------

def nash_inversion_2x2(spec: GameSpec2x2, hidden_slot: str, freq: Freq2x2,
                       value_range: tuple[float, float] = DEFAULT_RANGE) -> float:
    """Solve the owner's mixed-equilibrium indifference for the hidden payoff.

    The opponent's mixing probability is its empirical marginal in ``freq``.
    The result is clipped to ``value_range``; when the hidden payoff drops out
    of the indifference equation the range midpoint is returned with a warning.
    """
    lo, hi = value_range
    role, k = parse_slot(hidden_slot)
    others = [s for s in spec.hidden_slots(role) if s != hidden_slot]
    if others:
        raise TaskError(f"{role} player has other hidden slots {others}")
    if role == "row":
        pay, f = list(spec.row_payoffs), freq
    else:
        t = spec.transposed()
        pay, f, k = list(t.row_payoffs), freq.transposed(), (0, 2, 1, 3)[k]
    p = f.f_UL + f.f_DL  # opponent's first action
    # Up - Down = p*(a_UL - a_DL) + (1-p)*(a_UR - a_DR) = 0
    coef = np.array([p, 1 - p, -p, -(1 - p)])
    if abs(coef[k]) < 1e-12:
        log.warning("hidden payoff %s drops out of the indifference condition; using range midpoint", hidden_slot)
        return 0.5 * (lo + hi)
    rest = sum(coef[j] * pay[j] for j in range(4) if j != k)
    return float(np.clip(-rest / coef[k], lo, hi))


# --- building estimation targets --------------------------------------------

def _targets(spec: GameSpec2x2, role: str) -> list[tuple[str, Optional[float]]]:
    """(slot, true value) pairs the given player can be estimated on."""
    hidden = spec.hidden_slots(role)
    if not hidden:
        return [(f"{role}_{c}", spec.value(f"{role}_{c}")) for c in CELLS]
    if len(hidden) == 1:
        return [(hidden[0], None)]
    log.info("skipping %s slots: %d hidden", role, len(hidden))
    return []


def _slot_items(spec, freq, grid, game_id, session_id, curve_freqs, lam_scale, player=None,
               roles=("row", "col")):
    items = []
    for role in roles:
        for slot, truth in _targets(spec, role):
            task = spec.with_slot(slot, None)
            sources = curve_freqs(role)
            curves = tuple(regret_curve_2x2(task, slot, f, grid, player_id=role) for f in sources)
            eq = nash_inversion_2x2(task, slot, freq(role), (grid.lower, grid.upper))
            subject = slot if player is None else f"{slot}[{player}]"
            items.append(TaskItem(game_id, session_id, subject, truth, curves,
                                  lam_scale(len(curves)), {"eq": eq}))
    return items


def _constant_sum_items(spec: GameSpec2x2, freq: Freq2x2, grid: ValueGrid, game_id, session_id):
    if spec.constant_sum is None:
        raise TaskError("constant-sum estimation needs a constant-sum game")
    C = spec.constant_sum
    theta = make_uniform_grid(0.0, C, grid.step) if C > 0 else grid
    cells = [k for k in range(4) if spec.row_payoffs[k] is None or spec.col_payoffs[k] is None]
    if len(cells) > 1:
        raise TaskError(f"constant-sum mode can estimate one hidden cell, found {len(cells)}")
    targets = cells if cells else range(4)
    items = []
    for k in targets:
        cell = CELLS[k]
        a, b = spec.row_payoffs[k], spec.col_payoffs[k]
        truth = a if a is not None else (C - b if b is not None else None)
        task = spec.with_slot(f"row_{cell}", None).with_slot(f"col_{cell}", None)
        row_reg, row_best = regret_values_2x2(task, f"row_{cell}", freq, theta.points)
        col_reg, col_best = regret_values_2x2(task, f"col_{cell}", freq, C - theta.points)
        curves = (RegretCurve(theta, row_reg, "row", row_best), RegretCurve(theta, col_reg, "col", col_best))
        eq_row = nash_inversion_2x2(task, f"row_{cell}", freq, (0.0, C))
        eq_col = C - nash_inversion_2x2(task, f"col_{cell}", freq, (0.0, C))
        items.append(TaskItem(game_id, session_id, f"row_{cell}", truth, curves, 1.0,
                              {"eq": 0.5 * (eq_row + eq_col)}))
    return items


def fine_grained_scale(k: int) -> float:
    """Lambda multiplier when k same-role curves are summed (3/4 for four players)."""
    if k != 4:
        log.warning("fine-grained scaling 3/k extended to k=%d players per role", k)
    return 3.0 / k


def build_items(sessions: Sequence[Session2x2], spec: GameSpec2x2, level: Level, grid: ValueGrid) -> list[TaskItem]:
    """Regret curves and equilibrium estimates for every slot at ``level``."""
    level = Level(level)
    sessions = list(sessions)
    if not sessions:
        return []
    one = lambda k: 1.0  # noqa: E731
    if level is Level.GAME:
        freq = mean_freq([aggregate_session(s) for s in sessions])
        game_id = sessions[0].game_id
        return _slot_items(spec, lambda r: freq, grid, game_id, "*", lambda r: [freq], one)
    items = []
    for s in sessions:
        if level is Level.SESSION:
            agg = aggregate_session(s)
            items += _slot_items(spec, lambda r: agg, grid, s.game_id, s.session_id, lambda r: [agg], one)
        elif level is Level.FINE_GRAINED:
            agg = aggregate_session(s)
            items += _slot_items(spec, lambda r: agg, grid, s.game_id, s.session_id,
                                 lambda r, s=s: [p.freq for p in s.role_players(r)], fine_grained_scale)
        elif level is Level.PLAYER:
            for p in s.players:
                items += _slot_items(spec, lambda r, p=p: p.freq, grid, s.game_id, s.session_id,
                                     lambda r, p=p: [p.freq], one, player=p.player_id, roles=(p.role,))
        else:
            items += _constant_sum_items(spec, aggregate_session(s), grid, s.game_id, s.session_id)
    return items


@dataclass(frozen=True)
class SlotEstimate:
    game_id: str
    session_id: str
    level: str
    method: str
    slot: str
    estimate: float
    true_value: Optional[float]

    @property
    def error(self) -> Optional[float]:
        return None if self.true_value is None else abs(self.estimate - self.true_value)


def estimate_items(items: Sequence[TaskItem], level: Level, method: Method, lam: float) -> list[SlotEstimate]:
    return [
        SlotEstimate(it.group, it.session_id, Level(level).value, Method(method).value, it.subject,
                     estimate_item(it, method, lam), it.true_value)
        for it in items
    ]


def estimate_session(session: Session2x2, spec: GameSpec2x2, level: Level = Level.SESSION,
                     method: Method = Method.QR, grid: Optional[ValueGrid] = None,
                     lam: float = DEFAULT_LAMBDA) -> list[SlotEstimate]:
    """Estimate every eligible slot of one session (8, or 4 in constant-sum mode)."""
    grid = grid or make_uniform_grid(*DEFAULT_RANGE, 1.0)
    return estimate_items(build_items([session], spec, level, grid), level, method, lam)


def estimate_game(sessions: Sequence[Session2x2], spec: GameSpec2x2, method: Method = Method.QR,
                  grid: Optional[ValueGrid] = None, lam: float = DEFAULT_LAMBDA) -> list[SlotEstimate]:
    """Game-level estimates from the mean of all sessions' tables."""
    grid = grid or make_uniform_grid(*DEFAULT_RANGE, 1.0)
    return estimate_items(build_items(sessions, spec, Level.GAME, grid), Level.GAME, method, lam)
