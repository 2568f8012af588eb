"""Core value types: candidate grids, 2x2 games and play tables, bid logs, auctions.

Everything here is immutable after construction. Array-valued fields are
stored as read-only numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

SUM_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant."""


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ValueGrid:
    """Ascending candidate values with a prior weight per point."""

    points: np.ndarray
    prior: np.ndarray = None

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 1 or pts.size == 0:
            raise ValidationError("grid needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("grid points must be finite")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValidationError("grid points must be strictly ascending")
        if self.prior is None:
            pr = _frozen(np.full(pts.size, 1.0 / pts.size))
        else:
            pr = _frozen(self.prior)
            if pr.shape != pts.shape:
                raise ValidationError("prior length must match points")
            if np.any(pr < 0) or not np.all(np.isfinite(pr)):
                raise ValidationError("prior weights must be finite and nonnegative")
            if abs(pr.sum() - 1.0) > SUM_TOL:
                raise ValidationError(f"prior weights sum to {pr.sum()!r}, not 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "prior", pr)

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, ValueGrid):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(self.prior, other.prior)

    __hash__ = None

    @property
    def lower(self) -> float:
        return float(self.points[0])

    @property
    def upper(self) -> float:
        return float(self.points[-1])

    @property
    def step(self) -> float:
        """Spacing of a uniform grid (first gap); 1.0 for a single point."""
        if self.points.size < 2:
            return 1.0
        return float(self.points[1] - self.points[0])


def make_uniform_grid(lower: float, upper: float, step: float) -> ValueGrid:
    """Closed grid ``lower, lower+step, ...`` up to ``upper`` with a uniform prior.

    A final point that lands within 1e-9 of ``upper`` is kept.
    """
    if not (math.isfinite(step) and step > 0):
        raise ValidationError(f"step must be finite and positive, got {step!r}")
    if not (math.isfinite(lower) and math.isfinite(upper)) or not lower < upper:
        raise ValidationError(f"need finite lower < upper, got [{lower}, {upper}]")
    n = int(math.floor((upper - lower) / step + 1e-9))
    pts = lower + step * np.arange(n + 1, dtype=float)
    if lower + step * (n + 1) <= upper + 1e-9:  # float floor undershoot
        pts = np.append(pts, lower + step * (n + 1))
    return ValueGrid(pts)


# --- 2x2 games -------------------------------------------------------------

CELLS = ("UL", "UR", "DL", "DR")
ROLES = ("row", "col")
SLOTS = tuple(f"{role}_{cell}" for role in ROLES for cell in CELLS)


def parse_slot(slot: str) -> tuple[str, int]:
    """``'col_DL'`` -> ``('col', 2)``."""
    try:
        role, cell = slot.split("_")
        return role, CELLS.index(cell)
    except ValueError:
        raise ValidationError(f"unknown payoff slot {slot!r}; expected one of {SLOTS}") from None


@dataclass(frozen=True)
class Freq2x2:
    """Empirical frequencies of the four joint profiles (Up/Down x Left/Right)."""

    f_UL: float
    f_UR: float
    f_DL: float
    f_DR: float
    periods: int = 200

    def as_array(self) -> np.ndarray:
        return np.array([self.f_UL, self.f_UR, self.f_DL, self.f_DR], dtype=float)

    @classmethod
    def from_array(cls, arr: Sequence[float], periods: int = 200) -> "Freq2x2":
        a = [float(x) for x in arr]
        return cls(a[0], a[1], a[2], a[3], periods)

    def transposed(self) -> "Freq2x2":
        """Swap roles: the column player's L/R become the row actions."""
        return Freq2x2(self.f_UL, self.f_DL, self.f_UR, self.f_DR, self.periods)


def validate_freq(freq: Freq2x2) -> Freq2x2:
    for name in ("f_UL", "f_UR", "f_DL", "f_DR"):
        v = getattr(freq, name)
        if not math.isfinite(v) or v < 0 or v > 1:
            raise ValidationError(f"{name}={v!r} is outside [0, 1]")
    total = math.fsum(freq.as_array())
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"frequencies sum to {total!r}, not 1")
    if not (isinstance(freq.periods, (int, np.integer)) and freq.periods > 0):
        raise ValidationError(f"periods={freq.periods!r} must be a positive integer")
    return freq


Payoffs = tuple[Optional[float], Optional[float], Optional[float], Optional[float]]


@dataclass(frozen=True)
class GameSpec2x2:
    """Payoff matrix of a 2x2 bimatrix game; ``None`` marks a hidden slot.

    Cells are ordered (UL, UR, DL, DR) for both players.
    """

    row_payoffs: Payoffs
    col_payoffs: Payoffs
    constant_sum: Optional[float] = None

    def __post_init__(self):
        for name in ("row_payoffs", "col_payoffs"):
            vals = getattr(self, name)
            if len(vals) != 4:
                raise ValidationError(f"{name} needs 4 entries")
            object.__setattr__(self, name, tuple(None if v is None else float(v) for v in vals))
        if self.constant_sum is not None:
            c = float(self.constant_sum)
            object.__setattr__(self, "constant_sum", c)
            for k, (a, b) in enumerate(zip(self.row_payoffs, self.col_payoffs)):
                if a is not None and b is not None and abs(a + b - c) > SUM_TOL:
                    raise ValidationError(f"cell {CELLS[k]} sums to {a + b}, not constant {c}")

    def payoffs(self, role: str) -> Payoffs:
        return self.row_payoffs if role == "row" else self.col_payoffs

    def value(self, slot: str) -> Optional[float]:
        role, k = parse_slot(slot)
        return self.payoffs(role)[k]

    def hidden_slots(self, role: Optional[str] = None) -> list[str]:
        return [s for s in SLOTS if self.value(s) is None and (role is None or s.startswith(role))]

    def with_slot(self, slot: str, value: Optional[float]) -> "GameSpec2x2":
        role, k = parse_slot(slot)
        vals = list(self.payoffs(role))
        vals[k] = value
        if role == "row":
            return replace(self, row_payoffs=tuple(vals))
        return replace(self, col_payoffs=tuple(vals))

    def transposed(self) -> "GameSpec2x2":
        """Swap the players' roles (row <-> column)."""
        def t(p):
            return (p[0], p[2], p[1], p[3])
        return GameSpec2x2(t(self.col_payoffs), t(self.row_payoffs), self.constant_sum)


def mirror_slot(slot: str) -> str:
    """The slot a payoff occupies after :meth:`GameSpec2x2.transposed`."""
    role, k = parse_slot(slot)
    cell = CELLS[(0, 2, 1, 3)[k]]
    return f"{'col' if role == 'row' else 'row'}_{cell}"


# --- auctions --------------------------------------------------------------

class Mechanism(str, enum.Enum):
    FIRST_PRICE = "FIRST_PRICE"
    GSP = "GSP"
    VCG = "VCG"


TIE_RULES = ("lower_index", "higher_index")


@dataclass(frozen=True)
class AuctionSpec:
    mechanism: Mechanism
    ctrs: tuple[float, ...]
    n_players: int
    tie_rule: str = "lower_index"

    def __post_init__(self):
        object.__setattr__(self, "mechanism", Mechanism(self.mechanism))
        ctrs = tuple(float(c) for c in self.ctrs)
        object.__setattr__(self, "ctrs", ctrs)
        if not ctrs:
            raise ValidationError("need at least one slot")
        if any(not (0 < c <= 1) for c in ctrs):
            raise ValidationError("ctrs must lie in (0, 1]")
        if any(a <= b for a, b in zip(ctrs, ctrs[1:])):
            raise ValidationError("ctrs must be strictly descending")
        if self.mechanism is Mechanism.FIRST_PRICE and ctrs != (1.0,):
            raise ValidationError("FIRST_PRICE uses a single slot with ctr 1")
        if not (isinstance(self.n_players, (int, np.integer)) and self.n_players > 0):
            raise ValidationError("n_players must be a positive integer")
        if self.tie_rule not in TIE_RULES:
            raise ValidationError(f"tie_rule must be one of {TIE_RULES}")

    @property
    def n_slots(self) -> int:
        return len(self.ctrs)

    def beats_on_tie(self, k: int, i: int) -> bool:
        """Whether player index ``k`` is ranked above ``i`` when their bids tie."""
        return k < i if self.tie_rule == "lower_index" else k > i


LAB_CTRS = (0.38, 0.29, 0.20, 0.11, 0.02)
LAB_VALUES = (21.0, 27.0, 33.0, 39.0, 45.0)


def lab_auction(mechanism: Mechanism | str = Mechanism.GSP) -> AuctionSpec:
    """Five bidders, five slots with the experiment's CTRs."""
    return AuctionSpec(Mechanism(mechanism), LAB_CTRS, 5)


def first_price(n_players: int) -> AuctionSpec:
    return AuctionSpec(Mechanism.FIRST_PRICE, (1.0,), n_players)


@dataclass(frozen=True, eq=False)
class BidLog:
    """Bids of ``n`` players over ``T`` rounds; ``bids[t, i]`` is player i's bid in round t."""

    bids: np.ndarray
    player_ids: tuple[str, ...] = field(default=None)

    def __post_init__(self):
        b = _frozen(self.bids)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValidationError("bid log needs shape (T >= 1, n >= 1)")
        if not np.all(np.isfinite(b)) or np.any(b < 0):
            raise ValidationError("bids must be finite and nonnegative")
        ids = self.player_ids
        if ids is None:
            ids = tuple(f"p{k + 1}" for k in range(b.shape[1]))
        ids = tuple(str(p) for p in ids)
        if len(ids) != b.shape[1] or len(set(ids)) != len(ids):
            raise ValidationError("player_ids must be unique, one per bid column")
        object.__setattr__(self, "bids", b)
        object.__setattr__(self, "player_ids", ids)

    def __eq__(self, other):
        if not isinstance(other, BidLog):
            return NotImplemented
        return self.player_ids == other.player_ids and np.array_equal(self.bids, other.bids)

    __hash__ = None

    @property
    def n_rounds(self) -> int:
        return self.bids.shape[0]

    @property
    def n_players(self) -> int:
        return self.bids.shape[1]

    def index(self, player: str) -> int:
        try:
            return self.player_ids.index(str(player))
        except ValueError:
            raise ValidationError(f"player {player!r} not in log {self.player_ids}") from None

    def second_half(self) -> "BidLog":
        """Rounds floor(T/2)+1 .. T."""
        return BidLog(self.bids[self.n_rounds // 2:], self.player_ids)
