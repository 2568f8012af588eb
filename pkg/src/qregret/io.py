"""Readers and writers for the on-disk formats.

Formats
-------
Freq2x2 CSV     ``session_id,player_id,role,f_UL,f_UR,f_DL,f_DR,periods``
BidLog CSV      ``round,player_id,bid`` (rounds 1..T, one row per player per round)
GameSpec2x2     JSON object with the eight slot keys (``row_UL`` ... ``col_DR``), each a
                number or ``"hidden"``; optional ``constant_sum`` and ``sessions``
AuctionSpec     JSON object ``{mechanism, ctrs, n_players, tie_rule}``
RegretCurve     ``player_id,theta,regret``

Numbers are written so that re-parsing gives back the identical float.
"""
from __future__ import annotations

import csv
import io
import json
import os
from collections import OrderedDict
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .game import (
    SLOTS,
    AuctionSpec,
    BidLog,
    Freq2x2,
    GameSpec2x2,
    ValidationError,
    validate_freq,
)

PathLike = Union[str, os.PathLike]

FREQ_HEADER = ["session_id", "player_id", "role", "f_UL", "f_UR", "f_DL", "f_DR", "periods"]
BID_HEADER = ["round", "player_id", "bid"]
CURVE_HEADER = ["player_id", "theta", "regret"]
HIDDEN = "hidden"


def fmt(x) -> str:
    """Shortest round-trip text for a number; integral floats drop the ``.0``."""
    if x is None:
        return ""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def write_csv(path: PathLike, header: list[str], rows: Iterable[Iterable]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(r)


def _read_rows(path: PathLike, header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [h for h in header if h not in (reader.fieldnames or [])]
        if missing:
            raise ValidationError(f"{path}: missing columns {missing}")
        return list(reader)


def _num(raw: str, what: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ValidationError(f"{what}: {raw!r} is not a number") from None


# --- Freq2x2 ---------------------------------------------------------------

def read_freqs(path: PathLike) -> list[tuple[str, str, str, Freq2x2]]:
    """Rows as ``(session_id, player_id, role, Freq2x2)`` in file order."""
    out = []
    for n, row in enumerate(_read_rows(path, FREQ_HEADER), start=2):
        role = row["role"].strip().lower()
        if role not in ("row", "col"):
            raise ValidationError(f"{path}:{n}: role must be 'row' or 'col', got {row['role']!r}")
        where = f"{path}:{n}"
        try:
            periods = int(row["periods"])
        except ValueError:
            raise ValidationError(f"{where}: periods {row['periods']!r} is not an integer") from None
        freq = Freq2x2(*(_num(row[k], where) for k in ("f_UL", "f_UR", "f_DL", "f_DR")), periods)
        try:
            validate_freq(freq)
        except ValidationError as e:
            raise ValidationError(f"{where}: {e}") from None
        out.append((row["session_id"], row["player_id"], role, freq))
    return out


def write_freqs(path: PathLike, records: Iterable[tuple[str, str, str, Freq2x2]]) -> None:
    rows = (
        [s, p, role, fmt(f.f_UL), fmt(f.f_UR), fmt(f.f_DL), fmt(f.f_DR), f.periods]
        for s, p, role, f in records
    )
    write_csv(path, FREQ_HEADER, rows)


# --- BidLog ----------------------------------------------------------------

def read_bidlog(path: PathLike) -> BidLog:
    rows = _read_rows(path, BID_HEADER)
    if not rows:
        raise ValidationError(f"{path}: empty bid log")
    by_round: "OrderedDict[int, dict[str, float]]" = OrderedDict()
    players: list[str] = []
    for n, row in enumerate(rows, start=2):
        try:
            t = int(row["round"])
        except ValueError:
            raise ValidationError(f"{path}:{n}: bad round {row['round']!r}") from None
        pid = row["player_id"]
        if pid not in players:
            players.append(pid)
        bids = by_round.setdefault(t, {})
        if pid in bids:
            raise ValidationError(f"{path}:{n}: duplicate bid for {pid} in round {t}")
        bids[pid] = _num(row["bid"], f"{path}:{n}")
    rounds = sorted(by_round)
    if rounds != list(range(1, len(rounds) + 1)):
        raise ValidationError(f"{path}: rounds must be contiguous 1..T")
    mat = np.empty((len(rounds), len(players)))
    for t in rounds:
        bids = by_round[t]
        if set(bids) != set(players):
            raise ValidationError(f"{path}: round {t} lacks bids for {sorted(set(players) - set(bids))}")
        mat[t - 1] = [bids[p] for p in players]
    return BidLog(mat, tuple(players))


def write_bidlog(path: PathLike, log: BidLog) -> None:
    rows = (
        [t + 1, pid, fmt(log.bids[t, k])]
        for t in range(log.n_rounds)
        for k, pid in enumerate(log.player_ids)
    )
    write_csv(path, BID_HEADER, rows)


# --- GameSpec2x2 -----------------------------------------------------------

def game_to_dict(spec: GameSpec2x2) -> dict:
    d = {}
    for slot in SLOTS:
        v = spec.value(slot)
        d[slot] = HIDDEN if v is None else (int(v) if float(v).is_integer() else v)
    if spec.constant_sum is not None:
        c = spec.constant_sum
        d["constant_sum"] = int(c) if c.is_integer() else c
    return d


def game_from_dict(d: Mapping) -> GameSpec2x2:
    vals = {}
    for slot in SLOTS:
        if slot not in d:
            raise ValidationError(f"game record lacks slot {slot!r}")
        raw = d[slot]
        if raw == HIDDEN:
            vals[slot] = None
        elif isinstance(raw, (int, float)) and not isinstance(raw, bool):
            vals[slot] = float(raw)
        else:
            raise ValidationError(f"slot {slot}: expected a number or 'hidden', got {raw!r}")
    unknown = set(d) - set(SLOTS) - {"constant_sum", "sessions", "name"}
    if unknown:
        raise ValidationError(f"unknown game keys {sorted(unknown)}")
    row = tuple(vals[s] for s in SLOTS[:4])
    col = tuple(vals[s] for s in SLOTS[4:])
    return GameSpec2x2(row, col, d.get("constant_sum"))


def read_games(path: PathLike) -> dict[str, tuple[GameSpec2x2, Optional[list[str]]]]:
    """``game_id -> (spec, session ids or None)``."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not data:
        raise ValidationError(f"{path}: expected a non-empty JSON object keyed by game_id")
    out = {}
    for gid, rec in data.items():
        try:
            spec = game_from_dict(rec)
        except ValidationError as e:
            raise ValidationError(f"{path}: game {gid}: {e}") from None
        sessions = rec.get("sessions")
        out[str(gid)] = (spec, None if sessions is None else [str(s) for s in sessions])
    return out


def write_games(path: PathLike, games: Mapping[str, tuple[GameSpec2x2, Optional[list[str]]]]) -> None:
    data = {}
    for gid, (spec, sessions) in games.items():
        d = game_to_dict(spec)
        if sessions is not None:
            d["sessions"] = list(sessions)
        data[gid] = d
    write_json(path, data)


# --- AuctionSpec -----------------------------------------------------------

def auction_to_dict(spec: AuctionSpec) -> dict:
    return {
        "mechanism": spec.mechanism.value,
        "ctrs": list(spec.ctrs),
        "n_players": spec.n_players,
        "tie_rule": spec.tie_rule,
    }


def auction_from_dict(d: Mapping) -> AuctionSpec:
    try:
        return AuctionSpec(d["mechanism"], tuple(d["ctrs"]), int(d["n_players"]), d.get("tie_rule", "lower_index"))
    except KeyError as e:
        raise ValidationError(f"auction spec lacks {e}") from None
    except (TypeError, ValueError) as e:
        raise ValidationError(f"bad auction spec: {e}") from None


def read_auction(path: PathLike) -> AuctionSpec:
    with open(path) as fh:
        return auction_from_dict(json.load(fh))


# --- misc ------------------------------------------------------------------

def write_json(path: PathLike, obj) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def read_values(path: PathLike) -> dict[tuple[str, str], float]:
    """True values CSV ``session_id,player_id,true_value``."""
    rows = _read_rows(path, ["session_id", "player_id", "true_value"])
    return {(r["session_id"], r["player_id"]): _num(r["true_value"], str(path)) for r in rows}


def write_curves(path: PathLike, curves) -> None:
    rows = (
        [c.player_id, fmt(th), fmt(r)]
        for c in curves
        for th, r in zip(c.grid.points, c.regrets)
    )
    write_csv(path, CURVE_HEADER, rows)


def dumps_csv(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


__all__ = [
    "read_freqs", "write_freqs", "read_bidlog", "write_bidlog", "read_games", "write_games",
    "game_to_dict", "game_from_dict", "auction_to_dict", "auction_from_dict", "read_auction",
    "read_values", "write_curves", "write_json", "write_csv", "fmt",
]
