"""Command-line entry point: ``qregret {estimate,sweep-lambda,sweep-range,simulate,validate}``.

Every default mirrors the published configuration of its domain:
2x2 games use range 0:22, unit grid, lambda 3, hit delta 3; ad auctions use
range 1:60, unit grid, lambda 1, hit delta 6 (0.2 under relative error).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import auction_tasks, matrix2x2
from . import io as qio
from .auctions import EstimatorFailure
from .game import AuctionSpec, ValidationError, make_uniform_grid
from .matrix2x2 import Level, build_items, sessions_from_records
from .metrics import comparison_table, report_items, sweep_lambda, sweep_range
from .regret import TaskError
from .synth import agent_from_dict, simulate
from .tasks import Method, estimate_item

log = logging.getLogger("qregret")

DEFAULT_LAMBDAS = (0, 0.1, 0.2, 0.3, 0.5, 0.7, 1, 1.5, 2, 3, 4, 5, 7, 10)
DEFAULT_UPPERS = (22, 30, 40, 50, 60, 80, 100)
ESTIMATE_HEADER = ["game_id", "session_id", "level", "method", "slot", "estimate", "true_value", "error"]
AUCTION_HEADER = ["session_id", "player_id", "method", "estimate", "true_value", "error"]


class UsageError(ValueError):
    pass


@dataclass
class Dataset:
    """Parsed inputs for either domain plus the defaults that go with it."""

    domain: str  # "2x2" or "auction"
    sessions: list = None
    games: dict = None
    logs: dict = None
    auction: Optional[AuctionSpec] = None
    values: dict = None

    @property
    def defaults(self):
        if self.domain == "2x2":
            return matrix2x2.DEFAULT_RANGE, matrix2x2.DEFAULT_LAMBDA, matrix2x2.DEFAULT_HIT_DELTA
        return auction_tasks.DEFAULT_RANGE, auction_tasks.DEFAULT_LAMBDA, auction_tasks.DEFAULT_HIT_DELTA


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--range expects LO:HI, got {text!r}") from None
    return lo, hi


def _parse_floats(text: str, flag: str) -> list[float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise UsageError(f"{flag} needs at least one value")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{flag}: could not parse {text!r}") from None


def load_dataset(args) -> Dataset:
    if args.games or args.freqs:
        if not (args.games and args.freqs):
            raise UsageError("2x2 estimation needs both --games and --freqs")
        games = qio.read_games(args.games)
        records = qio.read_freqs(args.freqs)
        game_of = {}
        for gid, (_, sids) in games.items():
            for sid in sids or []:
                game_of[sid] = gid
        if len(games) == 1:
            (only,) = games
            for sid, *_ in records:
                game_of.setdefault(sid, only)
        sessions = sessions_from_records(records, game_of)
        return Dataset("2x2", sessions=sessions, games={g: s for g, (s, _) in games.items()})
    if args.auction or args.bids:
        if not (args.auction and args.bids):
            raise UsageError("auction estimation needs --auction and at least one --bids file")
        spec = qio.read_auction(args.auction)
        logs = {}
        for path in args.bids:
            blog = qio.read_bidlog(path)
            if blog.n_players != spec.n_players:
                raise ValidationError(f"{path}: {blog.n_players} players, auction spec says {spec.n_players}")
            if args.half == "second":
                blog = blog.second_half()
            logs[Path(path).stem] = blog
        values = qio.read_values(args.values) if args.values else {}
        return Dataset("auction", logs=logs, auction=spec, values=values)
    raise UsageError("give --games/--freqs (2x2) or --auction/--bids (ad auction)")


def _config(args, data: Dataset):
    (lo, hi), lam, delta = data.defaults
    if args.range:
        lo, hi = _parse_range(args.range)
    lam = args.lam if args.lam is not None else lam
    relative = args.error == "rel"
    if args.hit_delta is not None:
        delta = args.hit_delta
    elif relative:
        delta = auction_tasks.DEFAULT_REL_HIT_DELTA
    return lo, hi, args.grid_step, lam, delta, relative


def _methods(args, data: Dataset) -> list[Method]:
    if args.method:
        methods = [Method.parse(m) for m in args.method.split(",") if m.strip()]
        if not methods:
            raise UsageError("--method is empty")
    elif data.domain == "2x2":
        methods = [Method.EQ, Method.MR, Method.QR]
    elif data.auction.mechanism.value == "GSP":
        methods = [Method.EQ1, Method.EQ2, Method.MR, Method.QR]
    else:
        methods = [Method.EQ, Method.MR, Method.QR]
    allowed = {
        "2x2": {Method.QR, Method.MR, Method.MR_REL, Method.EQ},
        "auction": {Method.QR, Method.MR, Method.MR_REL, Method.EQ, Method.EQ1, Method.EQ2},
    }[data.domain]
    bad = [m.value for m in methods if m not in allowed]
    if data.domain == "auction" and data.auction.mechanism.value != "GSP":
        bad += [m.value for m in methods if m in (Method.EQ1, Method.EQ2)]
    if bad:
        raise UsageError(f"methods {bad} do not apply to this dataset")
    return methods


def build_dataset_items(data: Dataset, grid, level: Level, equilibrium: bool = True):
    if data.domain == "auction":
        return auction_tasks.build_auction_items(data.logs, data.auction, grid, data.values, equilibrium)
    items = []
    by_game: dict[str, list] = {}
    for s in data.sessions:
        by_game.setdefault(s.game_id, []).append(s)
    for gid in sorted(by_game, key=_natural):
        if gid not in data.games:
            raise ValidationError(f"sessions reference unknown game {gid!r}")
        items += build_items(by_game[gid], data.games[gid], level, grid)
    return items


def _natural(text: str):
    return (0, int(text), "") if text.isdigit() else (1, 0, text)


def _metadata(args, data, **extra) -> dict:
    meta = {
        "command": args.command,
        "domain": data.domain,
        "choices": {
            "regret_clamp": "negative regret clamped to 0",
            "argmin_ties": "smallest value",
            "hit_rate": "boundary inclusive",
        },
    }
    if data.domain == "auction":
        meta["choices"].update({
            "auction_tie_rule": data.auction.tie_rule,
            "first_price_ties": "hypothesised player wins",
            "candidate_bids": "value grid, 0, own bids, opponent bids and opponent bids + one grid step",
            "eq1_perturbation": "least squares per round",
            "eq1_aggregation": "mean of per-round values",
            "eq1_top_bidder": "bids its value",
            "eq2_objective": "distance from mean bid to best-response set, smallest value on ties",
        })
        meta["half"] = args.half
    meta.update(extra)
    return meta


def cmd_estimate(args) -> int:
    data = load_dataset(args)
    lo, hi, step, lam, delta, relative = _config(args, data)
    level = Level.parse(args.level)
    grid = make_uniform_grid(lo, hi, step)
    methods = _methods(args, data)
    items = build_dataset_items(data, grid, level, equilibrium=any(m.value.startswith("eq") for m in methods))
    out = Path(args.out)
    rows, reports = [], {}
    for m in methods:
        ests = [(it, estimate_item(it, m, lam)) for it in items]
        for it, e in ests:
            err = None if it.true_value is None else abs(e - it.true_value)
            if data.domain == "2x2":
                rows.append([it.group, it.session_id, level.value, m.value, it.subject,
                             qio.fmt(e), qio.fmt(it.true_value), qio.fmt(err)])
            else:
                rows.append([it.session_id, it.subject, m.value, qio.fmt(e), qio.fmt(it.true_value), qio.fmt(err)])
        if any(it.true_value is not None for it in items):
            reports[m.value] = report_items(items, m, lam, delta, relative)
    header = ESTIMATE_HEADER if data.domain == "2x2" else AUCTION_HEADER
    qio.write_csv(out / "estimates.csv", header, rows)
    if args.curves:
        curves = []
        for it in items:
            for c in it.curves:
                curves.append(type(c)(c.grid, c.regrets, f"{it.session_id}/{it.subject}/{c.player_id}"))
        qio.write_curves(out / "regret_curves.csv", curves)
    if reports:
        th, tr = comparison_table(reports)
        qio.write_csv(out / "report.csv", th, [[r[0]] + [qio.fmt(v) for v in r[1:]] for r in tr])
        qio.write_json(out / "report.json", {k: r.as_dict() for k, r in reports.items()})
        print(qio.dumps_csv(th, [[r[0]] + [f"{v:.4f}" for v in r[1:]] for r in tr]), end="")
    else:
        for r in rows:
            print(",".join(str(x) for x in r))
    qio.write_json(out / "metadata.json", _metadata(
        args, data, level=level.value, range=[lo, hi], grid_step=step, **{"lambda": lam},
        hit_delta=delta, error=args.error, methods=[m.value for m in methods], n_items=len(items)))
    return 0


def cmd_sweep_lambda(args) -> int:
    data = load_dataset(args)
    lo, hi, step, lam, delta, relative = _config(args, data)
    lambdas = _parse_floats(args.lambdas, "--lambdas")
    level = Level.parse(args.level)
    items = build_dataset_items(data, make_uniform_grid(lo, hi, step), level, equilibrium=False)
    sw = sweep_lambda(items, lambdas, relative)
    out = Path(args.out)
    qio.write_csv(out / "sweep_lambda.csv", ["lambda", "rmse"], [[qio.fmt(l), qio.fmt(r)] for l, r in sw.rows()])
    qio.write_json(out / "metadata.json", _metadata(
        args, data, level=level.value, range=[lo, hi], grid_step=step, error=args.error,
        lambdas=list(sw.lambdas), best_lambda=sw.best_lambda, best_rmse=sw.best_rmse))
    print(f"best lambda {qio.fmt(sw.best_lambda)} rmse {sw.best_rmse:.4f}")
    return 0


def cmd_sweep_range(args) -> int:
    data = load_dataset(args)
    lo, hi, step, lam, delta, relative = _config(args, data)
    lambdas = _parse_floats(args.lambdas, "--lambdas")
    uppers = _parse_floats(args.uppers, "--uppers")
    level = Level.parse(args.level)
    rows = sweep_range(lambda g: build_dataset_items(data, g, level, equilibrium=False),
                       uppers, lambdas, lower=lo, step=step, relative=relative)
    out = Path(args.out)
    qio.write_csv(out / "sweep_range.csv", ["upper_bound", "optimal_lambda", "rmse"],
                  [[qio.fmt(r.upper_bound), qio.fmt(r.optimal_lambda), qio.fmt(r.rmse)] for r in rows])
    qio.write_json(out / "metadata.json", _metadata(
        args, data, level=level.value, lower=lo, grid_step=step, error=args.error,
        lambdas=lambdas, upper_bounds=uppers))
    for r in rows:
        print(f"upper {qio.fmt(r.upper_bound)}: lambda {qio.fmt(r.optimal_lambda)} rmse {r.rmse:.4f}")
    return 0


def run_scenario(scenario: dict, seed: Optional[int] = None):
    """Simulate a scenario dict; returns (spec, play, agents)."""
    game = dict(scenario.get("game") or {})
    kind = game.pop("type", None)
    agents = [agent_from_dict(a) for a in scenario.get("agents", [])]
    rounds = int(scenario.get("rounds", 1500))
    seed = int(scenario.get("seed", 0) if seed is None else seed)
    if kind == "auction":
        spec = qio.auction_from_dict(game)
        g = scenario.get("bid_grid")
        grid = make_uniform_grid(g["lower"], g["upper"], g["step"]) if g else None
        return spec, simulate(agents, spec, rounds, seed, bid_grid=grid), agents
    if kind == "2x2":
        game_id = str(game.pop("game_id", "sim"))
        spec = qio.game_from_dict(game)
        sid = str(scenario.get("session_id", "sim"))
        return spec, simulate(agents, spec, rounds, seed, game_id=game_id, session_id=sid), agents
    raise ValidationError("scenario 'game.type' must be 'auction' or '2x2'")


def cmd_simulate(args) -> int:
    with open(args.scenario) as fh:
        scenario = json.load(fh)
    spec, play, agents = run_scenario(scenario, args.seed)
    out = Path(args.out)
    if isinstance(spec, AuctionSpec):
        sid = str(scenario.get("session_id", "sim"))
        qio.write_bidlog(out / f"{sid}.csv", play)
        qio.write_csv(out / "values.csv", ["session_id", "player_id", "true_value"],
                      [[sid, p, qio.fmt(a.true_value)] for p, a in zip(play.player_ids, agents)])
        qio.write_json(out / "auction.json", qio.auction_to_dict(spec))
    else:
        qio.write_freqs(out / "freqs.csv", [(play.session_id, p.player_id, p.role, p.freq) for p in play.players])
        qio.write_games(out / "games.json", {play.game_id: (spec, [play.session_id])})
    print(f"wrote simulated play to {out}")
    return 0


def cmd_validate(args) -> int:
    checked = []
    if args.games:
        qio.read_games(args.games)
        checked.append(args.games)
    if args.freqs:
        qio.read_freqs(args.freqs)
        checked.append(args.freqs)
    if args.auction:
        qio.read_auction(args.auction)
        checked.append(args.auction)
    for p in args.bids or []:
        qio.read_bidlog(p)
        checked.append(p)
    if args.values:
        qio.read_values(args.values)
        checked.append(args.values)
    if args.scenario:
        with open(args.scenario) as fh:
            sc = json.load(fh)
        run_scenario({**sc, "rounds": 1})
        checked.append(args.scenario)
    if not checked:
        raise UsageError("nothing to validate")
    if args.games and args.freqs:
        load_dataset(args)
    for c in checked:
        print(f"ok {c}")
    return 0


def _add_data_flags(p):
    p.add_argument("--games", help="2x2 games JSON keyed by game_id")
    p.add_argument("--freqs", help="Freq2x2 CSV")
    p.add_argument("--auction", help="AuctionSpec JSON")
    p.add_argument("--bids", action="append", help="BidLog CSV (repeatable; one session per file)")
    p.add_argument("--values", help="true values CSV session_id,player_id,true_value")


def _add_estimation_flags(p):
    p.add_argument("--level", default="session", help="2x2 aggregation level")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--range", help="LO:HI valuation range")
    p.add_argument("--grid-step", type=float, default=1.0)
    p.add_argument("--hit-delta", type=float, default=None)
    p.add_argument("--error", choices=("abs", "rel"), default="abs")
    p.add_argument("--half", choices=("full", "second"), default="full")
    p.add_argument("--seed", type=int, default=0, help="recorded in metadata; estimation is deterministic")
    p.add_argument("--out", default="out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qregret", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate hidden values and report errors")
    _add_data_flags(p)
    _add_estimation_flags(p)
    p.add_argument("--method", help="comma list of qr,mr,mr_rel,eq,eq1,eq2")
    p.add_argument("--curves", action="store_true", help="also write regret_curves.csv")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep-lambda", help="QR RMSE as a function of lambda")
    _add_data_flags(p)
    _add_estimation_flags(p)
    p.add_argument("--lambdas", default=",".join(str(l) for l in DEFAULT_LAMBDAS))
    p.set_defaults(func=cmd_sweep_lambda)

    p = sub.add_parser("sweep-range", help="optimal lambda and RMSE per valuation upper bound")
    _add_data_flags(p)
    _add_estimation_flags(p)
    p.add_argument("--lambdas", default=",".join(str(l) for l in DEFAULT_LAMBDAS))
    p.add_argument("--uppers", default=",".join(str(u) for u in DEFAULT_UPPERS))
    p.set_defaults(func=cmd_sweep_range)

    p = sub.add_parser("simulate", help="generate synthetic play from a scenario JSON")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="parse and check input files")
    _add_data_flags(p)
    p.add_argument("--scenario")
    p.add_argument("--half", default="full")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.error(str(e))  # exits 2
    except (ValidationError, TaskError, EstimatorFailure, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
