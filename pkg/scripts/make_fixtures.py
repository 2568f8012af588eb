"""Regenerate the data files under fixtures/.

    python3 scripts/make_fixtures.py [--out fixtures]

Everything is seeded; rerunning gives byte-identical files.
"""
import argparse
import json
from pathlib import Path

import numpy as np

from qregret import io as qio
from qregret.game import LAB_VALUES, Freq2x2, GameSpec2x2, lab_auction
from qregret.synth import AgentSpec, simulate_2x2, simulate_auction, random_mixed_game

GAME1_FREQ = Freq2x2(0.07, 0.04, 0.61, 0.28, periods=200)


def game1(out: Path):
    # row payoffs of the worked example; the column table is not needed and stays hidden
    spec = GameSpec2x2((10, 0, 9, 10), (None,) * 4)
    qio.write_games(out / "games.json", {"1": (spec, ["1"])})
    recs = [("1", f"r{k}", "row", GAME1_FREQ) for k in range(1, 5)]
    recs += [("1", f"c{k}", "col", GAME1_FREQ) for k in range(1, 5)]
    qio.write_freqs(out / "freqs.csv", recs)


def synth_2x2(out: Path, n_games=3, sessions=2, periods=200, seed=7):
    rng = np.random.Generator(np.random.PCG64(seed))
    games, recs = {}, []
    for g in range(1, n_games + 1):
        spec = random_mixed_game(rng)
        sids = []
        for s in range(1, sessions + 1):
            sid = f"{g}.{s}"
            agents = [AgentSpec("EXP_WEIGHTS", seed=k, player_id=f"{sid}.r{k}", role="row") for k in range(4)]
            agents += [AgentSpec("EXP_WEIGHTS", seed=10 + k, player_id=f"{sid}.c{k}", role="col") for k in range(4)]
            sess = simulate_2x2(agents, spec, periods, seed * 1000 + g * 10 + s, game_id=str(g), session_id=sid)
            recs += [(sid, p.player_id, p.role, p.freq) for p in sess.players]
            sids.append(sid)
        games[str(g)] = (spec, sids)
    qio.write_games(out / "games.json", games)
    qio.write_freqs(out / "freqs.csv", recs)


def auction(out: Path, mechanism="GSP", sessions=2, rounds=300, seed=11):
    spec = lab_auction(mechanism)
    qio.write_json(out / "auction.json", qio.auction_to_dict(spec))
    rows = []
    for s in range(1, sessions + 1):
        sid = f"s{s}"
        agents = [AgentSpec("EXP_WEIGHTS", v, seed=k, player_id=f"p{k + 1}") for k, v in enumerate(LAB_VALUES)]
        blog = simulate_auction(agents, spec, rounds, seed + s)
        qio.write_bidlog(out / f"{sid}.csv", blog)
        rows += [[sid, a.player_id, qio.fmt(a.true_value)] for a in agents]
    qio.write_csv(out / "values.csv", ["session_id", "player_id", "true_value"], rows)


def scenarios(out: Path):
    gsp = {
        "game": {"type": "auction", "mechanism": "GSP", "ctrs": [0.38, 0.29, 0.2, 0.11, 0.02], "n_players": 5},
        "agents": [{"kind": "EXP_WEIGHTS", "true_value": v, "seed": k, "player_id": f"p{k + 1}"}
                   for k, v in enumerate(LAB_VALUES)],
        "rounds": 300,
        "seed": 1,
        "session_id": "sim",
    }
    mp = {
        "game": {"type": "2x2", "game_id": "mp", "row_UL": 10, "row_UR": 0, "row_DL": 9, "row_DR": 10,
                 "col_UL": 8, "col_UR": 18, "col_DL": 9, "col_DR": 8},
        "agents": [{"kind": "EXP_WEIGHTS", "seed": k, "role": r, "player_id": f"{r}{k}"}
                   for r in ("row", "col") for k in range(4)],
        "rounds": 200,
        "seed": 3,
        "session_id": "mp.1",
    }
    for name, sc in (("scenario_gsp.json", gsp), ("scenario_2x2.json", mp)):
        with open(out / name, "w") as fh:
            json.dump(sc, fh, indent=2)
            fh.write("\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    args = ap.parse_args()
    root = Path(args.out)
    for sub in ("game1", "synth_2x2", "auction_gsp", "auction_vcg"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    game1(root / "game1")
    synth_2x2(root / "synth_2x2")
    auction(root / "auction_gsp", "GSP")
    auction(root / "auction_vcg", "VCG", sessions=1)
    scenarios(root)
    print(f"fixtures written to {root}")


if __name__ == "__main__":
    main()
