"""Payoff recovery on random completely mixed 2x2 games played by Hedge populations.

Prints the comparison table (RMSE, average error, hit rate) at each aggregation
level, plus the best lambda of a session-level sweep.

    python3 scripts/benchmark_2x2.py --games 12 --sessions 2 --periods 200
"""
import argparse

import numpy as np

from qregret.game import make_uniform_grid
from qregret.matrix2x2 import Level, build_items
from qregret.metrics import comparison_table, report_items, sweep_lambda
from qregret.synth import AgentSpec, random_mixed_game, simulate_2x2
from qregret.tasks import Method


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--games", type=int, default=12)
    ap.add_argument("--sessions", type=int, default=2)
    ap.add_argument("--periods", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lam", type=float, default=3.0)
    args = ap.parse_args()

    rng = np.random.Generator(np.random.PCG64(args.seed))
    grid = make_uniform_grid(0, 22, 1)
    data = []
    for g in range(args.games):
        spec = random_mixed_game(rng)
        sessions = []
        for s in range(args.sessions):
            agents = [AgentSpec("EXP_WEIGHTS", seed=k, role=r) for r in ("row", "col") for k in range(4)]
            sessions.append(simulate_2x2(agents, spec, args.periods, args.seed * 10_000 + g * 100 + s,
                                         game_id=str(g), session_id=f"{g}.{s}"))
        data.append((spec, sessions))

    for level in (Level.SESSION, Level.FINE_GRAINED, Level.PLAYER, Level.GAME):
        items = [it for spec, ss in data for it in build_items(ss, spec, level, grid)]
        reps = {m.value: report_items(items, m, args.lam, 3) for m in (Method.EQ, Method.MR, Method.QR)}
        header, rows = comparison_table(reps)
        print(f"\n[{level.value}] {len(items)} estimates")
        print("  ".join(f"{h:>14}" for h in header))
        for r in rows:
            print(f"{r[0]:>14}  " + "  ".join(f"{v:14.3f}" for v in r[1:]))
    items = [it for spec, ss in data for it in build_items(ss, spec, Level.SESSION, grid)]
    sw = sweep_lambda(items, [0.1, 0.3, 0.5, 1, 2, 3, 5, 10, 20])
    print(f"\nsession-level sweep: best lambda {sw.best_lambda:g}, rmse {sw.best_rmse:.3f}")


if __name__ == "__main__":
    main()
