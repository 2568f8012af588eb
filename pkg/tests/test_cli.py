import csv
import json

import numpy as np
import pytest

from qregret import io as qio
from qregret.cli import main
from qregret.game import BidLog


def run(*argv):
    return main([str(a) for a in argv])


def read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def game1_args(fx):
    return ["--games", fx / "game1" / "games.json", "--freqs", fx / "game1" / "freqs.csv"]


def test_game1_defaults(fixtures, tmp_path):
    assert run("estimate", *game1_args(fixtures), "--method", "qr,mr,eq", "--out", tmp_path) == 0
    rows = {r["method"]: r for r in read(tmp_path / "estimates.csv") if r["slot"] == "row_UL"}
    assert abs(float(rows["qr"]["estimate"]) - 10.2) <= 0.1
    assert float(rows["mr"]["estimate"]) == 13
    assert abs(float(rows["eq"]["estimate"]) - 13.7059) < 1e-3
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["range"] == [0, 22] and meta["lambda"] == 3 and meta["hit_delta"] == 3
    report = json.loads((tmp_path / "report.json").read_text())
    assert set(report) == {"qr", "mr", "eq"}
    assert read(tmp_path / "report.csv")[0]["metric"] == "RMSE"


def test_lambda_zero_gives_prior_mean(fixtures, tmp_path):
    run("estimate", *game1_args(fixtures), "--method", "qr", "--lambda", "0", "--out", tmp_path)
    assert {float(r["estimate"]) for r in read(tmp_path / "estimates.csv")} == {11.0}


def test_auction_defaults_and_curves(fixtures, tmp_path):
    fx = fixtures / "auction_gsp"
    assert run("estimate", "--auction", fx / "auction.json", "--bids", fx / "s1.csv", "--values", fx / "values.csv",
               "--curves", "--out", tmp_path) == 0
    rows = read(tmp_path / "estimates.csv")
    assert list(rows[0]) == ["session_id", "player_id", "method", "estimate", "true_value", "error"]
    assert {r["method"] for r in rows} == {"eq1", "eq2", "mr", "qr"}
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["range"] == [1, 60] and meta["lambda"] == 1 and meta["hit_delta"] == 6
    assert meta["choices"]["auction_tie_rule"] == "lower_index"
    assert (tmp_path / "regret_curves.csv").exists()


def test_relative_error_default_delta(fixtures, tmp_path):
    fx = fixtures / "auction_vcg"
    run("estimate", "--auction", fx / "auction.json", "--bids", fx / "s1.csv", "--values", fx / "values.csv",
        "--error", "rel", "--out", tmp_path)
    assert json.loads((tmp_path / "metadata.json").read_text())["hit_delta"] == 0.2


def test_second_half_of_doubled_log(fixtures, tmp_path):
    fx = fixtures / "auction_gsp"
    log = qio.read_bidlog(fx / "s1.csv")
    doubled = BidLog(np.vstack([log.bids, log.bids]), log.player_ids)
    qio.write_bidlog(tmp_path / "s1.csv", doubled)
    common = ["--auction", fx / "auction.json", "--bids", tmp_path / "s1.csv", "--values", fx / "values.csv"]
    run("estimate", *common, "--out", tmp_path / "full")
    run("estimate", *common, "--half", "second", "--out", tmp_path / "half")
    assert (tmp_path / "full" / "report.csv").read_bytes() == (tmp_path / "half" / "report.csv").read_bytes()


def test_sweeps(fixtures, tmp_path):
    fx = fixtures / "synth_2x2"
    data = ["--games", fx / "games.json", "--freqs", fx / "freqs.csv"]
    assert run("sweep-lambda", *data, "--lambdas", "0.1,0.5,1,2,5,10", "--out", tmp_path) == 0
    rows = read(tmp_path / "sweep_lambda.csv")
    rmse = [float(r["rmse"]) for r in rows]
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["best_lambda"] == float(rows[int(np.argmin(rmse))]["lambda"])
    assert run("sweep-range", *data, "--lambdas", "0,1,3", "--uppers", "22,40", "--out", tmp_path) == 0
    assert list(read(tmp_path / "sweep_range.csv")[0]) == ["upper_bound", "optimal_lambda", "rmse"]


def test_errors(fixtures, tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        run("sweep-lambda", *game1_args(fixtures), "--lambdas", "", "--out", tmp_path)
    assert e.value.code == 2
    assert run("estimate", *game1_args(fixtures), "--method", "bogus", "--out", tmp_path) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("session_id,player_id,role,f_UL,f_UR,f_DL,f_DR,periods\n1,a,row,0.5,0.5,0.5,-0.5,200\n")
    assert run("validate", "--freqs", bad) == 1
    assert "f_DR" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        run("estimate", "--out", tmp_path)


def test_simulate_and_validate(fixtures, tmp_path):
    assert run("simulate", fixtures / "scenario_gsp.json", "--out", tmp_path / "a") == 0
    assert run("simulate", fixtures / "scenario_gsp.json", "--out", tmp_path / "b") == 0
    assert (tmp_path / "a" / "sim.csv").read_bytes() == (tmp_path / "b" / "sim.csv").read_bytes()
    assert run("simulate", fixtures / "scenario_2x2.json", "--out", tmp_path / "c") == 0
    assert run("validate", "--games", tmp_path / "c" / "games.json", "--freqs", tmp_path / "c" / "freqs.csv") == 0
    sc = json.loads((fixtures / "scenario_gsp.json").read_text())
    sc["agents"] = sc["agents"][:3]
    (tmp_path / "bad.json").write_text(json.dumps(sc))
    assert run("simulate", tmp_path / "bad.json", "--out", tmp_path / "d") == 1
