import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import freqs
from qregret import io as qio
from qregret.game import AuctionSpec, BidLog, GameSpec2x2, ValidationError, make_uniform_grid
from qregret.regret import RegretCurve

opt_pay = st.one_of(st.none(), st.integers(-50, 50), st.floats(-50, 50, allow_nan=False))


@given(st.lists(freqs(), min_size=1, max_size=5))
def test_freq_round_trip(tmp_path_factory, fs):
    p = tmp_path_factory.mktemp("f") / "f.csv"
    recs = [(f"s{k % 2}", f"p{k}", "row" if k % 2 else "col", f) for k, f in enumerate(fs)]
    qio.write_freqs(p, recs)
    assert qio.read_freqs(p) == recs


@given(st.lists(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=3, max_size=3), min_size=1, max_size=20))
def test_bidlog_round_trip(tmp_path_factory, rows):
    p = tmp_path_factory.mktemp("b") / "b.csv"
    log = BidLog(np.array(rows), ("zed", "amy", "bo"))
    qio.write_bidlog(p, log)
    assert qio.read_bidlog(p) == log


@given(st.lists(opt_pay, min_size=8, max_size=8))
def test_game_round_trip(tmp_path_factory, vals):
    p = tmp_path_factory.mktemp("g") / "g.json"
    spec = GameSpec2x2(tuple(vals[:4]), tuple(vals[4:]))
    qio.write_games(p, {"7": (spec, ["a", "b"]), "8": (spec, None)})
    back = qio.read_games(p)
    assert back["7"] == (spec, ["a", "b"]) and back["8"] == (spec, None)


def test_auction_and_curve_round_trip(tmp_path):
    spec = AuctionSpec("VCG", (0.38, 0.29), 4, "higher_index")
    qio.write_json(tmp_path / "a.json", qio.auction_to_dict(spec))
    assert qio.read_auction(tmp_path / "a.json") == spec
    g = make_uniform_grid(0, 3, 0.5)
    qio.write_curves(tmp_path / "c.csv", [RegretCurve(g, np.linspace(0, 1, 7), "p1")])
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "player_id,theta,regret"
    assert lines[2] == "p1,0.5," + repr(1 / 6)


def test_fmt():
    assert qio.fmt(3.0) == "3"
    assert qio.fmt(0.1) == "0.1"
    assert qio.fmt(None) == ""


def test_bad_files(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("session_id,player_id,role,f_UL,f_UR,f_DL,f_DR,periods\n1,a,row,0.5,0.5,0.5,-0.5,200\n")
    with pytest.raises(ValidationError, match="f_DR"):
        qio.read_freqs(p)
    p.write_text("round,player_id,bid\n1,a,3\n3,a,4\n")
    with pytest.raises(ValidationError, match="contiguous"):
        qio.read_bidlog(p)
    p.write_text("round,player_id,bid\n1,a,3\n1,b,x\n")
    with pytest.raises(ValidationError):
        qio.read_bidlog(p)
    p.write_text("round,player\n")
    with pytest.raises(ValidationError, match="missing"):
        qio.read_bidlog(p)
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"1": {"row_UL": 1}}))
    with pytest.raises(ValidationError):
        qio.read_games(g)
