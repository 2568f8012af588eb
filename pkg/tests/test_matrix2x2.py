import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GAME1, GAME1_FREQ, freqs
from qregret.estimators import min_regret
from qregret.game import SLOTS, Freq2x2, GameSpec2x2, ValidationError, make_uniform_grid, mirror_slot
from qregret.matrix2x2 import (
    Level,
    PlayerFreq,
    Session2x2,
    build_items,
    estimate_game,
    estimate_session,
    mean_freq,
    nash_inversion_2x2,
)
from qregret.regret import TaskError, regret_curve_2x2
from qregret.synth import random_mixed_game
from qregret.tasks import Method, estimate_item

GAME1_FULL = GameSpec2x2((10, 0, 9, 10), (None,) * 4)


def session(freq_rows, freq_cols=None, game="1", sid="1"):
    freq_cols = freq_cols or freq_rows
    players = [PlayerFreq(f"r{k}", "row", f) for k, f in enumerate(freq_rows)]
    players += [PlayerFreq(f"c{k}", "col", f) for k, f in enumerate(freq_cols)]
    return Session2x2(game, sid, players)


def mixed_equilibrium(spec):
    """Equilibrium joint frequencies of a completely mixed game, solved by hand."""
    a, b = spec.row_payoffs, spec.col_payoffs
    # column plays Left with q making the row player indifferent
    q = (a[3] - a[1]) / ((a[0] - a[2]) + (a[3] - a[1]))
    # row plays Up with p making the column player indifferent
    p = (b[3] - b[2]) / ((b[0] - b[1]) + (b[3] - b[2]))
    return Freq2x2(p * q, p * (1 - q), (1 - p) * q, (1 - p) * (1 - q))


def test_mean_freq():
    assert mean_freq([GAME1_FREQ] * 8) == GAME1_FREQ
    m = mean_freq([Freq2x2(1, 0, 0, 0)] * 4 + [Freq2x2(0, 0, 0, 1)] * 4)
    assert m.as_array().tolist() == [0.5, 0, 0, 0.5]


def test_session_needs_balanced_roles():
    with pytest.raises(ValidationError):
        Session2x2("1", "1", [PlayerFreq("a", "row", GAME1_FREQ)])
    with pytest.raises(ValidationError):
        session([Freq2x2(0.5, 0.5, 0.5, -0.5)])


def test_nash_inversion_game1():
    est = nash_inversion_2x2(GAME1, "row_UL", GAME1_FREQ, (0, 22))
    assert abs(est - (10 / 0.68 - 1)) < 1e-12
    assert abs(est - 13.7059) < 1e-3


def test_nash_inversion_degenerate(caplog):
    with caplog.at_level(logging.WARNING):
        est = nash_inversion_2x2(GAME1.with_slot("row_UL", 10).with_slot("row_UR", None), "row_UR",
                                 Freq2x2(0.5, 0, 0.5, 0), (0, 22))
    assert est == 11
    assert "drops out" in caplog.text


def test_nash_inversion_clips():
    assert nash_inversion_2x2(GAME1, "row_UL", Freq2x2(0.01, 0.5, 0.01, 0.48), (0, 22)) == 22


@given(st.integers(0, 10**6), st.sampled_from(SLOTS))
def test_inversion_recovers_hidden_entry_at_equilibrium(seed, slot):
    spec = random_mixed_game(np.random.default_rng(seed))
    f = mixed_equilibrium(spec)
    est = nash_inversion_2x2(spec.with_slot(slot, None), slot, f, (0, 22))
    assert abs(est - spec.value(slot)) < 1e-9


@given(st.integers(0, 10**6), st.sampled_from(SLOTS), st.floats(0.2, 0.8), st.floats(0.2, 0.8))
def test_fine_grid_min_regret_meets_inversion(seed, slot, pu, ql):
    spec = random_mixed_game(np.random.default_rng(seed))
    f = Freq2x2(pu * ql, pu * (1 - ql), (1 - pu) * ql, (1 - pu) * (1 - ql))
    task = spec.with_slot(slot, None)
    eq = nash_inversion_2x2(task, slot, f, (-1000, 1000))
    if not 0.5 < eq < 21.5:
        return
    grid = make_uniform_grid(0, 22, 1e-3)
    mr = min_regret(regret_curve_2x2(task, slot, f, grid))
    assert abs(mr - eq) <= 1e-3 + 1e-9


@given(st.lists(st.integers(0, 22), min_size=8, max_size=8), freqs(), st.sampled_from(SLOTS),
       st.sampled_from([Method.QR, Method.MR, Method.EQ]))
def test_role_symmetry(vals, f, slot, method):
    spec = GameSpec2x2(tuple(vals[:4]), tuple(vals[4:]))
    g = make_uniform_grid(0, 22, 1)
    a = {e.slot: e.estimate for e in estimate_session(session([f] * 2), spec, method=method, grid=g)}
    t_spec = spec.transposed()
    b = {e.slot: e.estimate for e in estimate_session(session([f.transposed()] * 2), t_spec, method=method, grid=g)}
    assert abs(a[slot] - b[mirror_slot(slot)]) < 1e-9


def test_session_level_game1():
    g = make_uniform_grid(0, 100, 1)
    est = {e.slot: e for e in estimate_session(session([GAME1_FREQ] * 4), GAME1_FULL, method=Method.QR, grid=g)}
    assert abs(est["row_UL"].estimate - 10.2) <= 0.1
    assert est["row_UL"].true_value == 10
    assert set(est) == {"row_UL", "row_UR", "row_DL", "row_DR"}


def test_player_level_identical_players_matches_session():
    g = make_uniform_grid(0, 22, 1)
    s = session([GAME1_FREQ] * 4)
    sess = {e.slot: e.estimate for e in estimate_session(s, GAME1_FULL, Level.SESSION, Method.QR, g)}
    for e in estimate_session(s, GAME1_FULL, Level.PLAYER, Method.QR, g):
        assert e.slot.split("[")[0] in sess
        assert abs(e.estimate - sess[e.slot.split("[")[0]]) < 1e-12


def test_fine_grained_scaling():
    g = make_uniform_grid(0, 22, 1)
    s = session([GAME1_FREQ] * 4)
    fine = {e.slot: e.estimate for e in estimate_session(s, GAME1_FULL, Level.FINE_GRAINED, Method.QR, g, lam=3)}
    items = build_items([s], GAME1_FULL, Level.SESSION, g)
    for it in items:
        assert abs(fine[it.subject] - estimate_item(it, Method.QR, 9)) < 1e-9


def test_game_level_averages_sessions():
    g = make_uniform_grid(0, 22, 1)
    s1 = session([Freq2x2(0.1, 0.2, 0.3, 0.4)] * 4, sid="a")
    s2 = session([Freq2x2(0.3, 0.2, 0.1, 0.4)] * 4, sid="b")
    spec = GameSpec2x2((10, 0, 9, 10), (1, 8, 7, 2))
    got = estimate_game([s1, s2], spec, Method.MR, g)
    want = estimate_session(session([Freq2x2(0.2, 0.2, 0.2, 0.4)] * 4), spec, Level.SESSION, Method.MR, g)
    assert [e.estimate for e in got] == [e.estimate for e in want]
    assert {e.session_id for e in got} == {"*"}


def test_all_estimates_in_range():
    g = make_uniform_grid(0, 22, 1)
    spec = GameSpec2x2((30, -5, 9, 10), (1, 8, 7, 2))
    for m in (Method.QR, Method.MR, Method.EQ):
        for e in estimate_session(session([Freq2x2(0.1, 0.2, 0.3, 0.4)] * 4), spec, method=m, grid=g):
            assert 0 <= e.estimate <= 22


def test_constant_sum_mode():
    spec = GameSpec2x2((10, 4, 6, 12), (6, 12, 10, 4), constant_sum=16)
    f = mixed_equilibrium(spec)
    g = make_uniform_grid(0, 22, 1e-3)
    items = build_items([session([f] * 4)], spec, Level.CONSTANT_SUM_SESSION, g)
    assert len(items) == 4
    for it in items:
        # at equilibrium both inversions agree with the truth
        assert abs(estimate_item(it, Method.EQ, 1) - it.true_value) < 1e-9
        assert it.curves[0].grid.upper == 16
        assert abs(estimate_item(it, Method.MR, 1) - it.true_value) <= 2e-3


def test_constant_sum_requires_constant_sum_game():
    with pytest.raises(TaskError):
        build_items([session([GAME1_FREQ] * 4)], GameSpec2x2((1, 2, 3, 4), (4, 3, 2, 1)),
                    Level.CONSTANT_SUM_SESSION, make_uniform_grid(0, 22, 1))


def test_level_parse():
    assert Level.parse("Fine-Grained") is Level.FINE_GRAINED
    with pytest.raises(ValidationError):
        Level.parse("galaxy")
