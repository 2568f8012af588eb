import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qregret.estimators import prior_mean
from qregret.game import ValidationError, make_uniform_grid
from qregret.matrix2x2 import Level, build_items
from qregret.metrics import comparison_table, compute_report, report_items, rmse_of, sweep_lambda, sweep_range
from qregret.tasks import Method
from qregret import io as qio
from qregret.matrix2x2 import sessions_from_records

pairs_st = st.lists(st.tuples(st.floats(-100, 100), st.floats(1, 100)), min_size=1, max_size=30)


def test_worked_example_report():
    r = compute_report([(13.7, 10), (13, 10), (10.2, 10)], 3)
    assert [round(e.abs_error, 12) for e in r.entries] == [3.7, 3.0, 0.2]
    assert r.hit_rate == pytest.approx(2 / 3)


def test_trivial_reports():
    r = compute_report([(5, 5), (7, 7)], 1)
    assert r.rmse == r.avg_error == 0 and r.hit_rate == 1
    r = compute_report([(0, 10)], 6)
    assert r.rmse == r.avg_error == 10 and r.hit_rate == 0


def test_relative_errors():
    r = compute_report([(12, 10), (30, 40)], 0.2, relative=True)
    assert [e.rel_error for e in r.entries] == pytest.approx([0.2, 0.25])
    assert r.hit_rate == 0.5
    with pytest.raises(ValidationError):
        compute_report([(1, 0)], 0.2, relative=True)
    with pytest.raises(ValidationError):
        compute_report([], 1)


@given(pairs_st, st.floats(0, 50), st.booleans())
def test_report_invariants(pairs, delta, rel):
    r = compute_report(pairs, delta, rel)
    assert r.rmse >= r.avg_error - 1e-12 >= -1e-12
    assert 0 <= r.hit_rate <= 1
    errs = [e.rel_error if rel else e.abs_error for e in r.entries]
    if max(errs) - min(errs) > 1e-6 * max(1, max(errs)):
        assert r.rmse > r.avg_error


@given(pairs_st, st.randoms())
def test_report_permutation_invariant(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a, b = compute_report(pairs, 3), compute_report(shuffled, 3)
    assert (a.rmse, a.avg_error, a.hit_rate) == (b.rmse, b.avg_error, b.hit_rate)


@pytest.fixture
def synth_items(fixtures):
    games = qio.read_games(fixtures / "synth_2x2" / "games.json")
    game_of = {sid: gid for gid, (_, sids) in games.items() for sid in sids}
    sessions = sessions_from_records(qio.read_freqs(fixtures / "synth_2x2" / "freqs.csv"), game_of)

    def build(grid):
        out = []
        for gid, (spec, _) in games.items():
            out += build_items([s for s in sessions if s.game_id == gid], spec, Level.SESSION, grid)
        return out

    return build


def test_sweep_lambda_limits(synth_items):
    items = synth_items(make_uniform_grid(0, 22, 1))
    sw0 = sweep_lambda(items, [0])
    pm = prior_mean(make_uniform_grid(0, 22, 1))
    want = math.sqrt(np.mean([(pm - it.true_value) ** 2 for it in items]))
    assert sw0.best_rmse == pytest.approx(want, abs=1e-12)
    # the large-lambda limit holds where the minimiser is unique
    unique = [it for it in items if np.partition(it.curves[0].regrets, 1)[1] > it.curves[0].regrets.min() + 1e-4]
    assert len(unique) > len(items) // 2
    big = sweep_lambda(unique, [1e6])
    assert abs(big.best_rmse - rmse_of(unique, Method.MR, 0)) < 1e-6


def test_sweep_lambda_argmin_rechecked(synth_items):
    items = synth_items(make_uniform_grid(0, 22, 1))
    lams = [0.1, 0.2, 0.5, 1, 2, 3, 5, 10]
    sw = sweep_lambda(items, lams)
    again = [rmse_of(items, Method.QR, l) for l in lams]
    assert all(math.isfinite(r) for r in sw.rmse)
    assert list(sw.rmse) == again
    assert sw.best_lambda == lams[int(np.argmin(again))]
    with pytest.raises(ValidationError):
        sweep_lambda(items, [])


def test_sweep_range(synth_items):
    rows = sweep_range(synth_items, [30, 30, 60], [0.0, 1.0, 3.0])
    assert rows[0].optimal_lambda == rows[1].optimal_lambda and rows[0].rmse == rows[1].rmse
    for r in rows:
        assert r.optimal_lambda == r.sweep.lambdas[int(np.argmin(r.sweep.rmse))]
    # at lambda 0 the estimate is the prior mean, which drifts upward with the range
    wide = sweep_range(synth_items, [25, 40, 60, 100], [1e-9])
    assert all(a.rmse < b.rmse for a, b in zip(wide, wide[1:]))


def test_comparison_table(synth_items):
    items = synth_items(make_uniform_grid(0, 22, 1))
    reps = {m.value: report_items(items, m, 3, 3) for m in (Method.EQ, Method.MR, Method.QR)}
    header, rows = comparison_table(reps)
    assert header == ["metric", "EQ", "MR", "QR"]
    assert [r[0] for r in rows] == ["RMSE", "Average Error", "Hit Rate"]
