import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from qregret.game import Freq2x2, GameSpec2x2, make_uniform_grid
from qregret.regret import RegretCurve

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

GAME1 = GameSpec2x2((None, 0, 9, 10), (None,) * 4)
GAME1_FREQ = Freq2x2(0.07, 0.04, 0.61, 0.28)


@pytest.fixture
def fixtures():
    return FIXTURES


@st.composite
def freqs(draw, min_mass=0.0):
    raw = draw(st.lists(st.integers(0, 1000), min_size=4, max_size=4).filter(lambda v: sum(v) > 0))
    total = sum(raw)
    return Freq2x2.from_array([r / total for r in raw])


@st.composite
def regret_curves(draw, max_points=30):
    n = draw(st.integers(1, max_points))
    step = draw(st.sampled_from([0.5, 1.0, 2.0]))
    lo = draw(st.integers(-5, 5))
    grid = make_uniform_grid(lo, lo + step * (n - 1), step) if n > 1 else None
    if grid is None:
        grid = make_uniform_grid(lo, lo + step, step)
        n = 2
    regs = draw(st.lists(st.floats(0, 50, allow_nan=False), min_size=n, max_size=n))
    return RegretCurve(grid, np.array(regs))


payoffs = st.lists(st.integers(0, 22), min_size=4, max_size=4)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
