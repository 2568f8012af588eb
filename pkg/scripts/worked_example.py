"""Game 1 worked example: regret curve and the EQ / MR / QR estimates of the hidden payoff.

    python3 scripts/worked_example.py [--upper 100] [--lam 3] [--curve out.csv]
"""
import argparse

from qregret import io as qio
from qregret.estimators import min_regret, quantal_regret
from qregret.game import Freq2x2, GameSpec2x2, make_uniform_grid
from qregret.matrix2x2 import nash_inversion_2x2
from qregret.regret import regret_curve_2x2, row_utilities

SPEC = GameSpec2x2((None, 0, 9, 10), (None,) * 4)
FREQ = Freq2x2(0.07, 0.04, 0.61, 0.28)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--upper", type=float, default=100.0)
    ap.add_argument("--lam", type=float, default=3.0)
    ap.add_argument("--curve", help="write the regret curve CSV here")
    args = ap.parse_args()

    up, down, emp = row_utilities((13, 0, 9, 10), FREQ)
    print(f"x=13: util_Up={up:.2f} util_Down={down:.2f} util_Emp={emp:.2f} regret={max(up, down) - emp:.2f}")
    narrow = regret_curve_2x2(SPEC, "row_UL", FREQ, make_uniform_grid(0, 22, 1))
    wide = regret_curve_2x2(SPEC, "row_UL", FREQ, make_uniform_grid(0, args.upper, 1))
    fine = regret_curve_2x2(SPEC, "row_UL", FREQ, make_uniform_grid(0, 22, 1e-3))
    print(f"EQ  = {nash_inversion_2x2(SPEC, 'row_UL', FREQ, (0, 22)):.4f}")
    print(f"MR  = {min_regret(narrow):g} (integers 0..22), {min_regret(fine):.3f} (step 1e-3)")
    print(f"QR  = {quantal_regret(wide, args.lam):.4f} (lambda {args.lam:g}, integers 0..{args.upper:g})")
    if args.curve:
        qio.write_curves(args.curve, [wide])


if __name__ == "__main__":
    main()
