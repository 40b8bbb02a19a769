"""Iterate the two-CDS feedback network for several c and compare r_2 with 1 - sqrt(c)."""

import argparse
from decimal import Decimal
from fractions import Fraction

from finclear.instances import cds_feedback_network
from finclear.iterate import iterate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", nargs="+", default=["1/4", "1/9", "1/16", "1/2"])
    ap.add_argument("--damping", default="1")
    args = ap.parse_args()
    print(f"{'c':>6} {'steps':>6} {'r_2':>22} {'1 - sqrt(c)':>22} {'residual':>10}")
    for c in args.c:
        rep = iterate(cds_feedback_network(c), damping=Fraction(args.damping))
        f = Fraction(c)
        root = 1 - (Decimal(f.numerator) / Decimal(f.denominator)).sqrt()
        print(f"{c:>6} {rep.iterations:>6} {rep.rates['2']:>22.18f} {root:>22.18f} "
              f"{float(rep.max_residual):>10.1e}")


if __name__ == "__main__":
    main()
