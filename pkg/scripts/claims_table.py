"""Print the gadget band table for a given delta on a rational grid."""

import argparse
import time
from fractions import Fraction

from finclear.claims import check_claims, format_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", default="2/13")
    ap.add_argument("--points", type=int, default=1000)
    args = ap.parse_args()
    t = time.perf_counter()
    rows = check_claims(Fraction(args.delta), points=args.points)
    print(format_table(rows))
    print(f"\n{sum(r.points for r in rows)} evaluations in {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
