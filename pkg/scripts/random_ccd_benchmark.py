"""Time the exact solvers on seeded random central-debtor networks."""

import argparse
import os
import random
import statistics
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))

from finclear.covered import solve_covered_central  # noqa: E402
from finclear.mblp import build_mblp, solve_exhaustive  # noqa: E402
from netgen import random_ccd  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--max-banks", type=int, default=8)
    args = ap.parse_args()
    by_n = {}
    covered_times = []
    for seed in range(args.count):
        net = random_ccd(random.Random(seed), n_max=args.max_banks)
        n = len(build_mblp(net).variables)
        t = time.perf_counter()
        rep = solve_exhaustive(net)
        by_n.setdefault(n, []).append(time.perf_counter() - t)
        assert rep.passed, seed
        cov = random_ccd(random.Random(seed), n_max=args.max_banks, covered=True)
        t = time.perf_counter()
        assert solve_covered_central(cov).passed, seed
        covered_times.append(time.perf_counter() - t)
    print(f"{'vars':>4} {'nets':>5} {'mean ms':>9} {'max ms':>9}   (exhaustive MBLP)")
    for n in sorted(by_n):
        ts = by_n[n]
        print(f"{n:>4} {len(ts):>5} {1000 * statistics.mean(ts):>9.1f} {1000 * max(ts):>9.1f}")
    print(f"covered solver: mean {1000 * statistics.mean(covered_times):.2f} ms "
          f"over {len(covered_times)} nets")


if __name__ == "__main__":
    main()
