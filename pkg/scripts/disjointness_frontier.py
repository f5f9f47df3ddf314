"""Sample random units and record how far O moves against the norm.

For each radius B the table lists the largest norm among sampled units
that still move O by at most 2B, next to the thresholds B (elliptic) and
2B (hyperbolic) beyond which no overlap is allowed.

    python3 scripts/disjointness_frontier.py -q 3 -R "T,T+1" --samples 2000
"""

from __future__ import annotations

import argparse
import random

from quatgen.base_algebra import FqConfig, parse_poly_list
from quatgen.generators import generating_set, verify_disjointness
from quatgen.quaternion import build_algebra
from quatgen.quotient import build_quotient


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-q", type=int, default=3)
    ap.add_argument("-R", default="T,T+1")
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-len", type=int, default=12)
    args = ap.parse_args()

    alg = build_algebra(FqConfig(args.q), parse_poly_list(args.R, args.q))
    qg = build_quotient(alg)
    gs = generating_set(qg)
    rng = random.Random(args.seed)
    print(f"{'B':>2} {'tested':>6} {'ellip':>5} {'hyper':>5} {'viol':>4} "
          f"{'max |g| overlapping':>19} {'min |g| disjoint':>16}")
    for B in range(0, max(qg.diameter, 3) + 1):
        rep = verify_disjointness(alg, gs, args.samples, B, rng, max_len=args.max_len)
        print(f"{B:>2} {rep.tested:>6} {rep.elliptic_tested:>5} {rep.hyperbolic_tested:>5} "
              f"{len(rep.violations):>4} {rep.max_norm_overlapping:>19} "
              f"{str(rep.min_norm_disjoint):>16}")


if __name__ == "__main__":
    main()
