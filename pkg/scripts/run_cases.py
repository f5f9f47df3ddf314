"""Build the quotient and generators for a list of algebras and tabulate them.

    python3 scripts/run_cases.py --out results/
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from quatgen.base_algebra import FqConfig, parse_poly_list
from quatgen.generators import generating_set, generators_json, theorem_bound_check
from quatgen.quaternion import build_algebra, formula_vertex_count
from quatgen.quotient import build_quotient

DEFAULT_CASES = [(3, "T,T+1"), (3, "T,T^2+1"), (3, "T,T^3+2*T+1"), (5, "T,T+1"), (5, "T,T^2+2")]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=None, help="directory for JSON/DOT files")
    ap.add_argument("--case", action="append", default=None,
                    help='extra case as "q:R", e.g. "3:T,T^2+1" (repeatable)')
    args = ap.parse_args()
    cases = DEFAULT_CASES if not args.case else [
        (int(c.split(":")[0]), c.split(":", 1)[1]) for c in args.case]
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)

    header = f"{'q':>2} {'R':<16} {'a':<16} {'odd':>3} {'V':>4} {'Vf':>4} {'E':>4} " \
             f"{'D':>2} {'Dmax':>4} {'gens':>4} {'|g|max':>6} {'bound':>5} {'sec':>6}"
    print(header)
    for q, R in cases:
        t0 = time.perf_counter()
        alg = build_algebra(FqConfig(q), parse_poly_list(R, q))
        qg = build_quotient(alg)
        gs = generating_set(qg)
        rep = theorem_bound_check(gs, alg)
        dt = time.perf_counter() - t0
        print(f"{q:>2} {R:<16} {str(alg.a_param):<16} {alg.odd:>3} {qg.V:>4} "
              f"{int(formula_vertex_count(alg)):>4} {qg.E:>4} {qg.diameter:>2} "
              f"{alg.diameter_bound():>4} {len(gs):>4} {rep.max_norm:>6} {rep.bound:>5} {dt:>6.1f}")
        if args.out:
            stem = f"q{q}_" + R.replace(",", "_").replace("^", "").replace("*", "").replace("+", "p")
            (args.out / f"{stem}.quotient.json").write_text(qg.to_json())
            (args.out / f"{stem}.quotient.dot").write_text(qg.to_dot())
            (args.out / f"{stem}.generators.json").write_text(generators_json(gs))
            (args.out / f"{stem}.stats.json").write_text(
                json.dumps(dict(qg.stats(), max_norm=rep.max_norm), indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
