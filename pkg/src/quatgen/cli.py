"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 internal invariant failure,
4 a checked theorem-level invariant was falsified.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field

from .base_algebra import AlgebraError, FqConfig, format_poly, parse_poly_list
from .generators import (
    DisjointnessViolation,
    TheoremViolation,
    evaluate,
    generating_set,
    random_word,
    reduce_word,
    theorem_bound_check,
    verify_disjointness,
)
from .kfield import PrecisionPolicy
from .quaternion import (
    SCHEMA_VERSION,
    AlgebraData,
    QuatOrderElem,
    build_algebra,
    formula_free_rank,
    formula_gen_bound,
    formula_vertex_count,
    ramified_places,
)
from .quotient import (
    QuotientError,
    QuotientGraph,
    build_quotient,
    covering_diameter_check,
    ramanujan_diameter_check,
)
from .tree import act_elem, ball, ball_size, displacement, distance, geodesic_of, neighbors

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_FALSIFIED = 0, 2, 3, 4


class Falsified(Exception):
    def __init__(self, message: str, counterexample: dict | None = None) -> None:
        super().__init__(message)
        self.counterexample = counterexample or {}


@dataclass
class JobConfig:
    command: str
    q: int | None = None
    R: list[str] = field(default_factory=list)
    out: str | None = None
    fmt: str = "json"
    samples: int = 1000
    seed: int = 0
    ball_cap: int = 20_000
    precision: int | None = None
    from_file: str | None = None
    quadruple: str | None = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> JobConfig:
        R = [s.strip() for s in ns.R.split(",") if s.strip()] if ns.R else []
        return cls(ns.command, ns.q, R, ns.out, ns.format, ns.samples, ns.seed,
                   ns.ball_cap, ns.precision, ns.from_file, getattr(ns, "quadruple", None))

    def policy(self, alg: AlgebraData) -> PrecisionPolicy:
        base = PrecisionPolicy.for_degree(alg.a_param.degree + alg.b_param.degree)
        return PrecisionPolicy(self.precision) if self.precision else base


def _algebra(cfg: JobConfig) -> AlgebraData:
    if cfg.q is None or not cfg.R:
        raise AlgebraError("need -q and -R (or --from-file)")
    fq = FqConfig(cfg.q)
    return build_algebra(fq, parse_poly_list(",".join(cfg.R), cfg.q))


def _quotient(cfg: JobConfig) -> QuotientGraph:
    if cfg.from_file:
        with open(cfg.from_file, encoding="utf-8") as fh:
            data = json.load(fh)
        if "quotient" in data:
            data = data["quotient"]
        return QuotientGraph.from_dict(data)
    return build_quotient(_algebra(cfg))


def _emit(cfg: JobConfig, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _formula_checks(qg: QuotientGraph) -> dict:
    alg = qg.alg
    V_formula = int(formula_vertex_count(alg))
    checks = {
        "vertex_count": {"computed": qg.V, "formula": V_formula, "ok": qg.V == V_formula},
        "diameter_bound": {"computed": qg.diameter, "bound": alg.diameter_bound(),
                           "ok": qg.diameter <= alg.diameter_bound()},
    }
    if alg.odd:
        checks["generator_count"] = {"formula_bound": int(formula_gen_bound(alg))}
    else:
        rank = formula_free_rank(alg)
        regular = all(d == alg.q + 1 for d in qg.degree_sequence())
        checks["free_rank"] = {"computed": qg.rank, "formula": rank, "ok": qg.rank == rank}
        checks["regular"] = {"ok": regular and 2 * qg.E == (alg.q + 1) * qg.V}
        checks["ramanujan_diameter"] = {
            "ok": ramanujan_diameter_check(qg.V, alg.q + 1, qg.diameter)}
        checks["covering_diameter"] = {
            "ok": covering_diameter_check(qg.V, alg.q, qg.diameter)}
    return checks


# -- commands ------------------------------------------------------------


def cmd_construct(cfg: JobConfig) -> int:
    alg = _algebra(cfg)
    found = ramified_places(alg.a_param, alg.b_param)
    expected = set(alg.ram.places)
    payload = alg.to_dict()
    payload["ramified_places"] = sorted(format_poly(f) for f in found if not isinstance(f, str))
    payload["ramified_at_infinity"] = any(isinstance(f, str) for f in found)
    payload["ramification_ok"] = found == expected
    _emit(cfg, payload)
    if found != expected:
        raise QuotientError("presentation does not ramify exactly at R")
    return EXIT_OK


def cmd_quotient(cfg: JobConfig) -> int:
    qg = _quotient(cfg)
    qg.verify()
    checks = _formula_checks(qg)
    stats = dict(qg.stats(), checks=checks)
    if cfg.out:
        _emit(cfg, qg.to_dot() if cfg.fmt == "dot" else qg.to_json())
        sys.stdout.write(json.dumps(stats, indent=1, sort_keys=True) + "\n")
    elif cfg.fmt == "dot":
        _emit(cfg, qg.to_dot())
    else:
        payload = qg.to_dict()
        payload["checks"] = checks
        _emit(cfg, payload)
    if not checks["vertex_count"]["ok"]:
        raise QuotientError(f"V = {qg.V} contradicts the vertex-count formula")
    return EXIT_OK


def cmd_generators(cfg: JobConfig) -> int:
    qg = _quotient(cfg)
    gs = generating_set(qg)
    report = theorem_bound_check(gs, qg.alg)
    payload = gs.to_dict()
    payload.update(algebra=qg.alg.to_dict(), theorem_bound=report.bound,
                   max_norm=report.max_norm, edge_generators=len(gs.edge_index),
                   stabilizer_generators=len(gs.stab_index))
    _emit(cfg, payload)
    return EXIT_OK


def cmd_reduce(cfg: JobConfig) -> int:
    qg = _quotient(cfg)
    gs = generating_set(qg)
    gamma = QuatOrderElem.from_text(qg.alg, cfg.quadruple)
    word = reduce_word(gamma, gs, qg)
    _emit(cfg, {"schema_version": SCHEMA_VERSION, "input": gamma.to_list(),
                "word": word.to_signed(), "scalar": word.scalar, "text": word.to_text()})
    return EXIT_OK


def cmd_verify(cfg: JobConfig) -> int:
    qg = _quotient(cfg)
    alg = qg.alg
    rng = random.Random(cfg.seed)
    qg.verify()
    checks = _formula_checks(qg)
    failed = [k for k, c in checks.items() if c.get("ok") is False]
    gs = generating_set(qg)
    bound = theorem_bound_check(gs, alg)

    disjoint = {}
    for B in sorted({0, 1, 2, qg.diameter}):
        rep = verify_disjointness(alg, gs, cfg.samples, B, rng)
        disjoint[str(B)] = rep.to_dict()
        if not rep.ok:
            raise Falsified(f"disjointness fails for B={B}", rep.violations[0])

    round_trips = 0
    for _ in range(min(cfg.samples, 200)):
        x = evaluate(random_word(gs, rng), gs, alg)
        reduce_word(x, gs, qg)
        round_trips += 1

    radius = 0
    while radius < 4 and ball_size(radius + 1, alg.q) <= cfg.ball_cap:
        radius += 1
    verts = list(ball(radius, alg.q, cap=cfg.ball_cap))
    dist_ok = _distance_oracle(verts, alg.q)

    geo = []
    policy = cfg.policy(alg)
    for i in gs.edge_generators()[:5]:
        g = gs.gens[i]
        gd = geodesic_of(g, policy)
        v = gd.vertex(gd.closest_k)
        shift = distance(v, act_elem(g, v))
        geo.append({"generator": i, "translation": gd.amplitude, "shift": shift,
                    "ok": shift == gd.amplitude and displacement(g) == 2 * gd.dist_to_O + gd.amplitude})
    if not all(x["ok"] for x in geo):
        raise QuotientError("geodesic data inconsistent with the tree action")
    if not dist_ok:
        raise QuotientError("distance oracle disagrees with breadth-first search")

    payload = {
        "schema_version": SCHEMA_VERSION, "seed": cfg.seed, "samples": cfg.samples,
        "algebra": alg.to_dict(), "stats": qg.stats(), "checks": checks,
        "theorem_bound": bound.bound, "max_norm": bound.max_norm,
        "disjointness": disjoint, "round_trips": round_trips,
        "distance_oracle": {"radius": radius, "vertices": len(verts), "ok": dist_ok},
        "geodesics": geo,
    }
    _emit(cfg, payload)
    if failed:
        raise Falsified(f"formula checks failed: {', '.join(failed)}", {"checks": checks})
    return EXIT_OK


def _distance_oracle(verts, q: int) -> bool:
    """Compare distance() with breadth-first search inside a ball."""
    inside = set(verts)
    for v in verts:
        dist = {v: 0}
        frontier = [v]
        while frontier:
            nxt = []
            for x in frontier:
                for y in neighbors(x, q):
                    if y in inside and y not in dist:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        if any(distance(v, w) != d for w, d in dist.items()):
            return False
    return True


COMMANDS = {
    "construct": cmd_construct,
    "quotient": cmd_quotient,
    "generators": cmd_generators,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-q", type=int, help="odd prime field size")
    common.add_argument("-R", help='ramified places, e.g. "T,T^2+1"')
    common.add_argument("--out", help="write the main output to this file")
    common.add_argument("--format", choices=("dot", "json"), default="json")
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--ball-cap", type=int, default=20_000, dest="ball_cap")
    common.add_argument("--precision", type=int, default=None,
                        help="initial series precision for eigen-computations")
    common.add_argument("--from-file", dest="from_file",
                        help="load a quotient exported with `quotient --format json`")
    parser = argparse.ArgumentParser(prog="quatgen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("construct", parents=[common], help="build the algebra presentation")
    sub.add_parser("quotient", parents=[common], help="build the quotient graph")
    sub.add_parser("generators", parents=[common], help="extract a generating set")
    red = sub.add_parser("reduce", parents=[common], help="write a unit as a word")
    red.add_argument("quadruple", help='coordinates "a;b;c;d"')
    sub.add_parser("verify", parents=[common], help="run the verification suites")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = JobConfig.from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except (Falsified, TheoremViolation, DisjointnessViolation) as exc:
        dump = getattr(exc, "counterexample", {})
        sys.stderr.write(f"falsified: {exc}\n{json.dumps(dump, sort_keys=True)}\n")
        return EXIT_FALSIFIED
    except (AlgebraError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except AssertionError as exc:
        sys.stderr.write(f"internal invariant failure: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
