"""Command-line front end.

Every subcommand prints one JSON document on stdout. Exit codes: 0 success,
1 mathematical negative, 2 input error, 3 budget or size cap exceeded,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import convergence, domestic, explorer, factorization, majorization
from .errors import DStochError, InputError, NonConvergent
from .exact import fmt, to_rational
from .jsonio import load_json, parse_generators, parse_matrix, parse_vector


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _rational(text: str) -> Fraction:
    try:
        return to_rational(text)
    except DStochError as exc:
        raise argparse.ArgumentTypeError(exc.detail) from None


def _word(text: str) -> tuple:
    letters = tuple(w.strip() for w in text.split(",") if w.strip())
    if not letters:
        raise argparse.ArgumentTypeError("empty word")
    return letters


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dstoch",
        description="Exact analysis of semigroups of doubly stochastic matrices.",
    )
    parser.add_argument("--threads", type=_positive_int, default=1, help="worker processes (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-domestic", help="domesticity margin and eps test")
    p.add_argument("matrix")
    p.add_argument("--eps", type=_rational)

    p = sub.add_parser("factor", help="split M = P M' with M' domestic")
    p.add_argument("matrix")
    p.add_argument("--no-eps", action="store_true", help="skip the margin computation for eps")

    p = sub.add_parser("birkhoff", help="convex combination of permutation matrices")
    p.add_argument("matrix")

    p = sub.add_parser("majorize", help="test p > q")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--witness", action="store_true", help="also emit M with M p = q")

    p = sub.add_parser("core", help="averaging core and its numeric verification")
    p.add_argument("generators")
    p.add_argument("--tol", type=_positive_float, default=convergence.DEFAULT_TOL)
    p.add_argument("--match-tol", type=_positive_float, default=1e-8)
    p.add_argument("--max-iter", type=_positive_int, default=convergence.DEFAULT_MAX_ITER)

    p = sub.add_parser("limit", help="iterate an infinite product numerically")
    p.add_argument("generators")
    p.add_argument("--schedule", choices=["round-robin", "word", "random"], default="round-robin")
    p.add_argument("--word", type=_word, help="comma-separated generator names for --schedule word")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive_float, default=convergence.DEFAULT_TOL)
    p.add_argument("--max-iter", type=_positive_int, default=convergence.DEFAULT_MAX_ITER)

    p = sub.add_parser("explore", help="enumerate products and report entry gaps")
    p.add_argument("generators")
    p.add_argument("--depth", type=_positive_int, default=4)
    p.add_argument("--min-gap", type=_rational, default=Fraction(0))
    p.add_argument("--budget", type=_positive_int)
    p.add_argument("--no-matrices", action="store_true")

    p = sub.add_parser("gap-law", help="entries are 1 or at most the largest generator entry below 1")
    p.add_argument("generators")
    p.add_argument("--depth", type=_positive_int, default=4)
    p.add_argument("--budget", type=_positive_int)

    p = sub.add_parser("reduce", help="bilinear reduction and entry embedding")
    p.add_argument("generators")
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--embed", type=_rational, metavar="A", help="also emit the embedding matrix of entry A")

    p = sub.add_parser("contain", help="distance of product powers to the core-augmented semigroup")
    p.add_argument("generators")
    p.add_argument("--word", type=_word, action="append", required=True)
    p.add_argument("--power", type=_positive_int, action="append", required=True)
    p.add_argument("--depth", type=_positive_int, default=3)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    p.add_argument("--budget", type=_positive_int)
    return parser


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    return explorer.budget_from_env()


def _check_domestic(args) -> tuple:
    m = parse_matrix(load_json(args.matrix))
    rep = domestic.domesticity_margin(m, workers=args.threads)
    out = rep.to_json(m.n)
    if args.eps is not None:
        ok, _ = domestic.is_domestic(m, args.eps)
        out["eps"] = fmt(args.eps)
    else:
        ok = rep.margin < 1
    out["domestic"] = ok
    return out, 0 if ok else 1


def _factor(args) -> tuple:
    m = parse_matrix(load_json(args.matrix))
    return factorization.factor_permutation(m, compute_eps=not args.no_eps).to_json(), 0


def _birkhoff(args) -> tuple:
    m = parse_matrix(load_json(args.matrix))
    return factorization.birkhoff_decompose(m).to_json(), 0


def _majorize(args) -> tuple:
    p = parse_vector(load_json(args.p))
    q = parse_vector(load_json(args.q))
    ok = majorization.majorizes(p, q)
    out = {"majorizes": ok}
    if args.witness and ok:
        w = majorization.majorization_witness(p, q)
        out["witness"] = w.M.to_json()
        out["t_transforms"] = w.steps
    return out, 0 if ok else 1


def _core(args) -> tuple:
    gens = parse_generators(load_json(args.generators))
    core = convergence.averaging_core(gens)
    rep = convergence.verify_convergence_core(
        gens, args.tol, args.match_tol, args.max_iter, workers=args.threads
    )
    out = {
        "core": [convergence.support_partition(a).to_one_based() for a in core],
        "verification": rep.to_json(),
    }
    return out, 0 if rep.ok else 1


def _limit(args) -> tuple:
    gens = parse_generators(load_json(args.generators))
    if args.schedule == "word" and not args.word:
        raise InputError("--schedule word needs --word")
    sched = convergence.ProductSchedule(gens, args.schedule, args.word or (), args.seed)
    try:
        rep = convergence.iterate_product(sched, args.tol, args.max_iter)
    except NonConvergent as exc:
        out = exc.report.to_json()
        out.update(exc.to_json())
        return out, exc.exit_code
    return rep.to_json(), 0


def _explore(args) -> tuple:
    gens = parse_generators(load_json(args.generators))
    snap = explorer.generate(gens, args.depth, _budget(args))
    entries = explorer.entry_set(snap)
    gaps = explorer.gap_report(entries, args.min_gap, snap.truncated)
    out = {"snapshot": snap.to_json(matrices=not args.no_matrices), "gaps": gaps.to_json()}
    return out, 3 if snap.truncated else 0


def _gap_law(args) -> tuple:
    gens = parse_generators(load_json(args.generators))
    rep = explorer.entry_gap_law_check(gens, args.depth, _budget(args))
    code = 0 if rep.holds else 1
    if rep.truncated and rep.holds:
        code = 3
    return rep.to_json(), code


def _reduce(args) -> tuple:
    gens = parse_generators(load_json(args.generators))
    p = parse_vector(load_json(args.p))
    q = parse_vector(load_json(args.q))
    augmented, a_name, bt_name = explorer.bilinear_reduction(gens, p, q)
    out = augmented.to_json()
    out["A_name"] = a_name
    out["B_T_name"] = bt_name
    if args.embed is not None:
        out["embedding"] = explorer.entry_embed(args.embed, gens.n).to_json()
    return out, 0


def _contain(args) -> tuple:
    gens = parse_generators(load_json(args.generators))
    powers = sorted(set(args.power))
    rep = explorer.closure_containment_check(gens, args.word, powers, args.depth, args.tol, _budget(args))
    out = rep.to_json()
    shrinking = {}
    for w in args.word:
        dists = [p.distance for p in rep.probes if p.word == w]
        shrinking[",".join(w)] = all(b <= a for a, b in zip(dists, dists[1:]))
    out["non_increasing"] = shrinking
    return out, 0


COMMANDS = {
    "check-domestic": _check_domestic,
    "factor": _factor,
    "birkhoff": _birkhoff,
    "majorize": _majorize,
    "core": _core,
    "limit": _limit,
    "explore": _explore,
    "gap-law": _gap_law,
    "reduce": _reduce,
    "contain": _contain,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, code = COMMANDS[args.command](args)
    except DStochError as exc:
        report, code = exc.to_json(), exc.exit_code
    json.dump(report, stdout, indent=2)
    stdout.write("\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
