"""Command-line front end: ``leflab <command> ...``.

Exit codes: 0 success, 2 parse error, 3 precondition failure or
characteristic obstruction, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from sympy import factorint

from .algebra import MonomialAlgebra, generic_rank, lefschetz_forms, mult_matrix, parse_descriptor
from .binom_dets import BinomSpec, det_c_exact, prime_factorization_of_abs_det
from .errors import (CharacteristicObstruction, LeflabError, NonArtinian, NotSquare, ParseError,
                     PreconditionViolated)
from .exact_linalg import check_prime, det, det_mod_p
from .lefschetz import Method, ci_det_table, has_slp, has_wlp
from .recursion import RankQuery, decide_full_rank, det_formula
from .sweeps import SUITES, run_suite

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_MISMATCH = 0, 2, 3, 4
SEED_ENV = "LEFLAB_SEED"


@dataclass(frozen=True)
class RunConfig:
    char: int
    trials: int
    seed: int
    output: str
    jobs: int


def _config(args) -> RunConfig:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env is not None else 0
        except ValueError:
            raise ParseError(f"{SEED_ENV}={env!r} is not an integer") from None
    if not -(2**63) <= seed < 2**64:
        raise ParseError("seed must fit in 64 bits")
    if args.trials < 1:
        raise ParseError("--trials must be >= 1")
    if args.jobs < 1:
        raise ParseError("--jobs must be >= 1")
    if args.char:
        check_prime(args.char)
    return RunConfig(args.char, args.trials, seed, "json" if args.json else "tsv", args.jobs)


def _emit(cfg: RunConfig, payload: dict, lines: list[str]) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def _bool(x) -> str:
    return "null" if x is None else str(x).lower()


def _algebra(text: str) -> MonomialAlgebra:
    return parse_descriptor(text)


# -- commands -----------------------------------------------------------------

def cmd_hilbert(args, cfg):
    A = _algebra(args.algebra)
    dims = list(A.hilbert.dims)
    _emit(cfg, {"algebra": A.descriptor(), "hf": dims}, [" ".join(map(str, dims))])
    return EXIT_OK


def cmd_rank(args, cfg):
    A = _algebra(args.algebra)
    rep = generic_rank(A, args.t, args.i, cfg.char, cfg.trials, cfg.seed)
    payload = {"algebra": A.descriptor(), "char": cfg.char, "i": args.i, "t": args.t,
               **rep.to_dict()}
    _emit(cfg, payload, [f"rank {rep.rank} of {rep.rows}x{rep.cols} {rep.reason.value}",
                         f"certified {_bool(rep.certified)}"])
    return EXIT_OK


def cmd_det(args, cfg):
    A = _algebra(args.algebra)
    if args.d is not None and cfg.char:
        raise PreconditionViolated("the extension determinant formula is stated over Q")
    forms, certified = lefschetz_forms(A, cfg.trials, cfg.seed, cfg.char)
    if args.d is not None:
        value = det_formula(A, args.d, RankQuery(args.i, args.t))
        method = "formula"
    else:
        M = mult_matrix(A, forms[0], args.t, args.i)
        if not M.is_square:
            raise NotSquare(f"map is {M.rows}x{M.cols}")
        value = det_mod_p(M, cfg.char) if cfg.char else det(M)
        method = "elimination"
    payload = {"algebra": A.descriptor(), "char": cfg.char, "i": args.i, "t": args.t,
               "d": args.d, "det": value, "method": method, "certified": certified}
    _emit(cfg, payload, [str(value), f"certified {_bool(certified)}"])
    return EXIT_OK


def cmd_decide(args, cfg):
    B = _algebra(args.algebra)
    verdict, trace = decide_full_rank(B, args.d, RankQuery(args.i, args.t), cfg.char)
    certified = all(c.report.certified for c in trace.children)
    value = None
    if not cfg.char:
        try:
            value = det_formula(B, args.d, trace.query)
        except NotSquare:
            value = None
    payload = {"algebra": B.descriptor(), "char": cfg.char, "verdict": verdict,
               "trace": trace.to_dict(), "det": value, "certified": certified}
    lines = [f"verdict {_bool(verdict)}", f"mode {trace.mode.value}"]
    for c in trace.children:
        r = c.report
        lines.append(f"q={c.q}\tB_{c.src_deg} -> B_{c.src_deg + c.power}\tpower {c.power}\t"
                     f"rank {r.rank}/{r.rows}x{r.cols}\t{r.reason.value}")
    if value is not None:
        lines.append(f"det {value}")
    lines.append(f"certified {_bool(certified)}")
    _emit(cfg, payload, lines)
    return EXIT_OK


def _verdict_out(cfg, A, v):
    payload = v.to_dict(A.descriptor(), cfg.char, A.hilbert)
    lines = [f"wlp {_bool(v.wlp)}", f"slp {_bool(v.slp)}"]
    if v.failing_witness:
        lines.append(f"witness i={v.failing_witness[0]} t={v.failing_witness[1]}")
    lines += [f"method {v.method.value}", f"certified {_bool(v.certified)}"]
    _emit(cfg, payload, lines)
    return EXIT_OK


def cmd_wlp(args, cfg):
    A = _algebra(args.algebra)
    return _verdict_out(cfg, A, has_wlp(A, cfg.char, cfg.trials, cfg.seed))


def cmd_slp(args, cfg):
    A = _algebra(args.algebra)
    return _verdict_out(cfg, A, has_slp(A, cfg.char, cfg.trials, cfg.seed, args.method))


def cmd_cdet(args, cfg):
    spec = BinomSpec(args.t, args.p, args.d)
    value = det_c_exact(spec)
    if spec.p <= min(spec.t, spec.d):
        factors = prime_factorization_of_abs_det(spec)
    else:
        factors = {int(k): int(v) for k, v in factorint(abs(value)).items()} if value else None
    text = "0" if factors is None else ",".join(f"{q}:{e}" for q, e in factors.items()) or "1"
    payload = {"t": spec.t, "p": spec.p, "d": spec.d, "det": value,
               "factorization": None if factors is None else {str(q): e for q, e in factors.items()}}
    _emit(cfg, payload, ["t\tp\td\tdet\tfactorization",
                         f"{spec.t}\t{spec.p}\t{spec.d}\t{value}\t{text}"])
    return EXIT_OK


def cmd_atable(args, cfg):
    A = _algebra(args.algebra)
    if not A.is_ci:
        raise PreconditionViolated("atable needs a complete intersection (ci:...)")
    table = ci_det_table(A.caps)
    rows = list(table.rows())
    payload = {"caps": list(table.caps), "e": table.e,
               "rows": [{"i": i, "a": a} for _, i, a in rows]}
    _emit(cfg, payload, ["caps\ti\ta"] + [f"{c}\t{i}\t{a}" for c, i, a in rows])
    return EXIT_OK


def cmd_verify(args, cfg):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    options = {k: v for k, v in (("n_max", args.n_max), ("d_max", args.d_max),
                                 ("caps_max", args.caps_max), ("vars_max", args.vars_max),
                                 ("t_max", args.t_max)) if v is not None}
    options["seed"] = cfg.seed
    results = [run_suite(name, cfg.jobs, **options) for name in names]
    ok = all(r.ok for r in results)
    payload = {"seed": cfg.seed, "ok": ok, "suites": [r.to_dict() for r in results]}
    lines = ["suite\tcases\tmismatches\tstatus"]
    for r in results:
        lines.append(f"{r.suite}\t{r.cases}\t{len(r.mismatches)}\t{'pass' if r.ok else 'FAIL'}")
        lines += [f"  {m}" for m in r.mismatches[:10]]
    lines.append(f"overall\t{'pass' if ok else 'FAIL'}")
    _emit(cfg, payload, lines)
    return EXIT_OK if ok else EXIT_MISMATCH


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--char", type=int, default=0, help="0 or a prime (default 0)")
    common.add_argument("--trials", type=int, default=3,
                        help="random linear forms tried on non-complete-intersections")
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default ${SEED_ENV} or 0)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    parser = argparse.ArgumentParser(prog="leflab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    def with_it(p, need_d=False):
        p.add_argument("algebra", help="ci:<d1>,<d2>,... or mono:<n>:<gen>,<gen>,...")
        p.add_argument("--i", type=int, required=True, help="source degree")
        p.add_argument("--t", type=int, required=True, help="power of the linear form")
        if need_d:
            p.add_argument("--d", type=int, required=True, help="cap of the new variable")
        return p

    add("hilbert", cmd_hilbert, "print the Hilbert function").add_argument("algebra")
    with_it(add("rank", cmd_rank, "rank of a power of a general linear form"))
    p = with_it(add("det", cmd_det, "determinant of a square multiplication map"))
    p.add_argument("--d", type=int, default=None,
                   help="treat the algebra as a base and use the extension determinant formula")
    with_it(add("decide", cmd_decide, "full rank on an extension via the recursion"), need_d=True)
    add("wlp", cmd_wlp, "weak Lefschetz property").add_argument("algebra")
    p = add("slp", cmd_slp, "strong Lefschetz property")
    p.add_argument("algebra")
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.BRUTE_FORCE.value)
    p = add("cdet", cmd_cdet, "determinant of the binomial matrix C_{t,p,d}")
    for flag in ("--t", "--p", "--d"):
        p.add_argument(flag, type=int, required=True)
    add("atable", cmd_atable, "TSV table of complementary-map determinants").add_argument("algebra")
    p = add("verify", cmd_verify, "run oracle-equivalence sweeps")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    for flag in ("--n-max", "--d-max", "--caps-max", "--vars-max", "--t-max"):
        p.add_argument(flag, type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (ParseError, NonArtinian) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CharacteristicObstruction as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except LeflabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
