"""Oracle-equivalence sweeps shared by ``leflab verify`` and the test suite.

Each suite is a list of picklable work units plus a top-level function
mapping a unit to ``(cases_checked, mismatch_descriptions)``.  Results are
reassembled in unit order, so output does not depend on worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .algebra import LinearForm, MonomialAlgebra, mult_matrix, parse_descriptor, tensor_extend
from .binom_dets import (BinomSpec, abs_det_c_krattenthaler, abs_det_c_macmahon,
                         abs_det_c_roberts, det_c_exact, plane_partitions, plane_partitions_brute)
from .errors import CharacteristicObstruction
from .exact_linalg import det, rank_mod_p, rank_rational
from .lefschetz import (audit_corpus, brenner_kaid_wlp, ci_det_recursion, equivalence_audit,
                        has_wlp, li_zanello_wlp_n3, quadratic_a_recursion)
from .recursion import build_lr, decide_full_rank, det_formula, diagonal_coefficient, \
    quadratic_ci_criterion

PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass
class SweepResult:
    suite: str
    cases: int
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self, limit: int = 10) -> dict:
        return {"suite": self.suite, "cases": self.cases,
                "mismatches": len(self.mismatches), "status": "pass" if self.ok else "fail",
                "examples": self.mismatches[:limit]}


def _ci_bases(max_vars: int, max_cap: int):
    for k in range(1, max_vars + 1):
        yield from itertools.product(range(1, max_cap + 1), repeat=k)


# -- units ------------------------------------------------------------------

def unit_binom(t: int, d_max: int = 12):
    n, bad = 0, []
    for d in range(1, d_max + 1):
        for p in range(min(t, d) + 1):
            s = BinomSpec(t, p, d)
            vals = {abs(det_c_exact(s)), abs_det_c_krattenthaler(s), abs_det_c_macmahon(s),
                    abs_det_c_roberts(s)}
            n += 1
            if len(vals) != 1:
                bad.append(f"C_{{{t},{p},{d}}}: {sorted(vals)}")
    return n, bad


def _square_extension_cases(caps, d):
    B = MonomialAlgebra.complete_intersection(caps)
    A = tensor_extend(B, d)
    form = LinearForm.ones(A.n)
    s = A.socle_degree
    for i in range(s + 1):
        for t in range(1, s - i + 1):
            yield B, A, form, i, t


def unit_oracle(caps: tuple[int, ...], d: int):
    n, bad = 0, []
    for B, A, form, i, t in _square_extension_cases(caps, d):
        verdict, _ = decide_full_rank(B, d, (i, t))
        truth = rank_rational(mult_matrix(A, form, t, i)).full_rank
        n += 1
        if verdict != truth:
            bad.append(f"ci:{','.join(map(str, caps))} d={d} i={i} t={t}: "
                       f"recursion {verdict}, brute force {truth}")
    return n, bad


def unit_det_formula(caps: tuple[int, ...], d: int):
    n, bad = 0, []
    for B, A, form, i, t in _square_extension_cases(caps, d):
        h = A.hilbert
        if h[i] != h[i + t]:
            continue
        got = det_formula(B, d, (i, t))
        want = abs(det(mult_matrix(A, form, t, i)))
        n += 1
        if got != want:
            bad.append(f"ci:{','.join(map(str, caps))} d={d} i={i} t={t}: F={got}, |det|={want}")
    return n, bad


def unit_oracle_char_p(caps: tuple[int, ...], d: int, p: int):
    """Recursion in characteristic p wherever the guard allows it."""
    n, bad = 0, []
    for B, A, form, i, t in _square_extension_cases(caps, d):
        try:
            verdict, _ = decide_full_rank(B, d, (i, t), char=p)
        except CharacteristicObstruction:
            continue
        truth = rank_mod_p(mult_matrix(A, form, t, i), p).full_rank
        n += 1
        if verdict != truth:
            bad.append(f"ci:{','.join(map(str, caps))} d={d} i={i} t={t} p={p}: "
                       f"recursion {verdict}, brute force {truth}")
    return n, bad


def unit_quadratic_char_p(n_vars: int, p: int):
    A = MonomialAlgebra.complete_intersection((2,) * n_vars)
    form = LinearForm.ones(n_vars)
    n, bad = 0, []
    for i in range(n_vars + 1):
        for t in range(1, n_vars + 2 - i):
            truth = rank_mod_p(mult_matrix(A, form, t, i), p).full_rank if i + t <= n_vars \
                else True
            got = quadratic_ci_criterion(n_vars, i, t, p)
            n += 1
            if got != truth:
                bad.append(f"n={n_vars} i={i} t={t} p={p}: criterion {got}, brute force {truth}")
    return n, bad


LR_BASES = ("ci:2", "ci:3", "ci:2,2", "ci:2,3", "mono:2:x0^2,x0*x1,x1^2")


def unit_lr(desc: str, d: int, t_max: int = 6):
    B = parse_descriptor(desc)
    n, bad = 0, []
    for t in range(1, t_max + 1):
        for i in range(B.socle_degree + d):
            lr = build_lr(B, d, i, t)
            probs = lr.problems()
            for p, scalar in lr.antidiagonal_scalars.items():
                if p < d and scalar != diagonal_coefficient(t, p, d):
                    probs.append(f"scalar at p={p} is {scalar}")
            n += 1
            if probs:
                bad.append(f"{desc} d={d} i={i} t={t}: {'; '.join(probs[:3])}")
    return n, bad


def unit_plane_partitions(a: int, b: int, c: int):
    got = plane_partitions(a, b, c)
    bad = []
    via_det = abs(det_c_exact(BinomSpec(b + c, c, a + c)))
    if got != via_det:
        bad.append(f"box {a}x{b}x{c}: product {got}, |det C| {via_det}")
    if max(a, b, c) <= 3 and got != plane_partitions_brute(a, b, c):
        bad.append(f"box {a}x{b}x{c}: product {got}, enumeration {plane_partitions_brute(a, b, c)}")
    return 1, bad


def unit_li_zanello(caps: tuple[int, int, int], p: int):
    truth = has_wlp(MonomialAlgebra.complete_intersection(caps), p).wlp
    got = li_zanello_wlp_n3(*caps, p)
    return 1, [] if got == truth else [f"caps={caps} p={p}: criterion {got}, brute force {truth}"]


def unit_brenner_kaid(m: int, p: int):
    truth = has_wlp(MonomialAlgebra.complete_intersection((2 * m,) * 3), p).wlp
    got = brenner_kaid_wlp(m, p)
    via_det = det_c_exact(BinomSpec(2 * m, m, 2 * m)) % p != 0
    bad = []
    if got != truth:
        bad.append(f"m={m} p={p}: criterion {got}, brute force {truth}")
    if via_det != truth:
        bad.append(f"m={m} p={p}: det C test {via_det}, brute force {truth}")
    return 1, bad


def unit_ci_det(caps: tuple[int, ...]):
    A = MonomialAlgebra.complete_intersection(caps)
    e = A.socle_degree
    form = LinearForm.ones(A.n)
    n, bad = 0, []
    for i in range(e // 2 + 1):
        want = abs(det(mult_matrix(A, form, e - 2 * i, i))) if e > 2 * i else 1
        for canonical in (True, False):
            got = ci_det_recursion(caps, i, canonical)
            n += 1
            if got != want or got == 0:
                bad.append(f"caps={caps} i={i} canonical={canonical}: a={got}, |det|={want}")
    return n, bad


def unit_quadratic_signed(n_vars: int):
    A = MonomialAlgebra.complete_intersection((2,) * n_vars)
    form = LinearForm.ones(n_vars)
    n, bad = 0, []
    for i in range(n_vars // 2 + 1):
        want = det(mult_matrix(A, form, n_vars - 2 * i, i)) if n_vars > 2 * i else 1
        got = quadratic_a_recursion(n_vars, i)
        n += 1
        if got != want:
            bad.append(f"n={n_vars} i={i}: recursion {got}, det {want}")
    return n, bad


def unit_audit(index: int, seed: int = 0):
    B = audit_corpus()[index]
    rep = equivalence_audit(B, seed=seed)
    return 1, [] if rep.agree else [f"{rep.algebra}: {rep.conditions}"]


# -- suites -----------------------------------------------------------------

@dataclass(frozen=True)
class Suite:
    name: str
    fn: Callable
    units: Callable  # (options) -> list of argument tuples


def _units_binom(o):
    return [(t, o.get("d_max", 12)) for t in range(o.get("t_max", 12) + 1)]


def _units_extension(o):
    return [(caps, d) for caps in _ci_bases(o.get("vars_max", 3), o.get("caps_max", 4))
            for d in range(1, o.get("d_max", 4) + 1)]


def _units_extension_char_p(o):
    return [(caps, d, p) for caps in _ci_bases(o.get("vars_max", 2), o.get("caps_max", 4))
            for d in range(1, o.get("d_max", 4) + 1) for p in (2, 3, 5)]


def _units_quadratic(o):
    return [(n, p) for n in range(1, o.get("n_max", 8) + 1) for p in PRIMES]


def _units_lr(o):
    return [(desc, d) for desc in LR_BASES for d in range(1, o.get("d_max", 4) + 1)]


def _units_pp(o):
    r = range(1, o.get("box_max", 4) + 1)
    return list(itertools.product(r, r, r))


def _units_lz(o):
    out = []
    for caps in itertools.combinations_with_replacement(range(1, o.get("caps_max", 6) + 1), 3):
        if sum(caps) % 2 == 0:
            out.extend((caps, p) for p in (2, 3, 5, 7))
    return out


def _units_bk(o):
    return [(m, p) for m in range(1, o.get("m_max", 3) + 1) for p in (2, 3, 5, 7)]


def _units_ci_det(o):
    return [(caps,) for caps in _ci_bases(o.get("vars_max", 3), o.get("caps_max", 4))]


def _units_quad_signed(o):
    return [(n,) for n in range(1, o.get("n_max", 5) + 1)]


def _units_audit(o):
    return [(k, o.get("seed", 0)) for k in range(len(audit_corpus()))]


SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("binom", unit_binom, _units_binom),
    Suite("oracle", unit_oracle, _units_extension),
    Suite("det-formula", unit_det_formula, _units_extension),
    Suite("oracle-char-p", unit_oracle_char_p, _units_extension_char_p),
    Suite("quadratic-char-p", unit_quadratic_char_p, _units_quadratic),
    Suite("lr", unit_lr, _units_lr),
    Suite("plane-partitions", unit_plane_partitions, _units_pp),
    Suite("li-zanello", unit_li_zanello, _units_lz),
    Suite("brenner-kaid", unit_brenner_kaid, _units_bk),
    Suite("ci-det", unit_ci_det, _units_ci_det),
    Suite("quadratic-signed", unit_quadratic_signed, _units_quad_signed),
    Suite("audit", unit_audit, _units_audit),
)}


def _call(job):
    fn, args = job
    return fn(*args)


def run_suite(name: str, jobs: int = 1, **options) -> SweepResult:
    suite = SUITES[name]
    work = [(suite.fn, args) for args in suite.units(options)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_call, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        parts = [_call(w) for w in work]
    res = SweepResult(name, 0)
    for n, bad in parts:
        res.cases += n
        res.mismatches.extend(bad)
    return res
