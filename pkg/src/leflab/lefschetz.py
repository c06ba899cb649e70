"""Weak and strong Lefschetz deciders and the classifiers built on them."""

from __future__ import annotations

import enum
import functools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import HilbertFunction, MonomialAlgebra, binom, hilbert_function, parse_descriptor
from .binom_dets import BinomSpec, det_c_exact
from .errors import IndexOutOfRange, ParityViolation, PreconditionViolated
from .exact_linalg import check_prime
from .recursion import BruteForceOracle, ExtensionOracle, RankOracle, nested_oracle

__all__ = [
    "Method",
    "LefschetzVerdict",
    "wlp_of_oracle",
    "slp_of_oracle",
    "has_wlp",
    "has_slp",
    "CiDetTable",
    "ci_det_recursion",
    "ci_det_table",
    "quadratic_a_recursion",
    "wlp_via_extension",
    "almost_centered",
    "midheavy_criteria",
    "AuditReport",
    "equivalence_audit",
    "audit_corpus",
    "li_zanello_wlp_n3",
    "brenner_kaid_wlp",
]


class Method(str, enum.Enum):
    BRUTE_FORCE = "BruteForce"
    RECURSION = "Recursion"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class LefschetzVerdict:
    """``slp`` is None when only the WLP was examined and it held."""

    wlp: bool
    slp: bool | None
    failing_witness: tuple[int, int] | None
    method: Method
    certified: bool = True

    def __post_init__(self):
        if self.slp and not self.wlp:
            raise AssertionError("SLP without WLP")

    def to_dict(self, algebra: str, char: int, hf: HilbertFunction) -> dict:
        return {"algebra": algebra, "char": char, "wlp": self.wlp, "slp": self.slp,
                "witness": list(self.failing_witness) if self.failing_witness else None,
                "method": self.method.value, "hf": list(hf.dims),
                "certified": self.certified}


# ---------------------------------------------------------------------------
# Deciders over an arbitrary rank oracle


def wlp_of_oracle(oracle: RankOracle) -> tuple[bool, int | None, bool]:
    """(wlp, smallest failing degree, certified)."""
    certified = True
    for i in range(oracle.hilbert.socle_degree):
        rep = oracle.rank(i, 1)
        certified &= rep.certified
        if not rep.full_rank:
            return False, i, certified
    return True, None, certified


def _slp_pairs(h: HilbertFunction):
    D = h.socle_degree
    if h.is_symmetric():
        # bijectivity between complementary degrees forces every other power
        return [(i, D - 2 * i) for i in range(D // 2 + 1) if D - 2 * i >= 1]
    return [(i, t) for i in range(D) for t in range(1, D - i + 1)]


def slp_of_oracle(oracle: RankOracle) -> tuple[bool, tuple[int, int] | None, bool]:
    """(slp, first failing (i, t), certified)."""
    certified = True
    for i, t in _slp_pairs(oracle.hilbert):
        rep = oracle.rank(i, t)
        certified &= rep.certified
        if not rep.full_rank:
            return False, (i, t), certified
    return True, None, certified


def has_wlp(A: MonomialAlgebra, char: int = 0, trials: int = 3, seed: int = 0) -> LefschetzVerdict:
    oracle = BruteForceOracle(A, char, trials, seed)
    ok, i, cert = wlp_of_oracle(oracle)
    return LefschetzVerdict(ok, None if ok else False, None if ok else (i, 1),
                            Method.BRUTE_FORCE, cert)


def has_slp(A: MonomialAlgebra, char: int = 0, trials: int = 3, seed: int = 0,
            method: Method | str = Method.BRUTE_FORCE) -> LefschetzVerdict:
    """Decide the SLP (and the WLP) of ``A``.

    ``Recursion`` answers a complete intersection through nested
    extensions and ``ClosedForm`` through the nonvanishing of every
    ``a_{n,i}``; both need characteristic zero and a complete intersection.
    """
    method = Method(method)
    if method is not Method.BRUTE_FORCE and (char or not A.is_ci):
        raise PreconditionViolated(f"{method.value} needs a complete intersection over Q")
    if method is Method.CLOSED_FORM:
        for i in range(A.socle_degree // 2 + 1):
            if ci_det_recursion(A.caps, i) == 0:
                raise AssertionError(f"a vanished at i={i} for {A.caps}")
        return LefschetzVerdict(True, True, None, method)
    oracle = nested_oracle(A.caps) if method is Method.RECURSION else \
        BruteForceOracle(A, char, trials, seed)
    slp, witness, cert = slp_of_oracle(oracle)
    if slp:
        return LefschetzVerdict(True, True, None, method, cert)
    wlp, _, cert2 = wlp_of_oracle(oracle)
    return LefschetzVerdict(wlp, False, witness, method, cert and cert2)


# ---------------------------------------------------------------------------
# Determinants of complementary maps on complete intersections


@dataclass(frozen=True)
class CiDetTable:
    caps: tuple[int, ...]
    e: int
    entries: dict[int, int] = field(hash=False)

    def rows(self):
        caps = ",".join(map(str, self.caps))
        for i in sorted(self.entries):
            yield caps, i, self.entries[i]


@functools.lru_cache(maxsize=None)
def _ci_det(caps: tuple[int, ...], i: int, canonical: bool) -> int:
    if len(caps) == 1:
        return 1
    d = caps[-1]
    rest = caps[:-1]
    if canonical:
        rest = tuple(sorted(rest))
    e = sum(c - 1 for c in caps)
    t = e - 2 * i
    h = hilbert_function(MonomialAlgebra.complete_intersection(rest))
    out = 1
    for j in range(max(0, d - t), min(i, d - 1) + 1):
        out *= _ci_det(rest, i - j, canonical)
    for s in range(max(1, d - i - 1), min(t - 1, d - 1) + 1):
        out *= abs(det_c_exact(BinomSpec(t, s, d))) ** (h[i + s - (d - 1)] - h[i + s - d])
    return out


def ci_det_recursion(caps: Sequence[int], i: int, canonical: bool = True) -> int:
    """|det| of ``ell^(e-2i) : A_i -> A_{e-i}`` on the complete intersection with these caps.

    Peels off the last cap at each level.  With ``canonical`` the caps are
    sorted first, which changes nothing but the memo hit rate; pass
    ``canonical=False`` to recurse in the given order.
    """
    caps = tuple(caps)
    if not caps or any(c < 1 for c in caps):
        raise PreconditionViolated("caps must be a nonempty sequence of integers >= 1")
    e = sum(c - 1 for c in caps)
    if not 0 <= 2 * i <= e:
        raise IndexOutOfRange(f"need 0 <= i <= e/2 = {e / 2}, got {i}")
    if canonical:
        caps = tuple(sorted(caps))
    return _ci_det(caps, i, canonical)


def ci_det_table(caps: Sequence[int]) -> CiDetTable:
    caps = tuple(caps)
    e = sum(c - 1 for c in caps)
    return CiDetTable(caps, e, {i: ci_det_recursion(caps, i) for i in range(e // 2 + 1)})


@functools.lru_cache(maxsize=None)
def quadratic_a_recursion(n: int, i: int) -> int:
    """Signed det of ``ell^(n-2i) : A_i -> A_{n-i}`` on n square-zero variables.

    Signs refer to the canonical basis order of :mod:`leflab.algebra`.
    """
    if n < 1 or i < 0 or 2 * i > n:
        raise IndexOutOfRange(f"need n >= 1 and 0 <= i <= n/2, got n={n}, i={i}")
    if 2 * i == n or n == 1:
        return 1
    c_hi, c_lo = binom(n - 1, i), binom(n - 1, i - 1)
    sign = -1 if (c_lo * (c_hi + 1)) % 2 else 1
    below = quadratic_a_recursion(n - 1, i - 1) if i >= 1 else 1
    return sign * quadratic_a_recursion(n - 1, i) * below * (n - 2 * i) ** (c_hi - c_lo)


# ---------------------------------------------------------------------------
# Extensions


def wlp_via_extension(B: MonomialAlgebra | RankOracle, d: int, trials: int = 3,
                      seed: int = 0) -> bool:
    """WLP of ``B (x) k[x]/(x^d)`` over Q, read off from ``ellbar^d`` on B."""
    if d < 1:
        raise PreconditionViolated("need d >= 1")
    oracle = B if not isinstance(B, MonomialAlgebra) else BruteForceOracle(B, 0, trials, seed)
    return all(oracle.rank(i, d).full_rank for i in range(oracle.hilbert.socle_degree + 1))


def almost_centered(h: HilbertFunction | Sequence[int]) -> bool:
    if not isinstance(h, HilbertFunction):
        h = HilbertFunction(tuple(h))
    n = len(h)
    for i in range(n):
        for j in range(i + 1, n):
            if h[i] == h[j]:
                continue
            grow = h[i] < h[j]
            for s in range(1, n):
                lo, hi = h[i - s], h[j + s]
                if (grow and lo > hi) or (not grow and lo < hi):
                    return False
    return True


def midheavy_criteria(h: HilbertFunction | Sequence[int]) -> bool:
    if not isinstance(h, HilbertFunction):
        h = HilbertFunction(tuple(h))
    D = h.socle_degree
    half = range(D // 2 + 1)
    first = all(h[i - 1] <= h[D - i] <= h[i] for i in half)
    second = all(h[D - i + 1] <= h[i] <= h[D - i] for i in half)
    return first or second


# ---------------------------------------------------------------------------
# The five-way characterization, sampled


_CONDITIONS = ("ac_and_slp", "midheavy_and_slp", "all_single_extensions_slp",
               "all_ci_extensions_slp", "all_square_extensions_wlp")


@dataclass
class AuditReport:
    algebra: str
    conditions: dict[str, bool]
    agree: bool
    counterexamples: list[dict]
    certified: bool

    def to_dict(self) -> dict:
        return {"algebra": self.algebra, "conditions": self.conditions, "agree": self.agree,
                "counterexamples": self.counterexamples, "certified": self.certified}


def _extended(base: RankOracle, caps: Sequence[int]) -> RankOracle:
    for d in caps:
        base = ExtensionOracle(base, d)
    return base


def equivalence_audit(B: MonomialAlgebra, d_max: int | None = None, n_max: int = 4,
                      random_pairs: int = 6, trials: int = 3, seed: int = 0) -> AuditReport:
    """Evaluate the five equivalent conditions on ``B`` at bounded scale.

    Universally quantified conditions are sampled: single extensions for
    d <= d_max (default socle + 2), extensions by every single cap up to
    d_max plus ``random_pairs`` seeded cap pairs, and square extensions for
    n <= n_max.  Agreement is evidence, disagreement is a counterexample.
    Extensions are evaluated through the rank recursion over a brute-force
    oracle on B.
    """
    base = BruteForceOracle(B, 0, trials, seed)
    h = B.hilbert
    if d_max is None:
        d_max = h.socle_degree + 2
    slp, slp_witness, certified = slp_of_oracle(base)
    ac = almost_centered(h)
    mh = midheavy_criteria(h)
    examples: list[dict] = []
    cond: dict[str, bool] = {"ac_and_slp": ac and slp, "midheavy_and_slp": mh and slp}

    def first_failure(name, cap_lists, check):
        nonlocal certified
        for caps in cap_lists:
            ok, witness, cert = check(_extended(base, caps))
            certified &= cert
            if not ok:
                examples.append({"condition": name, "caps": list(caps),
                                 "witness": list(witness) if isinstance(witness, tuple)
                                 else witness})
                return False
        return True

    singles = [(d,) for d in range(1, d_max + 1)]
    cond["all_single_extensions_slp"] = first_failure(
        "all_single_extensions_slp", singles, slp_of_oracle)
    rng = random.Random(f"{seed}:{B.descriptor()}:audit")
    pairs = [(rng.randint(1, d_max), rng.randint(1, d_max)) for _ in range(random_pairs)]
    cond["all_ci_extensions_slp"] = first_failure(
        "all_ci_extensions_slp", singles + pairs, slp_of_oracle)
    squares = [(2,) * n for n in range(n_max + 1)]
    cond["all_square_extensions_wlp"] = first_failure(
        "all_square_extensions_wlp", squares, wlp_of_oracle)

    agree = len(set(cond.values())) == 1
    if not agree:
        examples.append({"condition": "disagreement", "slp_witness":
                         list(slp_witness) if slp_witness else None})
    return AuditReport(B.descriptor(), {k: cond[k] for k in _CONDITIONS}, agree, examples,
                       certified)


_CORPUS = (
    # complete intersections
    "ci:2", "ci:3", "ci:5", "ci:1,3", "ci:2,2", "ci:2,3", "ci:3,3", "ci:2,5", "ci:3,4",
    "ci:2,2,2", "ci:2,2,3", "ci:2,3,4",
    # powers of the maximal ideal
    "mono:2:x0^2,x0*x1,x1^2", "mono:2:x0^3,x0^2*x1,x0*x1^2,x1^3",
    "mono:2:x0^4,x0^3*x1,x0^2*x1^2,x0*x1^3,x1^4",
    "mono:3:x0^2,x1^2,x2^2,x0*x1,x0*x2,x1*x2",
    "mono:3:x0^3,x1^3,x2^3,x0^2*x1,x0^2*x2,x1^2*x0,x1^2*x2,x2^2*x0,x2^2*x1,x0*x1*x2",
    # other monomial algebras, several not almost centered
    "mono:3:x0^3,x1^3,x2^3,x0*x1*x2",
    "mono:2:x0^2,x0*x1,x1^4",
    "mono:2:x0^3,x0*x1,x1^3",
    "mono:2:x0^2,x1^3,x0*x1^2",
    "mono:2:x0^3,x0^2*x1,x1^2",
    "mono:3:x0^2,x1^2,x2^2,x0*x1",
    "mono:3:x0^2,x1^2,x2^3,x0*x1*x2",
    "mono:3:x0^2,x1^2,x2^2,x0*x1,x0*x2",
    "mono:2:x0^4,x1^4,x0^2*x1^2",
    "mono:2:x0^5,x0*x1,x1^2",
    "mono:3:x0^3,x1^2,x2^2,x0*x1,x0*x2,x1*x2",
    "mono:2:x0^2,x1^5,x0*x1^3",
    "mono:3:x0^2,x1^2,x2^2,x1*x2,x0*x1*x2",
)


def audit_corpus() -> list[MonomialAlgebra]:
    """Thirty small algebras mixing complete intersections, powers of the
    maximal ideal and algebras that are not almost centered."""
    return [parse_descriptor(s) for s in _CORPUS]


# ---------------------------------------------------------------------------
# Published criteria in positive characteristic


def li_zanello_wlp_n3(d1: int, d2: int, d3: int, p: int) -> bool:
    """WLP of k[x,y,z]/(x^d1, y^d2, z^d3) in characteristic p, for an even cap total."""
    check_prime(p)
    if not 1 <= d1 <= d2 <= d3:
        raise PreconditionViolated(f"need 1 <= d1 <= d2 <= d3, got {(d1, d2, d3)}")
    if (d1 + d2 + d3) % 2:
        raise ParityViolation(f"cap total {d1 + d2 + d3} is odd")
    if d3 > d1 + d2 - 2:
        return True
    return det_c_exact(BinomSpec(d3, (d3 + d2 - d1) // 2, d2)) % p != 0


def brenner_kaid_wlp(m: int, p: int) -> bool:
    """WLP of k[x,y,z]/(x^2m, y^2m, z^2m) in characteristic p.

    Fails exactly when some p^s lies strictly between 6m/(6t+4) and
    6m/(6t+2) for integers s, t >= 0.
    """
    if m < 1:
        raise PreconditionViolated("need m >= 1")
    check_prime(p)
    q = 1
    while q <= 6 * m:
        # 6m/(6t+4) < q < 6m/(6t+2), i.e. q(6t+2) < 6m < q(6t+4)
        t = 0
        while q * (6 * t + 2) < 6 * m:
            if 6 * m < q * (6 * t + 4):
                return False
            t += 1
        q *= p
    return True
