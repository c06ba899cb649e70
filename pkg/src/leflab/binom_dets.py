"""Binomial Hankel matrices C_{t,p,d} and their determinants.

``C_{t,p,d}`` is the (d-p) x (d-p) matrix whose (r, c) entry (1-based) is
``binom(t, d - r - c + 1)``.  Its absolute determinant has several closed
forms (a triple product, a hyperfactorial quotient, a quotient of binomial
products); all of them are implemented independently here so they can be
checked against elimination and against each other.
"""

from __future__ import annotations

import functools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from sympy import primerange

from .algebra import binom
from .errors import NonIntegralResult, PreconditionViolated
from .exact_linalg import ExactMatrix, det

__all__ = [
    "BinomSpec",
    "build_c",
    "det_c_exact",
    "abs_det_c_krattenthaler",
    "abs_det_c_macmahon",
    "abs_det_c_roberts",
    "hyperfactorial",
    "prime_cond_product",
    "recursion_guard_product",
    "plane_partitions",
    "plane_partitions_brute",
    "prime_factorization_of_abs_det",
]


@dataclass(frozen=True)
class BinomSpec:
    t: int
    p: int
    d: int

    def __post_init__(self):
        if self.t < 0 or self.p < 0 or self.d < 1 or self.p > self.d:
            raise PreconditionViolated(f"need t, p >= 0, d >= 1, p <= d; got {self}")

    @property
    def size(self) -> int:
        return self.d - self.p


def _spec(spec, p=None, d=None) -> BinomSpec:
    if isinstance(spec, BinomSpec):
        return spec
    if p is None:
        return BinomSpec(*spec)
    return BinomSpec(spec, p, d)


def build_c(spec: BinomSpec) -> ExactMatrix:
    spec = _spec(spec)
    t, d, n = spec.t, spec.d, spec.size
    return ExactMatrix.from_rows(
        [[binom(t, d - r - c + 1) for c in range(1, n + 1)] for r in range(1, n + 1)], n)


@functools.lru_cache(maxsize=None)
def _det_c(t: int, p: int, d: int) -> int:
    return det(build_c(BinomSpec(t, p, d)))


def det_c_exact(spec) -> int:
    """Signed determinant of C_{t,p,d} by fraction-free elimination."""
    spec = _spec(spec)
    return _det_c(spec.t, spec.p, spec.d)


def _closed_form_pre(spec: BinomSpec):
    if spec.p > min(spec.t, spec.d):
        raise PreconditionViolated(f"closed forms need p <= min(t, d); got {spec}")


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NonIntegralResult(f"{what} gave {x}")
    return x.numerator


def abs_det_c_krattenthaler(spec) -> int:
    spec = _spec(spec)
    _closed_form_pre(spec)
    t, p, d = spec.t, spec.p, spec.d
    acc = Fraction(1)
    for i in range(1, d - p + 1):
        for j in range(1, p + 1):
            for k in range(1, t - p + 1):
                acc *= Fraction(i + j + k - 1, i + j + k - 2)
    return _as_int(acc, f"triple product for {spec}")


@functools.lru_cache(maxsize=None)
def hyperfactorial(n: int) -> int:
    """H(n) = 0! 1! ... (n-1)!."""
    if n <= 1:
        return 1
    out = 1
    f = 1
    for i in range(1, n):
        f *= i
        out *= f
    return out


def abs_det_c_macmahon(spec) -> int:
    spec = _spec(spec)
    _closed_form_pre(spec)
    t, p, d = spec.t, spec.p, spec.d
    H = hyperfactorial
    num = H(t - p) * H(p) * H(d - p) * H(t + d - p)
    den = H(t) * H(d) * H(t + d - 2 * p)
    return _as_int(Fraction(num, den), f"hyperfactorial quotient for {spec}")


def abs_det_c_roberts(spec) -> int:
    spec = _spec(spec)
    _closed_form_pre(spec)
    t, p, d = spec.t, spec.p, spec.d
    num = den = 1
    for j in range(d - p):
        num *= binom(t + j, p)
        den *= binom(p + j, p)
    return _as_int(Fraction(num, den), f"binomial quotient for {spec}")


def prime_cond_product(i: int, t: int, d: int, s: int) -> int:
    """Product of det C_{t,p,d} for p from max(1, d-i, i+t-s+1) to min(d-1, t-1)."""
    out = 1
    for p in range(max(1, d - i, i + t - s + 1), min(d - 1, t - 1) + 1):
        out *= det_c_exact(BinomSpec(t, p, d))
    return out


def recursion_guard_product(i: int, t: int, d: int, s: int) -> int:
    """Product of det C_{t,p,d} for p from max(1, d-i-1, i+t-s) to min(d-1, t-1).

    This is :func:`prime_cond_product` with the lower end moved down by one;
    it is exactly the range of binomial determinants that enter the
    determinant formula, so a prime avoiding it keeps every anti-diagonal
    scalar a unit.  The narrower range is not enough: for B = k[y]/(y^2),
    d = t = 2, i = 0 in characteristic 2 it is empty, yet (y + x)^2 = 0.
    """
    out = 1
    for p in range(max(1, d - i - 1, i + t - s), min(d - 1, t - 1) + 1):
        out *= det_c_exact(BinomSpec(t, p, d))
    return out


def plane_partitions(a: int, b: int, c: int) -> int:
    """MacMahon's box formula for plane partitions inside an a x b x c box."""
    if min(a, b, c) < 0:
        raise PreconditionViolated("box sides must be >= 0")
    acc = Fraction(1)
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            for k in range(1, c + 1):
                acc *= Fraction(i + j + k - 1, i + j + k - 2)
    return _as_int(acc, f"box formula for {(a, b, c)}")


def plane_partitions_brute(a: int, b: int, c: int) -> int:
    """Count a x b arrays with entries in [0, c], weakly decreasing along rows and columns."""
    if a == 0 or b == 0:
        return 1

    def rows_below(bound):
        # weakly decreasing rows of length b dominated entrywise by `bound`
        def rec(k, cap):
            if k == b:
                yield ()
                return
            for v in range(min(cap, bound[k]), -1, -1):
                for rest in rec(k + 1, v):
                    yield (v,) + rest
        return list(rec(0, c))

    @functools.lru_cache(maxsize=None)
    def count(remaining, prev):
        if remaining == 0:
            return 1
        return sum(count(remaining - 1, row) for row in rows_below(prev))

    return count(a, (c,) * b)


def _legendre(n: int, p: int) -> int:
    e = 0
    while n:
        n //= p
        e += n
    return e


def _hyperfactorial_valuation(n: int, p: int) -> int:
    return sum(_legendre(i, p) for i in range(n))


def prime_factorization_of_abs_det(spec) -> dict[int, int]:
    """Prime factorization of |det C_{t,p,d}| without factoring the value.

    Exponents come from Legendre's formula applied to every factorial in
    the hyperfactorial quotient.
    """
    spec = _spec(spec)
    _closed_form_pre(spec)
    t, p, d = spec.t, spec.p, spec.d
    top = [t - p, p, d - p, t + d - p]
    bottom = [t, d, t + d - 2 * p]
    out: Counter = Counter()
    for q in primerange(2, max(top + bottom) + 1):
        e = sum(_hyperfactorial_valuation(n, q) for n in top) - \
            sum(_hyperfactorial_valuation(n, q) for n in bottom)
        if e < 0:
            raise NonIntegralResult(f"negative valuation of {q} for {spec}")
        if e:
            out[q] = e
    return dict(sorted(out.items()))
