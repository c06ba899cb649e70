"""Full-rank decisions on ``A = B (x) k[x]/(x^d)`` from rank data on ``B``.

For ``ell = ellbar + x`` the map ``ell^t : A_i -> A_{i+t}`` has full rank
exactly when the maps

    ellbar^(2q + t - (d-1)) : B_{i-q} -> B_{i+q+t-(d-1)}

for q in :func:`q_range` satisfy the mode returned by
:func:`required_mode` (all injective, all surjective, or all one or the
other).  Over a prime field the same holds provided the prime avoids
:func:`~leflab.binom_dets.recursion_guard_product`.

The base algebra is only ever consulted through a rank oracle, so ``B``
can be a concrete monomial algebra, another extension, or a mock that
only knows a Hilbert function.
"""

from __future__ import annotations

import enum
import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, Sequence, runtime_checkable

from .algebra import (HilbertFunction, LinearForm, MonomialAlgebra, binom, generic_rank,
                      lefschetz_forms, mult_matrix)
from .binom_dets import BinomSpec, build_c, det_c_exact, recursion_guard_product
from .errors import (CharacteristicObstruction, NonIntegralResult, NotSquare,
                     PreconditionViolated, SingularCramerSystem)
from .exact_linalg import (ExactMatrix, RankReport, Reason, check_prime, det,
                           rational_matmul, solve_rational)

__all__ = [
    "RankQuery",
    "RequiredMode",
    "TraceChild",
    "RecursionTrace",
    "RankOracle",
    "BruteForceOracle",
    "ExtensionOracle",
    "HilbertOracle",
    "as_oracle",
    "nested_oracle",
    "q_range",
    "required_mode",
    "decide_full_rank",
    "quadratic_ci_criterion",
    "p_divides_t_rule",
    "det_formula",
    "quadratic_det_formula",
    "LrConstruction",
    "build_lr",
]


@dataclass(frozen=True)
class RankQuery:
    i: int
    t: int

    def __post_init__(self):
        if self.i < 0 or self.t < 1:
            raise PreconditionViolated(f"need i >= 0 and t >= 1, got {self}")


class RequiredMode(str, enum.Enum):
    ALL_INJECTIVE = "AllInjective"
    ALL_SURJECTIVE = "AllSurjective"
    SAME_REASON = "SameReason"


def q_range(i: int, t: int, d: int, s: int) -> range:
    """q from max(0, d-t) to min(d-1, d-1-i-t+s, i), inclusive; may be empty."""
    if d < 1 or s < 0:
        raise PreconditionViolated("need d >= 1 and s >= 0")
    return range(max(0, d - t), min(d - 1, d - 1 - i - t + s, i) + 1)


def required_mode(i: int, t: int, d: int, s: int) -> RequiredMode:
    if i < min(d - 1, d - 1 - i - t + s):
        return RequiredMode.ALL_INJECTIVE
    if d - 1 - i - t + s < min(d - 1, i):
        return RequiredMode.ALL_SURJECTIVE
    return RequiredMode.SAME_REASON


# ---------------------------------------------------------------------------
# Rank oracles


@runtime_checkable
class RankOracle(Protocol):
    """Rank facts about powers of a general linear form on one algebra."""

    char: int

    @property
    def hilbert(self) -> HilbertFunction: ...

    def rank(self, degree: int, power: int) -> RankReport: ...


def _trivial(h: HilbertFunction, degree: int, power: int) -> RankReport | None:
    rows, cols = h[degree + power], h[degree]
    if rows == 0 or cols == 0:
        return RankReport(0, rows, cols)
    if power == 0:
        return RankReport(cols, rows, cols)
    return None


class BruteForceOracle:
    """Ranks from explicit multiplication matrices of a monomial algebra."""

    def __init__(self, algebra: MonomialAlgebra, char: int = 0, trials: int = 3, seed: int = 0):
        if char:
            check_prime(char)
        self.algebra = algebra
        self.char = char
        self.trials = trials
        self.seed = seed
        forms, self.certified = lefschetz_forms(algebra, trials, seed, char)
        self.form = forms[0]

    @property
    def hilbert(self) -> HilbertFunction:
        return self.algebra.hilbert

    def rank(self, degree: int, power: int) -> RankReport:
        triv = _trivial(self.hilbert, degree, power)
        if triv is not None:
            return triv
        return generic_rank(self.algebra, power, degree, self.char, self.trials, self.seed)

    def matrix(self, degree: int, power: int) -> ExactMatrix:
        return mult_matrix(self.algebra, self.form, power, degree)

    def abs_det(self, degree: int, power: int) -> int:
        """|det| of the (square) matrix of ``form^power`` on degree ``degree``."""
        return abs(det(self.matrix(degree, power)))

    def __repr__(self):
        return f"BruteForceOracle({self.algebra}, char={self.char})"


class HilbertOracle:
    """Test double: full rank everywhere except explicitly listed maps.

    ``overrides`` maps (degree, power) to the rank to report.
    """

    def __init__(self, dims: Sequence[int] | HilbertFunction, overrides: dict | None = None,
                 char: int = 0):
        self._h = dims if isinstance(dims, HilbertFunction) else HilbertFunction(tuple(dims))
        self.overrides = dict(overrides or {})
        self.char = char

    @property
    def hilbert(self) -> HilbertFunction:
        return self._h

    def rank(self, degree: int, power: int) -> RankReport:
        rows, cols = self._h[degree + power], self._h[degree]
        if (degree, power) in self.overrides:
            return RankReport(self.overrides[degree, power], rows, cols)
        return RankReport(min(rows, cols), rows, cols)


class ExtensionOracle:
    """Oracle for ``base (x) k[x]/(x^d)`` answered through the recursion.

    Ranks (not just verdicts) come from the block structure after
    anti-diagonalization: with ``hB`` the base Hilbert function,

        rank = sum_{q < d-t} hB[i-q] + sum_{q = max(0,d-t)}^{d-1} rank_B(i-q, 2q+t-(d-1)).

    Only characteristic zero is supported.
    """

    def __init__(self, base: RankOracle, d: int):
        if base.char:
            raise PreconditionViolated("nested recursion is implemented over Q only")
        if d < 1:
            raise PreconditionViolated("extension cap must be >= 1")
        self.base = base
        self.d = d
        self.char = 0
        self._h = base.hilbert.times_truncated(d)
        self._cache: dict = {}

    @property
    def hilbert(self) -> HilbertFunction:
        return self._h

    def rank(self, degree: int, power: int) -> RankReport:
        key = (degree, power)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._rank(degree, power)
        return hit

    def _rank(self, i: int, t: int) -> RankReport:
        triv = _trivial(self._h, i, t)
        if triv is not None:
            return triv
        hB, d = self.base.hilbert, self.d
        total = sum(hB[i - q] for q in range(max(0, d - t)))
        certified = True
        for q in range(max(0, d - t), d):
            rep = self.base.rank(i - q, 2 * q + t - (d - 1))
            total += rep.rank
            certified &= rep.certified
        verdict, _ = decide_full_rank(self.base, d, RankQuery(i, t))
        rep = RankReport(total, self._h[i + t], self._h[i], certified)
        if rep.full_rank != verdict:
            raise AssertionError(f"rank sum and recursion disagree at {(i, t)}")
        return rep

    def abs_det(self, degree: int, power: int) -> int:
        return det_formula(self.base, self.d, RankQuery(degree, power))

    def __repr__(self):
        return f"ExtensionOracle({self.base!r}, d={self.d})"


def as_oracle(B, char: int = 0, trials: int = 3, seed: int = 0) -> RankOracle:
    if isinstance(B, MonomialAlgebra):
        return BruteForceOracle(B, char, trials, seed)
    if char and B.char != char:
        raise PreconditionViolated(f"oracle is in characteristic {B.char}, asked for {char}")
    return B


def nested_oracle(caps: Sequence[int]) -> RankOracle:
    """Oracle for a monomial complete intersection built one variable at a time."""
    caps = list(caps)
    if not caps:
        raise PreconditionViolated("need at least one cap")
    oracle: RankOracle = BruteForceOracle(MonomialAlgebra.complete_intersection(caps[:1]))
    for d in caps[1:]:
        oracle = ExtensionOracle(oracle, d)
    return oracle


# ---------------------------------------------------------------------------
# The decision procedure


@dataclass(frozen=True)
class TraceChild:
    q: int
    src_deg: int
    power: int
    report: RankReport

    def to_dict(self) -> dict:
        return {"q": self.q, "src_deg": self.src_deg, "power": self.power,
                "rank": self.report.rank, "rows": self.report.rows,
                "cols": self.report.cols, "reason": self.report.reason.value}


@dataclass(frozen=True)
class RecursionTrace:
    query: RankQuery
    d: int
    s: int
    mode: RequiredMode
    children: tuple[TraceChild, ...]
    conclusion: bool

    def to_dict(self) -> dict:
        return {"i": self.query.i, "t": self.query.t, "d": self.d, "s": self.s,
                "mode": self.mode.value,
                "children": [c.to_dict() for c in self.children],
                "verdict": self.conclusion}


def _satisfies(mode: RequiredMode, reports: Sequence[RankReport]) -> bool:
    def inj(r):
        return r.reason is Reason.TRIVIALLY_FULL or r.injective

    def surj(r):
        return r.reason is Reason.TRIVIALLY_FULL or r.surjective

    if mode is RequiredMode.ALL_INJECTIVE:
        return all(map(inj, reports))
    if mode is RequiredMode.ALL_SURJECTIVE:
        return all(map(surj, reports))
    return all(map(inj, reports)) or all(map(surj, reports))


def decide_full_rank(B, d: int, query: RankQuery | tuple[int, int], char: int = 0,
                     workers: int = 1) -> tuple[bool, RecursionTrace]:
    """Decide whether ``ell^t : A_i -> A_{i+t}`` has full rank on ``A = B (x) k[x]/(x^d)``.

    ``B`` is a :class:`MonomialAlgebra` (queried by brute force) or any
    :class:`RankOracle`.  In characteristic p the recursion is refused with
    :class:`CharacteristicObstruction` when p divides
    :func:`~leflab.binom_dets.recursion_guard_product`.
    """
    if not isinstance(query, RankQuery):
        query = RankQuery(*query)
    oracle = as_oracle(B, char)
    char = oracle.char
    hB = oracle.hilbert
    s = hB.socle_degree
    i, t = query.i, query.t
    mode = required_mode(i, t, d, s)
    hA = hB.times_truncated(d)
    if hA[i] == 0 or hA[i + t] == 0:
        return True, RecursionTrace(query, d, s, mode, (), True)
    if char:
        guard = recursion_guard_product(i, t, d, s)
        if guard % char == 0:
            raise CharacteristicObstruction(char, guard)
    qs = list(q_range(i, t, d, s))
    subqueries = [(i - q, 2 * q + t - (d - 1)) for q in qs]
    if workers > 1 and len(subqueries) > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(lambda a: oracle.rank(*a), subqueries))
    else:
        reports = [oracle.rank(*a) for a in subqueries]
    children = tuple(TraceChild(q, src, pw, rep)
                     for q, (src, pw), rep in zip(qs, subqueries, reports))
    verdict = all(r.full_rank for r in reports) and _satisfies(mode, reports)
    return verdict, RecursionTrace(query, d, s, mode, children, verdict)


def quadratic_ci_criterion(n: int, i: int, t: int, p: int = 0) -> bool:
    """Full rank of ``ell^t`` on degree i of k[x_1..x_n]/(x_1^2..x_n^2) in characteristic p."""
    if n < 1:
        raise PreconditionViolated("need n >= 1")
    if i + t > n or p == 0:
        return True
    return p > min(i + t, n - i)


def p_divides_t_rule(B, query: RankQuery | tuple[int, int], p: int) -> bool:
    """Full rank on ``B (x) k[x]/(x^2)`` in characteristic p when p divides t.

    Then ``t = 0`` in k and the extension matrix is block diagonal with
    blocks ``ellbar^t`` on B_i and on B_{i-1}.
    """
    if not isinstance(query, RankQuery):
        query = RankQuery(*query)
    check_prime(p)
    i, t = query.i, query.t
    if t % p:
        raise PreconditionViolated(f"{p} does not divide t={t}")
    oracle = as_oracle(B, p)
    hB = oracle.hilbert
    rows, cols = hB[i + t] + hB[i + t - 1], hB[i] + hB[i - 1]
    if rows == 0 or cols == 0:
        return True
    top = oracle.rank(i, t)          # B_i -> B_{i+t}
    bottom = oracle.rank(i - 1, t)   # B_{i-1} -> B_{i+t-1}
    if i == 0:
        # the only column is 1, mapped to ellbar^t in B_t and 0 in x*B_{t-1}
        return hB[t] != 0 and top.full_rank
    if hB[i + t] == 0:
        # all rows are x*B_{i+t-1}; the B_i columns map to zero
        return bottom.surjective
    return (top.full_rank and bottom.full_rank
            and _satisfies(RequiredMode.SAME_REASON, [top, bottom]))


# ---------------------------------------------------------------------------
# Determinants


def _int_or_raise(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NonIntegralResult(f"{what} evaluated to {x}")
    return x.numerator


def det_formula(B, d: int, query: RankQuery | tuple[int, int]) -> int:
    """|det| of ``ell^t : A_i -> A_{i+t}`` as the product F1 * F2 * F3 (char 0).

    F1 multiplies the |det| of the recursion's child maps; F2 and F3 collect
    powers of |det C_{t,p,d}|.  The base oracle must provide ``abs_det``.
    """
    if not isinstance(query, RankQuery):
        query = RankQuery(*query)
    oracle = as_oracle(B)
    hB = oracle.hilbert
    s = hB.socle_degree
    i, t = query.i, query.t
    hA = hB.times_truncated(d)
    if hA[i] != hA[i + t]:
        raise NotSquare(f"A_{i} has dim {hA[i]} but A_{i + t} has dim {hA[i + t]}")
    qs = q_range(i, t, d, s)
    for q in qs:
        if hB[i - q] != hB[i + q + t - (d - 1)]:
            raise NotSquare(f"child q={q} maps dim {hB[i - q]} to dim {hB[i + q + t - (d - 1)]}")
    if hA[i] == 0:
        return 1

    f1 = 1
    for q in qs:
        f1 *= oracle.abs_det(i - q, 2 * q + t - (d - 1))
    f2 = Fraction(1)
    for p in range(max(1, 1 + i + t - s, d - i - 1), min(d - 1, t - 1) + 1):
        f2 *= Fraction(abs(det_c_exact(BinomSpec(t, p, d)))) ** (hB[i + p - (d - 1)] - hB[i + p - d])
    f3 = 1
    c = i + t - s
    if min(d - 1, t - 1) >= c >= max(0, (d - 1) - i):
        f3 = abs(det_c_exact(BinomSpec(t, c, d))) ** hB[2 * i - (d - 1) + t - s]
    return _int_or_raise(f1 * f2 * f3, f"F1*F2*F3 at {query}, d={d}")


def quadratic_det_formula(n_size: int, m_size: int, det_p: int, det_upd: int, t: int) -> int:
    """Signed det of the d=2 extension matrix from its two child determinants.

    ``(-1)^(m(n+1)) * det_p * det_upd * t^(n-m)`` with n, m the sizes of
    the children on B_i and B_{i-1}.
    """
    if t < 1:
        raise PreconditionViolated("need t >= 1")
    sign = -1 if (m_size * (n_size + 1)) % 2 else 1
    val = sign * Fraction(det_p) * det_upd * Fraction(t) ** (n_size - m_size)
    return _int_or_raise(val, "quadratic determinant formula")


# ---------------------------------------------------------------------------
# Explicit anti-diagonalization


@dataclass
class LrConstruction:
    """Unimodular L, R with L*M*R block anti-diagonal (for t >= d-1).

    L and R are stored over the integers as ``L = l_matrix / l_scale``.
    ``coefficients[p]`` holds c_{p,1..d-p} (1-based p); rows with p > t are
    left at zero.  ``antidiagonal_scalars[p]`` is the scalar in front of
    block (p, d+1-p), computed from the coefficients.
    """

    d: int
    i: int
    t: int
    m: ExactMatrix
    l_matrix: ExactMatrix
    l_scale: int
    r_matrix: ExactMatrix
    r_scale: int
    row_sizes: tuple[int, ...]
    col_sizes: tuple[int, ...]
    coefficients: dict[int, tuple[Fraction, ...]]
    antidiagonal_scalars: dict[int, Fraction]
    lmr: list[list[Fraction]] = field(repr=False)
    children: dict[int, ExactMatrix] = field(repr=False)

    def block(self, p: int, q: int) -> list[list[Fraction]]:
        """Block (p, q), 1-based, of L*M*R."""
        r0 = sum(self.row_sizes[:p - 1])
        c0 = sum(self.col_sizes[:q - 1])
        return [row[c0:c0 + self.col_sizes[q - 1]]
                for row in self.lmr[r0:r0 + self.row_sizes[p - 1]]]

    def det_l(self) -> Fraction:
        return Fraction(det(self.l_matrix), self.l_scale ** self.l_matrix.rows)

    def det_r(self) -> Fraction:
        return Fraction(det(self.r_matrix), self.r_scale ** self.r_matrix.rows)

    def problems(self) -> list[str]:
        """Every way the construction deviates from the expected shape."""
        out = []
        if self.det_l() != 1:
            out.append(f"det L = {self.det_l()}")
        if self.det_r() != 1:
            out.append(f"det R = {self.det_r()}")
        d, t = self.d, self.t
        for p in range(1, d + 1):
            for q in range(1, d + 1):
                blk = self.block(p, q)
                if t >= d - 1 or p <= t or q >= d - t + 1:
                    if p + q == d + 1:
                        scalar = self.antidiagonal_scalars.get(p)
                        child = self.children[p].to_rows()
                        if scalar is None or blk != [[scalar * x for x in row] for row in child]:
                            out.append(f"anti-diagonal block ({p},{q}) is not scalar*child")
                    elif any(x for row in blk for x in row):
                        out.append(f"block ({p},{q}) is nonzero")
                else:
                    # block upper triangular region with identities on p - q = t
                    k = p - q
                    if k > t and any(x for row in blk for x in row):
                        out.append(f"block ({p},{q}) below the identity diagonal is nonzero")
                    if k == t:
                        n = len(blk)
                        if blk != [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]:
                            out.append(f"block ({p},{q}) is not the identity")
        return out


def build_lr(B: MonomialAlgebra, d: int, i: int, t: int,
             form: LinearForm | None = None) -> LrConstruction:
    """Construct L and R for the extension matrix of ``ell^t`` on A_i.

    Row p < d of L uses the solution of ``C_{t,p,d} c = -(binom(t,p-1), ...,
    binom(t,2p-d))``; R reuses the same coefficients.  Only rows p <= t
    need solving; when t < d-1 the remaining rows stay trivial.
    """
    from .algebra import extension_matrix_blocks

    if d < 1 or t < 1 or i < 0:
        raise PreconditionViolated("need d >= 1, t >= 1, i >= 0")
    if form is None:
        form = LinearForm.ones(B.n)
    hB = B.hilbert
    blocks = extension_matrix_blocks(B, d, i, t, form)
    M = blocks.flatten()
    rs, cs = blocks.row_sizes, blocks.col_sizes

    def mbar(power: int, degree: int) -> list[list[int]]:
        rows, cols = hB[degree + power], hB[degree]
        if rows == 0 or cols == 0:
            return [[0] * cols for _ in range(rows)]
        return mult_matrix(B, form, power, degree).to_rows()

    coeffs: dict[int, tuple[Fraction, ...]] = {}
    for p in range(1, d):
        if p > t:
            coeffs[p] = (Fraction(0),) * (d - p)
            continue
        C = build_c(BinomSpec(t, p, d)).to_rows()
        rhs = [-binom(t, p - r) for r in range(1, d - p + 1)]
        sol = solve_rational(C, rhs)
        if sol is None:
            raise SingularCramerSystem(f"C_{{{t},{p},{d}}} is singular")
        coeffs[p] = tuple(sol)

    def c(p: int, j: int) -> Fraction:
        return coeffs[p][j - 1]

    # 1-based block indices throughout.  Row block p <-> x^(p-1) B_{i+t-p+1},
    # column block q <-> x^(q-1) B_{i-q+1}.
    nL = sum(rs)
    L = [[Fraction(int(r == k)) for k in range(nL)] for r in range(nL)]
    for p in range(1, d):
        for j in range(p, d):
            coef = c(p, d - j)
            if not coef:
                continue
            blk = mbar(j + 1 - p, t + i - j)
            _place(L, blk, sum(rs[:p - 1]), sum(rs[:j]), coef)
    nR = sum(cs)
    R = [[Fraction(int(r == k)) for k in range(nR)] for r in range(nR)]
    for q in range(2, d + 1):
        for r in range(1, q):
            coef = c(d + 1 - q, r)
            if not coef:
                continue
            blk = mbar(q - r, i - q + 1)
            _place(R, blk, sum(cs[:r - 1]), sum(cs[:q - 1]), coef)

    m_rows = [[Fraction(x) for x in row] for row in M.to_rows()]
    lmr = rational_matmul(rational_matmul(L, m_rows, nR), R, nR) if nL and nR else \
        [[Fraction(0)] * nR for _ in range(nL)]

    scalars: dict[int, Fraction] = {}
    children: dict[int, ExactMatrix] = {}
    for p in range(1, d + 1):
        src, power = i - d + p, d + 1 + t - 2 * p
        if power >= 0:
            rows_, cols_ = hB[src + power], hB[src]
            children[p] = ExactMatrix.from_rows(mbar(power, src), cols_) if rows_ else \
                ExactMatrix.zeros(0, cols_)
        if p == d:
            if t >= d - 1:
                scalars[p] = Fraction(binom(t, d - 1))
        elif p <= t:
            scalars[p] = binom(t, 2 * p - d - 1) + sum(
                c(p, j) * binom(t, p - j) for j in range(1, d - p + 1))

    l_int, l_scale = _to_int(L, nL)
    r_int, r_scale = _to_int(R, nR)
    return LrConstruction(d, i, t, M, l_int, l_scale, r_int, r_scale, rs, cs, coeffs,
                          scalars, lmr, children)


def _place(target, blk, r0, c0, coef):
    for r, row in enumerate(blk):
        for k, x in enumerate(row):
            target[r0 + r][c0 + k] = coef * x


def _to_int(rows: list[list[Fraction]], n: int) -> tuple[ExactMatrix, int]:
    import math

    scale = math.lcm(1, *(x.denominator for row in rows for x in row))
    return ExactMatrix.from_rows([[int(x * scale) for x in row] for row in rows], n), scale


@functools.lru_cache(maxsize=None)
def diagonal_coefficient(t: int, p: int, d: int) -> Fraction:
    """det(C_{t,p-1,d}) / det(C_{t,p,d})."""
    return Fraction(det_c_exact(BinomSpec(t, p - 1, d)), det_c_exact(BinomSpec(t, p, d)))
