"""Exact integer matrices: rank over Q and F_p, determinants, block transforms.

Everything here works on Python integers (or ``Fraction`` where a rational
matrix is unavoidable).  Nothing is ever converted to floating point.
Rank and determinant over Q use one-step fraction-free (Bareiss)
elimination, so every intermediate entry stays an integer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import isprime

from .errors import DimensionMismatch, NonPrimeModulus, NotSquare, ZeroAlpha

__all__ = [
    "ExactMatrix",
    "Reason",
    "RankReport",
    "BlockTransform",
    "rank_rational",
    "rank_mod_p",
    "rank_char",
    "det",
    "det_mod_p",
    "bareiss_echelon",
    "block_antidiag_transform",
    "solve_rational",
    "rational_matmul",
    "check_prime",
]


@dataclass(frozen=True)
class ExactMatrix:
    """Dense row-major matrix of arbitrary-precision integers.

    ``row_labels``/``col_labels`` are optional tags (typically monomials or
    degrees) carried along for display; they do not take part in equality.
    """

    rows: int
    cols: int
    entries: tuple[int, ...]
    row_labels: tuple | None = field(default=None, compare=False, repr=False)
    col_labels: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None, **labels) -> ExactMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r), **labels)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> ExactMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls(n, n, tuple(int(r == c) for r in range(n) for c in range(n)))

    @classmethod
    def block(cls, grid: Sequence[Sequence[ExactMatrix | None]], row_sizes: Sequence[int],
              col_sizes: Sequence[int]) -> ExactMatrix:
        """Assemble a block matrix; ``None`` entries are zero blocks."""
        out = [[0] * sum(col_sizes) for _ in range(sum(row_sizes))]
        r0 = 0
        for bi, rs in enumerate(row_sizes):
            c0 = 0
            for bj, cs in enumerate(col_sizes):
                blk = grid[bi][bj]
                if blk is not None:
                    if (blk.rows, blk.cols) != (rs, cs):
                        raise DimensionMismatch(
                            f"block ({bi},{bj}) is {blk.rows}x{blk.cols}, expected {rs}x{cs}"
                        )
                    for r in range(rs):
                        out[r0 + r][c0:c0 + cs] = blk.entries[r * cs:(r + 1) * cs]
                c0 += cs
            r0 += rs
        return cls.from_rows(out, sum(col_sizes))

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[r * c:(r + 1) * c]) for r in range(self.rows)]

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.entries[r * self.cols + c]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(self.cols, self.rows,
                           tuple(self.entries[r * self.cols + c]
                                 for c in range(self.cols) for r in range(self.rows)))

    def scale(self, k: int) -> ExactMatrix:
        return ExactMatrix(self.rows, self.cols, tuple(k * x for x in self.entries))

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return ExactMatrix(self.rows, self.cols,
                           tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> ExactMatrix:
        return self.scale(-1)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        rows = rational_matmul(self.to_rows(), other.to_rows(), other.cols)
        return ExactMatrix.from_rows(rows, other.cols)

    def mod(self, p: int) -> ExactMatrix:
        return ExactMatrix(self.rows, self.cols, tuple(x % p for x in self.entries))

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> ExactMatrix:
        rows, cols = list(rows), list(cols)
        return ExactMatrix.from_rows([[self[r, c] for c in cols] for r in rows], len(cols))

    def is_zero(self) -> bool:
        return not any(self.entries)


class Reason(str, enum.Enum):
    INJECTIVE = "Injective"
    SURJECTIVE = "Surjective"
    BIJECTIVE = "Bijective"
    NOT_FULL = "NotFull"
    TRIVIALLY_FULL = "TriviallyFull"


@dataclass(frozen=True)
class RankReport:
    """Rank of a linear map together with its full-rank classification.

    ``certified`` is False when the rank came from random evaluation and
    may underestimate the generic rank.
    """

    rank: int
    rows: int
    cols: int
    certified: bool = True

    @property
    def full_rank(self) -> bool:
        return self.rank == min(self.rows, self.cols)

    @property
    def injective(self) -> bool:
        return self.rank == self.cols

    @property
    def surjective(self) -> bool:
        return self.rank == self.rows

    @property
    def reason(self) -> Reason:
        if self.rows == 0 or self.cols == 0:
            return Reason.TRIVIALLY_FULL
        if self.injective and self.surjective:
            return Reason.BIJECTIVE
        if self.injective:
            return Reason.INJECTIVE
        if self.surjective:
            return Reason.SURJECTIVE
        return Reason.NOT_FULL

    def to_dict(self) -> dict:
        return {"rank": self.rank, "rows": self.rows, "cols": self.cols,
                "full_rank": self.full_rank, "reason": self.reason.value,
                "certified": self.certified}


def check_prime(p: int) -> int:
    if not (isinstance(p, int) and 1 < p < 2**62 and isprime(p)):
        raise NonPrimeModulus(f"{p!r} is not a prime below 2^62")
    return p


# ---------------------------------------------------------------------------
# Fraction-free elimination


def bareiss_echelon(M: ExactMatrix, check: bool = False) -> tuple[list[list[int]], int, int]:
    """Run one-step Bareiss elimination on a copy of ``M``.

    Returns ``(echelon_rows, rank, sign)`` where ``sign`` is the parity of
    the row swaps.  With ``check=True`` every division is verified exact.
    """
    a = M.to_rows()
    nrows, ncols = M.rows, M.cols
    prev = 1
    r = 0
    sign = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((k for k in range(r, nrows) if a[k][c]), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        pr = a[r]
        pv = pr[c]
        for k in range(r + 1, nrows):
            row = a[k]
            f = row[c]
            if f:
                for j in range(c + 1, ncols):
                    num = row[j] * pv - f * pr[j]
                    if check and num % prev:
                        raise AssertionError("inexact Bareiss division")
                    row[j] = num // prev
            else:
                for j in range(c + 1, ncols):
                    num = row[j] * pv
                    if check and num % prev:
                        raise AssertionError("inexact Bareiss division")
                    row[j] = num // prev
            row[c] = 0
        prev = pv
        r += 1
    return a, r, sign


def rank_rational(M: ExactMatrix) -> RankReport:
    if M.rows == 0 or M.cols == 0:
        return RankReport(0, M.rows, M.cols)
    _, r, _ = bareiss_echelon(M)
    return RankReport(r, M.rows, M.cols)


def det(M: ExactMatrix) -> int:
    if not M.is_square:
        raise NotSquare(f"determinant of a {M.rows}x{M.cols} matrix")
    n = M.rows
    if n == 0:
        return 1
    a, r, sign = bareiss_echelon(M)
    if r < n:
        return 0
    return sign * a[n - 1][n - 1]


def _eliminate_mod_p(M: ExactMatrix, p: int) -> tuple[int, int]:
    """Gaussian elimination over F_p; returns (rank, determinant mod p)."""
    a = [[x % p for x in row] for row in M.to_rows()]
    nrows, ncols = M.rows, M.cols
    r = 0
    d = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((k for k in range(r, nrows) if a[k][c]), None)
        if piv is None:
            d = 0
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            d = -d
        pr = a[r]
        d = d * pr[c] % p
        inv = pow(pr[c], -1, p)
        for k in range(r + 1, nrows):
            row = a[k]
            f = row[c]
            if f:
                f = f * inv % p
                for j in range(c, ncols):
                    row[j] = (row[j] - f * pr[j]) % p
        r += 1
    if r < ncols:
        d = 0
    return r, d % p


def rank_mod_p(M: ExactMatrix, p: int) -> RankReport:
    check_prime(p)
    if M.rows == 0 or M.cols == 0:
        return RankReport(0, M.rows, M.cols)
    r, _ = _eliminate_mod_p(M, p)
    return RankReport(r, M.rows, M.cols)


def det_mod_p(M: ExactMatrix, p: int) -> int:
    check_prime(p)
    if not M.is_square:
        raise NotSquare(f"determinant of a {M.rows}x{M.cols} matrix")
    if M.rows == 0:
        return 1 % p
    return _eliminate_mod_p(M, p)[1]


# 2^61 - 1; a full rank modulo this prime certifies full rank over Q.
_CERT_PRIME = 2305843009213693951


def rank_char(M: ExactMatrix, char: int = 0) -> RankReport:
    """Rank in characteristic ``char`` (0 means Q).

    Over Q a cheap elimination modulo a large prime runs first: since
    rank mod p never exceeds the rational rank, a full result there is
    already exact.  Otherwise Bareiss settles it.
    """
    if char:
        return rank_mod_p(M, char)
    if M.rows == 0 or M.cols == 0:
        return RankReport(0, M.rows, M.cols)
    r, _ = _eliminate_mod_p(M, _CERT_PRIME)
    if r == min(M.rows, M.cols):
        return RankReport(r, M.rows, M.cols)
    return rank_rational(M)


# ---------------------------------------------------------------------------
# Rational helpers


def rational_matmul(a: Sequence[Sequence], b: Sequence[Sequence], b_cols: int | None = None) -> list[list]:
    """Product of two nested-list matrices with exact scalar entries."""
    if b_cols is None:
        b_cols = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else [() for _ in range(b_cols)]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Solve the square system ``A x = b`` over Q; None if singular."""
    n = len(A)
    m = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for c in range(n):
        piv = next((k for k in range(c, n) if m[k][c]), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for k in range(n):
            if k != c and m[k][c]:
                f = m[k][c]
                m[k] = [x - f * y for x, y in zip(m[k], m[c])]
    return [row[n] for row in m]


def _frac_to_exact(rows: list[list[Fraction]], cols: int) -> tuple[ExactMatrix, int]:
    scale = math.lcm(1, *(x.denominator for row in rows for x in row))
    return ExactMatrix.from_rows([[int(x * scale) for x in row] for row in rows], cols), scale


# ---------------------------------------------------------------------------
# Block anti-diagonalization


@dataclass(frozen=True)
class BlockTransform:
    """Result of :func:`block_antidiag_transform`.

    ``lmr`` equals ``scale`` times the rational matrix L*M*R; ``m`` is M
    itself, cleared of the denominator of alpha.
    """

    lmr: ExactMatrix
    scale: int
    rank_identity: bool
    rank_m: int
    rank_p: int
    rank_upd: int
    m: ExactMatrix


def block_antidiag_transform(U: ExactMatrix, P: ExactMatrix, D: ExactMatrix,
                             alpha: int | Fraction) -> BlockTransform:
    """Anti-diagonalize ``M = [[UP, 0], [alpha P, PD]]``.

    With ``L = [[I, -U/alpha], [0, I]]`` and ``R = [[I, -D/alpha], [0, I]]``
    (both unimodular) one gets ``L M R = [[0, -UPD/alpha], [alpha P, 0]]``,
    hence ``rank M = rank P + rank UPD``.  The product is computed
    explicitly, checked against that closed form, and both sides of the
    rank identity are evaluated with :func:`rank_rational`.
    """
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ZeroAlpha("alpha must be nonzero")
    if U.cols != P.rows or P.cols != D.rows:
        raise DimensionMismatch(f"U{U.shape} P{P.shape} D{D.shape} do not compose")
    a, b = U.rows, P.rows
    c, e = P.cols, D.cols
    UP, PD = U @ P, P @ D
    UPD = UP @ D
    M = ExactMatrix.block([[UP, None], [P, PD]], [a, b], [c, e])
    # alpha may be fractional, so M carries alpha*P only in rational form
    m_rows = [[Fraction(x) for x in row] for row in M.to_rows()]
    for r in range(b):
        for k in range(c):
            m_rows[a + r][k] *= alpha
    inv = 1 / alpha
    L = [[Fraction(int(r == k)) for k in range(a + b)] for r in range(a + b)]
    for r in range(a):
        for k in range(b):
            L[r][a + k] = -inv * U[r, k]
    R = [[Fraction(int(r == k)) for k in range(c + e)] for r in range(c + e)]
    for r in range(c):
        for k in range(e):
            R[r][c + k] = -inv * D[r, k]
    lmr = rational_matmul(rational_matmul(L, m_rows, c + e), R, c + e)

    expected = [[Fraction(0)] * (c + e) for _ in range(a + b)]
    for r in range(a):
        for k in range(e):
            expected[r][c + k] = -inv * UPD[r, k]
    for r in range(b):
        for k in range(c):
            expected[a + r][k] = alpha * P[r, k]
    if lmr != expected:
        raise AssertionError("L*M*R does not have the anti-diagonal form")

    lmr_int, scale = _frac_to_exact(lmr, c + e)
    m_int, _ = _frac_to_exact(m_rows, c + e)
    rank_m = rank_rational(m_int).rank
    rank_p = rank_rational(P).rank
    rank_upd = rank_rational(UPD).rank
    return BlockTransform(lmr_int, scale, rank_m == rank_p + rank_upd, rank_m, rank_p,
                          rank_upd, m_int)
