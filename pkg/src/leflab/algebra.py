"""Graded artinian monomial algebras and multiplication by powers of linear forms.

An algebra is ``k[x_0..x_{n-1}] / I`` for a monomial ideal ``I`` that
contains a pure power of every variable.  Bases are monomials outside
``I``.  Within a degree they are ordered by the exponent vector read from
the *last* variable backwards::

    key(m) = (m[n-1], m[n-2], ..., m[0])

so the basis of ``B (x) k[x]/(x^d)`` in degree j is the concatenation of the
blocks ``x^q * basis(B, j - q)`` for q = 0, 1, ..., with B's own basis order
inside each block.  This one order serves every algebra, so the block
decomposition of an extension matrix is literally a partition of
:func:`mult_matrix`'s rows and columns.
"""

from __future__ import annotations

import functools
import itertools
import math
import random
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, NonArtinian, ParseError
from .exact_linalg import ExactMatrix, RankReport, rank_char

Monomial = tuple[int, ...]

__all__ = [
    "Monomial",
    "MonomialAlgebra",
    "HilbertFunction",
    "LinearForm",
    "ExtensionBlocks",
    "graded_basis",
    "hilbert_function",
    "mult_matrix",
    "extension_matrix_blocks",
    "tensor_extend",
    "tensor_ci",
    "parse_descriptor",
    "binom",
    "multinomial",
    "lefschetz_forms",
    "generic_rank",
]


def binom(n: int, k: int) -> int:
    """Binomial coefficient with binom(n, k) = 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@functools.lru_cache(maxsize=None)
def multinomial(exps: tuple[int, ...]) -> int:
    out = math.factorial(sum(exps))
    for a in exps:
        out //= math.factorial(a)
    return out


def _divides(g: Monomial, m: Monomial) -> bool:
    return all(a <= b for a, b in zip(g, m))


def _minimalize(gens) -> tuple[Monomial, ...]:
    gens = sorted(set(gens), key=lambda g: (sum(g), g))
    out: list[Monomial] = []
    for g in gens:
        if not any(_divides(h, g) for h in out):
            out.append(g)
    return tuple(out)


@dataclass(frozen=True)
class HilbertFunction:
    """Dimensions h_0..h_D of the graded pieces; out-of-range degrees give 0."""

    dims: tuple[int, ...]

    @property
    def socle_degree(self) -> int:
        return len(self.dims) - 1

    D = socle_degree

    def __getitem__(self, j: int) -> int:
        if 0 <= j < len(self.dims):
            return self.dims[j]
        return 0

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def is_symmetric(self) -> bool:
        return self.dims == self.dims[::-1]

    def total(self) -> int:
        return sum(self.dims)

    def times_truncated(self, d: int) -> HilbertFunction:
        """Product with 1 + T + ... + T^(d-1)."""
        out = [0] * (len(self.dims) + d - 1)
        for j, h in enumerate(self.dims):
            for q in range(d):
                out[j + q] += h
        return HilbertFunction(tuple(out))


@dataclass(frozen=True)
class LinearForm:
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if not any(self.coefficients):
            raise ValueError("linear form must have a nonzero coefficient")

    @classmethod
    def ones(cls, n: int) -> LinearForm:
        return cls((1,) * n)

    def extend(self, c: int = 1) -> LinearForm:
        """The form ``self + c * x_new`` on one more variable."""
        return LinearForm(self.coefficients + (c,))


@dataclass(frozen=True)
class MonomialAlgebra:
    """``k[x_0..x_{n-1}] / I`` for an artinian monomial ideal ``I``.

    Build with :meth:`complete_intersection`, :meth:`from_generators`,
    :meth:`power_ideal` or :func:`parse_descriptor`.  ``generators`` is
    always the minimal generating set.
    """

    n: int
    generators: tuple[Monomial, ...]

    def __post_init__(self):
        for g in self.generators:
            if len(g) != self.n or min(g, default=0) < 0:
                raise DimensionMismatch(f"generator {g} does not fit {self.n} variables")
        caps = [None] * self.n
        for g in self.generators:
            support = [k for k, a in enumerate(g) if a]
            if len(support) == 1:
                k = support[0]
                caps[k] = g[k] if caps[k] is None else min(caps[k], g[k])
            elif not support:
                raise NonArtinian("the unit ideal is not allowed")
        if any(c is None for c in caps):
            missing = [k for k, c in enumerate(caps) if c is None]
            raise NonArtinian(f"no pure power of x{missing[0]} in the ideal")
        object.__setattr__(self, "_pure_caps", tuple(caps))

    @classmethod
    def complete_intersection(cls, caps: Sequence[int]) -> MonomialAlgebra:
        caps = tuple(int(d) for d in caps)
        if any(d < 1 for d in caps):
            raise NonArtinian("complete intersection caps must be >= 1")
        n = len(caps)
        gens = tuple(tuple(d if k == j else 0 for k in range(n)) for j, d in enumerate(caps))
        return cls(n, gens)

    @classmethod
    def from_generators(cls, n: int, gens) -> MonomialAlgebra:
        return cls(n, _minimalize(tuple(int(a) for a in g) for g in gens))

    @classmethod
    def power_ideal(cls, n: int, d: int) -> MonomialAlgebra:
        """``k[x_0..x_{n-1}] / (x_0, ..., x_{n-1})^d``."""
        gens = [m for m in itertools.product(range(d + 1), repeat=n) if sum(m) == d]
        return cls.from_generators(n, gens)

    @property
    def pure_caps(self) -> tuple[int, ...]:
        """Exponent of the smallest pure power of each variable in the ideal."""
        return self._pure_caps

    @property
    def caps(self) -> tuple[int, ...] | None:
        """The caps d_1..d_n when the algebra is a complete intersection."""
        if len(self.generators) == self.n:
            return self._pure_caps
        return None

    @property
    def is_ci(self) -> bool:
        return self.caps is not None

    def in_ideal(self, m: Monomial) -> bool:
        return any(_divides(g, m) for g in self.generators)

    def basis(self, j: int) -> tuple[Monomial, ...]:
        return graded_basis(self, j)

    @property
    def hilbert(self) -> HilbertFunction:
        return hilbert_function(self)

    @property
    def socle_degree(self) -> int:
        return hilbert_function(self).socle_degree

    def descriptor(self) -> str:
        if self.is_ci:
            return "ci:" + ",".join(map(str, self.caps))
        terms = []
        for g in self.generators:
            parts = [f"x{k}" if a == 1 else f"x{k}^{a}" for k, a in enumerate(g) if a]
            terms.append("*".join(parts))
        return f"mono:{self.n}:" + ",".join(terms)

    def __str__(self) -> str:
        return self.descriptor()


def _order_key(m: Monomial) -> Monomial:
    return m[::-1]


@functools.lru_cache(maxsize=None)
def graded_basis(A: MonomialAlgebra, j: int) -> tuple[Monomial, ...]:
    """Degree-j monomials outside the ideal, in the canonical order."""
    if j < 0:
        return ()
    caps = A.pure_caps
    if j > sum(c - 1 for c in caps):
        return ()
    out = []
    for m in _bounded_compositions(j, caps):
        if not A.in_ideal(m):
            out.append(m)
    out.sort(key=_order_key)
    return tuple(out)


def _bounded_compositions(j: int, caps: Sequence[int]):
    """Exponent vectors of degree j with m[k] < caps[k]."""
    n = len(caps)
    if n == 0:
        if j == 0:
            yield ()
        return
    rest_max = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        rest_max[k] = rest_max[k + 1] + caps[k] - 1

    def rec(k, remaining, prefix):
        if k == n - 1:
            if remaining < caps[k]:
                yield prefix + (remaining,)
            return
        lo = max(0, remaining - rest_max[k + 1])
        for a in range(lo, min(caps[k] - 1, remaining) + 1):
            yield from rec(k + 1, remaining - a, prefix + (a,))

    if j <= rest_max[0]:
        yield from rec(0, j, ())


@functools.lru_cache(maxsize=None)
def hilbert_function(A: MonomialAlgebra) -> HilbertFunction:
    dims = []
    j = 0
    while True:
        h = len(graded_basis(A, j))
        if h == 0:
            break
        dims.append(h)
        j += 1
    return HilbertFunction(tuple(dims))


def mult_matrix(A: MonomialAlgebra, ell: LinearForm, t: int, i: int) -> ExactMatrix:
    """Matrix of multiplication by ``ell^t`` from degree i to degree i+t.

    Rows index ``graded_basis(A, i+t)``, columns ``graded_basis(A, i)``.
    """
    if len(ell.coefficients) != A.n:
        raise DimensionMismatch(f"form on {len(ell.coefficients)} variables, algebra on {A.n}")
    return _mult_matrix(A, ell.coefficients, t, i)


@functools.lru_cache(maxsize=4096)
def _mult_matrix(A: MonomialAlgebra, coeffs: tuple[int, ...], t: int, i: int) -> ExactMatrix:
    src = graded_basis(A, i)
    tgt = graded_basis(A, i + t)
    n = A.n
    entries = [0] * (len(tgt) * len(src))
    ncols = len(src)
    for r, mt in enumerate(tgt):
        base = r * ncols
        for c, ms in enumerate(src):
            a = tuple(x - y for x, y in zip(mt, ms))
            if min(a, default=0) < 0:
                continue
            v = multinomial(a)
            for k in range(n):
                if a[k]:
                    v *= coeffs[k] ** a[k]
            entries[base + c] = v
    return ExactMatrix(len(tgt), len(src), tuple(entries), row_labels=tgt, col_labels=src)


def tensor_extend(B: MonomialAlgebra, d: int) -> MonomialAlgebra:
    """``B (x) k[x]/(x^d)`` with the new variable appended last."""
    if d < 1:
        raise ValueError("extension cap must be >= 1")
    gens = [g + (0,) for g in B.generators]
    gens.append((0,) * B.n + (d,))
    return MonomialAlgebra.from_generators(B.n + 1, gens)


def tensor_ci(B: MonomialAlgebra, caps: Sequence[int]) -> MonomialAlgebra:
    for d in caps:
        B = tensor_extend(B, d)
    return B


@dataclass(frozen=True)
class ExtensionBlocks:
    """The d x d block decomposition of multiplication on an extension.

    Block row p (0-based) is ``x^p * B_{i+t-p}``, block column q is
    ``x^q * B_{i-q}``.  ``grid[p][q]`` is None for structurally zero blocks
    (p < q, or p - q > t) and otherwise
    ``binom(t, p-q) * Mbar_{i-q}^{t-(p-q)}``.  Blocks whose B-degree falls
    outside the algebra have zero size.
    """

    d: int
    i: int
    t: int
    row_sizes: tuple[int, ...]
    col_sizes: tuple[int, ...]
    grid: tuple[tuple[ExactMatrix | None, ...], ...]

    def flatten(self) -> ExactMatrix:
        return ExactMatrix.block(self.grid, self.row_sizes, self.col_sizes)


def extension_matrix_blocks(B: MonomialAlgebra, d: int, i: int, t: int,
                            form: LinearForm | None = None) -> ExtensionBlocks:
    if form is None:
        form = LinearForm.ones(B.n)
    hB = hilbert_function(B)
    row_sizes = tuple(hB[i + t - p] for p in range(d))
    col_sizes = tuple(hB[i - q] for q in range(d))
    grid = []
    for p in range(d):
        row = []
        for q in range(d):
            k = p - q
            if k < 0 or k > t:
                row.append(None)
            else:
                blk = mult_matrix(B, form, t - k, i - q) if col_sizes[q] and row_sizes[p] else \
                    ExactMatrix.zeros(row_sizes[p], col_sizes[q])
                row.append(blk.scale(binom(t, k)))
        grid.append(tuple(row))
    return ExtensionBlocks(d, i, t, row_sizes, col_sizes, tuple(grid))


# ---------------------------------------------------------------------------
# Descriptor grammar:  ci:<d1>,<d2>,...   |   mono:<n>:<gen>(,<gen>)*
# where <gen> is x<idx>^<e> (or x<idx>) terms joined by '*'.

_TERM = re.compile(r"x(\d+)(?:\^(\d+))?$")


def parse_descriptor(text: str) -> MonomialAlgebra:
    text = text.strip()
    if text.startswith("ci:"):
        body = text[3:]
        try:
            caps = [int(x) for x in body.split(",")]
        except ValueError as exc:
            raise ParseError(f"bad cap list in {text!r}") from exc
        if not caps or any(d < 1 for d in caps):
            raise ParseError(f"caps must be integers >= 1 in {text!r}")
        return MonomialAlgebra.complete_intersection(caps)
    if text.startswith("mono:"):
        parts = text[5:].split(":", 1)
        if len(parts) != 2 or not parts[0].isdigit():
            raise ParseError(f"expected mono:<n>:<generators> in {text!r}")
        n = int(parts[0])
        if n < 1:
            raise ParseError("need at least one variable")
        gens = []
        for gen in parts[1].split(","):
            exps = [0] * n
            for term in gen.split("*"):
                m = _TERM.match(term.strip())
                if not m:
                    raise ParseError(f"bad term {term!r} in {text!r}")
                k = int(m.group(1))
                e = int(m.group(2)) if m.group(2) is not None else 1
                if k >= n:
                    raise ParseError(f"variable x{k} out of range for n={n}")
                if e < 1:
                    raise ParseError(f"exponent must be >= 1 in {term!r}")
                exps[k] += e
            gens.append(tuple(exps))
        return MonomialAlgebra.from_generators(n, gens)
    raise ParseError(f"unknown descriptor {text!r}; expected 'ci:' or 'mono:'")


# ---------------------------------------------------------------------------
# Choice of a general linear form


def lefschetz_forms(A: MonomialAlgebra, trials: int = 3, seed: int = 0,
                    char: int = 0) -> tuple[list[LinearForm], bool]:
    """Linear forms standing in for a general one, and whether that is certified.

    Complete intersections use the sum of the variables (certified).  Other
    algebras get ``trials`` random forms with coefficients in [1, 2^16],
    seeded from ``seed`` and the algebra's descriptor; in characteristic p
    coefficients divisible by p are redrawn.
    """
    if A.is_ci:
        return [LinearForm.ones(A.n)], True
    if trials < 1:
        raise ValueError("trials must be >= 1")
    forms = []
    for k in range(trials):
        rng = random.Random(f"{seed}:{A.descriptor()}:{k}")
        coeffs = []
        for _ in range(A.n):
            c = rng.randint(1, 2**16)
            while char and c % char == 0:
                c = rng.randint(1, 2**16)
            coeffs.append(c)
        forms.append(LinearForm(tuple(coeffs)))
    return forms, False


def generic_rank(A: MonomialAlgebra, t: int, i: int, char: int = 0, trials: int = 3,
                 seed: int = 0) -> RankReport:
    """Rank of ``ell^t : A_i -> A_{i+t}`` for a general linear form.

    For random forms the maximum over trials is reported (stopping at the
    first full-rank one) and flagged non-certified unless it is full.
    """
    return _generic_rank(A, t, i, char, trials, seed)


@functools.lru_cache(maxsize=65536)
def _generic_rank(A, t, i, char, trials, seed) -> RankReport:
    forms, certified = lefschetz_forms(A, trials, seed, char)
    best = None
    for f in forms:
        rep = rank_char(mult_matrix(A, f, t, i), char)
        if best is None or rep.rank > best.rank:
            best = rep
        if rep.full_rank:
            break
    return RankReport(best.rank, best.rows, best.cols, certified or best.full_rank)
