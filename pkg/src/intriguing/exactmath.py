"""Exact arithmetic: small finite fields and dense rational matrices.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  A :class:`RationalMatrix` keeps an integer numerator array
and one common positive denominator, normalised so that the gcd of all
entries and the denominator is 1.  Products are then integer matrix
products, which keeps the 112x112 idempotent algebra checks fast.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction

# fixed irreducible polynomials, low-to-high coefficients, monic of degree e
_MODULI = {
    4: (2, (1, 1, 1)),      # x^2 + x + 1
    8: (2, (1, 1, 0, 1)),   # x^3 + x + 1
    9: (3, (1, 0, 1)),      # x^2 + 1
}
SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 8, 9)


class FieldError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class FiniteField:
    """GF(q) for q <= 9 with elements encoded as integers 0..q-1.

    Element ``i`` is the polynomial whose base-p digits (least significant
    first) are the coefficients of 1, x, x^2, ...
    """

    def __init__(self, q: int):
        if q not in SUPPORTED_ORDERS:
            raise FieldError(f"unsupported field order {q}")
        if q in _MODULI:
            p, modulus = _MODULI[q]
        else:
            p, modulus = q, (0, 1)
        e = len(modulus) - 1
        self.q, self.p, self.e = q, p, e
        self.modulus = modulus

        digits = [self._digits(i) for i in range(q)]
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(q):
                add[a][b] = self._encode([(x + y) % p for x, y in zip(digits[a], digits[b])])
                mul[a][b] = self._encode(self._polymul(digits[a], digits[b]))
        self.add = add
        self.mul = mul
        self.neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
        self.inv = [0] + [next(b for b in range(q) if mul[a][b] == 1) for a in range(1, q)]
        self.sub = [[add[a][self.neg[b]] for b in range(q)] for a in range(q)]
        self.add_table = np.array(add, dtype=np.int64)
        self.mul_table = np.array(mul, dtype=np.int64)

    def _digits(self, i: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(i % self.p)
            i //= self.p
        return out

    def _encode(self, digits: Sequence[int]) -> int:
        return sum(d * self.p ** k for k, d in enumerate(digits))

    def _polymul(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        p, e = self.p, self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic modulus from the top down
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            if c:
                for j, m in enumerate(self.modulus):
                    prod[k - e + j] = (prod[k - e + j] - c * m) % p
        return prod[:e]

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def x(self) -> int:
        """The adjoined root of the defining polynomial (extension fields only)."""
        if self.e == 1:
            raise FieldError(f"GF({self.q}) is a prime field")
        return self.p

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        acc = 0
        for a, b in zip(u, v):
            acc = self.add[acc][self.mul[a][b]]
        return acc

    def scale(self, c: int, v: Sequence[int]) -> tuple[int, ...]:
        row = self.mul[c]
        return tuple(row[x] for x in v)

    def vadd(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.add[a][b] for a, b in zip(u, v))

    def __repr__(self) -> str:
        return f"GF({self.q})"


_FIELDS: dict[int, FiniteField] = {}


def field_make(q: int) -> FiniteField:
    if q not in _FIELDS:
        _FIELDS[q] = FiniteField(q)
    return _FIELDS[q]


def normalize_projective(F: FiniteField, v: Sequence[int]) -> tuple[int, ...]:
    """Scale so the first nonzero coordinate is 1."""
    for x in v:
        if x:
            return F.scale(F.inv[x], v)
    raise ValueError("zero vector has no projective point")


class GFSpan:
    """Row-reduced basis of a subspace of GF(q)^n with a membership oracle."""

    def __init__(self, F: FiniteField, rows: Iterable[Sequence[int]], length: int | None = None):
        self.F = F
        rows = [tuple(r) for r in rows]
        if length is None:
            if not rows:
                raise ValueError("length required for an empty row list")
            length = len(rows[0])
        if any(len(r) != length for r in rows):
            raise ValueError("all vectors must have the same length")
        self.length = length
        self.basis: list[tuple[int, ...]] = []
        self.pivots: list[int] = []
        for r in rows:
            self._insert(r)

    def _reduce(self, v: Sequence[int]) -> list[int]:
        F = self.F
        v = list(v)
        for b, piv in zip(self.basis, self.pivots):
            c = v[piv]
            if c:
                nc = F.neg[c]
                mrow = F.mul[nc]
                v = [F.add[x][mrow[y]] for x, y in zip(v, b)]
        return v

    def _insert(self, r: Sequence[int]) -> bool:
        F = self.F
        v = self._reduce(r)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        v = list(F.scale(F.inv[v[piv]], v))
        # keep the basis fully reduced
        new_basis = []
        for b in self.basis:
            c = b[piv]
            if c:
                mrow = F.mul[F.neg[c]]
                b = tuple(F.add[x][mrow[y]] for x, y in zip(b, v))
            new_basis.append(b)
        new_basis.append(tuple(v))
        pairs = sorted(zip([*self.pivots, piv], new_basis))
        self.pivots = [pv for pv, _ in pairs]
        self.basis = [b for _, b in pairs]
        return True

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, v: Sequence[int]) -> bool:
        if len(v) != self.length:
            raise ValueError("vector length mismatch")
        return not any(self._reduce(v))

    def add(self, v: Sequence[int]) -> bool:
        return self._insert(tuple(v))

    def vectors(self):
        """Yield every vector of the span (q^rank of them)."""
        F = self.F
        for coeffs in product(range(F.q), repeat=self.rank):
            v = (0,) * self.length
            for c, b in zip(coeffs, self.basis):
                if c:
                    v = F.vadd(v, F.scale(c, b))
            yield v


def gf_solve(F: FiniteField, rows: Iterable[Sequence[int]], length: int | None = None) -> GFSpan:
    return GFSpan(F, rows, length)


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------

_INT64_SAFE = 2 ** 62


def _as_int_array(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype == object:
        return arr
    return arr.astype(np.int64)


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return int(max(abs(int(arr.max())), abs(int(arr.min()))))


def _fits(arr: np.ndarray) -> np.ndarray:
    """Downcast an object array to int64 when every entry fits."""
    if arr.dtype == object and _maxabs(arr) < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


class RationalMatrix:
    """Dense matrix of rationals stored as ``numer / denom``."""

    __slots__ = ("numer", "denom")

    def __init__(self, numer, denom: int = 1):
        numer = _as_int_array(numer)
        if numer.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        denom = int(denom)
        if denom == 0:
            raise ZeroDivisionError("zero denominator")
        if denom < 0:
            numer, denom = -numer, -denom
        g = denom
        if numer.size:
            flat = numer.ravel()
            nz = flat[flat != 0]
            if nz.size:
                g = gcd(g, int(np.gcd.reduce(np.abs(nz).astype(object))) if numer.dtype == object
                        else int(np.gcd.reduce(np.abs(nz))))
        if g > 1:
            numer = numer // g
            denom //= g
        self.numer = _fits(numer)
        self.denom = denom

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        fr = [[Fraction(x) for x in row] for row in rows]
        if not fr:
            return cls(np.zeros((0, 0), dtype=np.int64))
        den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for row in fr for x in row), 1)
        numer = np.array([[x.numerator * (den // x.denominator) for x in row] for row in fr], dtype=object)
        return cls(numer, den)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        return cls(np.ones((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        return cls(np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    # shape / access -----------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.numer.shape

    @property
    def rows(self) -> int:
        return self.numer.shape[0]

    @property
    def cols(self) -> int:
        return self.numer.shape[1]

    def __getitem__(self, idx) -> Fraction:
        i, j = idx
        return Fraction(int(self.numer[i, j]), self.denom)

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.denom) for x in row] for row in self.numer]

    def is_integral(self) -> bool:
        return self.denom == 1

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and bool(np.array_equal(self.numer, self.numer.T))

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.numer.T.copy(), self.denom)

    T = property(transpose)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "RationalMatrix":
        if isinstance(other, RationalMatrix):
            return other
        raise TypeError(f"cannot combine RationalMatrix with {type(other).__name__}")

    def __add__(self, other) -> "RationalMatrix":
        other = self._coerce(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        d = self.denom * other.denom // gcd(self.denom, other.denom)
        a = self.numer.astype(object) * (d // self.denom)
        b = other.numer.astype(object) * (d // other.denom)
        return RationalMatrix(a + b, d)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(-self.numer, self.denom)

    def __sub__(self, other) -> "RationalMatrix":
        return self + (-self._coerce(other))

    def scale(self, c) -> "RationalMatrix":
        c = Fraction(c)
        return RationalMatrix(self.numer.astype(object) * c.numerator, self.denom * c.denominator)

    def __rmul__(self, c) -> "RationalMatrix":
        return self.scale(c)

    def __mul__(self, c) -> "RationalMatrix":
        if isinstance(c, RationalMatrix):
            raise TypeError("use @ for matrix products")
        return self.scale(c)

    def __matmul__(self, other) -> "RationalMatrix":
        return rmat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.denom == other.denom
                and bool(np.array_equal(self.numer, other.numer)))

    def __hash__(self):
        return hash((self.shape, self.denom, self.numer.tobytes() if self.numer.dtype != object
                     else tuple(map(int, self.numer.ravel()))))

    def is_zero(self) -> bool:
        return not np.any(self.numer)

    def mul_vector(self, v: Sequence) -> list[Fraction]:
        """Exact product with a column vector of integers or rationals."""
        col = RationalMatrix.from_rows([[x] for x in v])
        out = rmat_mul(self, col)
        return [out[i, 0] for i in range(out.rows)]

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols}, denom={self.denom})"


def rmat_mul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    na, nb = a.numer, b.numer
    bound = _maxabs(na) * _maxabs(nb) * max(a.cols, 1)
    if na.dtype != object and nb.dtype != object and bound < _INT64_SAFE:
        prod = na @ nb
    else:
        prod = na.astype(object) @ nb.astype(object)
    return RationalMatrix(prod, a.denom * b.denom)


def _bareiss_solve(m: list[list[int]], n: int, extra: int) -> tuple[int, list[list[int]]]:
    """Fraction-free elimination on an n x (n+extra) integer system ``[A | B]``.

    Returns ``(d, Y)`` with ``A @ Y == d * B``; ``d`` is the determinant of
    the row-permuted matrix, so ``Y / d`` is the solution.
    """
    prev = 1
    width = n + extra
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
        mk = m[k]
        pk = mk[k]
        for i in range(k + 1, n):
            mi = m[i]
            f = mi[k]
            m[i] = [(pk * mi[j] - f * mk[j]) // prev for j in range(width)]
        prev = pk
    d = m[n - 1][n - 1]
    # d * solution is integral (Cramer), so every division below is exact
    sol = [[0] * extra for _ in range(n)]
    for c in range(extra):
        for i in range(n - 1, -1, -1):
            acc = m[i][n + c] * d
            for j in range(i + 1, n):
                acc -= m[i][j] * sol[j][c]
            q, r = divmod(acc, m[i][i])
            if r:
                raise ArithmeticError("fraction-free back substitution lost exactness")
            sol[i][c] = q
    return d, sol


def rmat_inverse(a: RationalMatrix) -> RationalMatrix:
    """Exact inverse by fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise ValueError("matrix is not square")
    n = a.rows
    if n == 0:
        return RationalMatrix(np.zeros((0, 0), dtype=np.int64))
    rows = [[int(x) for x in row] + [1 if i == j else 0 for j in range(n)]
            for i, row in enumerate(a.numer)]
    det, sol = _bareiss_solve(rows, n, n)
    # (numer/denom)^{-1} = denom * numer^{-1} = denom * sol / det
    return RationalMatrix(np.array(sol, dtype=object) * a.denom, det)


def rmat_solve(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Exact solution X of a @ X = b."""
    if a.rows != a.cols or b.rows != a.rows:
        raise ValueError("dimension mismatch")
    n, extra = a.rows, b.cols
    # a = An/ad, b = Bn/bd  =>  X = ad/bd * An^{-1} Bn
    rows = [[int(x) for x in ra] + [int(y) for y in rb] for ra, rb in zip(a.numer, b.numer)]
    det, sol = _bareiss_solve(rows, n, extra)
    return RationalMatrix(np.array(sol, dtype=object) * a.denom, det * b.denom)


def gf_nullspace(F: FiniteField, rows: Sequence[Sequence[int]], length: int) -> list[tuple[int, ...]]:
    """Basis of {x : r.x = 0 for every row r}."""
    span = GFSpan(F, rows, length)
    free = [c for c in range(length) if c not in span.pivots]
    out = []
    for f in free:
        x = [0] * length
        x[f] = 1
        for b, piv in zip(span.basis, span.pivots):
            x[piv] = F.neg[b[f]]
        out.append(tuple(x))
    return out
