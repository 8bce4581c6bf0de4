from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intriguing.exactmath import (SUPPORTED_ORDERS, FieldError, GFSpan, RationalMatrix,
                                  SingularMatrixError, field_make, gf_nullspace, gf_solve,
                                  normalize_projective, rmat_inverse, rmat_mul, rmat_solve)


# ---------------------------------------------------------------------------
# independent field oracles
# ---------------------------------------------------------------------------

def _carryless_mod(a: int, b: int, modulus: int, degree: int) -> int:
    """Multiply bit-polynomials over GF(2) and reduce by ``modulus``."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> degree & 1:
            a ^= modulus
    return r


def _oracle_mul(q: int, a: int, b: int) -> int:
    if q in (2, 3, 5, 7):
        return a * b % q
    if q == 4:
        return _carryless_mod(a, b, 0b111, 2)
    if q == 8:
        return _carryless_mod(a, b, 0b1011, 3)
    # q = 9: a0 + a1 i with i^2 = -1 over GF(3)
    a0, a1, b0, b1 = a % 3, a // 3, b % 3, b // 3
    return (a0 * b0 - a1 * b1) % 3 + 3 * ((a0 * b1 + a1 * b0) % 3)


def _oracle_add(q: int, a: int, b: int) -> int:
    if q in (2, 3, 5, 7):
        return (a + b) % q
    if q in (4, 8):
        return a ^ b
    return (a % 3 + b % 3) % 3 + 3 * ((a // 3 + b // 3) % 3)


@pytest.mark.parametrize("q", SUPPORTED_ORDERS)
def test_field_tables_match_oracle(q):
    F = field_make(q)
    for a, b in product(range(q), repeat=2):
        assert F.add[a][b] == _oracle_add(q, a, b)
        assert F.mul[a][b] == _oracle_mul(q, a, b)


@pytest.mark.parametrize("q", SUPPORTED_ORDERS)
def test_field_axioms_exhaustive(q):
    F = field_make(q)
    E = range(q)
    for a in E:
        assert F.add[a][0] == a and F.mul[a][1] == a
        assert F.add[a][F.neg[a]] == 0
        if a:
            assert F.mul[a][F.inv[a]] == 1
        for b in E:
            assert F.add[a][b] == F.add[b][a]
            assert F.mul[a][b] == F.mul[b][a]
            for c in E:
                assert F.add[F.add[a][b]][c] == F.add[a][F.add[b][c]]
                assert F.mul[F.mul[a][b]][c] == F.mul[a][F.mul[b][c]]
                assert F.mul[a][F.add[b][c]] == F.add[F.mul[a][b]][F.mul[a][c]]
    # no zero divisors
    assert all(F.mul[a][b] for a in range(1, q) for b in range(1, q))


def test_gf4_generator_squares_to_x_plus_one():
    F = field_make(4)
    x = F.x
    assert F.mul[x][x] == F.add[x][1]


def test_prime_field_is_integers_mod_3():
    F = field_make(3)
    assert [F.mul[2][b] for b in range(3)] == [0, 2, 1]
    with pytest.raises(FieldError):
        F.x


@pytest.mark.parametrize("q", [6, 10, 1, 0, 16])
def test_unsupported_orders(q):
    with pytest.raises(FieldError):
        field_make(q)


def test_normalize_projective():
    F = field_make(3)
    assert normalize_projective(F, (0, 2, 1)) == (0, 1, 2)
    with pytest.raises(ValueError):
        normalize_projective(F, (0, 0, 0))


# ---------------------------------------------------------------------------
# spans
# ---------------------------------------------------------------------------

def test_gf_solve_full_rank():
    F = field_make(3)
    span = gf_solve(F, [(1, 0), (0, 1)])
    assert span.rank == 2
    assert all(v in span for v in product(range(3), repeat=2))


def test_gf_solve_scalar_multiples():
    F = field_make(3)
    span = gf_solve(F, [(1, 1, 0), (2, 2, 0)])
    assert span.rank == 1
    assert (2, 2, 0) in span and (1, 0, 0) not in span
    assert len(list(span.vectors())) == 3


def test_two_concurrent_lines_plus_point_span_a_3space(q53):
    P = 0
    l1, l2 = q53.point_lines[P][:2]
    X = next(x for x in range(q53.n_points) if not q53.perp(P) >> x & 1)
    pts = {P, *q53.lines[l1], *q53.lines[l2], X}
    span = GFSpan(field_make(3), [q53.coords[i] for i in pts])
    assert span.rank == 4


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 5]), st.integers(1, 5), st.integers(2, 5), st.data())
def test_span_membership_matches_brute_force(q, k, n, data):
    F = field_make(q)
    rows = [tuple(data.draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n))) for _ in range(k)]
    span = GFSpan(F, rows, n)
    # brute-force: all linear combinations
    combos = set()
    for coeffs in product(range(q), repeat=k):
        v = (0,) * n
        for c, r in zip(coeffs, rows):
            v = F.vadd(v, F.scale(c, r))
        combos.add(v)
    assert len(combos) == q ** span.rank
    assert set(span.vectors()) == combos
    for v in product(range(q), repeat=n):
        assert (v in span) == (v in combos)


def test_nullspace_is_orthogonal():
    F = field_make(5)
    rows = [(1, 2, 3, 4), (0, 1, 1, 1)]
    null = gf_nullspace(F, rows, 4)
    assert len(null) == 2
    for x in null:
        assert all(F.dot(r, x) == 0 for r in rows)


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------

def _frac_inverse(rows):
    """Plain Gauss-Jordan over Fraction; the inversion oracle."""
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        pv = m[c][c]
        m[c] = [x / pv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


small_ints = st.integers(-6, 6)


@st.composite
def square_fraction_matrices(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    den = draw(st.integers(1, 4))
    return [[Fraction(draw(small_ints), den) for _ in range(n)] for _ in range(n)]


@settings(max_examples=150, deadline=None)
@given(square_fraction_matrices())
def test_inverse_agrees_with_fraction_oracle(rows):
    expected = _frac_inverse(rows)
    A = RationalMatrix.from_rows(rows)
    if expected is None:
        with pytest.raises(SingularMatrixError):
            rmat_inverse(A)
        return
    inv = rmat_inverse(A)
    assert inv.to_fractions() == expected
    n = len(rows)
    assert rmat_mul(A, inv) == RationalMatrix.identity(n)
    assert rmat_mul(inv, A) == RationalMatrix.identity(n)


@settings(max_examples=80, deadline=None)
@given(square_fraction_matrices(4), st.data())
def test_solve_satisfies_system(rows, data):
    n = len(rows)
    if _frac_inverse(rows) is None:
        return
    b = [[Fraction(data.draw(small_ints), 3)] for _ in range(n)]
    A, B = RationalMatrix.from_rows(rows), RationalMatrix.from_rows(b)
    X = rmat_solve(A, B)
    assert A @ X == B


@settings(max_examples=80, deadline=None)
@given(square_fraction_matrices(4), square_fraction_matrices(4))
def test_product_matches_fraction_arithmetic(a, b):
    if len(a) != len(b):
        return
    n = len(a)
    expect = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    got = rmat_mul(RationalMatrix.from_rows(a), RationalMatrix.from_rows(b))
    assert got.to_fractions() == expect


def test_identity_and_ones():
    A = RationalMatrix.from_rows([[1, Fraction(1, 2)], [3, 4]])
    assert RationalMatrix.identity(2) @ A == A
    J = RationalMatrix.ones(10)
    assert J @ J == J.scale(10)


def test_inverse_of_two_identity():
    inv = rmat_inverse(RationalMatrix.identity(3).scale(2))
    assert inv == RationalMatrix.identity(3).scale(Fraction(1, 2))
    assert inv[0, 0] == Fraction(1, 2)


def test_singular_inputs():
    with pytest.raises(SingularMatrixError):
        rmat_inverse(RationalMatrix.ones(2))
    with pytest.raises(ValueError):
        rmat_inverse(RationalMatrix.ones(2, 3))


def test_normalisation_and_equality():
    a = RationalMatrix(np.array([[2, 4], [6, 8]]), 4)
    assert a.denom == 2 and a.numer.tolist() == [[1, 2], [3, 4]]
    assert a == RationalMatrix.from_rows([[Fraction(1, 2), 1], [Fraction(3, 2), 2]])
    assert RationalMatrix(np.array([[1]]), -2)[0, 0] == Fraction(-1, 2)


def test_large_entries_promote_to_exact_objects():
    big = 2 ** 40
    A = RationalMatrix(np.array([[big, 1], [0, big]], dtype=object))
    P = A @ A
    assert P[0, 0] == big * big and P[0, 1] == 2 * big
