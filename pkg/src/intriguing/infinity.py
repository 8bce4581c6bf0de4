"""Intriguing sets at infinity: block matrices, parameter tables, completion.

A partial quadrangle is obtained from an ambient generalised quadrangle by
deleting a point set called infinity (a perp P-perp, or a hemisystem).  An
ambient set I is intriguing at infinity when y-perp meets I & infinity in a
constant a1 for y in I and a constant a2 for y outside I (both away from
infinity); then I minus infinity is intriguing with (h1 - a1, h2 - a2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvariantViolation
from .exactmath import RationalMatrix, rmat_inverse
from .geometry import (
    GeometryError,
    IncidenceGeometry,
    _require_gq_s_s2,
    collinearity_graph,
    from_pq,
    is_hemisystem,
    iter_hemisystems,
    minus_perp,
)
from .graphcore import Graph, SrgParams, VertexSet, as_mask, bits_of, mask_of, srg_params
from .intrigue import NEGATIVE, IntrigueCertificate, verify


class NotIntriguingError(ValueError):
    pass


class NonIntegralPrediction(ValueError):
    """A table entry is not an integer, so the scenario cannot occur."""


class ImpossibleCase(ValueError):
    pass


class SizeMismatchError(ValueError):
    pass


@lru_cache(maxsize=8)
def _ambient_graph(geo: IncidenceGeometry) -> Graph:
    return collinearity_graph(geo)


@lru_cache(maxsize=8)
def _ambient_params(geo: IncidenceGeometry) -> SrgParams:
    return srg_params(_ambient_graph(geo))


@lru_cache(maxsize=64)
def _sub_graph(geo: IncidenceGeometry, inf: int) -> tuple[Graph, list[int], SrgParams]:
    keep = [x for x in range(geo.n_points) if not inf >> x & 1]
    g = _ambient_graph(geo).induced(keep, f"{geo.name} minus infinity")
    return g, keep, srg_params(g)


def _local(keep: Sequence[int], ambient_mask: int) -> int:
    return mask_of(i for i, x in enumerate(keep) if ambient_mask >> x & 1)


# ---------------------------------------------------------------------------
# block decomposition
# ---------------------------------------------------------------------------

@dataclass
class BlockDecomposition:
    """A = [[B, C], [C^T, D]] with the infinity points last (P very last)."""

    order: list[int]
    n_pq: int
    B: RationalMatrix
    C: RationalMatrix
    D: RationalMatrix
    S: np.ndarray                 # n x n_pq selection of the finite points

    def reassemble(self) -> np.ndarray:
        top = np.hstack([self.B.numer, self.C.numer])
        bottom = np.hstack([self.C.numer.T, self.D.numer])
        return np.vstack([top, bottom])

    def check(self, A: np.ndarray) -> None:
        """Reassembly, symmetry, S^T S = I and S^T A S = B, with A in ambient order."""
        perm = np.array(self.order)
        R = self.reassemble()
        if not np.array_equal(R, A[np.ix_(perm, perm)]) or not np.array_equal(R, R.T):
            raise InvariantViolation("block decomposition does not reassemble A")
        if not np.array_equal(self.S.T @ self.S, np.eye(self.n_pq, dtype=np.int64)):
            raise InvariantViolation("S^T S is not the identity")
        if not np.array_equal(self.S.T @ A @ self.S, self.B.numer):
            raise InvariantViolation("S^T A S differs from B")


def block_decomposition(geo: IncidenceGeometry, inf, P: int | None = None) -> BlockDecomposition:
    m = as_mask(inf)
    finite = [x for x in range(geo.n_points) if not m >> x & 1]
    tail = [x for x in bits_of(m) if x != P]
    if P is not None:
        if not m >> P & 1:
            raise GeometryError(f"P={P} is not in the infinity set")
        tail.append(P)
    order = finite + tail
    A = _ambient_graph(geo).adjacency_array()
    R = A[np.ix_(order, order)]
    k = len(finite)
    S = np.zeros((geo.n_points, k), dtype=np.int64)
    for i, x in enumerate(finite):
        S[x, i] = 1
    return BlockDecomposition(order, k, RationalMatrix(R[:k, :k]), RationalMatrix(R[:k, k:]),
                              RationalMatrix(R[k:, k:]), S)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass
class InfinityAnalysis:
    a1: int | None
    a2: int | None
    inside: int                   # |I & infinity|
    outside: int                  # |I minus infinity|
    witnesses1: tuple[int, int] | None = None
    witnesses2: tuple[int, int] | None = None

    @property
    def constant(self) -> bool:
        return self.a1 is not None and self.a2 is not None

    def describe(self) -> str:
        if self.constant:
            return f"a1={self.a1} a2={self.a2} inf={self.inside} rest={self.outside}"
        parts = []
        if self.witnesses1:
            parts.append(f"a1 varies at points {self.witnesses1}")
        if self.witnesses2:
            parts.append(f"a2 varies at points {self.witnesses2}")
        return "non-constant: " + "; ".join(parts)


def infinity_profile(geo: IncidenceGeometry, inf, I) -> InfinityAnalysis:
    """Constants |y-perp & I & infinity| for y in I and y outside I, away from infinity.

    A side with no points at all reports None with no witnesses.
    """
    m_inf, m_i = as_mask(inf), as_mask(I)
    target = m_inf & m_i
    vals = {True: {}, False: {}}
    for y in range(geo.n_points):
        if m_inf >> y & 1:
            continue
        c = (geo.collinear[y] & target).bit_count()
        vals[bool(m_i >> y & 1)].setdefault(c, y)

    def const(d):
        if len(d) == 1:
            return next(iter(d)), None
        if not d:
            return None, None
        ks = sorted(d)
        return None, (d[ks[0]], d[ks[1]])

    a1, w1 = const(vals[True])
    a2, w2 = const(vals[False])
    return InfinityAnalysis(a1, a2, target.bit_count(), (m_i & ~m_inf).bit_count(), w1, w2)


@dataclass
class AtInfinityVerdict:
    profile: InfinityAnalysis
    ambient: IntrigueCertificate
    restricted: IntrigueCertificate | None
    degenerate: bool = False

    def describe(self) -> str:
        r = "degenerate" if self.degenerate else (
            f"{self.restricted.sign} h1={self.restricted.h1} h2={self.restricted.h2}"
            if self.restricted else "not intriguing")
        a = self.ambient
        return f"ambient {a.sign} h1={a.h1} h2={a.h2} | {self.profile.describe()} | restriction {r}"


def check_atinfinity(geo: IncidenceGeometry, inf, I) -> AtInfinityVerdict:
    """Both sides of the at-infinity equivalence; InvariantViolation if they disagree."""
    m_inf, m_i = as_mask(inf), as_mask(I)
    amb = verify(_ambient_graph(geo), m_i, _ambient_params(geo))
    if amb is None:
        raise NotIntriguingError("the set is not intriguing in the ambient geometry")
    prof = infinity_profile(geo, m_inf, m_i)
    g, keep, p = _sub_graph(geo, m_inf)
    local = _local(keep, m_i)
    if local == 0 or local == g.full_mask:
        return AtInfinityVerdict(prof, amb, None, degenerate=True)
    res = verify(g, local, p)
    if (res is not None) != prof.constant:
        raise InvariantViolation(f"restriction {res} but profile {prof.describe()}")
    if res is not None and (res.h1, res.h2) != (amb.h1 - prof.a1, amb.h2 - prof.a2):
        raise InvariantViolation(f"restriction {res} is not (h1-a1, h2-a2) for {prof.describe()}")
    return AtInfinityVerdict(prof, amb, res)


# ---------------------------------------------------------------------------
# parameter tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Prediction:
    a1: int | None
    a2: int | None
    diff: int                     # a1 - a2
    at_infinity: int | None       # |I & infinity|
    rest: int | None              # |I minus infinity|


CASES = ("neg->neg", "neg->pos", "pos->neg", "pos->pos")


def _exact(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NonIntegralPrediction(f"{what} = {x} is not an integer")
    return int(x)


def predict_infinity_params(kind: str, value: int, s: int, scenario: str = "minus_perp", *,
                            p_in_set: bool = False, case: str | None = None,
                            a2: int | None = None) -> Prediction:
    """Table values for an m-ovoid (kind "m_ovoid") or i-tight set (kind "tight").

    ``scenario`` is "minus_perp" (infinity = P-perp) or "hemisystem"
    (infinity = a hemisystem, with ``case`` one of CASES).  In the
    hemisystem table the size of I minus infinity depends on a2 for m-ovoids;
    pass the measured a2 to get it.
    """
    F = Fraction
    if scenario == "minus_perp":
        if kind == "m_ovoid":
            m = value
            if p_in_set:
                t = (m * (s + 1) - 2 * s, m * (s + 1) - s, m * (s * s + 1) - s * s)
            else:
                t = (m * (s + 1) - s, m * (s + 1), m * (s * s + 1))
            total = m * (s ** 3 + 1)
        elif kind == "tight":
            i = value
            if p_in_set:
                x = _exact(F(i - 1, s) + 1, "(i-1)/s+1")
                t = (x, x, i + s)
            else:
                x = _exact(F(i, s), "i/s")
                t = (x, x, i)
            total = i * (s + 1)
        else:
            raise ValueError(f"unknown kind {kind!r}")
        return Prediction(t[0], t[1], t[0] - t[1], t[2], total - t[2])
    if scenario != "hemisystem":
        raise ValueError(f"unknown scenario {scenario!r}")
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    if case == "pos->pos":
        raise ImpossibleCase("a tight set never restricts to a positive set (forces 2s = 0)")
    if case in ("neg->neg", "neg->pos"):
        if kind != "m_ovoid":
            raise ValueError("negative ambient sets here are m-ovoids")
        m = value
        if case == "neg->neg":
            diff = _exact(-F(s * s + s, 2), "-(s^2+s)/2")
            rest = None if a2 is None else (m * (s * s + 1) - a2) * (s + 1)
        else:
            diff = -(s * s + s)
            rest = None if a2 is None else _exact(F((m * (s * s + 1) - a2) * (s ** 3 + 1), (s - 1) ** 2),
                                                  "|I minus H|")
        a1 = None if a2 is None else a2 + diff
        inf_count = None if rest is None else m * (s ** 3 + 1) - rest
        return Prediction(a1, a2, diff, inf_count, rest)
    # pos->neg
    if kind != "tight":
        raise ValueError("positive ambient sets here are tight sets")
    i = value
    half = _exact(F(i, 2), "i/2")
    diff = _exact(F(s * s + s, 2), "(s^2+s)/2")
    rest = _exact(F(i * (s + 1), 2), "i(s+1)/2")
    return Prediction(half + diff, half, diff, i * (s + 1) - rest, rest)


# ---------------------------------------------------------------------------
# the matrix identities behind completion
# ---------------------------------------------------------------------------

@dataclass
class IckyContext:
    geo: IncidenceGeometry
    P: int
    pq: IncidenceGeometry
    blocks: BlockDecomposition
    lam: int
    inv: RationalMatrix           # (D - lam I)^(-1)


def icky_context(geo: IncidenceGeometry, P: int) -> IckyContext:
    _require_gq_s_s2(geo)
    s = geo.s
    pq = minus_perp(geo, P, check=False)
    blocks = block_decomposition(geo, geo.perp(P), P)
    lam = -s * s - 1
    n = blocks.D.rows
    shifted = RationalMatrix(blocks.D.numer - lam * np.eye(n, dtype=np.int64))
    return IckyContext(geo, P, pq, blocks, lam, rmat_inverse(shifted))


@dataclass
class IckyReport:
    P: int
    closed_form: bool
    row_sums: bool
    cct_structure: bool
    set_checks: list[tuple[int, bool, bool]] = field(default_factory=list)  # (h2', CC^T, C inv C^T)

    @property
    def ok(self) -> bool:
        return self.closed_form and self.row_sums and self.cct_structure and all(
            a and b for _, a, b in self.set_checks)


def _mv(M: RationalMatrix, v: np.ndarray) -> list[Fraction]:
    num = M.numer @ v.astype(M.numer.dtype)
    return [Fraction(int(x), M.denom) for x in num]


def icky_identities(geo: IncidenceGeometry, P: int, sets: Sequence = (), ctx: IckyContext | None = None
                    ) -> IckyReport:
    """Check the inverse closed form, C(D-lam I)^-1 1 = 1 and the set identities.

    ``sets`` are negative intriguing sets of the minus-perp geometry, given
    in its indices.  Any failing identity raises InvariantViolation.
    """
    ctx = ctx or icky_context(geo, P)
    s = geo.s
    D = ctx.blocks.D.numer
    C = ctx.blocks.C.numer
    B = ctx.blocks.B.numer
    n = D.shape[0]
    npq = C.shape[0]
    I_, J = np.eye(n, dtype=np.int64), np.ones((n, n), dtype=np.int64)
    M = np.zeros((n, n), dtype=np.int64)
    M[-1, :-1] = 1
    E = np.zeros((n, n), dtype=np.int64)
    E[-1, -1] = 1
    rhs = ((s ** 4 + s ** 3 + s - 1) * I_ + J - (s * s + 1) * D - s * (M + M.T)
           + s * (s * s + s - 1) * E)
    scale = s ** 3 * (s * s + 1) * (s + 1)
    closed = (ctx.inv.scale(scale) == RationalMatrix(rhs))
    if not closed:
        raise InvariantViolation(f"closed form for (D - lam I)^-1 fails at P={P}")
    ones = np.ones(n, dtype=np.int64)
    Cinv = RationalMatrix(C) @ ctx.inv
    rows = _mv(Cinv, ones)
    if any(x != 1 for x in rows):
        raise InvariantViolation(f"C (D - lam I)^-1 1 is not the all-ones vector at P={P}")
    CCt = C @ C.T
    Ipq, Jpq = np.eye(npq, dtype=np.int64), np.ones((npq, npq), dtype=np.int64)
    if not np.array_equal(CCt, (s + 1) * Jpq - s * B + (s * s - s) * Ipq):
        raise InvariantViolation(f"CC^T structure fails at P={P}")
    report = IckyReport(P, True, True, True)
    pg = collinearity_graph(ctx.pq)
    CinvCt = Cinv @ RationalMatrix(C.T)
    for S_ in sets:
        m = as_mask(S_)
        cert = verify(pg, m)
        if cert is None or cert.sign != NEGATIVE:
            raise NotIntriguingError("set is not negative intriguing in the minus-perp geometry")
        chi = np.array([m >> i & 1 for i in range(npq)], dtype=np.int64)
        size = int(chi.sum())
        first = np.array_equal(CCt @ chi, s ** 3 * chi + s * size)
        second = _mv(CinvCt, chi) == [Fraction(s * int(c) + cert.h2) for c in chi]
        if not (first and second):
            raise InvariantViolation(f"set identities fail at P={P} for a set with h2'={cert.h2}")
        report.set_checks.append((cert.h2, first, second))
    return report


@dataclass
class Completion:
    hemisystem: VertexSet         # ambient
    added: VertexSet              # ambient, inside P-perp
    h2: int


def complete_to_hemisystem(geo: IncidenceGeometry, P: int, I, ctx: IckyContext | None = None) -> Completion:
    """Extend a negative set of size s^2(s^2 +- 1)/2 of the minus-perp geometry to a hemisystem.

    ``I`` is given in minus-perp indices.  The added part is the 0/1 vector
    (D - lam I)^-1 (-C^T chi_I + h2 1) with h2 = (s^2+1)(s+1)/2.
    """
    _require_gq_s_s2(geo)
    s = geo.s
    if s % 2 == 0:
        raise GeometryError("completion needs s odd")
    ctx = ctx or icky_context(geo, P)
    m = as_mask(I)
    sizes = (s * s * (s * s - 1) // 2, s * s * (s * s + 1) // 2)
    if m.bit_count() not in sizes:
        raise SizeMismatchError(f"set has {m.bit_count()} points; completion needs one of {sizes}")
    cert = verify(collinearity_graph(ctx.pq), m)
    if cert is None or cert.sign != NEGATIVE:
        raise NotIntriguingError("set is not negative intriguing in the minus-perp geometry")
    h2 = (s * s + 1) * (s + 1) // 2
    C = ctx.blocks.C.numer
    chi = np.array([m >> i & 1 for i in range(C.shape[0])], dtype=np.int64)
    rhs = -(C.T @ chi) + h2
    v = _mv(ctx.inv, rhs)
    if any(x not in (0, 1) for x in v):
        bad = next(x for x in v if x not in (0, 1))
        raise InvariantViolation(f"completion vector has entry {bad}, not 0/1")
    tail = ctx.blocks.order[ctx.blocks.n_pq:]
    added = mask_of(tail[i] for i, x in enumerate(v) if x == 1)
    full = from_pq(ctx.pq, m) | added
    if not is_hemisystem(geo, full):
        raise InvariantViolation("completed set is not a hemisystem")
    if verify(_ambient_graph(geo), full) is None:
        raise InvariantViolation("completed hemisystem is not intriguing")
    return Completion(VertexSet(full, geo.n_points, geo.name), VertexSet(added, geo.n_points, geo.name), h2)


# ---------------------------------------------------------------------------
# partial spreads at infinity
# ---------------------------------------------------------------------------

@dataclass
class SpreadVerdict:
    c: int
    intriguing_at_infinity: bool
    predicted: tuple[int, int]
    certificate: IntrigueCertificate | None = None
    halves: bool | None = None
    reasons: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.intriguing_at_infinity and not self.reasons


def partial_spread_infinity(geo: IncidenceGeometry, H, lines: Sequence[int]) -> SpreadVerdict:
    """Test the points covered by ``lines`` (indices, pairwise disjoint) at infinity H."""
    _require_gq_s_s2(geo)
    s = geo.s
    c = len(lines)
    if c % 2:
        raise ValueError("the number of lines must be even")
    masks = [geo.line_masks[l] for l in lines]
    I = 0
    for lm in masks:
        if I & lm:
            raise ValueError("lines are not pairwise disjoint")
        I |= lm
    h = as_mask(H)
    if not is_hemisystem(geo, h):
        raise GeometryError("H is not a hemisystem")
    pred = ((c - s * s + s) // 2 - 1, c // 2)
    verdict = SpreadVerdict(c, False, pred)
    if I == geo.full_mask:
        verdict.reasons.append("the lines cover every point")
        return verdict
    res = check_atinfinity(geo, h, I)
    verdict.certificate = res.restricted
    if not res.profile.constant:
        verdict.reasons.append("not intriguing at infinity: " + res.profile.describe())
        return verdict
    verdict.intriguing_at_infinity = True
    if res.restricted is None or (res.restricted.h1, res.restricted.h2) != pred \
            or res.restricted.sign != NEGATIVE:
        raise InvariantViolation(f"restriction {res.restricted}, expected negative {pred}")
    halves = all((geo.collinear[x] & I & h).bit_count() == c // 2
                 for x in range(geo.n_points) if not I >> x & 1)
    verdict.halves = halves
    if not halves:
        raise InvariantViolation("an external point does not see half its c points inside H")
    return verdict


def find_nice_partial_spreads(geo: IncidenceGeometry, H, c: int, budget: int | None = None
                              ) -> tuple[list[tuple[int, ...]], bool]:
    """Partial spreads of ``c`` lines that pass ``partial_spread_infinity``.

    Candidates come from the negative sets with the predicted parameters in
    the partial quadrangle on the complement of H: such a set must induce a
    perfect matching whose edges lie on pairwise disjoint lines.  Returns
    the sorted line tuples and whether the underlying enumeration was
    exhaustive.
    """
    from .intrigue import FeasibleRow, enumerate_intriguing

    _require_gq_s_s2(geo)
    s = geo.s
    if c % 2:
        raise ValueError("the number of lines must be even")
    h = as_mask(H)
    g, keep, _ = _sub_graph(geo, h)
    h1, h2 = (c - s * s + s) // 2 - 1, c // 2
    if h1 < 0:
        return [], True
    row = FeasibleRow(NEGATIVE, h1, h2, h2 * (s + 1))
    res = enumerate_intriguing(g, rows=[row], budget=budget)
    found = []
    for key in res.sets:
        amb = [keep[i] for i in key]
        lines = set()
        for x in amb:
            partners = [y for y in amb if geo.collinear[x] >> y & 1]
            on = {geo.line_through(x, y) for y in partners}
            if len(on) != 1:
                break
            lines |= on
        else:
            ls = tuple(sorted(lines))
            if len(ls) != c or any(geo.line_masks[a] & geo.line_masks[b]
                                   for i, a in enumerate(ls) for b in ls[i + 1:]):
                continue
            if partial_spread_infinity(geo, h, ls).ok:
                found.append(ls)
    return sorted(found), res.exhaustive


# ---------------------------------------------------------------------------
# report-only conjecture checkers
# ---------------------------------------------------------------------------

def cone_cover(geo: IncidenceGeometry, P: int, I_ambient: int) -> list[int]:
    """Points Z of P-perp minus P whose cone lies inside I, if their union is I."""
    perp = geo.perp(P)
    Zs = []
    cover = 0
    for Z in bits_of(geo.collinear[P]):
        cz = geo.perp(Z) & ~perp
        if cz & ~I_ambient == 0:
            Zs.append(Z)
            cover |= cz
    return Zs if cover == I_ambient else []


def hemisystem_through(geo: IncidenceGeometry, P: int, I_ambient: int) -> int | None:
    """A hemisystem H with H minus P-perp equal to I, or None."""
    perp = geo.perp(P)
    out = geo.full_mask & ~perp & ~I_ambient
    for h in iter_hemisystems(geo, fixed_in=I_ambient, fixed_out=out):
        return h
    return None


def negint_minusperp_report(geo: IncidenceGeometry, P: int, sets: Sequence) -> list[str]:
    """One line per negative set: cone-union, hemisystem-derived or other."""
    pq = minus_perp(geo, P, check=False)
    g = collinearity_graph(pq)
    lines = []
    for S_ in sets:
        m = as_mask(S_)
        cert = verify(g, m)
        amb = from_pq(pq, m)
        if cert is None or cert.sign != NEGATIVE:
            kind = "not-negative"
        elif cone_cover(geo, P, amb):
            kind = "cone-union"
        elif hemisystem_through(geo, P, amb) is not None:
            kind = "hemisystem"
        else:
            kind = "other"
        h = f"h1={cert.h1} h2={cert.h2}" if cert else "h1=- h2=-"
        lines.append(f"P={P} size={m.bit_count()} {h} class={kind}")
    return lines


def hemi_negint2_report(geo: IncidenceGeometry, H, others: Sequence) -> list[str]:
    """For hemisystems I, whether I minus H is negative intriguing in G minus H."""
    h = as_mask(H)
    g, keep, p = _sub_graph(geo, h)
    lines = []
    for I in others:
        m = as_mask(I)
        local = _local(keep, m)
        if local == 0 or local == g.full_mask:
            lines.append(f"size={local.bit_count()} result=degenerate")
            continue
        cert = verify(g, local, p)
        res = cert.sign if cert else "none"
        h12 = f" h1={cert.h1} h2={cert.h2}" if cert else ""
        lines.append(f"size={local.bit_count()} result={res}{h12}")
    return lines
