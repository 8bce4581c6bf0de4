"""Enumeration and verification of intriguing sets of strongly regular graphs.

A set S is intriguing with parameters (h1, h2) when every vertex of S has
h1 neighbours in S and every other vertex has h2.  The search below treats
this as an equitable 2-partition problem over bitsets: vertices are
decided in or out, and inside/outside degree bounds are propagated to a
fixpoint before branching.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySetError, FullSetError, InvariantViolation
from .graphcore import (
    Graph,
    Permutation,
    SrgParams,
    as_mask,
    bits_of,
    minimal_idempotents,
    orbit,
    set_key,
    srg_params,
)

log = logging.getLogger(__name__)

POSITIVE, NEGATIVE = "positive", "negative"
IRRATIONAL_REASON = "h1-h2 must be an integer eigenvalue"


@dataclass(frozen=True, order=True)
class IntrigueCertificate:
    sign: str
    h1: int
    h2: int
    size: int

    def check(self, p: SrgParams) -> None:
        """Assert the eigenvalue and size relations against host parameters."""
        e = self.h1 - self.h2
        want = p.e_plus if self.sign == POSITIVE else p.e_minus
        if e != want:
            raise InvariantViolation(f"h1-h2={e} is not the {self.sign} eigenvalue {want}")
        if self.size * (p.k - e) != self.h2 * p.v:
            raise InvariantViolation(f"size {self.size} violates |I| = h2 v/(k-h1+h2)")
        if not (0 <= self.h1 <= p.k and 1 <= self.h2 <= p.k):
            raise InvariantViolation(f"intersection numbers out of range: {self}")


@dataclass(frozen=True, order=True)
class FeasibleRow:
    sign: str
    h1: int
    h2: int
    size: int


def feasible_params(p: SrgParams) -> list[FeasibleRow]:
    """All (sign, h1, h2, N) allowed by the eigenvalue and size relations."""
    if not p.rational:
        return []
    rows = []
    for sign, e in ((POSITIVE, p.e_plus), (NEGATIVE, p.e_minus)):
        if e == p.k:
            continue
        for h2 in range(1, p.k + 1):
            h1 = h2 + e
            if not 0 <= h1 <= p.k:
                continue
            num = h2 * p.v
            if num % (p.k - e):
                continue
            size = num // (p.k - e)
            if 1 <= size <= p.v - 1:
                rows.append(FeasibleRow(sign, h1, h2, size))
    return rows


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _idempotents(g: Graph):
    p = srg_params(g)
    _, E1, E2 = minimal_idempotents(g, p)
    return p, E1, E2


def annihilating_idempotent(g: Graph, s) -> int | None:
    """Index j in {1, 2} with E_j chi_S = 0, or None."""
    p, E1, E2 = _idempotents(g)
    m = as_mask(s)
    chi = np.array([m >> i & 1 for i in range(g.n)], dtype=np.int64)
    hits = [j for j, E in ((1, E1), (2, E2)) if not np.any(E.numer @ chi)]
    if len(hits) > 1:
        raise InvariantViolation("characteristic vector annihilated by both idempotents")
    return hits[0] if hits else None


def _degree_certificate(g: Graph, m: int, p: SrgParams) -> IntrigueCertificate | None:
    h1 = h2 = None
    for x, row in enumerate(g.adj):
        d = (row & m).bit_count()
        if m >> x & 1:
            if h1 is None:
                h1 = d
            elif d != h1:
                return None
        else:
            if h2 is None:
                h2 = d
            elif d != h2:
                return None
    e = h1 - h2
    if e == p.e_plus:
        sign = POSITIVE
    elif e == p.e_minus:
        sign = NEGATIVE
    else:
        raise InvariantViolation(f"equitable set with h1-h2={e}, not an eigenvalue of {p.as_tuple}")
    return IntrigueCertificate(sign, h1, h2, m.bit_count())


def verify(g: Graph, s, params: SrgParams | None = None, cross_check: bool = True
           ) -> IntrigueCertificate | None:
    """Certificate for ``s`` if it is intriguing in ``g``, else None."""
    m = as_mask(s)
    if m == 0:
        raise EmptySetError("empty vertex set")
    if m == g.full_mask:
        raise FullSetError("the full vertex set is never intriguing")
    p = params or srg_params(g)
    if not p.rational:
        return None
    cert = _degree_certificate(g, m, p)
    if cert is not None:
        cert.check(p)
    if cross_check:
        j = annihilating_idempotent(g, m)
        expected = None if cert is None else (2 if cert.sign == POSITIVE else 1)
        if j != expected:
            raise InvariantViolation(f"degree test ({cert}) disagrees with idempotent test (E{j})")
    return cert


# ---------------------------------------------------------------------------
# closure under difference, union and complement
# ---------------------------------------------------------------------------

class ClosureError(ValueError):
    pass


def closure(g: Graph, a, b=None, op: str = "complement") -> tuple[int, IntrigueCertificate]:
    """Derive a new intriguing set and its certificate by the closure rules.

    ``op`` is ``"difference"`` (b minus a, a inside b), ``"union"`` (a, b
    disjoint) or ``"complement"`` (of a).  The predicted certificate is
    re-verified against the graph.
    """
    p = srg_params(g)
    ma = as_mask(a)
    ca = verify(g, ma, p)
    if ca is None:
        raise ClosureError("first set is not intriguing")
    if op == "complement":
        new = g.full_mask & ~ma
        pred = (p.k - ca.h2, p.k - ca.h1)
        sign = ca.sign
    else:
        mb = as_mask(b)
        cb = verify(g, mb, p)
        if cb is None:
            raise ClosureError("second set is not intriguing")
        if ca.sign != cb.sign:
            raise ClosureError(f"sign mismatch: {ca.sign} vs {cb.sign}")
        sign = ca.sign
        if op == "difference":
            if ma & ~mb:
                raise ClosureError("first set is not contained in the second")
            new = mb & ~ma
            pred = (cb.h1 - ca.h2, cb.h2 - ca.h2)
        elif op == "union":
            if ma & mb:
                raise ClosureError("sets are not disjoint")
            new = ma | mb
            pred = (ca.h1 + cb.h2, ca.h2 + cb.h2)
        else:
            raise ValueError(f"unknown closure op {op!r}")
    cert = verify(g, new, p)
    if cert is None or (cert.h1, cert.h2) != pred or cert.sign != sign:
        raise InvariantViolation(f"{op}: predicted {sign} {pred}, measured {cert}")
    return new, cert


def intersection_check(g: Graph, plus, minus) -> int:
    """|I+ & I-|, asserting it equals |I+||I-|/v."""
    p = srg_params(g)
    mp, mm = as_mask(plus), as_mask(minus)
    cp, cm = verify(g, mp, p), verify(g, mm, p)
    if cp is None or cm is None or cp.sign != POSITIVE or cm.sign != NEGATIVE:
        raise ValueError("need one positive and one negative intriguing set")
    meet = (mp & mm).bit_count()
    if meet * p.v != cp.size * cm.size:
        raise InvariantViolation(f"|I+ & I-| = {meet} but |I+||I-|/v = {cp.size * cm.size}/{p.v}")
    return meet


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

@dataclass
class SearchTask:
    """One subtree of the search: decided-in and decided-out bitsets.

    Inside-degree counters are recomputed from the bitsets by popcount, so
    they always equal |N(x) & decided_in|.
    """

    adj: tuple[int, ...]
    h1: int
    h2: int
    size: int
    decided_in: int = 0
    decided_out: int = 0


class _Dead(Exception):
    pass


def _propagate(adj, full, h1, h2, size, inn, out):
    """Fixpoint of the forcing rules; raises _Dead on contradiction."""
    while True:
        und = full & ~(inn | out)
        nin = inn.bit_count()
        nund = und.bit_count()
        if nin > size or nin + nund < size:
            raise _Dead
        if und and nin == size:
            out |= und
            continue
        if und and nin + nund == size:
            inn |= und
            continue
        add_in = add_out = 0
        for x in bits_of(inn):
            row = adj[x]
            d = (row & inn).bit_count()
            u = row & und
            du = u.bit_count()
            if d > h1 or d + du < h1:
                raise _Dead
            if du:
                if d == h1:
                    add_out |= u
                elif d + du == h1:
                    add_in |= u
        for x in bits_of(out):
            row = adj[x]
            d = (row & inn).bit_count()
            u = row & und
            du = u.bit_count()
            if d > h2 or d + du < h2:
                raise _Dead
            if du:
                if d == h2:
                    add_out |= u
                elif d + du == h2:
                    add_in |= u
        for x in bits_of(und):
            d = (adj[x] & inn).bit_count()
            if d > h1:
                if d > h2:
                    raise _Dead
                add_out |= 1 << x
            elif d > h2:
                add_in |= 1 << x
        if add_in & add_out:
            raise _Dead
        if not (add_in or add_out):
            return inn, out
        inn |= add_in
        out |= add_out


def _choose(adj, h1, h2, inn, out, und) -> int:
    """Branch vertex: neighbour of the most constrained deficient vertex."""
    best, best_u = None, None
    for x in bits_of(inn):
        row = adj[x]
        if (row & inn).bit_count() < h1:
            u = row & und
            c = u.bit_count()
            if best_u is None or c < best_u:
                best, best_u = u, c
    if best is None:
        for x in bits_of(out):
            row = adj[x]
            if (row & inn).bit_count() < h2:
                u = row & und
                c = u.bit_count()
                if best_u is None or c < best_u:
                    best, best_u = u, c
    if best is None:
        best = und
    return (best & -best).bit_length() - 1


class _Runner:
    def __init__(self, task: SearchTask, budget: int | None, first_only: bool):
        self.t = task
        self.full = (1 << len(task.adj)) - 1
        self.budget = budget
        self.first_only = first_only
        self.nodes = 0
        self.found: list[int] = []
        self.exhausted_budget = False

    def run(self) -> "_Runner":
        self._rec(self.t.decided_in, self.t.decided_out)
        return self

    def _rec(self, inn: int, out: int) -> bool:
        """Returns True to stop the whole search."""
        t = self.t
        if self.budget is not None and self.nodes >= self.budget:
            self.exhausted_budget = True
            return True
        self.nodes += 1
        try:
            inn, out = _propagate(t.adj, self.full, t.h1, t.h2, t.size, inn, out)
        except _Dead:
            return False
        und = self.full & ~(inn | out)
        if not und:
            self.found.append(inn)
            return self.first_only
        v = _choose(t.adj, t.h1, t.h2, inn, out, und)
        bit = 1 << v
        if self._rec(inn | bit, out):
            return True
        return self._rec(inn, out | bit)


def _run_task(args):
    task, budget, first_only = args
    r = _Runner(task, budget, first_only).run()
    return r.found, r.nodes, r.exhausted_budget


def _split(task: SearchTask, depth: int) -> list[SearchTask]:
    """Expand the top ``depth`` binary branches into independent subtasks.

    Splitting depends only on the task, never on the worker count, so
    merged output is identical for any number of workers.
    """
    full = (1 << len(task.adj)) - 1
    frontier = [(task.decided_in, task.decided_out)]
    for _ in range(depth):
        nxt = []
        for inn, out in frontier:
            try:
                inn, out = _propagate(task.adj, full, task.h1, task.h2, task.size, inn, out)
            except _Dead:
                continue
            und = full & ~(inn | out)
            if not und:
                nxt.append((inn, out))
                continue
            v = _choose(task.adj, task.h1, task.h2, inn, out, und)
            nxt.append((inn | 1 << v, out))
            nxt.append((inn, out | 1 << v))
        frontier = nxt
    return [SearchTask(task.adj, task.h1, task.h2, task.size, i, o) for i, o in frontier]


@dataclass
class EnumerationResult:
    sets: list[tuple[int, ...]]
    certificates: list[IntrigueCertificate]
    exhaustive: bool
    rows: list[FeasibleRow]
    nodes: int = 0
    reason: str = ""
    params: SrgParams | None = None
    per_row: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sets)


SPLIT_DEPTH = 4


def search_row(g: Graph, row: FeasibleRow, *, first_only: bool = False, budget: int | None = None,
               threads: int = 1, fixed_in: int = 0, fixed_out: int = 0) -> tuple[list[int], int, bool]:
    """All sets with parameters ``row``; returns (masks, nodes, exhaustive)."""
    root = SearchTask(g.adj, row.h1, row.h2, row.size, fixed_in, fixed_out)
    tasks = _split(root, SPLIT_DEPTH)
    if not tasks:
        return [], 1, True
    share = None if budget is None else max(1, budget // len(tasks))
    args = [(t, share, first_only) for t in tasks]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            outs = list(ex.map(_run_task, args))
    else:
        outs = []
        for a in args:
            outs.append(_run_task(a))
            if first_only and outs[-1][0]:
                break
    found, nodes, exhaustive = [], 0, True
    for f, n, ex_budget in outs:
        nodes += n
        exhaustive &= not ex_budget
        found.extend(f)
        if first_only and f:
            break
    return found, nodes, exhaustive


def enumerate_intriguing(g: Graph, sign: str = "any", *, size_cap: int | None = None,
                         first_only: bool = False, group: Sequence[Permutation] | None = None,
                         budget: int | None = None, threads: int = 1,
                         rows: Iterable[FeasibleRow] | None = None) -> EnumerationResult:
    """Every intriguing set of ``g`` of the given sign, sorted lexicographically.

    With ``group`` the output keeps one representative (the lexicographically
    least member) per orbit.  ``budget`` caps search nodes per feasible row;
    if it runs out the result is flagged non-exhaustive.
    """
    p = srg_params(g)
    if not p.rational:
        return EnumerationResult([], [], True, [], reason=IRRATIONAL_REASON, params=p)
    if rows is None:
        rows = [r for r in feasible_params(p)
                if sign in ("any", r.sign) and (size_cap is None or r.size <= size_cap)]
    rows = sorted(rows, key=lambda r: (r.size, r.sign, r.h1))
    masks: list[int] = []
    nodes, exhaustive = 0, True
    per_row = {}
    for r in rows:
        found, n, ex = search_row(g, r, first_only=first_only, budget=budget, threads=threads)
        log.debug("row %s: %d sets, %d nodes", r, len(found), n)
        per_row[r] = len(found)
        nodes += n
        exhaustive &= ex
        masks.extend(found)
    if group:
        keys = orbit(masks, group, g)
    else:
        keys = sorted(set_key(m) for m in masks)
    if first_only and keys:
        keys = keys[:1]
    certs = [verify(g, k, p) for k in keys]
    for c in certs:
        if c is None:
            raise InvariantViolation("search returned a non-intriguing set")
    return EnumerationResult(keys, certs, exhaustive, list(rows), nodes, "", p, per_row)
