"""Graphs as tuples of integer bitsets, SRG parameters, idempotents, orbits."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

import numpy as np

from .exactmath import RationalMatrix


class GraphError(ValueError):
    pass


class NotRegularError(GraphError):
    pass


class NotStronglyRegularError(GraphError):
    def __init__(self, msg: str, witness: tuple[int, int] | None = None):
        super().__init__(msg)
        self.witness = witness


class IrrationalEigenvaluesError(GraphError):
    pass


class NotAutomorphismError(GraphError):
    def __init__(self, msg: str, edge: tuple[int, int]):
        super().__init__(msg)
        self.edge = edge


def bits_of(mask: int):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise GraphError("adjacency length does not match vertex count")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.adj):
            if row >> i & 1:
                raise GraphError(f"loop at vertex {i}")
            if row & ~full:
                raise GraphError(f"vertex {i} has neighbours out of range")
            for j in bits_of(row):
                if not self.adj[j] >> i & 1:
                    raise GraphError(f"adjacency not symmetric at ({i}, {j})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], label: str = "") -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), label)

    @classmethod
    def from_relation(cls, n: int, related, label: str = "") -> "Graph":
        """Build from a symmetric predicate ``related(i, j)`` on 0..n-1."""
        adj = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if related(i, j):
                    adj[i] |= 1 << j
                    adj[j] |= 1 << i
        return cls(n, tuple(adj), label)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbours(self, v: int) -> list[int]:
        return list(bits_of(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits_of(self.adj[u] >> (u + 1) << (u + 1))]

    def num_edges(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def adjacency_array(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for i, row in enumerate(self.adj):
            for j in bits_of(row):
                a[i, j] = 1
        return a

    def adjacency_matrix(self) -> RationalMatrix:
        return RationalMatrix(self.adjacency_array())

    def induced(self, vertices: Sequence[int], label: str = "") -> "Graph":
        """Induced subgraph on ``vertices``, relabelled 0..len-1 in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        adj = []
        for v in vertices:
            adj.append(mask_of(pos[u] for u in bits_of(self.adj[v]) if u in pos))
        return Graph(len(vertices), tuple(adj), label)

    def is_triangle_free(self) -> bool:
        return all(not (self.adj[u] & self.adj[v]) for u, v in self.edges())


@dataclass(frozen=True)
class VertexSet:
    bits: int
    n: int
    graph_label: str = ""

    def __post_init__(self):
        if self.bits >> self.n:
            raise GraphError("vertex set exceeds graph size")

    @classmethod
    def of(cls, g: Graph, members: Iterable[int]) -> "VertexSet":
        return cls(mask_of(members), g.n, g.label)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(bits_of(self.bits))

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self):
        return bits_of(self.bits)

    def __contains__(self, v: int) -> bool:
        return bool(self.bits >> v & 1)

    def complement(self) -> "VertexSet":
        return VertexSet(((1 << self.n) - 1) & ~self.bits, self.n, self.graph_label)


def as_mask(s) -> int:
    if isinstance(s, VertexSet):
        return s.bits
    if isinstance(s, int):
        return s
    return mask_of(s)


# ---------------------------------------------------------------------------
# strongly regular parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int
    disc: int = field(init=False)
    e_plus: int | None = field(init=False)
    e_minus: int | None = field(init=False)

    def __post_init__(self):
        v, k, lam, mu = self.v, self.k, self.lam, self.mu
        if k * (k - lam - 1) != (v - k - 1) * mu:
            raise GraphError(f"infeasible parameters {(v, k, lam, mu)}")
        disc = (lam - mu) ** 2 + 4 * (k - mu)
        object.__setattr__(self, "disc", disc)
        r = isqrt(disc)
        if r * r == disc:
            ep, em = (lam - mu + r) // 2, (lam - mu - r) // 2
            assert ep * em == mu - k and ep + em == lam - mu
        else:
            ep = em = None
        object.__setattr__(self, "e_plus", ep)
        object.__setattr__(self, "e_minus", em)

    @property
    def rational(self) -> bool:
        return self.e_plus is not None

    @property
    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.v, self.k, self.lam, self.mu)

    def multiplicities(self) -> tuple[Fraction, Fraction]:
        """Multiplicities of e+ and e- from the trace conditions."""
        if not self.rational:
            # conference graph: both (v-1)/2
            return Fraction(self.v - 1, 2), Fraction(self.v - 1, 2)
        ep, em = self.e_plus, self.e_minus
        f = Fraction(-self.k - (self.v - 1) * em, ep - em)
        return f, self.v - 1 - f

    def eigenvalues(self) -> tuple[int, int, int]:
        if not self.rational:
            raise IrrationalEigenvaluesError(f"disc={self.disc} is not a perfect square")
        return (self.k, self.e_plus, self.e_minus)


def srg_params(g: Graph) -> SrgParams:
    if g.n == 0:
        raise GraphError("empty graph")
    k = g.degree(0)
    for v in range(g.n):
        if g.degree(v) != k:
            raise NotRegularError(f"vertex {v} has degree {g.degree(v)}, vertex 0 has {k}")
    lam = mu = None
    adj = g.adj
    for u in range(g.n):
        au = adj[u]
        for w in range(u + 1, g.n):
            common = (au & adj[w]).bit_count()
            if au >> w & 1:
                if lam is None:
                    lam = common
                elif common != lam:
                    raise NotStronglyRegularError(
                        f"adjacent pair ({u}, {w}) has {common} common neighbours, expected {lam}", (u, w))
            else:
                if mu is None:
                    mu = common
                elif common != mu:
                    raise NotStronglyRegularError(
                        f"non-adjacent pair ({u}, {w}) has {common} common neighbours, expected {mu}", (u, w))
    if lam is None or mu is None:
        raise NotStronglyRegularError("complete or edgeless graph")
    return SrgParams(g.n, k, lam, mu)


def is_srg(g: Graph) -> bool:
    try:
        srg_params(g)
    except GraphError:
        return False
    return True


def minimal_idempotents(g: Graph, params: SrgParams | None = None
                        ) -> tuple[RationalMatrix, RationalMatrix, RationalMatrix]:
    p = params or srg_params(g)
    if not p.rational:
        raise IrrationalEigenvaluesError("idempotents need integer eigenvalues (conference graph)")
    n, k, ep, em = g.n, p.k, p.e_plus, p.e_minus
    A = g.adjacency_array()
    I = np.eye(n, dtype=np.int64)
    J = np.ones((n, n), dtype=np.int64)
    d = ep - em
    E0 = RationalMatrix(J, n)
    E1 = RationalMatrix(n * A - n * em * I - (k - em) * J, n * d)
    E2 = RationalMatrix(n * A - n * ep * I - (k - ep) * J, -n * d)
    return E0, E1, E2


def regularity_profile(g: Graph, s) -> tuple[Counter, Counter]:
    """Multisets of |N(x) & S| for x inside and outside S."""
    m = as_mask(s)
    if m == 0 or m == g.full_mask:
        raise GraphError("set must be nonempty and proper")
    inside, outside = Counter(), Counter()
    for x, row in enumerate(g.adj):
        d = (row & m).bit_count()
        if m >> x & 1:
            inside[d] += 1
        else:
            outside[d] += 1
    return inside, outside


# ---------------------------------------------------------------------------
# permutations and orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise GraphError("image is not a bijection on 0..n-1")

    def __len__(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def map_mask(self, mask: int) -> int:
        out = 0
        img = self.image
        for i in bits_of(mask):
            out |= 1 << img[i]
        return out

    def compose(self, other: "Permutation") -> "Permutation":
        """``self`` after ``other``."""
        return Permutation(tuple(self.image[i] for i in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))


def check_automorphism(g: Graph, p: Permutation) -> None:
    if len(p) != g.n:
        raise GraphError("permutation size does not match graph")
    for u, v in g.edges():
        if not g.has_edge(p(u), p(v)):
            raise NotAutomorphismError(f"edge ({u}, {v}) maps to non-edge ({p(u)}, {p(v)})", (u, v))


def apply_perm(g: Graph, p: Permutation) -> Graph:
    """Relabel ``g`` so that vertex i becomes vertex p(i)."""
    if len(p) != g.n:
        raise GraphError("permutation size does not match graph")
    adj = [0] * g.n
    for i, row in enumerate(g.adj):
        adj[p(i)] = p.map_mask(row)
    return Graph(g.n, tuple(adj), g.label)


def set_key(mask: int) -> tuple[int, ...]:
    return tuple(bits_of(mask))


def orbit_of(mask: int, generators: Sequence[Permutation]) -> set[int]:
    seen = {mask}
    queue = deque([mask])
    while queue:
        m = queue.popleft()
        for gen in generators:
            img = gen.map_mask(m)
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return seen


def orbit(sets: Iterable, generators: Sequence[Permutation], g: Graph | None = None) -> list[tuple[int, ...]]:
    """Canonical representatives (lexicographically least member) of the orbits.

    Generators are checked as automorphisms of ``g`` when it is given.
    The result is sorted and contains one representative per orbit met.
    """
    if g is not None:
        for gen in generators:
            check_automorphism(g, gen)
    reps = set()
    done: set[int] = set()
    for s in sets:
        m = as_mask(s)
        if m in done:
            continue
        orb = orbit_of(m, generators)
        done |= orb
        reps.add(min(set_key(x) for x in orb))
    return sorted(reps)
