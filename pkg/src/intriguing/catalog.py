"""The seven known thin partial quadrangle graphs and the Steiner system S(3,6,22)."""
from __future__ import annotations

from collections import deque
from functools import lru_cache
from itertools import combinations

from .errors import InvariantViolation
from .graphcore import Graph, Permutation, srg_params
from .geometry import ProjectiveSpace

NAMED = ("pentagon", "petersen", "clebsch", "hoffman_singleton", "gewirtz", "m22", "higman_sims")

EXPECTED = {
    "pentagon": (5, 2, 0, 1),
    "petersen": (10, 3, 0, 1),
    "clebsch": (16, 5, 0, 2),
    "hoffman_singleton": (50, 7, 0, 1),
    "gewirtz": (56, 10, 0, 2),
    "m22": (77, 16, 0, 4),
    "higman_sims": (100, 22, 0, 6),
}


class UnknownGraphError(KeyError):
    pass


def pentagon() -> Graph:
    return Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)], "pentagon")


def pairs5() -> list[tuple[int, int]]:
    """2-subsets of {1..5} in lexicographic order."""
    return list(combinations(range(1, 6), 2))


def petersen() -> Graph:
    """Kneser graph K(5,2): 2-subsets of {1..5}, adjacent when disjoint."""
    ps = pairs5()
    return Graph.from_relation(10, lambda i, j: not set(ps[i]) & set(ps[j]), "petersen")


def clebsch_labels() -> list[str]:
    return ["inf"] + [str(i) for i in range(1, 6)] + [f"{a}{b}" for a, b in pairs5()]


def clebsch() -> Graph:
    """Vertex 0 is infinity, 1..5 the points, 6..15 the pairs 12..45.

    Infinity is adjacent to the five points, point i to the pairs containing
    it, and two pairs are adjacent when disjoint.
    """
    ps = pairs5()

    def rel(i, j):
        if i == 0:
            return 1 <= j <= 5
        if j <= 5:
            return False
        b = set(ps[j - 6])
        if i <= 5:
            return i in b
        return not set(ps[i - 6]) & b

    return Graph.from_relation(16, rel, "clebsch")


def clebsch_vertex(label: str) -> int:
    return clebsch_labels().index(label)


def hoffman_singleton() -> Graph:
    """Pentagons P_h (vertices 5h+j) and pentagrams Q_i (vertices 25+5i+j).

    P_h[j] ~ P_h[j+-1], Q_i[j] ~ Q_i[j+-2], P_h[j] ~ Q_i[hi+j mod 5].
    """
    edges = []
    for h in range(5):
        for j in range(5):
            edges.append((5 * h + j, 5 * h + (j + 1) % 5))
            edges.append((25 + 5 * h + j, 25 + 5 * h + (j + 2) % 5))
    for h in range(5):
        for i in range(5):
            for j in range(5):
                edges.append((5 * h + j, 25 + 5 * i + (h * i + j) % 5))
    return Graph.from_edges(50, edges, "hoffman_singleton")


# ---------------------------------------------------------------------------
# S(3,6,22) from PG(2,4)
# ---------------------------------------------------------------------------

def _pg24():
    space = ProjectiveSpace(2, 4)
    lines = sorted({space.line(i, j) for i, j in combinations(range(len(space)), 2)})
    return space, lines


def _least_hyperoval(space: ProjectiveSpace, lines) -> tuple[int, ...]:
    on_line = {}
    for l in lines:
        for a, b in combinations(l, 2):
            on_line[(a, b)] = set(l)

    def rec(chosen, start):
        if len(chosen) == 6:
            return tuple(chosen)
        for p in range(start, len(space)):
            if any(p in on_line[(a, b)] for a, b in combinations(chosen, 2)):
                continue
            r = rec(chosen + [p], p + 1)
            if r:
                return r
        return None

    return rec([], 0)


def _transvections(space: ProjectiveSpace) -> list[list[int]]:
    """Point permutations induced by x_i += a x_j, generating PSL(3,4)."""
    F = space.F
    perms = []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            for a in range(1, F.q):
                img = []
                for p in space.points:
                    v = list(p)
                    v[i] = F.add[v[i]][F.mul[a][v[j]]]
                    img.append(space.point_index(v))
                perms.append(img)
    return perms


@lru_cache(maxsize=1)
def _hyperoval_orbit() -> tuple[tuple[int, ...], ...]:
    space, lines = _pg24()
    start = _least_hyperoval(space, lines)
    gens = _transvections(space)
    seen = {start}
    queue = deque([start])
    while queue:
        h = queue.popleft()
        for g in gens:
            img = tuple(sorted(g[x] for x in h))
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return tuple(sorted(seen))


def hyperoval_orbit() -> list[tuple[int, ...]]:
    """The orbit (56 hyperovals) containing the lexicographically least one."""
    return list(_hyperoval_orbit())


@lru_cache(maxsize=1)
def _steiner() -> tuple[tuple[int, ...], ...]:
    _, lines = _pg24()
    inf = 21
    blocks = [tuple(l) + (inf,) for l in lines] + list(_hyperoval_orbit())
    blocks = tuple(sorted(blocks))
    check_steiner(blocks, 22, 3)
    return blocks


def check_steiner(blocks, npoints: int, t: int) -> None:
    cover = {}
    for b in blocks:
        for tr in combinations(sorted(b), t):
            if tr in cover:
                raise InvariantViolation(f"{tr} lies in two blocks")
            cover[tr] = b
    total = 1
    for i in range(t):
        total = total * (npoints - i) // (i + 1)
    if len(cover) != total:
        raise InvariantViolation(f"{total - len(cover)} {t}-subsets are uncovered")


def steiner_3_6_22() -> list[tuple[int, ...]]:
    """77 blocks on 22 points; point 21 plays the role of infinity."""
    return list(_steiner())


def m22() -> Graph:
    blocks = [set(b) for b in steiner_3_6_22()]
    return Graph.from_relation(77, lambda i, j: not blocks[i] & blocks[j], "m22")


def higman_sims() -> Graph:
    """Vertex 0 = infinity, 1..22 the points, 23..99 the blocks."""
    blocks = [set(b) for b in steiner_3_6_22()]

    def rel(i, j):
        if i == 0:
            return j <= 22
        if j <= 22:
            return False
        b = blocks[j - 23]
        if i <= 22:
            return (i - 1) in b
        return not blocks[i - 23] & b

    return Graph.from_relation(100, rel, "higman_sims")


def gewirtz_hyperovals() -> Graph:
    """Catalog route: one orbit of 56 hyperovals of PG(2,4), adjacent when disjoint."""
    hs = [set(h) for h in hyperoval_orbit()]
    return Graph.from_relation(56, lambda i, j: not hs[i] & hs[j], "gewirtz")


@lru_cache(maxsize=1)
def gewirtz_hemisystem() -> Graph:
    """Primary route: collinearity graph of a hemisystem of Q-(5,3)."""
    from .geometry import collinearity_graph, elliptic_gq, find_hemisystem, restrict_to_set

    geo = elliptic_gq(3, check=False)
    pq = restrict_to_set(geo, find_hemisystem(geo), check=False)
    g = collinearity_graph(pq)
    return Graph(g.n, g.adj, "gewirtz")


_BUILDERS = {
    "pentagon": pentagon,
    "petersen": petersen,
    "clebsch": clebsch,
    "hoffman_singleton": hoffman_singleton,
    "gewirtz": gewirtz_hemisystem,
    "m22": m22,
    "higman_sims": higman_sims,
}


def build_named(name: str, check: bool = True) -> Graph:
    key = name.replace("-", "_").lower()
    if key not in _BUILDERS:
        raise UnknownGraphError(f"unknown graph {name!r}; known: {', '.join(NAMED)}")
    g = _BUILDERS[key]()
    if check:
        p = srg_params(g)
        if p.as_tuple != EXPECTED[key]:
            raise InvariantViolation(f"{key} has parameters {p.as_tuple}, expected {EXPECTED[key]}")
    return g


# ---------------------------------------------------------------------------
# automorphism generators
# ---------------------------------------------------------------------------

def _s5_on_pairs(sigma: dict[int, int]) -> list[int]:
    ps = pairs5()
    return [ps.index(tuple(sorted((sigma[a], sigma[b])))) for a, b in ps]


_S5_GENS = ({1: 2, 2: 1, 3: 3, 4: 4, 5: 5}, {1: 2, 2: 3, 3: 4, 4: 5, 5: 1})


def named_group(name: str) -> list[Permutation]:
    """Generators of a known automorphism group (S5 or dihedral)."""
    key = name.replace("-", "_").lower()
    if key == "pentagon":
        return [Permutation(tuple((i + 1) % 5 for i in range(5))),
                Permutation(tuple((-i) % 5 for i in range(5)))]
    if key == "petersen":
        return [Permutation(tuple(_s5_on_pairs(s))) for s in _S5_GENS]
    if key == "clebsch":
        gens = []
        for s in _S5_GENS:
            img = [0] + [s[i] for i in range(1, 6)] + [6 + x for x in _s5_on_pairs(s)]
            gens.append(Permutation(tuple(img)))
        return gens
    if key == "hoffman_singleton":
        shift = [5 * (v // 5) + (v % 5 + 1) % 5 for v in range(50)]
        return [Permutation(tuple(shift))]
    raise UnknownGraphError(f"no bundled automorphism generators for {name!r}")
