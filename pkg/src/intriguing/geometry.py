"""Projective spaces, quadrics, point-line geometries and their special sets.

Points of PG(n, q) are tuples of field-element codes, normalised with
first nonzero coordinate 1 and listed in lexicographic order.  Geometries
keep coordinates when they come from a quadric so that subspace sections
(grids, hyperplane sections) can be formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .errors import InvariantViolation
from .exactmath import FiniteField, GFSpan, field_make, gf_nullspace, normalize_projective
from .graphcore import Graph, VertexSet, as_mask, bits_of, mask_of, srg_params
from .intrigue import IntrigueCertificate, verify


class GeometryError(ValueError):
    pass


class HemisystemNotFound(GeometryError):
    pass


# ---------------------------------------------------------------------------
# projective space
# ---------------------------------------------------------------------------

def pg_points(n: int, q: int) -> list[tuple[int, ...]]:
    """All points of PG(n, q), normalised, in lexicographic order."""
    field_make(q)
    pts = []
    for v in product(range(q), repeat=n + 1):
        first = next((x for x in v if x), 0)
        if first == 1:
            pts.append(v)
    return pts


class ProjectiveSpace:
    def __init__(self, n: int, q: int):
        self.n, self.q = n, q
        self.F = field_make(q)
        self.points = pg_points(n, q)
        self.index = {p: i for i, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def point_index(self, v: Sequence[int]) -> int:
        return self.index[normalize_projective(self.F, v)]

    def line(self, i: int, j: int) -> tuple[int, ...]:
        """Indices of the q+1 points on the line through points i and j."""
        F = self.F
        a, b = self.points[i], self.points[j]
        pts = {i, j}
        for c in range(1, F.q):
            pts.add(self.point_index(F.vadd(a, F.scale(c, b))))
        return tuple(sorted(pts))

    def subspace_points(self, basis: Iterable[Sequence[int]]) -> list[int]:
        span = GFSpan(self.F, basis, self.n + 1)
        return [i for i, p in enumerate(self.points) if p in span]

    def hyperplanes(self) -> list[tuple[tuple[int, ...], int]]:
        """(dual coordinates, point mask) for every hyperplane, dual in lex order."""
        F = self.F
        out = []
        for h in self.points:
            m = 0
            for i, p in enumerate(self.points):
                if F.dot(h, p) == 0:
                    m |= 1 << i
            out.append((h, m))
        return out


# ---------------------------------------------------------------------------
# quadratic forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticForm:
    """sum of coeffs[(i, j)] x_i x_j over i <= j."""

    q: int
    dim: int
    coeffs: tuple[tuple[tuple[int, int], int], ...]

    @property
    def F(self) -> FiniteField:
        return field_make(self.q)

    def __call__(self, v: Sequence[int]) -> int:
        F = self.F
        acc = 0
        for (i, j), c in self.coeffs:
            acc = F.add[acc][F.mul[c][F.mul[v[i]][v[j]]]]
        return acc

    def polar(self, u: Sequence[int], v: Sequence[int]) -> int:
        F = self.F
        s = self(F.vadd(u, v))
        return F.sub[F.sub[s][self(u)]][self(v)]


def irreducible_binary_form(q: int) -> tuple[int, int]:
    """Least (b, c) in lex order with x^2 + b x y + c y^2 anisotropic over GF(q)."""
    F = field_make(q)
    for b in range(q):
        for c in range(1, q):
            if all(F.add[F.add[F.mul[t][t]][F.mul[b][t]]][c] != 0 for t in range(q)):
                return b, c
    raise GeometryError(f"no irreducible quadratic over GF({q})")


def elliptic_form(q: int) -> QuadraticForm:
    b, c = irreducible_binary_form(q)
    coeffs = [((0, 1), 1), ((2, 3), 1), ((4, 4), 1)]
    if b:
        coeffs.append(((4, 5), b))
    coeffs.append(((5, 5), c))
    return QuadraticForm(q, 6, tuple(coeffs))


def parabolic_form(q: int) -> QuadraticForm:
    return QuadraticForm(q, 5, (((0, 1), 1), ((2, 3), 1), ((4, 4), 1)))


# ---------------------------------------------------------------------------
# incidence geometries
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class IncidenceGeometry:
    n_points: int
    lines: tuple[tuple[int, ...], ...]
    s: int
    t: int
    kind: str = "raw"            # "gq", "pq" or "raw"
    mu: int | None = None
    name: str = ""
    coords: list[tuple[int, ...]] | None = None
    form: QuadraticForm | None = None
    # ambient index of each point, when derived from a larger geometry
    vertex_map: tuple[int, ...] | None = field(default=None, repr=False)

    @cached_property
    def line_masks(self) -> list[int]:
        return [mask_of(l) for l in self.lines]

    @cached_property
    def point_lines(self) -> list[list[int]]:
        pl = [[] for _ in range(self.n_points)]
        for li, l in enumerate(self.lines):
            for p in l:
                pl[p].append(li)
        return pl

    @cached_property
    def collinear(self) -> list[int]:
        """Mask of points collinear with (and different from) each point."""
        col = [0] * self.n_points
        for m in self.line_masks:
            for p in bits_of(m):
                col[p] |= m
        return [c & ~(1 << p) for p, c in enumerate(col)]

    def perp(self, p: int) -> int:
        """Mask of P-perp: points collinear with P, P included."""
        return self.collinear[p] | 1 << p

    @property
    def full_mask(self) -> int:
        return (1 << self.n_points) - 1

    def line_through(self, a: int, b: int) -> int | None:
        la = set(self.point_lines[a])
        for li in self.point_lines[b]:
            if li in la:
                return li
        return None

    def point_count_formula(self) -> int:
        mu = self.t + 1 if self.kind == "gq" else self.mu
        num = self.s * (self.t + 1) * (mu + self.s * self.t)
        if num % mu:
            raise GeometryError("point-count formula is not integral")
        return num // mu + 1


def verify_geometry(geo: IncidenceGeometry) -> None:
    """Check the line/point counts and the GQ or PQ axioms; raise on failure."""
    s, t = geo.s, geo.t
    for li, l in enumerate(geo.lines):
        if len(l) != s + 1:
            raise GeometryError(f"line {li} has {len(l)} points, expected {s + 1}")
    for p, ls in enumerate(geo.point_lines):
        if len(ls) != t + 1:
            raise GeometryError(f"point {p} lies on {len(ls)} lines, expected {t + 1}")
    # two points on at most one line: line masks pairwise share <= 1 point
    seen = {}
    for li, l in enumerate(geo.lines):
        for a, b in combinations(l, 2):
            if (a, b) in seen:
                raise GeometryError(f"points {a}, {b} lie on lines {seen[(a, b)]} and {li}")
            seen[(a, b)] = li
    if geo.kind == "raw":
        return
    col = geo.collinear
    exact = geo.kind == "gq"
    for p in range(geo.n_points):
        cp = col[p]
        for li, lm in enumerate(geo.line_masks):
            if lm >> p & 1:
                continue
            c = (cp & lm).bit_count()
            if c > 1 or (exact and c != 1):
                raise GeometryError(f"point {p} and line {li}: {c} collinear points")
    mu = t + 1 if exact else geo.mu
    for a in range(geo.n_points):
        ca = col[a]
        rest = geo.full_mask & ~ca & ~((1 << (a + 1)) - 1)
        for b in bits_of(rest):
            c = (ca & col[b]).bit_count()
            if c != mu:
                raise GeometryError(f"non-collinear points {a}, {b} have {c} common neighbours, expected {mu}")
    if geo.n_points != geo.point_count_formula():
        raise InvariantViolation("point count disagrees with s(t+1)(mu+st)/mu + 1")


def collinearity_graph(geo: IncidenceGeometry) -> Graph:
    return Graph(geo.n_points, tuple(geo.collinear), geo.name)


def quadric_geometry(form: QuadraticForm, name: str = "") -> IncidenceGeometry:
    """Singular points of ``form`` and all totally singular projective lines."""
    n = form.dim - 1
    space = ProjectiveSpace(n, form.q)
    pts = [p for p in space.points if form(p) == 0]
    idx = {p: i for i, p in enumerate(pts)}
    col = [0] * len(pts)
    lines = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if col[i] >> j & 1:
                continue
            on = space.line(space.index[pts[i]], space.index[pts[j]])
            coords = [space.points[k] for k in on]
            if all(c in idx for c in coords):
                l = tuple(sorted(idx[c] for c in coords))
                lines.append(l)
                m = mask_of(l)
                for a in l:
                    col[a] |= m
    lines.sort()
    # order (s, t) from the counts
    s = len(lines[0]) - 1 if lines else 0
    t = (len(lines) * (s + 1)) // len(pts) - 1 if pts else 0
    return IncidenceGeometry(len(pts), tuple(lines), s, t, "gq", None, name, pts, form)


def elliptic_gq(q: int, check: bool = True) -> IncidenceGeometry:
    """Q^-(5, q), a generalised quadrangle of order (q, q^2)."""
    if q not in (2, 3, 4, 5):
        raise GeometryError("elliptic quadrics are built for q in {2, 3, 4, 5}")
    geo = quadric_geometry(elliptic_form(q), f"Q-(5,{q})")
    if (geo.s, geo.t) != (q, q * q):
        raise InvariantViolation(f"Q-(5,{q}) has order {(geo.s, geo.t)}")
    if check:
        verify_geometry(geo)
    return geo


def parabolic_gq(q: int, check: bool = True) -> IncidenceGeometry:
    """Q(4, q), a generalised quadrangle of order (q, q)."""
    if q not in (2, 3, 4, 5):
        raise GeometryError("parabolic quadrics are built for q in {2, 3, 4, 5}")
    geo = quadric_geometry(parabolic_form(q), f"Q(4,{q})")
    if (geo.s, geo.t) != (q, q):
        raise InvariantViolation(f"Q(4,{q}) has order {(geo.s, geo.t)}")
    if check:
        verify_geometry(geo)
    return geo


def _require_gq_s_s2(geo: IncidenceGeometry) -> None:
    if geo.kind != "gq" or geo.t != geo.s ** 2:
        raise GeometryError(f"need a generalised quadrangle of order (s, s^2), got {geo.kind} ({geo.s}, {geo.t})")


def minus_perp(geo: IncidenceGeometry, P: int, check: bool = True) -> IncidenceGeometry:
    """The partial quadrangle PQ(s-1, s^2, s(s-1)) on the points off P-perp.

    ``vertex_map`` of the result lists the ambient index of each new point.
    """
    _require_gq_s_s2(geo)
    s = geo.s
    perp = geo.perp(P)
    keep = [x for x in range(geo.n_points) if not perp >> x & 1]
    pos = {x: i for i, x in enumerate(keep)}
    lines = []
    for l in geo.lines:
        if P in l:
            continue
        lines.append(tuple(pos[x] for x in l if x in pos))
    lines.sort()
    coords = [geo.coords[x] for x in keep] if geo.coords else None
    pq = IncidenceGeometry(len(keep), tuple(lines), s - 1, s * s, "pq", s * (s - 1),
                           f"{geo.name} minus perp({P})", coords, geo.form, tuple(keep))
    if check:
        verify_geometry(pq)
    return pq


def line_intersections(geo: IncidenceGeometry, S) -> list[int]:
    m = as_mask(S)
    return [(m & lm).bit_count() for lm in geo.line_masks]


def restrict_to_set(geo: IncidenceGeometry, H, check: bool = True) -> IncidenceGeometry:
    """PQ((s-1)/2, s^2, (s-1)^2/2) on the points of a hemisystem."""
    _require_gq_s_s2(geo)
    s = geo.s
    if s % 2 == 0:
        raise GeometryError("hemisystems need s odd")
    m = as_mask(H)
    half = (s + 1) // 2
    for li, c in enumerate(line_intersections(geo, m)):
        if c != half:
            raise GeometryError(f"not a hemisystem: line {li} meets the set in {c} points")
    keep = list(bits_of(m))
    pos = {x: i for i, x in enumerate(keep)}
    lines = sorted(tuple(pos[x] for x in l if x in pos) for l in geo.lines)
    coords = [geo.coords[x] for x in keep] if geo.coords else None
    pq = IncidenceGeometry(len(keep), tuple(lines), (s - 1) // 2, s * s, "pq", (s - 1) ** 2 // 2,
                           f"{geo.name} on hemisystem", coords, geo.form, tuple(keep))
    if check:
        verify_geometry(pq)
    return pq


# ---------------------------------------------------------------------------
# hemisystem search
# ---------------------------------------------------------------------------

def iter_hemisystems(geo: IncidenceGeometry, fixed_in: int = 0, fixed_out: int = 0):
    """Yield hemisystems (as masks) in deterministic search order.

    Branches on the first undecided point of the most constrained line
    (fewest undecided points); each line must end with exactly (s+1)/2
    chosen points, which propagates both ways along lines.
    """
    _require_gq_s_s2(geo)
    s = geo.s
    if s % 2 == 0:
        raise GeometryError("hemisystems need s odd")
    want_in = (s + 1) // 2
    want_out = s + 1 - want_in
    lines = geo.line_masks
    point_lines = geo.point_lines
    full = geo.full_mask

    def propagate(inn, out, dirty):
        todo = set(dirty)
        while todo:
            li = todo.pop()
            lm = lines[li]
            ci = (inn & lm).bit_count()
            co = (out & lm).bit_count()
            if ci > want_in or co > want_out:
                return None
            und = lm & ~(inn | out)
            if not und:
                continue
            if ci == want_in:
                out |= und
            elif co == want_out:
                inn |= und
            else:
                continue
            for x in bits_of(und):
                todo.update(point_lines[x])
        return inn, out

    def rec(inn, out, dirty):
        st = propagate(inn, out, dirty)
        if st is None:
            return
        inn, out = st
        und = full & ~(inn | out)
        if not und:
            yield inn
            return
        best, best_c = None, None
        for lm in lines:
            u = lm & und
            if u:
                c = u.bit_count()
                if best_c is None or c < best_c:
                    best, best_c = u, c
                    if c == 1:
                        break
        x = (best & -best).bit_length() - 1
        bit = 1 << x
        yield from rec(inn | bit, out, point_lines[x])
        yield from rec(inn, out | bit, point_lines[x])

    start = set(range(len(lines)))
    yield from rec(fixed_in, fixed_out, start)


def find_hemisystem(geo: IncidenceGeometry) -> VertexSet:
    for h in iter_hemisystems(geo):
        return VertexSet(h, geo.n_points, geo.name)
    raise HemisystemNotFound(f"{geo.name} has no hemisystem")


def is_hemisystem(geo: IncidenceGeometry, S) -> bool:
    return geo.s % 2 == 1 and all(c == (geo.s + 1) // 2 for c in line_intersections(geo, S))


# ---------------------------------------------------------------------------
# classification of point sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointSetTag:
    kind: str                     # "hemisystem", "m_ovoid", "tight" or "none"
    m: int | None = None
    i: int | None = None
    certificate: IntrigueCertificate | None = None

    @property
    def is_m_ovoid(self) -> bool:
        return self.kind in ("m_ovoid", "hemisystem")


def classify_point_set(geo: IncidenceGeometry, S, graph: Graph | None = None) -> PointSetTag:
    if geo.kind != "gq":
        raise GeometryError("classification uses generalised quadrangle axioms")
    g = graph or collinearity_graph(geo)
    m = as_mask(S)
    if m == 0 or m == geo.full_mask:
        return PointSetTag("none")
    cert = verify(g, m)
    counts = set(line_intersections(geo, m))
    if len(counts) == 1:
        (mm,) = counts
        if 0 < mm < geo.s + 1:
            t = geo.t
            if cert is None or (cert.h1, cert.h2) != (mm * (t + 1) - t - 1, mm * (t + 1)):
                raise InvariantViolation(f"{mm}-ovoid with certificate {cert}")
            kind = "hemisystem" if geo.s % 2 == 1 and mm == (geo.s + 1) // 2 else "m_ovoid"
            return PointSetTag(kind, m=mm, certificate=cert)
    if cert is not None and cert.sign == "positive":
        i = cert.h2
        if cert.h1 != i + geo.s - 1:
            raise InvariantViolation(f"positive set with {cert}, expected h1 = i+s-1")
        return PointSetTag("tight", i=i, certificate=cert)
    return PointSetTag("none", certificate=cert)


# ---------------------------------------------------------------------------
# special sets in GQ minus perp
# ---------------------------------------------------------------------------

def _to_pq(pq: IncidenceGeometry, ambient_mask: int) -> int:
    out = 0
    for i, x in enumerate(pq.vertex_map):
        if ambient_mask >> x & 1:
            out |= 1 << i
    return out


def from_pq(pq: IncidenceGeometry, pq_mask: int) -> int:
    """Ambient mask of a set given in the derived geometry's indices."""
    return mask_of(pq.vertex_map[i] for i in bits_of(as_mask(pq_mask)))


def to_pq(pq: IncidenceGeometry, ambient) -> int:
    return _to_pq(pq, as_mask(ambient))


def cone(geo: IncidenceGeometry, P: int, Z: int, pq: IncidenceGeometry | None = None) -> VertexSet:
    """Z-perp minus P-perp, in the indices of ``minus_perp(geo, P)``."""
    _require_gq_s_s2(geo)
    if Z == P or not geo.collinear[P] >> Z & 1:
        raise GeometryError(f"point {Z} is not in perp({P}) minus {P}")
    pq = pq or minus_perp(geo, P, check=False)
    amb = geo.perp(Z) & ~geo.perp(P)
    return VertexSet(_to_pq(pq, amb), pq.n_points, pq.name)


def _span_points(geo: IncidenceGeometry, vectors: Sequence[Sequence[int]]) -> tuple[int, list[int]]:
    if geo.coords is None:
        raise GeometryError("geometry has no coordinates")
    F = field_make(geo.form.q)
    span = GFSpan(F, vectors, len(geo.coords[0]))
    return span.rank, [i for i, c in enumerate(geo.coords) if c in span]


def grid_section(geo: IncidenceGeometry, P: int, l1: int, l2: int, X: int) -> list[int]:
    """Ambient points of the quadric in the 3-space spanned by l1, l2 and X."""
    _require_gq_s_s2(geo)
    s = geo.s
    L1, L2 = geo.lines[l1], geo.lines[l2]
    if l1 == l2 or P not in L1 or P not in L2:
        raise GeometryError("need two distinct lines through P")
    if geo.perp(P) >> X & 1:
        raise GeometryError(f"X={X} is collinear with P={P}")
    q1 = next(x for x in L1 if x != P)
    q2 = next(x for x in L2 if x != P)
    rank, pts = _span_points(geo, [geo.coords[i] for i in (P, q1, q2, X)])
    if rank != 4:
        raise GeometryError("points do not span a 3-space")
    if len(pts) != (s + 1) ** 2:
        raise GeometryError(f"section has {len(pts)} points; not a hyperbolic quadric (need {(s + 1) ** 2})")
    # a grid: every section point on exactly two section lines
    sec = mask_of(pts)
    sec_lines = [lm for lm in geo.line_masks if lm & sec == lm]
    if len(sec_lines) != 2 * (s + 1):
        raise GeometryError("section is not a grid")
    return pts


def grid(geo: IncidenceGeometry, P: int, l1: int, l2: int, X: int,
         pq: IncidenceGeometry | None = None) -> VertexSet:
    pts = grid_section(geo, P, l1, l2, X)
    pq = pq or minus_perp(geo, P, check=False)
    m = _to_pq(pq, mask_of(pts) & ~geo.perp(P))
    if m.bit_count() != geo.s ** 2:
        raise InvariantViolation("grid minus perp does not have s^2 points")
    return VertexSet(m, pq.n_points, pq.name)


def polar_section(geo: IncidenceGeometry, x: Sequence[int]) -> list[int]:
    """Ambient points y of the quadric with polar(x, y) = 0."""
    if geo.form is None:
        raise GeometryError("geometry has no quadratic form")
    return [i for i, c in enumerate(geo.coords) if geo.form.polar(x, c) == 0]


def subspace_section(geo: IncidenceGeometry, basis: Sequence[Sequence[int]]) -> list[int]:
    return _span_points(geo, basis)[1]


# ---------------------------------------------------------------------------
# caps and linear representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cap:
    n: int
    q: int
    points: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.points)

    def check(self) -> None:
        F = field_make(self.q)
        pts = [normalize_projective(F, p) for p in self.points]
        if any(len(p) != self.n + 1 for p in pts):
            raise GeometryError("cap point has wrong length")
        if len(set(pts)) != len(pts):
            raise GeometryError("repeated cap point")
        for a, b, c in combinations(pts, 3):
            if GFSpan(F, (a, b, c)).rank < 3:
                raise GeometryError(f"collinear cap points {a}, {b}, {c}")


@dataclass
class LinearRepresentation:
    cap: Cap
    graph: Graph
    geometry: IncidenceGeometry
    affine: np.ndarray            # row i = coordinates of affine point i
    is_srg: bool

    @property
    def F(self) -> FiniteField:
        return field_make(self.cap.q)

    def affine_index(self, v: Sequence[int]) -> int:
        q = self.cap.q
        idx = 0
        for x in v:
            idx = idx * q + x
        return idx


def linear_representation(cap: Cap, check: bool = True) -> LinearRepresentation:
    """Affine points of AG(n+1, q); lines are translates of cap directions."""
    if check:
        cap.check()
    F = field_make(cap.q)
    q, dim = cap.q, cap.n + 1
    vecs = np.array(list(product(range(q), repeat=dim)), dtype=np.int64)
    weights = q ** np.arange(dim - 1, -1, -1)
    npts = len(vecs)
    adj = [0] * npts
    lines = []
    for c in cap.points:
        c = np.array(c, dtype=np.int64)
        translates = []
        for a in range(1, q):
            shift = F.mul_table[a, c]
            translates.append(F.add_table[vecs, shift] @ weights)
        seen = np.zeros(npts, dtype=bool)
        for x in range(npts):
            others = [int(t[x]) for t in translates]
            for y in others:
                adj[x] |= 1 << y
            if not seen[x]:
                l = tuple(sorted([x, *others]))
                seen[list(l)] = True
                lines.append(l)
    lines.sort()
    g = Graph(npts, tuple(adj), f"linrep({cap.n},{cap.q},{len(cap)})")
    try:
        p = srg_params(g)
        is_srg = True
    except ValueError:
        p, is_srg = None, False
    s, t = q - 1, len(cap) - 1
    geo = IncidenceGeometry(npts, tuple(lines), s, t, "pq" if is_srg else "raw",
                            p.mu if p else None, g.label)
    if check and is_srg:
        verify_geometry(geo)
    return LinearRepresentation(cap, g, geo, vecs, is_srg)


def _two_intersection_bounds(n: int, q: int, k: int) -> tuple[int, int] | None:
    """Max hyperplane and codim-2 intersection sizes over feasible two-weight pairs.

    A cap whose linear representation is strongly regular meets hyperplanes
    in exactly two sizes w1 < w2; their frequencies are fixed by the first
    two moment equations.  Returns None when no pair is feasible.
    """
    def theta(d):
        return (q ** (d + 1) - 1) // (q - 1)

    nh = theta(n)
    m1 = k * theta(n - 1)
    m2 = k * (k - 1) * theta(n - 2)
    pairs = []
    for w1 in range(k + 1):
        for w2 in range(w1 + 1, k + 1):
            # N1 + N2 = nh, w1 N1 + w2 N2 = m1
            num = m1 - w1 * nh
            if num % (w2 - w1):
                continue
            n2 = num // (w2 - w1)
            n1 = nh - n2
            if n1 < 0 or n2 < 0:
                continue
            if w1 * (w1 - 1) * n1 + w2 * (w2 - 1) * n2 == m2:
                pairs.append((w1, w2))
    if not pairs:
        return None
    hmax = max(w2 for _, w2 in pairs)
    cmax = 0
    for w1, w2 in pairs:
        for x in range(k + 1):
            tot = q * x + k
            if any(a * w1 + (q + 1 - a) * w2 == tot for a in range(q + 2)):
                cmax = max(cmax, x)
    return hmax, cmax


class CapSearchExhausted(GeometryError):
    def __init__(self, msg: str, budget_hit: bool = False):
        super().__init__(msg)
        self.budget_hit = budget_hit


def cap_search(n: int, q: int, k: int, require_srg: bool = False, budget: int | None = None) -> Cap:
    """First k-cap of PG(n, q) in canonical (lexicographic) backtracking order.

    With ``require_srg`` only caps whose linear representation is strongly
    regular are accepted; partial caps are pruned by the hyperplane and
    codimension-2 intersection bounds any two-intersection set must obey.
    """
    space = ProjectiveSpace(n, q)
    N = len(space)
    line_of = {}
    for i in range(N):
        for j in range(i + 1, N):
            if (i, j) not in line_of:
                l = space.line(i, j)
                m = mask_of(l)
                for a, b in combinations(l, 2):
                    line_of[(a, b)] = m
    hyper = [m for _, m in space.hyperplanes()] if require_srg else []
    bounds = _two_intersection_bounds(n, q, k) if require_srg else None
    if require_srg and bounds is None:
        raise CapSearchExhausted(f"no two-intersection parameters for a {k}-cap in PG({n},{q})")
    codim2 = []
    if require_srg:
        seen = set()
        for a in range(len(hyper)):
            for b in range(a + 1, len(hyper)):
                m = hyper[a] & hyper[b]
                if m not in seen:
                    seen.add(m)
                    codim2.append(m)
    subspaces = hyper + codim2
    limits = [bounds[0]] * len(hyper) + [bounds[1]] * len(codim2) if require_srg else []
    through = [[si for si, m in enumerate(subspaces) if m >> p & 1] for p in range(N)]
    counts = [0] * len(subspaces)
    nodes = 0
    full = (1 << N) - 1

    def accept(chosen):
        cap = Cap(n, q, tuple(space.points[i] for i in chosen))
        if not require_srg:
            return cap
        hcounts = {counts[i] for i in range(len(hyper))}
        if len(hcounts) != 2:
            return None
        rep = linear_representation(cap, check=False)
        return cap if rep.is_srg else None

    def rec(chosen, allowed):
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise CapSearchExhausted(f"budget of {budget} nodes exhausted", budget_hit=True)
        if len(chosen) == k:
            return accept(chosen)
        if allowed.bit_count() < k - len(chosen):
            return None
        for p in list(bits_of(allowed)):
            allowed &= ~(1 << p)
            if allowed.bit_count() < k - len(chosen) - 1:
                return None
            ok = True
            for si in through[p]:
                counts[si] += 1
                if counts[si] > limits[si]:
                    ok = False
            if ok:
                blocked = 0
                for c in chosen:
                    blocked |= line_of[(c, p)] if c < p else line_of[(p, c)]
                found = rec(chosen + [p], allowed & ~blocked)
                if found is not None:
                    return found
            for si in through[p]:
                counts[si] -= 1
        return None

    if not require_srg:
        limits = []
    res = rec([], full)
    if res is None:
        raise CapSearchExhausted(f"no {k}-cap{' with SRG representation' if require_srg else ''} in PG({n},{q})")
    return res


class SecundumError(GeometryError):
    def __init__(self, msg, witnesses=None):
        super().__init__(msg)
        self.witnesses = witnesses


def _projective_vectors(rep: LinearRepresentation):
    """Cap points as (c, 0) and affine points as (v, 1) in GF(q)^(n+2)."""
    caps = [tuple(c) + (0,) for c in rep.cap.points]
    aff = [tuple(int(x) for x in v) + (1,) for v in rep.affine]
    return caps, aff


def _subspace_sets(rep: LinearRepresentation, span: GFSpan) -> tuple[int, int]:
    caps, aff = _projective_vectors(rep)
    cap_count = sum(1 for c in caps if c in span)
    m = mask_of(i for i, v in enumerate(aff) if v in span)
    return cap_count, m


def hyperplane_affine_set(rep: LinearRepresentation, basis: Sequence[Sequence[int]]
                          ) -> tuple[VertexSet, tuple[int, int]]:
    """Affine points of a hyperplane, with parameters ((q-1)|pi & K|, |K - pi|)."""
    F, q, dim = rep.F, rep.cap.q, rep.cap.n + 2
    span = GFSpan(F, basis, dim)
    if span.rank != dim - 1:
        raise GeometryError("basis does not span a hyperplane")
    kc, m = _subspace_sets(rep, span)
    if m == 0:
        raise GeometryError("hyperplane is the hyperplane at infinity")
    params = ((q - 1) * kc, len(rep.cap) - kc)
    return VertexSet(m, rep.graph.n, rep.graph.label), params


def hyperplane_from_dual(q: int, dual: Sequence[int]) -> list[tuple[int, ...]]:
    """Basis of the hyperplane {x : dual . x = 0}."""
    F = field_make(q)
    return gf_nullspace(F, [tuple(dual)], len(dual))


def hyperplanes_through(F: FiniteField, span: GFSpan) -> list[GFSpan]:
    """The q+1 hyperplanes containing a codimension-2 subspace."""
    dim = span.length
    if span.rank != dim - 2:
        raise GeometryError("subspace is not of codimension 2")
    ext = GFSpan(F, span.basis, dim)
    comp = []
    for i in range(dim):
        e = tuple(1 if j == i else 0 for j in range(dim))
        if ext.add(e):
            comp.append(e)
    u1, u2 = comp
    out = []
    for c in range(F.q):
        out.append(GFSpan(F, [*span.basis, F.vadd(u1, F.scale(c, u2))], dim))
    out.append(GFSpan(F, [*span.basis, u2], dim))
    return out


def secundum_affine_set(rep: LinearRepresentation, basis: Sequence[Sequence[int]]
                        ) -> tuple[VertexSet, tuple[int, int]]:
    """Affine points of a secundum S whose hyperplanes meet the cap constantly.

    Parameters are ((q-1)|S & K|, |pi & K| - |S & K|) for any hyperplane pi
    through S.
    """
    F, q, dim = rep.F, rep.cap.q, rep.cap.n + 2
    span = GFSpan(F, basis, dim)
    caps, _ = _projective_vectors(rep)
    counts = []
    for h in hyperplanes_through(F, span):
        counts.append((sum(1 for c in caps if c in h), h.basis))
    values = {c for c, _ in counts}
    if len(values) != 1:
        a = counts[0]
        b = next(x for x in counts if x[0] != a[0])
        raise SecundumError(f"hyperplanes through the secundum meet the cap in {a[0]} and {b[0]} points",
                            (a, b))
    kc, m = _subspace_sets(rep, span)
    if m == 0:
        raise GeometryError("secundum has no affine points")
    (pi_k,) = values
    params = ((q - 1) * kc, pi_k - kc)
    return VertexSet(m, rep.graph.n, rep.graph.label), params
