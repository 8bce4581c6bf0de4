from __future__ import annotations

from collections import Counter
from itertools import combinations

import networkx as nx
import pytest

from intriguing.catalog import (EXPECTED, NAMED, UnknownGraphError, build_named, check_steiner,
                                clebsch_vertex, gewirtz_hemisystem, gewirtz_hyperovals,
                                hyperoval_orbit, named_group, steiner_3_6_22)
from intriguing.errors import InvariantViolation
from intriguing.exactmath import GFSpan, field_make
from intriguing.geometry import pg_points
from intriguing.graphcore import check_automorphism, srg_params
from intriguing.intrigue import verify


@pytest.mark.parametrize("name", NAMED)
def test_named_parameters(named, name):
    g = named(name)
    assert srg_params(g).as_tuple == EXPECTED[name]
    assert g.is_triangle_free()


def test_unknown_name():
    with pytest.raises(UnknownGraphError):
        build_named("tutte")


def test_clebsch_is_the_folded_five_cube(clebsch):
    cube = nx.hypercube_graph(4)
    folded = nx.convert_node_labels_to_integers(cube)
    for v, bits in enumerate(cube.nodes):
        u = list(cube.nodes).index(tuple(1 - b for b in bits))
        folded.add_edge(v, u)
    assert nx.is_isomorphic(nx.Graph(clebsch.edges()), folded)


def test_clebsch_labels():
    assert clebsch_vertex("inf") == 0
    assert clebsch_vertex("5") == 5
    assert clebsch_vertex("12") == 6 and clebsch_vertex("45") == 15


def test_steiner_system_properties():
    blocks = steiner_3_6_22()
    assert len(blocks) == 77
    assert all(len(b) == 6 for b in blocks)
    per_point = Counter(p for b in blocks for p in b)
    assert set(per_point) == set(range(22)) and set(per_point.values()) == {21}
    cover = Counter(t for b in blocks for t in combinations(sorted(b), 3))
    assert len(cover) == 1540 and set(cover.values()) == {1}


def test_check_steiner_rejects_double_cover():
    blocks = steiner_3_6_22()
    with pytest.raises(InvariantViolation):
        check_steiner(blocks + [blocks[0]], 22, 3)
    with pytest.raises(InvariantViolation):
        check_steiner(blocks[1:], 22, 3)


def test_hyperovals_have_no_three_collinear_points():
    F = field_make(4)
    pts = pg_points(2, 4)
    ovals = hyperoval_orbit()
    assert len(ovals) == 56 and len(set(ovals)) == 56
    for h in ovals:
        assert len(h) == 6
        for a, b, c in combinations(h, 3):
            assert GFSpan(F, [pts[a], pts[b], pts[c]]).rank == 3


def test_m22_coclique_through_a_point(named):
    g = named("m22")
    blocks = steiner_3_6_22()
    through = [i for i, b in enumerate(blocks) if 0 in b]
    assert len(through) == 21
    cert = verify(g, through)
    assert cert.sign == "negative" and (cert.h1, cert.h2, cert.size) == (0, 6, 21)


def test_higman_sims_incidence(named):
    g = named("higman_sims")
    blocks = steiner_3_6_22()
    assert g.neighbours(0) == list(range(1, 23))
    for j, b in enumerate(blocks[:10]):
        pts = [v for v in g.neighbours(23 + j) if 1 <= v <= 22]
        assert sorted(p - 1 for p in pts) == sorted(b)


def test_gewirtz_routes_agree():
    a, b = gewirtz_hemisystem(), gewirtz_hyperovals()
    assert srg_params(a).as_tuple == srg_params(b).as_tuple == (56, 10, 0, 2)
    assert srg_params(a).eigenvalues() == (10, 2, -4)
    assert nx.is_isomorphic(nx.Graph(a.edges()), nx.Graph(b.edges()))


@pytest.mark.parametrize("name", ["pentagon", "petersen", "clebsch", "hoffman_singleton"])
def test_bundled_groups_are_automorphisms(named, name):
    g = named(name)
    for gen in named_group(name):
        check_automorphism(g, gen)


def test_no_group_for_large_graphs():
    with pytest.raises(UnknownGraphError):
        named_group("m22")
