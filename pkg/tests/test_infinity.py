from __future__ import annotations

from itertools import combinations, islice

import numpy as np
import pytest

from intriguing.geometry import (collinearity_graph, cone, from_pq, grid_section, iter_hemisystems,
                                 is_hemisystem, minus_perp, pg_points, polar_section, to_pq)
from intriguing.graphcore import mask_of
from intriguing.infinity import (ImpossibleCase, NonIntegralPrediction, NotIntriguingError,
                                 SizeMismatchError, block_decomposition, check_atinfinity,
                                 complete_to_hemisystem, find_nice_partial_spreads,
                                 hemi_negint2_report, icky_context, icky_identities,
                                 infinity_profile, negint_minusperp_report,
                                 partial_spread_infinity, predict_infinity_params)
from intriguing.intrigue import verify


def _p_in(H, inside=True):
    return next(p for p in range(112) if bool(H.bits >> p & 1) == inside)


# ---------------------------------------------------------------------------
# predictions
# ---------------------------------------------------------------------------

def test_predict_m_ovoid_minus_perp():
    p = predict_infinity_params("m_ovoid", 2, 3, p_in_set=True)
    assert (p.a1, p.a2, p.at_infinity, p.rest) == (2, 5, 11, 45)
    p = predict_infinity_params("m_ovoid", 2, 3, p_in_set=False)
    assert (p.a1, p.a2, p.at_infinity, p.rest) == (5, 8, 20, 36)


def test_predict_tight_minus_perp():
    p = predict_infinity_params("tight", 3, 3)
    assert (p.a1, p.a2, p.at_infinity) == (1, 1, 3)
    p = predict_infinity_params("tight", 4, 3, p_in_set=True)
    assert (p.a1, p.a2, p.at_infinity) == (2, 2, 7)
    with pytest.raises(NonIntegralPrediction):
        predict_infinity_params("tight", 2, 3)


def test_predict_hemisystem_cases():
    p = predict_infinity_params("tight", 4, 3, "hemisystem", case="pos->neg")
    assert p.a2 == 2 and p.rest == 8 and p.diff == 6
    with pytest.raises(ImpossibleCase):
        predict_infinity_params("tight", 4, 3, "hemisystem", case="pos->pos")
    with pytest.raises(NonIntegralPrediction):
        predict_infinity_params("tight", 1, 3, "hemisystem", case="pos->neg")
    p = predict_infinity_params("m_ovoid", 2, 3, "hemisystem", case="neg->neg", a2=8)
    assert (p.a1, p.a2, p.diff, p.rest, p.at_infinity) == (2, 8, -6, 48, 8)
    with pytest.raises(ValueError):
        predict_infinity_params("m_ovoid", 2, 3, "hemisystem", case="sideways")


# ---------------------------------------------------------------------------
# block decomposition
# ---------------------------------------------------------------------------

def test_block_decomposition_reassembles(q53, q53_graph):
    bd = block_decomposition(q53, q53.perp(0), 0)
    A = q53_graph.adjacency_array()
    bd.check(A)
    assert bd.order[-1] == 0 and bd.n_pq == 81
    assert set(bd.order[81:]) == set(i for i in range(112) if q53.perp(0) >> i & 1)
    S = bd.S
    assert np.array_equal(S.T @ S, np.eye(81, dtype=np.int64))
    assert np.array_equal(S.T @ A @ S, bd.B.numer)


# ---------------------------------------------------------------------------
# profiles and the at-infinity equivalence
# ---------------------------------------------------------------------------

def test_hemisystem_at_infinity(q53, hemisystem):
    P = _p_in(hemisystem, inside=False)
    v = check_atinfinity(q53, q53.perp(P), hemisystem)
    assert (v.profile.a1, v.profile.a2, v.profile.inside) == (5, 8, 20)
    assert (v.restricted.h1, v.restricted.h2, v.restricted.size) == (5, 12, 36)
    P = _p_in(hemisystem, inside=True)
    v = check_atinfinity(q53, q53.perp(P), hemisystem)
    assert (v.profile.a1, v.profile.a2, v.profile.inside) == (2, 5, 11)
    assert v.restricted.size == 45 and v.restricted.sign == "negative"


def test_line_not_through_p_is_non_constant(q53):
    li = next(i for i, l in enumerate(q53.lines) if 0 not in l)
    prof = infinity_profile(q53, q53.perp(0), q53.line_masks[li])
    assert not prof.constant
    assert prof.witnesses1 or prof.witnesses2
    assert "non-constant" in prof.describe()


def test_line_through_p_is_degenerate(q53):
    li = q53.point_lines[0][0]
    v = check_atinfinity(q53, q53.perp(0), q53.line_masks[li])
    assert v.degenerate


def test_grid_profile(q53):
    l1, l2 = q53.point_lines[0][:2]
    X = next(x for x in range(112) if not q53.perp(0) >> x & 1)
    sec = mask_of(grid_section(q53, 0, l1, l2, X))
    v = check_atinfinity(q53, q53.perp(0), sec)
    pred = predict_infinity_params("tight", v.ambient.h2, 3, p_in_set=True)
    assert (v.profile.a1, v.profile.a2, v.profile.inside) == (pred.a1, pred.a2, pred.at_infinity)
    assert v.profile.a1 - v.profile.a2 == 0


def test_sections_inside_hemisystem_pq_are_not_intriguing(q53, hemisystem):
    l1, l2 = q53.point_lines[0][:2]
    X = next(x for x in range(112) if not q53.perp(0) >> x & 1)
    hyperbolic = mask_of(grid_section(q53, 0, l1, l2, X))
    v = check_atinfinity(q53, hemisystem, hyperbolic)
    assert not v.profile.constant and v.restricted is None
    x = next(p for p in pg_points(5, 3) if q53.form(p) != 0)
    parabolic = mask_of(polar_section(q53, x))
    v = check_atinfinity(q53, hemisystem, parabolic)
    assert not v.profile.constant and v.restricted is None


def test_check_atinfinity_rejects_non_intriguing(q53):
    with pytest.raises(NotIntriguingError):
        check_atinfinity(q53, q53.perp(0), mask_of([1, 2, 3]))


def test_skew_pairs_sampled(q53, hemisystem):
    pairs = [(a, b) for a, b in combinations(range(len(q53.lines)), 2)
             if not q53.line_masks[a] & q53.line_masks[b]][:300]
    for a, b in pairs:
        m = q53.line_masks[a] | q53.line_masks[b]
        for inf in (hemisystem.bits, q53.perp(0)):
            v = check_atinfinity(q53, inf, m)
            assert v.degenerate or not v.profile.constant


# ---------------------------------------------------------------------------
# icky identities and completion
# ---------------------------------------------------------------------------

def test_icky_q52_every_point(q52):
    for P in range(q52.n_points):
        assert icky_identities(q52, P).ok


def test_icky_q53_with_cone(q53, mp0):
    Z = q53.lines[q53.point_lines[0][0]][1]
    c = cone(q53, 0, Z, mp0)
    rep = icky_identities(q53, 0, [c])
    assert rep.ok and rep.set_checks == [(9, True, True)]


def test_icky_rejects_positive_set(q53, mp0):
    with pytest.raises(NotIntriguingError):
        icky_identities(q53, 0, [mask_of(range(5))])


def test_completion_both_sizes(q53, hemisystem):
    for inside, size in ((True, 45), (False, 36)):
        P = _p_in(hemisystem, inside)
        pq = minus_perp(q53, P, check=False)
        local = to_pq(pq, hemisystem)
        assert local.bit_count() == size
        comp = complete_to_hemisystem(q53, P, local)
        assert comp.h2 == 20
        assert is_hemisystem(q53, comp.hemisystem)
        assert from_pq(pq, local) & ~comp.hemisystem.bits == 0
        assert comp.hemisystem.bits == hemisystem.bits


def test_completion_size_mismatch(q53, mp0):
    Z = q53.lines[q53.point_lines[0][0]][1]
    with pytest.raises(SizeMismatchError):
        complete_to_hemisystem(q53, 0, cone(q53, 0, Z, mp0))


def test_icky_context_lambda(q53):
    ctx = icky_context(q53, 5)
    assert ctx.lam == -10 and ctx.blocks.order[-1] == 5


# ---------------------------------------------------------------------------
# partial spreads
# ---------------------------------------------------------------------------

def _disjoint_lines(geo, c):
    chosen, cov = [], 0
    for i, lm in enumerate(geo.line_masks):
        if not lm & cov:
            chosen.append(i)
            cov |= lm
        if len(chosen) == c:
            break
    return chosen


def test_partial_spread_preconditions(q53, hemisystem):
    with pytest.raises(ValueError):
        partial_spread_infinity(q53, hemisystem, _disjoint_lines(q53, 3))
    lines = q53.point_lines[0][:2]
    with pytest.raises(ValueError):
        partial_spread_infinity(q53, hemisystem, lines)


def test_skew_pair_is_not_intriguing_at_infinity(q53, hemisystem):
    v = partial_spread_infinity(q53, hemisystem, _disjoint_lines(q53, 2))
    assert not v.ok and v.predicted == (-3, 1)


def test_nice_partial_spreads(q53, hemisystem):
    assert find_nice_partial_spreads(q53, hemisystem, 8) == ([], True)
    found, exhaustive = find_nice_partial_spreads(q53, hemisystem, 10)
    assert exhaustive and found
    v = partial_spread_infinity(q53, hemisystem, found[0])
    assert v.ok and v.halves
    assert (v.certificate.h1, v.certificate.h2) == (1, 5)


# ---------------------------------------------------------------------------
# report-only checkers
# ---------------------------------------------------------------------------

def test_negint_report_classes(q53, hemisystem, mp0):
    P = _p_in(hemisystem, True)
    pq = minus_perp(q53, P, check=False)
    Z = q53.lines[q53.point_lines[P][0]][1]
    lines = negint_minusperp_report(q53, P, [cone(q53, P, Z, pq), to_pq(pq, hemisystem)])
    assert lines[0].endswith("class=cone-union")
    assert lines[1].endswith("class=hemisystem") and "size=45" in lines[1]


def test_hemi_negint2_report(q53, hemisystem):
    others = list(islice(iter_hemisystems(q53), 3))
    lines = hemi_negint2_report(q53, hemisystem, others)
    assert len(lines) == 3
    assert all(l.startswith("size=") for l in lines)
    g = collinearity_graph(q53)
    assert all(verify(g, h) is not None for h in others)
