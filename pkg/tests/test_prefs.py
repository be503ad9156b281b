import itertools

import pytest
from hypothesis import given, settings, strategies as st

from coalsynth.blocksworld import PREFERENCES
from coalsynth.prefs import (Cmp, all_classes, build_preference, class_geq, compare_classes,
                             compute_ranks, mask_of, mp_set)

P1 = build_preference(3, PREFERENCES[0])
F1, F2, F3 = (mask_of([k]) for k in range(3))


def test_closure_of_p1_model():
    assert P1.strictly(0, 1) and P1.strictly(0, 2)
    assert P1.incomparable(1, 2)


def test_single_formula():
    m = build_preference(1, [])
    assert m.geq == ((True,),)


def test_cycle_collapses_to_equivalence():
    m = build_preference(2, [(0, 1), (1, 0)])
    assert m.geq[0][1] and m.geq[1][0] and not m.strictly(0, 1)


def test_transitive_closure():
    m = build_preference(3, [(0, 1), (1, 2)])
    assert m.strictly(0, 2)


def test_edge_out_of_range():
    with pytest.raises(IndexError):
        build_preference(2, [(0, 5)])


def test_mp_sets():
    assert mp_set(P1, F1 | F2) == F1
    assert mp_set(P1, 0) == 0
    assert mp_set(P1, F2 | F3) == F2 | F3


def test_compare_classes():
    assert compare_classes(P1, F1, F2 | F3) is Cmp.BETTER
    assert compare_classes(P1, F2, F3) is Cmp.INCOMPARABLE
    assert compare_classes(P1, 0, F2) is Cmp.WORSE
    assert compare_classes(P1, F2 | F3, F2 | F3) is Cmp.EQUIVALENT


def test_p1_ranks():
    order = compute_ranks(P1, all_classes(P1))
    assert order.rank == {F1: 0, F2 | F3: 1, F2: 2, F3: 2, 0: 3}
    assert order.rank_max == 3


def test_trivial_rankings():
    assert compute_ranks(P1, [F1]).rank_max == 0
    order = compute_ranks(P1, [F2, F3])
    assert order.rank == {F2: 0, F3: 0}


@st.composite
def preorders(draw):
    m = draw(st.integers(1, 5))
    pairs = [(a, b) for a in range(m) for b in range(m) if a != b]
    edges = draw(st.lists(st.sampled_from(pairs), max_size=8)) if pairs else []
    return build_preference(m, edges)


def _strict(model, c1, c2):
    return class_geq(model, c1, c2) and not class_geq(model, c2, c1)


@settings(max_examples=500, deadline=None)
@given(preorders())
def test_rank_properties(model):
    classes = all_classes(model)
    order = compute_ranks(model, classes)
    # layers are exclusive and exhaustive, ranks contiguous
    flat = [c for layer in order.layers for c in layer]
    assert sorted(flat) == sorted(classes) and len(flat) == len(set(flat))
    assert sorted(set(order.rank.values())) == list(range(order.rank_max + 1))
    for c1, c2 in itertools.product(classes, repeat=2):
        r1, r2 = order.rank[c1], order.rank[c2]
        if r1 == r2:
            assert compare_classes(model, c1, c2) in (Cmp.EQUIVALENT, Cmp.INCOMPARABLE)
        if _strict(model, c1, c2):
            assert r1 < r2
        if r1 >= r2:
            assert not _strict(model, c1, c2)
    assert order.rank[0] == order.rank_max


@settings(max_examples=300, deadline=None)
@given(preorders(), st.data())
def test_mp_invariants(model, data):
    sat = data.draw(st.integers(0, (1 << model.m) - 1))
    mp = mp_set(model, sat)
    assert mp & ~sat == 0
    assert (mp == 0) == (sat == 0)
    for a in range(model.m):
        if sat >> a & 1:
            assert any(mp >> b & 1 and model.geq[b][a] for b in range(model.m))
        if mp >> a & 1:
            assert not any(sat >> b & 1 and model.strictly(b, a) for b in range(model.m))


def test_rejects_non_transitive_relation():
    from coalsynth.prefs import PreferenceModel
    geq = ((True, True, False), (False, True, True), (False, False, True))
    with pytest.raises(ValueError):
        PreferenceModel(3, geq)
