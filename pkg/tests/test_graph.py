import json

import pytest

from trigeom.errors import (
    BadParameter,
    DuplicateId,
    NotAnE2Edge,
    SortViolation,
    UnknownId,
)
from trigeom.graph import (
    Embedding,
    Sort,
    TriGraph,
    canonical_code,
    graphs_equal_on,
    isomorphisms_over,
    parse_graph,
)

from conftest import graph


def test_parse_minimal_document():
    g = parse_graph('{"n": 6, "vertices": [{"id": 0, "sort": "point"}]}')
    assert len(g) == 1
    assert g.sort_of(0) is Sort.POINT
    assert not g.e and not g.e2


def test_parse_rejects_point_point_edge():
    doc = {
        "n": 6,
        "vertices": [{"id": 0, "sort": "point"}, {"id": 1, "sort": "point"}],
        "e": [[0, 1]],
    }
    with pytest.raises(SortViolation):
        parse_graph(doc)


def test_parse_rejects_unknown_fields():
    with pytest.raises(BadParameter):
        parse_graph('{"n": 6, "vertices": [], "extra": 1}')


def test_parse_rejects_small_n_without_override():
    doc = {"n": 4, "vertices": [{"id": 0, "sort": "point"}]}
    with pytest.raises(BadParameter):
        parse_graph(doc)
    assert len(parse_graph(doc, allow_small_n=True)) == 1


def test_duplicate_and_unknown_ids():
    with pytest.raises(DuplicateId):
        TriGraph.build(6, [(0, Sort.POINT), (0, Sort.LINE)], [], [])
    with pytest.raises(UnknownId):
        graph({0: "point", 1: "line"}, e=[(0, 7)])


def test_flag_document_derives_one_flag(flag):
    assert flag.flags() == frozenset({(0, 1, 2)})


def test_flags_not_stored_e2_required():
    g = graph({0: "point", 1: "line", 2: "plane"}, e=[(0, 1), (1, 2)])
    assert g.flags() == frozenset()


def test_four_flags_on_thick_line():
    # line 0 with points 1,2 and planes 3,4; all E and all four E2 present
    g = graph(
        {0: "line", 1: "point", 2: "point", 3: "plane", 4: "plane"},
        e=[(0, 1), (0, 2), (0, 3), (0, 4)],
        e2=[(1, 3), (1, 4), (2, 3), (2, 4)],
    )
    assert len(g.flags()) == 4


def test_induced_identity_and_empty(flag):
    assert graphs_equal_on(flag.induced(flag.ids), flag, flag.ids)
    empty = flag.induced(())
    assert len(empty) == 0 and not empty.e and not empty.e2


def test_induced_drops_flag_with_line(flag):
    sub = flag.induced({0, 2})
    assert sub.has_e2(0, 2)
    assert sub.flags() == frozenset()


def test_induced_flag_restriction_property(flag):
    for sub in ({0}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}):
        got = flag.induced(sub).flags()
        want = frozenset(f for f in flag.flags() if set(f) <= set(sub))
        assert got == want


def test_residues(flag):
    assert flag.residue(1) == frozenset({0, 2})
    assert flag.residue(0) == frozenset({1, 2})
    lonely = graph({0: "point"})
    assert lonely.residue(0) == frozenset()


def test_residue_sorts():
    g = graph(
        {0: "point", 1: "line", 2: "plane", 3: "line"},
        e=[(0, 1), (1, 2), (0, 3)],
        e2=[(0, 2)],
    )
    assert g.residue(0) <= g.lines | g.planes
    assert g.residue(2) <= g.points | g.lines
    assert g.residue(1) <= g.points | g.planes


def test_inducing_lines(flag):
    assert flag.inducing_lines(0, 2) == [1]


def test_inducing_lines_empty_and_double():
    bare = graph({0: "point", 1: "plane"}, e2=[(0, 1)])
    assert bare.inducing_lines(0, 1) == []
    two = graph(
        {0: "point", 1: "line", 2: "line", 3: "plane"},
        e=[(0, 1), (0, 2), (1, 3), (2, 3)],
        e2=[(0, 3)],
    )
    assert two.inducing_lines(0, 3) == [1, 2]
    with pytest.raises(NotAnE2Edge):
        bare.inducing_lines(1, 0) if False else two.inducing_lines(0, 1)


def test_roundtrip_bit_exact(flag, double_line):
    for g in (flag, double_line):
        text = g.serialize()
        again = parse_graph(text)
        assert again.serialize() == text
        assert graphs_equal_on(g, again, g.ids)


def test_dual_swaps_points_and_planes(flag):
    d = flag.dual()
    assert d.sort_of(0) is Sort.PLANE
    assert d.sort_of(2) is Sort.POINT
    assert d.dual().serialize() == flag.serialize()


def test_relabel(flag):
    r = flag.relabel({0: 10})
    assert 10 in r.points and 0 not in r
    assert r.has_e(10, 1) and r.has_e2(10, 2)


def test_isomorphisms_trivial(flag):
    embs = isomorphisms_over(flag, flag.ids, (), ())
    assert len(embs) == 1


def test_isomorphisms_two_points_on_line():
    g = graph({0: "line", 1: "point", 2: "point"}, e=[(0, 1), (0, 2)])
    embs = isomorphisms_over(g, {0}, {1}, {2})
    assert len(embs) == 1
    assert embs[0].apply(1) == 2


def test_isomorphisms_two_planes_over_points():
    g = graph(
        {0: "point", 1: "point", 2: "plane", 3: "plane"},
        e2=[(0, 2), (1, 2), (0, 3), (1, 3)],
    )
    embs = isomorphisms_over(g, {0, 1}, {2}, {3})
    assert len(embs) == 1


def test_isomorphisms_symmetric():
    g = graph(
        {0: "point", 1: "point", 2: "plane", 3: "plane"},
        e2=[(0, 2), (1, 2), (0, 3), (1, 3)],
    )
    fwd = isomorphisms_over(g, {0, 1}, {2}, {3})
    back = isomorphisms_over(g, {0, 1}, {3}, {2})
    assert {(2, e.apply(2)) for e in fwd} == {(b.apply(3), 3) for b in back}


def test_canonical_code_is_label_invariant(flag):
    shuffled = flag.relabel({0: 5, 1: 9, 2: 7})
    assert canonical_code(flag) == canonical_code(shuffled)
    assert canonical_code(flag, marked=(0,)) == canonical_code(shuffled, marked=(5,))
    # marking matters
    assert canonical_code(flag, marked=(0,)) != canonical_code(flag, marked=(2,))


def test_embedding_identity_on_base():
    emb = Embedding.of({0: 0, 1: 4}, base=(0,))
    assert emb.apply(0) == 0 and emb.apply(1) == 4
    assert emb.image({0, 1}) == frozenset({0, 4})


def test_no_self_incidence():
    with pytest.raises((SortViolation, BadParameter)):
        graph({0: "point", 1: "line"}, e=[(1, 1)])
