import random

import pytest

from trigeom.amalgam import (
    MuPolicy,
    PairOverBase,
    amalgamate,
    check_Kmu,
    chi,
    classify_extension,
    decompose_minimal,
    enumerate_copies,
    free_amalgam,
    mu_value,
    pair_core,
)
from trigeom.errors import (
    InvalidOverride,
    NotSimple,
    PreconditionFailed,
)
from trigeom.generate import (
    random_free_instance,
    random_member,
    random_strong_triple,
)
from trigeom.predim import delta, delta_rel, is_strong

from conftest import graph


def _bare_plane_pair():
    """Two points with one bare common plane: the mu-shape-2 simple pair."""
    g = graph({0: "point", 1: "point", 2: "plane"}, e2=[(0, 2), (1, 2)])
    return PairOverBase(g, frozenset({0, 1}), frozenset({2}))


def _residue_path_pair():
    """Plane base {x,a,b} with a 4-new-element residue path: mu-shape 3."""
    sorts = {0: "plane", 1: "point", 6: "point"}
    sorts.update({2: "line", 3: "point", 4: "line", 5: "point"})
    sorts[5] = "line"
    sorts[3] = "point"
    # path 1-2-3-4-5-6 inside res(0): point,line,point,line alternation
    sorts = {0: "plane", 1: "point", 2: "line", 3: "point", 4: "line",
             5: "point", 6: "line"}
    e = [(0, v) for v, s in sorts.items() if s == "line"]
    e += [(i, i + 1) for i in range(1, 6)]
    e2 = [(0, v) for v, s in sorts.items() if s == "point"]
    g = graph(sorts, e=e, e2=e2)
    return PairOverBase(g, frozenset({0, 1, 6}), frozenset({2, 3, 4, 5}))


# ---- free amalgam ------------------------------------------------------------


def test_free_amalgam_induces_e2_through_base_lines():
    b = graph({0: "line", 1: "point"}, e=[(0, 1)])
    c = graph({0: "line", 2: "plane"}, e=[(0, 2)])
    d = free_amalgam(b, frozenset({0}), c)
    assert d.has_e2(1, 2)  # induced through the shared line
    assert len(d.flags()) == 1


def test_free_amalgam_no_other_cross_edges():
    b = graph({0: "point", 1: "plane"}, e2=[(0, 1)])
    c = graph({0: "point", 2: "plane"}, e2=[(0, 2)])
    d = free_amalgam(b, frozenset({0}), c)
    assert not d.has_e2(1, 2) if (1 in d.points or 2 in d.points) else True
    assert d.has_e2(0, 1) and d.has_e2(0, 2)


def test_free_amalgam_additivity_random():
    rng = random.Random(7)
    for _ in range(60):
        d, a, b, c = random_free_instance(rng, max_d=12)
        lhs = delta(d, d.ids)
        rhs = delta(b, b.ids) + delta(c, c.ids) - delta(b, a)
        assert lhs == rhs


def test_free_amalgam_strongness_transfer_random():
    rng = random.Random(19)
    for _ in range(40):
        d, a, b, c = random_free_instance(rng, max_d=12)
        # A <= C transfers to B <= D (and symmetrically)
        assert is_strong(d, frozenset(b.ids), d.ids).holds
        assert is_strong(d, frozenset(c.ids), d.ids).holds


# ---- pair machinery ----------------------------------------------------------


def test_pair_core_drops_induced_edges(flag):
    # the E2 edge (0,2) is induced by line 1, so 0 leaves the core
    assert pair_core(flag, frozenset({0, 2}), frozenset({1})) == frozenset({0, 2})
    assert pair_core(flag, frozenset({0}), frozenset({1, 2})) == frozenset({0})
    bare = graph({0: "point", 1: "plane"}, e2=[(0, 1)])
    assert pair_core(bare, frozenset({0}), frozenset({1})) == frozenset({0})


def test_classify_bare_plane_simple():
    pair = _bare_plane_pair()
    cls = classify_extension(pair.ambient, pair.a, pair.b)
    assert cls == {"i": 0, "minimal": True, "simple": True}


def test_classify_residue_path_simple():
    pair = _residue_path_pair()
    cls = classify_extension(pair.ambient, pair.a, pair.b)
    assert cls == {"i": 0, "minimal": True, "simple": True}


def test_classify_point_on_line():
    g = graph({0: "line", 1: "point"}, e=[(0, 1)])
    cls = classify_extension(g, frozenset({0}), frozenset({1}))
    assert cls["i"] == 1 and cls["minimal"] and not cls["simple"]


def test_decompose_chain_invariants():
    rng = random.Random(3)
    for _ in range(25):
        c0, c1, c2 = random_strong_triple(rng, 8)
        base = frozenset(c0.ids)
        ext = frozenset(c2.ids) - base
        chain = decompose_minimal(c2, base, ext)
        assert chain[0] == base and chain[-1] == base | ext
        for prev, nxt in zip(chain, chain[1:]):
            assert prev < nxt
            assert is_strong(c2, prev, nxt).holds


# ---- mu and chi --------------------------------------------------------------


def test_mu_shape_two_is_one():
    assert mu_value(MuPolicy(), _bare_plane_pair()) == 1


def test_mu_shape_three_is_one():
    assert mu_value(MuPolicy(), _residue_path_pair()) == 1


def test_mu_rejects_non_simple(flag):
    with pytest.raises(NotSimple):
        mu_value(MuPolicy(), PairOverBase(flag, frozenset({0}), frozenset({1})))


def test_mu_floor_and_override(monkeypatch):
    """Generic simple pairs at n=6 are too large to enumerate here, so the
    floor logic is exercised by turning off the special-shape detection on
    the bare-plane pair: the canonical value becomes 2 delta(A) and any
    override below it must be rejected."""
    import trigeom.amalgam as am

    monkeypatch.setattr(am, "_is_shape_two", lambda *a: False)
    monkeypatch.setattr(am, "_is_shape_three", lambda *a: False)
    pair = _bare_plane_pair()
    assert mu_value(MuPolicy(), pair) == 2 * delta(pair.ambient, pair.a) == 40
    assert mu_value(MuPolicy(overrides={pair.code(): 41}), pair) == 41
    with pytest.raises(InvalidOverride):
        mu_value(MuPolicy(overrides={pair.code(): 39}), pair)


def test_chi_counts_disjoint_copies():
    g = graph(
        {0: "point", 1: "point", 2: "plane", 3: "plane"},
        e2=[(0, 2), (1, 2), (0, 3), (1, 3)],
    )
    pair = PairOverBase(g.induced({0, 1, 2}), frozenset({0, 1}), frozenset({2}))
    copies = enumerate_copies(g, pair)
    assert sorted(map(sorted, copies)) == [[2], [3]]
    assert chi(g, pair) == 2


def test_check_kmu_flag(flag):
    assert check_Kmu(flag).holds


def test_check_kmu_two_common_planes():
    g = graph(
        {0: "point", 1: "point", 2: "plane", 3: "plane"},
        e2=[(0, 2), (1, 2), (0, 3), (1, 3)],
    )
    v = check_Kmu(g)
    assert not v.holds
    assert v.detail["stage"] == "K"  # C3 catches it before the chi stage


# ---- amalgamation ------------------------------------------------------------


def test_amalgamate_degenerate(flag):
    base = flag.induced(flag.ids)
    res = amalgamate(base, flag, flag.induced(flag.ids))
    assert sorted(res.d.ids) == sorted(flag.ids)


def test_amalgamate_rejects_bad_inputs(flag, double_line):
    with pytest.raises(PreconditionFailed):
        amalgamate(double_line.induced({0, 1}), double_line, double_line)


def test_amalgamate_random_triples():
    rng = random.Random(23)
    for _ in range(40):
        c0, c1, c2 = random_strong_triple(rng, 8)
        res = amalgamate(c0, c1, c2)
        assert check_Kmu(res.d).holds
        assert is_strong(res.d, res.embed1.image(c1.ids), res.d.ids).holds
        assert is_strong(res.d, res.embed2.image(c2.ids), res.d.ids).holds
        for entry in res.path:
            assert entry["resolution"] in ("free", "internal")


def test_amalgamate_folds_bare_plane():
    """Both sides add a bare plane over the same two points: chi would
    reach 2 > mu = 1, so the second side must fold onto the first."""
    base = graph({0: "point", 1: "point"})
    side1 = graph({0: "point", 1: "point", 2: "plane"}, e2=[(0, 2), (1, 2)])
    side2 = graph({0: "point", 1: "point", 3: "plane"}, e2=[(0, 3), (1, 3)])
    res = amalgamate(base, side1, side2)
    assert len(res.d.ids) == 3  # folded, not doubled
    assert res.embed2.apply(3) == 2
    assert any(e["resolution"] == "internal" for e in res.path)
    assert check_Kmu(res.d).holds


def test_free_amalgam_k_failure_classification():
    """Randomized search for a counterexample to: a K_mu failure of a free
    amalgam over an i-minimal step forces i = 0.  The amalgamate loop
    raises InternalCopyMissing if this is ever violated, so a clean pass
    over random triples is the test."""
    rng = random.Random(31)
    for _ in range(40):
        c0, c1, c2 = random_strong_triple(rng, 7)
        res = amalgamate(c0, c1, c2)  # raises on any classification breach
        assert res.d is not None
