import random

import pytest

from trigeom.config import Budgets, StrongnessMode
from trigeom.errors import BudgetExceeded, MixedSorts
from trigeom.generate import random_graph, random_member, random_strong_pair
from trigeom.graph import Sort
from trigeom.predim import (
    closure,
    d_independent,
    d_rel,
    d_value,
    delta,
    delta1,
    delta_rel,
    is_L_strong,
    is_algebraic,
    is_k_strong,
    is_strong,
)

from conftest import graph

LCL = StrongnessMode.LCLOSED
LIT = StrongnessMode.LITERAL


# ---- delta -----------------------------------------------------------------


def test_singleton_weights():
    assert delta(graph({0: "point"}), {0}) == 10
    assert delta(graph({0: "line"}), {0}) == 14
    assert delta(graph({0: "plane"}), {0}) == 10


def test_point_line_edge():
    g = graph({0: "point", 1: "line"}, e=[(0, 1)])
    assert delta(g, {0, 1}) == 15


def test_flag_is_sixteen(flag):
    # 14 + 20 - 18 - (1 - 1)*5, the flag pays its E2 back
    assert delta(flag, {0, 1, 2}) == 16
    assert delta(flag, ()) == 0


def test_delta_rel_examples(flag):
    assert delta_rel(flag, {0}, {0, 1, 2}) == 0  # B inside A
    g = graph({0: "line", 1: "point"}, e=[(0, 1)])
    assert delta_rel(g, {1}, {0}) == 1


def test_non_submodularity_example():
    for n in (6, 7, 8):
        g = graph(
            {0: "point", 1: "point", 2: "line", 3: "plane"},
            e=[(0, 2), (1, 2), (2, 3)],
            e2=[(0, 3), (1, 3)],
            n=n,
        )
        a = {0, 1}
        b = {0, 1, 2}
        assert delta_rel(g, {3}, a) == 0
        assert delta_rel(g, {3}, b) == 1


def test_delta1():
    g = graph({0: "line"})
    assert delta1(g, {0}) == 5
    g = graph({0: "line", 1: "point"}, e=[(0, 1)])
    assert delta1(g, {0, 1}) == 6
    # 12-cycle alternating points and lines: 6 of each, 12 edges
    sorts = {i: ("point" if i % 2 else "line") for i in range(12)}
    cyc = graph(sorts, e=[(i, (i + 1) % 12) for i in range(12)])
    assert delta1(cyc, range(12)) == 60 - 48


def test_delta1_rejects_mixed_halves():
    g = graph({0: "point", 1: "plane"}, e2=[(0, 1)])
    with pytest.raises(MixedSorts):
        delta1(g, {0, 1})


def test_projective_plane_multiple():
    rng = random.Random(5)
    for _ in range(50):
        g = random_graph(rng, rng.randint(1, 9))
        a = g.points | g.planes
        if not a:
            continue
        sub = g.induced(a)
        assert delta(g, a) == 5 * (2 * len(a) - len(sub.e2))


# ---- strongness ------------------------------------------------------------


def test_l_strong(double_line):
    assert is_L_strong(double_line, double_line.ids, double_line.ids).holds
    v = is_L_strong(double_line, {0, 1}, {0, 1, 2})
    assert not v.holds and v.certificate == 2
    assert is_L_strong(double_line, {0, 1, 2}, {0, 1, 2}).holds


def test_strong_reflexive(flag):
    assert is_strong(flag, flag.ids, flag.ids).holds


def test_strong_fails_on_joining_line():
    g = graph({0: "point", 1: "point", 2: "line"}, e=[(0, 2), (1, 2)])
    v = is_strong(g, {0, 1}, {0, 1, 2})
    assert not v.holds
    assert frozenset(v.certificate) == frozenset({2})
    assert delta_rel(g, {2}, {0, 1}) == -4


def _residue_path(k):
    """Plane 0 with a k-edge path between two fixed residue members.

    Path vertices alternate point/line inside res(0); endpoints are the
    first and last path vertices, A = {0, first, last}."""
    sorts = {0: "plane"}
    e, e2 = [], []
    for i in range(1, k + 2):
        if i % 2 == 1:
            sorts[i] = "point"
            e2.append((0, i))
        else:
            sorts[i] = "line"
            e.append((0, i))
        if i > 1:
            e.append((i - 1, i))
    return graph(sorts, e=e, e2=e2), {0, 1, k + 1}


@pytest.mark.parametrize("k,expect", [(4, False), (5, True), (6, True)])
def test_residue_path_threshold(k, expect):
    g, a = _residue_path(k)
    assert is_strong(g, a, g.ids).holds is expect


def test_k_strong_degenerate(flag):
    assert is_k_strong(flag, {0}, flag.ids, 0).holds
    big = is_k_strong(flag, {0}, flag.ids, 5)
    assert big.holds == is_strong(flag, {0}, flag.ids).holds


def test_k_strong_counts_extension_size():
    g = graph(
        {0: "point", 1: "point", 2: "line", 3: "plane"},
        e=[(0, 2), (1, 2), (2, 3)],
        e2=[(0, 3), (1, 3)],
    )
    v = is_k_strong(g, {0, 1}, g.ids, 1)
    assert not v.holds
    assert frozenset(v.certificate) == frozenset({2})


def test_strong_budget(monkeypatch):
    # with the integer-programming route unavailable, tiny caps must fail
    # loudly instead of truncating the search
    from trigeom import mip

    monkeypatch.setattr(mip, "available", lambda: False)
    rng = random.Random(0)
    g = random_graph(rng, 12)
    with pytest.raises(BudgetExceeded):
        is_strong(g, (), g.ids, budgets=Budgets(subset_cap=3, cluster_cap=0))


# ---- closure ---------------------------------------------------------------


def test_closure_of_strong_set_is_itself(flag):
    assert closure(flag, {0, 1, 2}) == frozenset({0, 1, 2})
    assert closure(flag, flag.ids) == frozenset(flag.ids)


def test_closure_pulls_in_joining_line():
    g = graph({0: "point", 1: "point", 2: "line"}, e=[(0, 2), (1, 2)])
    assert 2 in closure(g, {0, 1})


def test_closure_properties_random():
    rng = random.Random(13)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 9))
        ids = sorted(g.ids)
        a = frozenset(rng.sample(ids, rng.randint(1, len(ids))))
        c = closure(g, a)
        assert a <= c
        assert closure(g, c) == c                     # idempotent
        assert is_strong(g, c, g.ids).holds           # strong
        bigger = frozenset(rng.sample(ids, len(ids))) | a
        assert c <= closure(g, bigger) or not a <= bigger  # monotone


def test_strong_intersection_is_strong():
    rng = random.Random(21)
    hits = 0
    for _ in range(60):
        g = random_graph(rng, rng.randint(3, 9))
        ids = sorted(g.ids)
        s1 = closure(g, frozenset(rng.sample(ids, rng.randint(1, len(ids)))))
        s2 = closure(g, frozenset(rng.sample(ids, rng.randint(1, len(ids)))))
        both = s1 & s2
        assert is_strong(g, both, g.ids).holds
        hits += bool(both)
    assert hits > 5


def test_literal_mode_differs_on_thick_line():
    # a line with 3 points and 7 planes: the line-free trace is negative,
    # so the empty set is literal-non-strong but lclosed-strong
    sorts = {0: "line"}
    sorts.update({i: "point" for i in (1, 2, 3)})
    sorts.update({i: "plane" for i in range(4, 11)})
    e = [(0, i) for i in range(1, 11)]
    e2 = [(p, q) for p in (1, 2, 3) for q in range(4, 11)]
    g = graph(sorts, e=e, e2=e2)
    assert is_strong(g, (), g.ids, LCL).holds
    assert not is_strong(g, (), g.ids, LIT).holds


# ---- d values --------------------------------------------------------------


def test_d_values_on_strong_flag(flag):
    assert d_value(flag, {0}) == 10
    assert d_value(flag, {1}) == 14
    assert d_rel(flag, {0}, {1}) == 1
    assert d_rel(flag, {0}, {1, 2}) == 1
    assert d_rel(flag, {1}, {2}) == 5


def test_is_algebraic(flag):
    assert is_algebraic(flag, 0, {0, 1})
    assert not is_algebraic(flag, 2, {0, 1})
    bare = graph({0: "point", 1: "point", 2: "plane"}, e2=[(0, 2), (1, 2)])
    assert is_algebraic(bare, 2, {0, 1})


def test_d_independence(flag):
    assert d_independent(flag, {0}, {1}, {1}).holds  # C inside B
    dep = d_independent(flag, {0}, (), {2})
    assert not dep.holds  # d(p) = 10 but d(p/e) = 5
    over_line = d_independent(flag, {0}, {1}, {2})
    assert over_line.holds  # both values 1: the 2-ample witness condition


# ---- randomized cross-checks ------------------------------------------------


def test_is_strong_agrees_with_definition():
    """Small random ambients: compare against a direct subset sweep."""
    rng = random.Random(33)
    from itertools import combinations

    for _ in range(60):
        g = random_graph(rng, rng.randint(2, 8))
        ids = sorted(g.ids)
        a = frozenset(rng.sample(ids, rng.randint(1, len(ids))))
        rest = [v for v in ids if v not in a]
        for mode in (LCL, LIT):
            want = True
            for r in range(1, len(rest) + 1):
                for c in combinations(rest, r):
                    s = a | frozenset(c)
                    if mode is LCL and not is_L_strong(g, s, g.ids).holds:
                        continue
                    if delta_rel(g, frozenset(c), a) < 0:
                        want = False
            got = is_strong(g, a, g.ids, mode).holds
            assert got == want, (g.serialize(), sorted(a), mode)
