import random

import pytest

from trigeom.config import Budgets
from trigeom.errors import BudgetExceeded
from trigeom.generate import k_members_upto, random_graph, random_member
from trigeom.graph import Sort
from trigeom.kclass import check_K, check_geometry, check_ngon, in_K
from trigeom.predim import delta

from conftest import graph


def _cycle(length, sorts=("point", "line")):
    v = {i: sorts[i % 2] for i in range(length)}
    return graph(v, e=[(i, (i + 1) % length) for i in range(length)])


# ---- n-gon recognition -------------------------------------------------------


def test_ngon_single_edge_fails():
    g = graph({0: "point", 1: "line"}, e=[(0, 1)])
    assert not check_ngon(g, 2).holds


def test_ngon_hexagon_is_3gon():
    assert check_ngon(_cycle(6), 3).holds


def test_ngon_ten_cycle_fails_at_6():
    v = check_ngon(_cycle(10), 6)
    assert not v.holds
    assert v.certificate is not None


# ---- check_K certificates ----------------------------------------------------


def test_empty_graph_in_K():
    assert check_K(graph({})).holds


def test_double_line_fails_c1(double_line):
    v = check_K(double_line)
    assert not v.holds
    assert v.certificate.condition == "C1"


def test_missing_flag_fails_c4():
    g = graph({0: "point", 1: "line", 2: "plane"}, e=[(0, 1), (1, 2)])
    v = check_K(g)
    assert not v.holds and v.certificate.condition == "C4"


def test_two_common_planes_fail_c3():
    g = graph(
        {0: "point", 1: "point", 2: "plane", 3: "plane"},
        e2=[(0, 2), (1, 2), (0, 3), (1, 3)],
    )
    v = check_K(g)
    assert not v.holds and v.certificate.condition == "C3"


def test_flag_meets_c6a_exactly(flag):
    assert check_K(flag).holds
    assert delta(flag, flag.ids) == 16


def test_short_residue_cycle_fails_c5():
    # plane 0 with a 10-cycle of points and lines in its residue
    sorts = {0: "plane"}
    sorts.update({i: ("point" if i % 2 else "line") for i in range(1, 11)})
    e = [(i, i % 10 + 1) for i in range(1, 11)]
    e += [(0, i) for i in range(1, 11) if sorts[i] == "line"]
    e2 = [(i, 0) for i in range(1, 11) if sorts[i] == "point"]
    g = graph(sorts, e=e, e2=e2)
    v = check_K(g)
    assert not v.holds and v.certificate.condition == "C5"


def test_certificates_recheck():
    rng = random.Random(8)
    for _ in range(120):
        g = random_graph(rng, rng.randint(2, 8))
        v = check_K(g)
        if v.holds:
            continue
        cert = v.certificate
        assert cert.condition in {"C1", "C2", "C3", "C4", "C5", "C6a", "C6b"}
        assert cert.witness


def test_check_k_budget(monkeypatch):
    from trigeom import mip

    monkeypatch.setattr(mip, "available", lambda: False)
    rng = random.Random(2)
    g = random_member(rng, 18)
    assert len(g.ids) > 8
    with pytest.raises(BudgetExceeded):
        check_K(g, Budgets(check_k_cap=4, subset_cap=2, cluster_cap=0))


# ---- hereditary structure ----------------------------------------------------


def test_c1245_hereditary():
    """Induced subgraphs of K-members never violate C1, C2, C4, C5."""
    rng = random.Random(17)
    for _ in range(30):
        g = random_member(rng, rng.randint(4, 9))
        ids = sorted(g.ids)
        sub = g.induced(rng.sample(ids, rng.randint(1, len(ids))))
        v = check_K(sub)
        if not v.holds:
            assert v.certificate.condition in ("C3", "C6a", "C6b")


def test_k_closed_under_intersection():
    rng = random.Random(29)
    tried = 0
    for _ in range(60):
        g = random_member(rng, rng.randint(4, 9))
        ids = sorted(g.ids)
        s1 = frozenset(rng.sample(ids, rng.randint(1, len(ids))))
        s2 = frozenset(rng.sample(ids, rng.randint(1, len(ids))))
        if not (in_K(g.induced(s1)) and in_K(g.induced(s2))):
            continue
        tried += 1
        assert in_K(g.induced(s1 & s2))
    assert tried > 10


def test_k_members_meet_delta_floors():
    for g in k_members_upto(4):
        if not g.ids:
            continue
        d = delta(g, g.ids)
        assert d >= 10
        if g.lines:
            assert d >= 14
        if g.flags():
            assert d >= 16


def test_dual_preserves_c1_to_c5():
    rng = random.Random(41)
    for _ in range(80):
        g = random_graph(rng, rng.randint(2, 7))
        v = check_K(g)
        vd = check_K(g.dual(), dual6b=True)
        if v.holds or v.certificate.condition in ("C1", "C2", "C3", "C4", "C5"):
            # with the dual 6b option the verdict is fully self-dual
            assert check_K(g, dual6b=True).holds == check_K(
                g.dual(), dual6b=True
            ).holds
        del vd


# ---- geometry report ---------------------------------------------------------


def test_geometry_empty_graph():
    rep = check_geometry(graph({}))
    assert rep.holds_universal
    for stats in rep.coverage.values():
        if isinstance(stats, dict):
            assert stats.get("total", 0) == 0


def test_geometry_flags_double_line(double_line):
    rep = check_geometry(double_line)
    assert not rep.holds_universal


def test_geometry_on_flag(flag):
    assert check_geometry(flag).holds_universal
