"""The integer-programming minimisers against the exhaustive sweeps.

Forcing tiny subset caps routes the big-instance paths through the
solver; the reference verdict comes from the full lattice enumeration.
Every solver result is already re-evaluated against the delta kernels
inside mip.py, so a silent solver wobble cannot pass unnoticed; this
suite additionally pins the verdicts themselves.
"""

import random

import pytest

from trigeom import mip
from trigeom.config import Budgets
from trigeom.generate import random_graph
from trigeom.kclass import check_K
from trigeom.predim import closure, is_strong

pytestmark = pytest.mark.skipif(not mip.available(), reason="no MILP solver")

FORCE_MIP = Budgets(subset_cap=0, check_k_cap=0)
SWEEP = Budgets(subset_cap=20, check_k_cap=16, cluster_cap=10_000_000)


def test_is_strong_parity():
    rng = random.Random(51)
    for _ in range(150):
        g = random_graph(rng, rng.randint(2, 11))
        ids = sorted(g.ids)
        a = frozenset(rng.sample(ids, rng.randint(1, len(ids))))
        fast = is_strong(g, a, g.ids, budgets=FORCE_MIP)
        slow = is_strong(g, a, g.ids, budgets=SWEEP)
        assert fast.holds == slow.holds, (g.serialize(), sorted(a))
        if not fast.holds:
            # certificates may differ in shape but must both be violations
            assert fast.certificate and slow.certificate


def test_check_k_parity():
    rng = random.Random(52)
    agree = fails = 0
    for _ in range(150):
        g = random_graph(rng, rng.randint(2, 10))
        fast = check_K(g, FORCE_MIP)
        slow = check_K(g, SWEEP)
        assert fast.holds == slow.holds, g.serialize()
        agree += 1
        fails += not fast.holds
    assert agree == 150 and fails > 20


def test_closure_parity():
    rng = random.Random(53)
    for _ in range(80):
        g = random_graph(rng, rng.randint(2, 10))
        ids = sorted(g.ids)
        a = frozenset(rng.sample(ids, rng.randint(1, len(ids))))
        assert closure(g, a, budgets=FORCE_MIP) == closure(g, a, budgets=SWEEP)
