"""The compiled kernel and the pure-Python twin must agree bit for bit."""

import random

import pytest

from trigeom import _kernel_py
from trigeom.generate import random_graph
from trigeom.masks import context_for
from trigeom.predim import delta

try:
    from trigeom import _kernel
except ImportError:
    _kernel = None

needs_ext = pytest.mark.skipif(_kernel is None, reason="no compiled extension")


def _random_ctx(rng, size):
    return context_for(random_graph(rng, size))


def test_pure_delta_matches_definition():
    """The mask kernel against the incremental python delta on subsets."""
    rng = random.Random(1)
    for _ in range(80):
        g = random_graph(rng, rng.randint(1, 10))
        ctx = context_for(g)
        ids = sorted(g.ids)
        sub = rng.sample(ids, rng.randint(0, len(ids)))
        assert _kernel_py.delta_mask(ctx, ctx.mask_of(sub)) == delta(g, sub)


@needs_ext
def test_delta_mask_parity():
    rng = random.Random(2)
    for _ in range(200):
        ctx = _random_ctx(rng, rng.randint(1, 12))
        mask = rng.randrange(1 << ctx.m)
        assert _kernel.delta_mask(ctx, mask) == _kernel_py.delta_mask(ctx, mask)


@needs_ext
def test_delta_table_parity():
    rng = random.Random(3)
    for _ in range(60):
        ctx = _random_ctx(rng, rng.randint(1, 10))
        positions = list(range(ctx.m))
        rng.shuffle(positions)
        free = positions[: rng.randint(0, min(8, ctx.m))]
        base = 0
        for p in positions[len(free):]:
            if rng.random() < 0.4:
                base |= 1 << p
        assert _kernel.delta_table(ctx, base, free) == _kernel_py.delta_table(
            ctx, base, free
        )


@needs_ext
def test_scan_min_parity():
    rng = random.Random(4)
    for _ in range(120):
        ctx = _random_ctx(rng, rng.randint(2, 10))
        positions = list(range(ctx.m))
        rng.shuffle(positions)
        k = rng.randint(1, min(8, ctx.m))
        free = positions[:k]
        base = 0
        for p in positions[k:]:
            if rng.random() < 0.5:
                base |= 1 << p
        amb = ctx.full_mask
        for lclosed in (False, True):
            got = _kernel.scan_min(ctx, base, free, amb, lclosed, k)
            want = _kernel_py.scan_min(ctx, base, free, amb, lclosed, k)
            assert got == want
