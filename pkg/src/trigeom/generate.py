"""Instance generators for the test and acceptance suites.

Two families live here: exhaustive enumerators (deterministic, used for
the small-size censuses and the residue-degree sweeps) and random
growers (seeded through an explicit random.Random, used for the
property suites).  Random members are always verified before they are
returned: a grower never hands out a graph it has not just checked.
"""

from itertools import combinations
from random import Random

from .amalgam import MuPolicy, check_Kmu, free_amalgam
from .config import Budgets
from .errors import BadParameter
from .graph import Sort, TriGraph, canonical_code
from .kclass import check_K
from .predim import closure, is_strong

_DEFAULT_BUDGETS = Budgets()

_SORT_ORDER = (Sort.POINT, Sort.LINE, Sort.PLANE)


def _slots(sorts: dict[int, Sort]):
    """Admissible edge slots between distinct-sort vertices, split by kind."""
    e_slots, e2_slots = [], []
    ids = sorted(sorts)
    for i, u in enumerate(ids):
        for v in ids[i + 1:]:
            su, sv = sorts[u], sorts[v]
            if su == sv:
                continue
            if {su, sv} == {Sort.POINT, Sort.PLANE}:
                e2_slots.append((u, v))
            else:
                e_slots.append((u, v))
    return e_slots, e2_slots


def _sort_splits(size: int):
    for n_pt in range(size + 1):
        for n_ln in range(size + 1 - n_pt):
            yield n_pt, n_ln, size - n_pt - n_ln


def graphs_of_size(size: int, n: int = 6, distinct: bool = True):
    """Every 3-sorted graph on ``size`` vertices (ids 0..size-1).

    Sorts are assigned in blocks, so only edge subsets vary per split;
    with ``distinct`` set, one representative per isomorphism class.
    """
    if size < 1:
        raise BadParameter("size must be positive")
    seen: set[str] = set()
    for counts in _sort_splits(size):
        sorts: dict[int, Sort] = {}
        nxt = 0
        for cnt, s in zip(counts, _SORT_ORDER):
            for _ in range(cnt):
                sorts[nxt] = s
                nxt += 1
        e_slots, e2_slots = _slots(sorts)
        width = len(e_slots) + len(e2_slots)
        for bits in range(1 << width):
            e = [e_slots[i] for i in range(len(e_slots)) if bits >> i & 1]
            e2 = [
                e2_slots[i]
                for i in range(len(e2_slots))
                if bits >> (len(e_slots) + i) & 1
            ]
            g = TriGraph.build(n, sorts, e, e2, allow_small_n=n < 6)
            if distinct:
                code = canonical_code(g)
                if code in seen:
                    continue
                seen.add(code)
            yield g


def k_members_upto(
    max_size: int,
    n: int = 6,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
):
    """All K-members with 1..max_size vertices, one per isomorphism class."""
    for size in range(1, max_size + 1):
        for g in graphs_of_size(size, n):
            if check_K(g, budgets, dual6b).holds:
                yield g


def census(
    max_size: int,
    n: int = 6,
    policy: MuPolicy | None = None,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
) -> list[dict]:
    """Per-size isomorphism-class counts: all graphs, K, K_mu."""
    rows = []
    for size in range(1, max_size + 1):
        total = in_k = in_kmu = 0
        for g in graphs_of_size(size, n):
            total += 1
            if not check_K(g, budgets, dual6b).holds:
                continue
            in_k += 1
            if check_Kmu(g, policy, budgets, dual6b).holds:
                in_kmu += 1
        rows.append({"size": size, "classes": total, "k": in_k, "k_mu": in_kmu})
    return rows


# ---- residue configurations ------------------------------------------------


def residue_configs(x_sort: Sort, max_size: int, n: int = 6):
    """Every configuration A inside the residue of a single vertex x.

    x gets id 0.  For a point or plane x the residue holds lines (E to x)
    and dual-sort vertices (E2 to x), with every line-to-dual E edge
    optional; for a line x it holds points and planes (both E to x) with
    the point-plane E2 edges optional.  Yields (graph, 0, A) with A the
    ids 1..size.
    """
    dual = x_sort.dual if x_sort != Sort.LINE else None
    for size in range(max_size + 1):
        for first in range(size + 1):
            rest = size - first
            sorts = {0: x_sort}
            if x_sort == Sort.LINE:
                group1 = [1 + i for i in range(first)]           # points
                group2 = [1 + first + i for i in range(rest)]    # planes
                for v in group1:
                    sorts[v] = Sort.POINT
                for v in group2:
                    sorts[v] = Sort.PLANE
                base_e = [(0, v) for v in group1 + group2]
                base_e2 = []
                pair_kind = "e2"
            else:
                group1 = [1 + i for i in range(first)]           # lines
                group2 = [1 + first + i for i in range(rest)]    # dual sort
                for v in group1:
                    sorts[v] = Sort.LINE
                for v in group2:
                    sorts[v] = dual
                base_e = [(0, v) for v in group1]
                base_e2 = [(0, v) for v in group2]
                pair_kind = "e"
            pairs = [(u, v) for u in group1 for v in group2]
            for bits in range(1 << len(pairs)):
                extra = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
                if pair_kind == "e":
                    g = TriGraph.build(n, sorts, base_e + extra, base_e2)
                else:
                    g = TriGraph.build(n, sorts, base_e, base_e2 + extra)
                yield g, 0, frozenset(group1 + group2)


def random_residue_instance(rng: Random, max_size: int = 8, n: int = 6):
    """One random (graph, x, A) with A inside the residue of x.

    x is a point or a plane: those are the sorts whose residues carry
    the rank-2 predimension (a line's residue weighs its own flags)."""
    x_sort = rng.choice((Sort.POINT, Sort.PLANE))
    size = rng.randint(1, max_size)
    first = rng.randint(0, size)
    dual = x_sort.dual if x_sort != Sort.LINE else None
    sorts = {0: x_sort}
    group1 = list(range(1, 1 + first))
    group2 = list(range(1 + first, 1 + size))
    if x_sort == Sort.LINE:
        for v in group1:
            sorts[v] = Sort.POINT
        for v in group2:
            sorts[v] = Sort.PLANE
        e = [(0, v) for v in group1 + group2]
        e2 = [(u, v) for u in group1 for v in group2 if rng.random() < 0.4]
    else:
        for v in group1:
            sorts[v] = Sort.LINE
        for v in group2:
            sorts[v] = dual
        e = [(0, v) for v in group1]
        e += [(u, v) for u in group1 for v in group2 if rng.random() < 0.4]
        e2 = [(0, v) for v in group2]
    g = TriGraph.build(n, sorts, e, e2)
    return g, 0, frozenset(group1 + group2)


# ---- random graphs and members --------------------------------------------


def random_graph(rng: Random, size: int, n: int = 6, p: float = 0.35) -> TriGraph:
    """A random 3-sorted graph; no class membership is promised."""
    sorts = {v: rng.choice(_SORT_ORDER) for v in range(size)}
    e_slots, e2_slots = _slots(sorts)
    e = [s for s in e_slots if rng.random() < p]
    e2 = [s for s in e2_slots if rng.random() < p]
    return TriGraph.build(n, sorts, e, e2, allow_small_n=n < 6)


def _flag_seed(n: int) -> TriGraph:
    return TriGraph.build(
        n,
        {0: Sort.POINT, 1: Sort.LINE, 2: Sort.PLANE},
        e=[(0, 1), (1, 2)],
        e2=[(0, 2)],
        allow_small_n=n < 6,
    )


def grow_member(
    g: TriGraph,
    rng: Random,
    target: int,
    n: int = 6,
    policy: MuPolicy | None = None,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
    tries: int = 400,
) -> TriGraph:
    """Extend a K_mu member one random vertex at a time, keeping only
    attachments whose result passes check_Kmu.  Returns the largest
    member reached within the try budget (possibly g itself)."""
    while len(g.ids) < target and tries > 0:
        tries -= 1
        v = max(g.ids) + 1
        s = rng.choice(_SORT_ORDER)
        hosts = list(g.ids)
        rng.shuffle(hosts)
        e, e2 = [], []
        for u in hosts[: rng.randint(1, 2)]:
            su = g.sort_of(u)
            if su == s:
                continue
            if {su, s} == {Sort.POINT, Sort.PLANE}:
                e2.append((u, v))
            else:
                e.append((u, v))
        if not (e or e2):
            continue
        sorts = dict(g.vertices)
        sorts[v] = s
        cand = TriGraph.build(
            n, sorts, list(g.e) + e, list(g.e2) + e2, allow_small_n=n < 6
        )
        if check_Kmu(cand, policy, budgets, dual6b).holds:
            g = cand
    return g


def random_member(
    rng: Random,
    size: int,
    n: int = 6,
    policy: MuPolicy | None = None,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
) -> TriGraph:
    """A random K_mu member grown from the flag seed, about ``size`` big."""
    return grow_member(_flag_seed(n), rng, size, n, policy, budgets, dual6b)


def random_strong_pair(
    rng: Random,
    size: int = 10,
    n: int = 6,
    budgets: Budgets = _DEFAULT_BUDGETS,
):
    """(member, A) with A strong in the member (A is a closure, so this
    holds by construction and is re-verified)."""
    g = random_member(rng, size, n, budgets=budgets)
    ids = sorted(g.ids)
    seedset = frozenset(rng.sample(ids, rng.randint(1, max(1, len(ids) - 2))))
    a = closure(g, seedset, budgets=budgets)
    if not is_strong(g, a, g.ids, budgets=budgets).holds:
        raise BadParameter("closure returned a non-strong set")  # unreachable
    return g, a


def random_strong_triple(
    rng: Random,
    max_size: int = 8,
    n: int = 6,
    policy: MuPolicy | None = None,
    budgets: Budgets = _DEFAULT_BUDGETS,
):
    """(c0, c1, c2): two K_mu members sharing the base c0 strongly.

    c1 is a grown member, c0 the closure of a random subset, c2 the
    induced graph on a larger closure; both closures are strong in c1,
    and c0 is strong in c2 because strongness relativises downward.
    """
    c1 = random_member(rng, rng.randint(4, max_size), n, policy, budgets)
    ids = sorted(c1.ids)
    base = closure(
        c1, frozenset(rng.sample(ids, rng.randint(1, max(1, len(ids) // 2)))),
        budgets=budgets,
    )
    larger = closure(c1, base | {rng.choice(ids)}, budgets=budgets)
    c2 = c1.induced(larger)
    return c1.induced(base), c1, c2


def random_free_instance(
    rng: Random,
    max_d: int = 12,
    n: int = 6,
    budgets: Budgets = _DEFAULT_BUDGETS,
):
    """(d, a, b_graph, c_graph): a free amalgam of two strong extensions
    of a common base, |d| <= max_d.  The sides come from one grown
    member, so the base is strong on both sides."""
    while True:
        half = max(4, max_d // 2 + 1)
        c0, c1, c2 = random_strong_triple(rng, half, n, budgets=budgets)
        side = frozenset(c2.ids) - frozenset(c0.ids)
        if not side:
            continue
        # relabel the second side clear of the first
        shift = max(c1.ids) + 1
        c2 = c2.relabel({v: v + shift for v in side})
        d = free_amalgam(c1, frozenset(c0.ids), c2)
        if len(d.ids) <= max_d:
            return d, frozenset(c0.ids), c1, c2
