"""Membership in the class K, generalized n-gon recognition and the
target-geometry report.

The subset quantification in condition 6 exempts exactly those subsets that
fail one of conditions 1-5 themselves (the recursive reading is circular;
see the project ledger).  Violations of conditions 1, 2, 4 and 5 are
upward-closed, so they are precompiled into witness masks and the lattice
sweep only recomputes the non-monotone condition 3 per subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import kernels, mip
from .config import Budgets, Verdict
from .errors import BadParameter, BudgetExceeded, OracleMismatch
from .graph import Sort, TriGraph
from .masks import context_for
from .predim import _neg_margins, delta1

_DEFAULT_BUDGETS = Budgets()


@dataclass(frozen=True)
class KCertificate:
    """Which membership condition failed, and on what."""

    condition: str  # C1 .. C5, C6a, C6b
    witness: tuple

    def to_doc(self) -> dict:
        return {"condition": self.condition, "witness": list(self.witness)}


# ---- generic small-graph walkers ----------------------------------------


def _bfs_dist(adj: dict[int, frozenset[int]], root: int) -> dict[int, int]:
    dist = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def _girth(adj: dict[int, frozenset[int]]) -> int | None:
    """Length of a shortest cycle, None if acyclic."""
    best = None
    for root in sorted(adj):
        dist = {root: 0}
        parent = {root: None}
        frontier = [root]
        while frontier:
            nxt = []
            for u in frontier:
                for v in sorted(adj[u]):
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        parent[v] = u
                        nxt.append(v)
                    elif parent[u] != v:
                        c = dist[u] + dist[v] + 1
                        if best is None or c < best:
                            best = c
            frontier = nxt
    return best


def _cycle_rank(adj: dict[int, frozenset[int]]) -> int:
    """Edges minus vertices plus components: independent cycle count."""
    edges = sum(len(nbrs) for nbrs in adj.values()) // 2
    seen: set[int] = set()
    comps = 0
    for root in adj:
        if root in seen:
            continue
        comps += 1
        stack = [root]
        seen.add(root)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return edges - len(adj) + comps


def _least_cycle(adj: dict[int, frozenset[int]], length: int) -> tuple | None:
    """Lexicographically least simple cycle of exactly this length.

    Canonical form: starts at its minimal vertex, second entry smaller than
    the last (direction fix).
    """
    for v0 in sorted(adj):
        path = [v0]
        used = {v0}

        def search() -> tuple | None:
            if len(path) == length:
                if path[1] < path[-1] and v0 in adj[path[-1]]:
                    return tuple(path)
                return None
            for u in sorted(adj[path[-1]]):
                if u in used or u < v0:
                    continue
                path.append(u)
                used.add(u)
                hit = search()
                if hit:
                    return hit
                path.pop()
                used.discard(u)
            return None

        hit = search()
        if hit:
            return hit
    return None


def _all_short_cycles(adj: dict[int, frozenset[int]], below: int, budget: int):
    """Vertex sets of all simple cycles shorter than ``below``."""
    out: set[frozenset[int]] = set()
    nodes = 0
    for v0 in sorted(adj):
        path = [v0]
        used = {v0}

        def search():
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("cycle enumeration exceeded its budget")
            if len(path) >= 3 and v0 in adj[path[-1]] and path[1] < path[-1]:
                out.add(frozenset(path))
            if len(path) + 1 >= below:
                return
            for u in sorted(adj[path[-1]]):
                if u in used or u < v0:
                    continue
                path.append(u)
                used.add(u)
                search()
                path.pop()
                used.discard(u)

        search()
    return out


def _has_cycle_at_least(adj: dict[int, frozenset[int]], length: int, budget: int) -> bool:
    nodes = 0
    verts = sorted(adj)
    for v0 in verts:
        path = [v0]
        used = {v0}

        def search() -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded("long-cycle search exceeded its budget")
            if len(path) >= length and v0 in adj[path[-1]]:
                return True
            for u in sorted(adj[path[-1]]):
                if u in used or u < v0:
                    continue
                path.append(u)
                used.add(u)
                if search():
                    return True
                path.pop()
                used.discard(u)
            return False

        if search():
            return True
    return False


def _trace_adj(g: TriGraph, sub: frozenset[int]) -> dict[int, frozenset[int]]:
    return {
        v: (g.e_adj[v] | g.e2_adj[v]) & sub
        for v in sub
    }


# ---- generalized n-gon ---------------------------------------------------


def check_ngon(b: TriGraph, n: int) -> Verdict:
    """Diameter exactly n and girth at least 2n, edges E ∪ E2."""
    if n < 2:
        raise BadParameter("gon parameter must be >= 2")
    sorts = {s for _, s in b.vertices}
    if len(sorts) > 2:
        raise BadParameter("n-gon check expects a bipartite (two-sort) graph")
    sub = frozenset(b.ids)
    adj = _trace_adj(b, sub)
    g = _girth(adj)
    if g is not None and g < 2 * n:
        return Verdict(
            False, "check_ngon",
            certificate=_least_cycle(adj, g),
            detail={"girth": g, "required_girth": 2 * n},
        )
    diam = 0
    far = None
    for root in sorted(adj):
        dist = _bfs_dist(adj, root)
        missing = [v for v in sorted(adj) if v not in dist]
        if missing:
            return Verdict(
                False, "check_ngon",
                certificate=(root, missing[0]),
                detail={"disconnected": True},
            )
        for v in sorted(adj):
            if dist[v] > diam:
                diam = dist[v]
                far = (root, v)
    if diam != n:
        return Verdict(
            False, "check_ngon",
            certificate=far if diam > n else None,
            detail={"diameter": diam, "required": n, "girth": g},
        )
    return Verdict(True, "check_ngon", detail={"diameter": diam, "girth": g})


# ---- conditions 1-5 ------------------------------------------------------


def _c1_witnesses(g: TriGraph):
    out = []
    for part in (g.points, g.planes):
        for u, v in combinations(sorted(part), 2):
            common = sorted(g.e_adj[u] & g.e_adj[v] & g.lines)
            for l1, l2 in combinations(common, 2):
                out.append((u, v, l1, l2))
    return out


def _c2_witnesses(g: TriGraph):
    out = []
    for part, other in ((g.points, g.planes), (g.planes, g.points)):
        for u, v in combinations(sorted(part), 2):
            for l in sorted(g.e_adj[u] & g.e_adj[v] & g.lines):
                for w in sorted(g.e2_adj[u] & g.e2_adj[v] & other):
                    if w not in g.e_adj[l]:
                        out.append((u, v, l, w))
    return out


def _c4_witnesses(g: TriGraph):
    out = []
    for l in sorted(g.lines):
        for p in sorted(g.e_adj[l] & g.points):
            for e in sorted(g.e_adj[l] & g.planes):
                if e not in g.e2_adj[p]:
                    out.append((p, l, e))
    return out


def _c5_witnesses(g: TriGraph, budget: int):
    """(x, cycle-vertex-set) for every short cycle in a point/plane residue."""
    out = []
    for x in sorted(g.points | g.planes):
        adj = _trace_adj(g, g.residue(x))
        for cyc in sorted(_all_short_cycles(adj, 2 * g.n, budget), key=sorted):
            out.append((x, cyc))
    return out


def _c3_pairs(g: TriGraph):
    """Same-sort pairs with at least two common E2 partners in the full
    graph; only these can ever witness a condition-3 failure."""
    out = []
    for part, other in ((g.points, g.planes), (g.planes, g.points)):
        for u, v in combinations(sorted(part), 2):
            common = g.e2_adj[u] & g.e2_adj[v] & other
            if len(common) >= 2:
                lines = g.e_adj[u] & g.e_adj[v] & g.lines
                out.append((u, v, common, lines))
    return out


def _c3_violation(pairs, present: frozenset[int]):
    for u, v, common, lines in pairs:
        if u not in present or v not in present:
            continue
        if lines & present:
            continue
        c = sorted(common & present)
        if len(c) >= 2:
            return (u, v, c[0], c[1])
    return None


def check_K(
    g: TriGraph,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
) -> Verdict:
    """Full membership check, conditions 1 through 6.

    Condition 6 sweeps the subset lattice; subsets failing conditions 1-5
    are exempt from the delta bounds.
    """
    def fail(cond: str, witness: tuple) -> Verdict:
        return Verdict(False, "check_K", certificate=KCertificate(cond, witness))

    c1 = _c1_witnesses(g)
    if c1:
        return fail("C1", c1[0])
    c2 = _c2_witnesses(g)
    if c2:
        return fail("C2", c2[0])
    pairs = _c3_pairs(g)
    hit = _c3_violation(pairs, frozenset(g.ids))
    if hit:
        return fail("C3", hit)
    c4 = _c4_witnesses(g)
    if c4:
        return fail("C4", c4[0])
    c5 = _c5_witnesses(g, budgets.cluster_cap)
    if c5:
        x, cyc = c5[0]
        adj = _trace_adj(g, g.residue(x))
        return fail("C5", (x, _least_cycle(adj, _girth(adj))))

    if len(g) > budgets.check_k_cap:
        return _check_c6_large(g, budgets, dual6b, fail)

    # condition 6: lattice sweep; C1/C2/C4 violations never arise in
    # subsets once the full graph is clean, C5 short cycles survive only
    # if their vertex set does, C3 is rechecked per subset
    ctx = context_for(g)
    m = len(g)
    table, _ = kernels.delta_table(ctx, 0, list(range(m)))
    floor6a = 3 * (g.n - 1) + 1
    floor6b = 2 * (g.n + 1)
    res_masks = {}
    sides = [g.points] + ([g.planes] if dual6b else [])
    for side in sides:
        for x in sorted(side):
            res_masks[x] = ctx.mask_of(g.residue(x))
    xs = sorted(res_masks)
    for mask in range(1, 1 << m):
        if mask.bit_count() >= 3 and table[mask] < floor6a:
            present = ctx.ids_of(mask)
            if _c3_violation(pairs, present) is None:
                return fail("C6a", tuple(sorted(present)))
        for x in xs:
            if not (1 << ctx.pos[x]) & mask:
                continue
            trace = res_masks[x] & mask
            if trace.bit_count() < floor6b:
                continue
            tr_ids = ctx.ids_of(trace)
            adj = _trace_adj(g, tr_ids)
            if _has_cycle_at_least(adj, floor6b, budgets.cluster_cap):
                if delta1(g, tr_ids) < floor6b:
                    present = ctx.ids_of(mask)
                    if _c3_violation(pairs, present) is None:
                        return fail("C6b", (x, tuple(sorted(tr_ids))))
    return Verdict(True, "check_K")


def _check_c6_large(g: TriGraph, budgets: Budgets, dual6b: bool, fail) -> Verdict:
    """Condition 6 beyond lattice-sweep scale, exactly.

    Relative delta is additive over connected components, and components of
    a C3-clean set are C3-clean, so any clean set of size >= 3 below the 6a
    floor either is connected (found by the branch-and-bound below) or
    splits into components each worth >= 2(n-1), summing past the floor.
    """
    ctx = context_for(g)
    floor6a = 3 * (g.n - 1) + 1
    floor6b = 2 * (g.n + 1)
    pairs = _c3_pairs(g)
    full = ctx.full_mask
    if mip.available():
        try:
            value, chosen = mip.min_clean_delta(ctx, pairs, min_size=3)
        except mip.Infeasible:
            # no clean set of size >= 3 at all; 6a is vacuous
            return _check_c6b_large(g, ctx, budgets, dual6b, fail, pairs, floor6b)
        if value < floor6a:
            ids = ctx.ids_of(chosen)
            if _c3_violation(pairs, ids) is not None:
                raise OracleMismatch("clean minimiser returned an unclean set")
            return fail("C6a", tuple(sorted(ids)))
        return _check_c6b_large(g, ctx, budgets, dual6b, fail, pairs, floor6b)
    margins = _neg_margins(ctx, full)
    adj = {
        i: (ctx.eadj[i] | ctx.e2adj[i])
        for i in range(ctx.m)
    }
    total_neg = sum(margins.values())
    budget = budgets.cluster_cap
    nodes = 0
    hit: list = []

    def grow(s_mask: int, s_delta: int, cand: int, banned: int, rem_neg: int):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(
                f"condition-6a connected scan exceeded {budget} nodes"
            )
        if s_mask.bit_count() >= 3 and s_delta < floor6a:
            ids = ctx.ids_of(s_mask)
            if _c3_violation(pairs, ids) is None:
                hit.append(tuple(sorted(ids)))
                return True
        if s_delta + rem_neg >= floor6a:
            return False
        done = 0
        it = cand
        while it:
            low = it & -it
            it ^= low
            u = low.bit_length() - 1
            nb = banned | done
            new_mask = s_mask | low
            if grow(
                new_mask,
                kernels.delta_mask(ctx, new_mask),
                (cand & ~done & ~low) | (adj[u] & ~new_mask & ~nb),
                nb,
                rem_neg - margins[u],
            ):
                return True
            done |= low
            # u is banned for the remaining siblings, so its margin leaves
            # the slack too
            rem_neg -= margins[u]
        return False

    banned = 0
    for v in range(ctx.m):
        low = 1 << v
        if grow(low, ctx.weight[v], adj[v] & ~banned, banned, total_neg - margins[v]):
            return fail("C6a", hit[0])
        banned |= low
        total_neg -= margins[v]

    return _check_c6b_large(g, ctx, budgets, dual6b, fail, pairs, floor6b)


def _check_c6b_large(g, ctx, budgets, dual6b, fail, pairs, floor6b) -> Verdict:
    # 6b: a qualifying trace needs at least 2(n+1) residue vertices; repair
    # C3 failures of the candidate set only with lines outside the residue
    # (lines inside it would change the trace)
    sides = [g.points] + ([g.planes] if dual6b else [])
    for side in sides:
        for x in sorted(side):
            res = g.residue(x)
            if len(res) < floor6b:
                continue
            # a qualifying trace has delta1 below 2(n+1) at 2(n+1)+ vertices,
            # which forces more edges than vertices, i.e. cycle rank >= 2;
            # near-forest residues can never produce one
            if _cycle_rank(_trace_adj(g, res)) < 2:
                continue
            if len(res) > budgets.check_k_cap:
                raise BudgetExceeded(
                    f"residue of {x} has {len(res)} vertices; condition-6b "
                    f"sweep capped at {budgets.check_k_cap}"
                )
            res_list = sorted(res)
            for tbits in range(1, 1 << len(res_list)):
                if tbits.bit_count() < floor6b:
                    continue
                trace = frozenset(
                    res_list[i] for i in range(len(res_list)) if tbits >> i & 1
                )
                if delta1(g, trace) >= floor6b:
                    continue
                if not _has_cycle_at_least(
                    _trace_adj(g, trace), floor6b, budgets.cluster_cap
                ):
                    continue
                b = trace | {x}
                while True:
                    viol = _c3_violation(pairs, b)
                    if viol is None:
                        return fail("C6b", (x, tuple(sorted(trace))))
                    u, v = viol[0], viol[1]
                    repair = (g.e_adj[u] & g.e_adj[v] & g.lines) - res - b
                    if not repair:
                        break  # not repairable: every such set is exempt
                    b = b | {min(repair)}
    return Verdict(True, "check_K", detail={"large_scale": True})


def in_K(g: TriGraph, budgets: Budgets = _DEFAULT_BUDGETS, dual6b: bool = False) -> bool:
    return check_K(g, budgets, dual6b).holds


# ---- target geometry -----------------------------------------------------


@dataclass(frozen=True)
class GeometryReport:
    """Exact universal verdicts plus coverage ratios for the existential
    halves, which finite approximations never satisfy outright."""

    universal: tuple[tuple[str, Verdict], ...]
    coverage: dict

    @property
    def holds_universal(self) -> bool:
        return all(v.holds for _, v in self.universal)

    def to_doc(self) -> dict:
        return {
            "universal": {name: v.to_doc() for name, v in self.universal},
            "coverage": self.coverage,
        }


def check_geometry(g: TriGraph, budgets: Budgets = _DEFAULT_BUDGETS) -> GeometryReport:
    universal = []

    c1 = _c1_witnesses(g)
    universal.append((
        "at_most_one_line",
        Verdict(not c1, "geometry", certificate=c1[0] if c1 else None),
    ))

    pairs = _c3_pairs(g)
    hit = _c3_violation(pairs, frozenset(g.ids))
    universal.append((
        "at_most_one_joining_plane",
        Verdict(hit is None, "geometry", certificate=hit),
    ))

    c4 = _c4_witnesses(g)
    universal.append((
        "line_residues_complete",
        Verdict(not c4, "geometry", certificate=c4[0] if c4 else None),
    ))

    girth_bad = None
    diameters = {}
    for x in sorted(g.points | g.planes):
        adj = _trace_adj(g, g.residue(x))
        if not adj:
            continue
        gi = _girth(adj)
        if gi is not None and gi < 2 * g.n and girth_bad is None:
            girth_bad = (x, _least_cycle(adj, gi))
        dists = [
            max(d.values())
            for d in (_bfs_dist(adj, r) for r in adj)
            if len(d) == len(adj)
        ]
        diameters[x] = max(dists) if len(dists) == len(adj) else None
    universal.append((
        "residue_girth",
        Verdict(girth_bad is None, "geometry", certificate=girth_bad),
    ))

    def ratio(num: int, den: int):
        return {"have": num, "of": den}

    # existential halves: joining plane for unjoined point pairs (and dual),
    # an inducing line for every E2 edge, residues reaching diameter n
    cov = {}
    for name, part, other in (
        ("point_pairs_joined", g.points, g.planes),
        ("plane_pairs_joined", g.planes, g.points),
    ):
        den = num = 0
        for u, v in combinations(sorted(part), 2):
            if g.e_adj[u] & g.e_adj[v] & g.lines:
                continue
            den += 1
            if g.e2_adj[u] & g.e2_adj[v] & other:
                num += 1
        cov[name] = ratio(num, den)
    have = sum(1 for p, e in g.e2 if g.inducing_lines(p, e))
    cov["induced_e2_edges"] = ratio(have, len(g.e2))
    cov["residues_at_diameter_n"] = ratio(
        sum(1 for d in diameters.values() if d == g.n), len(diameters)
    )
    cov["residue_diameters"] = {x: diameters[x] for x in sorted(diameters)}
    return GeometryReport(universal=tuple(universal), coverage=cov)
