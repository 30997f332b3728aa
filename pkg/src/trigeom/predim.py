"""The delta/delta1 calculus, strongness, self-sufficient closure and the
d-function.

Everything is exact integer arithmetic.  Strongness tests over small free
sets use the full subset-lattice kernel sweep; larger ambients go to an
exact integer-programming minimisation when a solver is present, and
otherwise to an exact branch-and-bound over connected clusters (relative
delta is additive over the E/E2-connected components of a test set, so a
violation always shows up on a single connected, line-completed cluster).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels, mip
from .config import Budgets, StrongnessMode, Verdict
from .errors import BadParameter, BudgetExceeded, MixedSorts, OracleMismatch, UnknownId
from .graph import Sort, TriGraph
from .masks import MaskContext, context_for

_DEFAULT_BUDGETS = Budgets()


@dataclass(frozen=True)
class DeltaWeights:
    """The exact integer weights of the delta formula, derived from n."""

    n: int

    @property
    def line(self) -> int:
        return 3 * (self.n - 1) - 1

    @property
    def point_plane(self) -> int:
        return 2 * (self.n - 1)

    @property
    def e(self) -> int:
        return 2 * (self.n - 1) - 1

    @property
    def e2_flag(self) -> int:
        return self.n - 1


def _mask(ctx: MaskContext, ids) -> int:
    try:
        return ctx.mask_of(ids)
    except KeyError as exc:
        raise UnknownId(f"unknown vertex id {exc.args[0]}") from None


def delta(g: TriGraph, s) -> int:
    """delta of the induced subgraph on ``s``."""
    ctx = context_for(g)
    return kernels.delta_mask(ctx, _mask(ctx, s))


def delta_rel(g: TriGraph, b, a) -> int:
    """delta(B/A) = delta(A ∪ B) - delta(A)."""
    ctx = context_for(g)
    am = _mask(ctx, a)
    bm = _mask(ctx, b)
    return kernels.delta_mask(ctx, am | bm) - kernels.delta_mask(ctx, am)


def delta1(g: TriGraph, a) -> int:
    """Rank-2 predimension (n-1)|A| - (n-2)|E_A| on one bipartite half."""
    a = frozenset(a)
    sorts = {g.sort_of(v) for v in a}
    if Sort.POINT in sorts and Sort.PLANE in sorts:
        raise MixedSorts("delta1 needs A within P∪L or L∪Π")
    edges = sum(1 for x, y in g.e if x in a and y in a)
    return (g.n - 1) * len(a) - (g.n - 2) * edges


# ---- strongness ---------------------------------------------------------


def _require_chain(g: TriGraph, a, b) -> tuple[frozenset, frozenset]:
    a = frozenset(a)
    b = frozenset(b)
    for v in b:
        g.sort_of(v)  # raises UnknownId
    if not a <= b:
        raise BadParameter("need A ⊆ B")
    return a, b


def is_L_strong(g: TriGraph, a, b) -> Verdict:
    """No line of B outside A joins two points or two planes of A."""
    a, b = _require_chain(g, a, b)
    pts = a & g.points
    pls = a & g.planes
    for l in sorted((b - a) & g.lines):
        nbrs = g.e_adj[l]
        if len(nbrs & pts) >= 2 or len(nbrs & pls) >= 2:
            return Verdict(False, "is_L_strong", certificate=l)
    return Verdict(True, "is_L_strong")


# past this many incident lines / neighbours the per-vertex subset sweep
# falls back to the flag-blind estimate
_MARGIN_DEG_CAP = 13


def _point_plane_margin(ctx: MaskContext, i: int, amb_mask: int) -> int:
    w = ctx.weight[i]
    lmask = ctx.eadj[i] & amb_mask
    opp = ctx.e2adj[i] & amb_mask
    lines = []
    while lmask:
        low = lmask & -lmask
        lines.append(low.bit_length() - 1)
        lmask ^= low
    k = len(lines)
    if k > _MARGIN_DEG_CAP:
        return w - ctx.e_w * k - ctx.e2_w * opp.bit_count()
    # an opposite-sort E2 partner costs e2_w unless some chosen incident
    # line joins it to i, in which case the flag gain cancels the edge
    counts = [0] * (1 << k)
    bare = 0
    rest = opp
    while rest:
        low = rest & -rest
        x = low.bit_length() - 1
        rest ^= low
        cmask = 0
        for j, l in enumerate(lines):
            if ctx.eadj[x] >> l & 1:
                cmask |= 1 << j
        if cmask:
            counts[cmask] += 1
        else:
            bare += 1
    # subset-sum: counts[m] = partners all of whose joining lines lie in m,
    # so the partners no line of T joins are bare + counts[~T]
    for j in range(k):
        bit = 1 << j
        for m in range(1 << k):
            if m & bit:
                counts[m] += counts[m ^ bit]
    full = (1 << k) - 1
    best = w
    for m in range(1 << k):
        uncov = bare + counts[full ^ m]
        c = w - ctx.e_w * m.bit_count() - ctx.e2_w * uncov
        if c < best:
            best = c
    return best


def _line_margin(ctx: MaskContext, i: int, amb_mask: int) -> int:
    w = ctx.weight[i]
    nmask = ctx.eadj[i] & amb_mask
    nbrs = []
    while nmask:
        low = nmask & -nmask
        nbrs.append(low.bit_length() - 1)
        nmask ^= low
    k = len(nbrs)
    if k > _MARGIN_DEG_CAP:
        return w - ctx.e_w * k
    loc_e2 = []
    for v in nbrs:
        m = 0
        for j, u in enumerate(nbrs):
            if ctx.e2adj[v] >> u & 1:
                m |= 1 << j
        loc_e2.append(m)
    # each E2-joined (point, plane) pair among the chosen neighbours gains
    # a flag through this line
    pairs = [0] * (1 << k)
    best = w
    for m in range(1, 1 << k):
        low = m & -m
        prev = m ^ low
        p = pairs[prev] + (loc_e2[low.bit_length() - 1] & prev).bit_count()
        pairs[m] = p
        c = w - ctx.e_w * m.bit_count() + ctx.e2_w * p
        if c < best:
            best = c
    return best


def _neg_margins(ctx: MaskContext, amb_mask: int) -> dict[int, int]:
    """Most-negative possible delta marginal per vertex, minimised exactly
    over subsets of its ambient neighbourhood (flag gains included), so the
    bound stays useful around moderate-degree vertices."""
    out = {}
    rest = amb_mask
    while rest:
        low = rest & -rest
        i = low.bit_length() - 1
        rest ^= low
        if low & ctx.lines_mask:
            m = _line_margin(ctx, i, amb_mask)
        else:
            m = _point_plane_margin(ctx, i, amb_mask)
        out[i] = min(0, m)
    return out


def _forced_lines(ctx: MaskContext, amb_mask: int, s_mask: int) -> int:
    """Lines of the ambient forced into s by L-closure; returns the added mask."""
    added = 0
    changed = True
    while changed:
        changed = False
        cur = s_mask | added
        outside = amb_mask & ~cur & ctx.lines_mask
        while outside:
            low = outside & -outside
            i = low.bit_length() - 1
            if (
                (ctx.line_pts[i] & cur).bit_count() >= 2
                or (ctx.line_pls[i] & cur).bit_count() >= 2
            ):
                added |= low
                changed = True
            outside ^= low
    return added


def _better(d: int, mask: int, cur: tuple[int, int] | None) -> bool:
    """Tie-break: smaller delta, then fewer vertices, then the set whose
    lowest differing bit (= lowest id) is present."""
    if cur is None:
        return True
    cd, cm = cur
    if d != cd:
        return d < cd
    pc, cpc = mask.bit_count(), cm.bit_count()
    if pc != cpc:
        return pc < cpc
    diff = mask ^ cm
    return bool(mask & (diff & -diff)) if diff else False


def _cluster_scan(
    ctx: MaskContext,
    a_mask: int,
    amb_mask: int,
    lclosed: bool,
    max_size: int,
    budget: int,
):
    """Minimum of delta(C/A) over single connected (line-completed) test
    clusters in the ambient, by branch and bound.

    Relative delta is additive over the E/E2-connected components of a test
    set, so the strongness verdict from the single-cluster minimum is exact;
    the certificate is the worst cluster, not a worst union of clusters.
    Lines forced into every admissible test set by L-closure of A are folded
    into the base up front.
    """
    base_delta = kernels.delta_mask(ctx, a_mask)
    a_eff = a_mask
    shift = 0
    prefix = 0
    if lclosed:
        forced = _forced_lines(ctx, amb_mask, a_mask)
        if forced:
            shift = kernels.delta_mask(ctx, a_mask | forced) - base_delta
            if shift < 0:
                # the forced lines alone are a violating admissible set
                return (True, shift, forced)
            a_eff |= forced
            prefix = forced
    eff_delta = kernels.delta_mask(ctx, a_eff)
    free_mask = amb_mask & ~a_eff

    margins = _neg_margins(ctx, amb_mask)
    adj = {}
    rest = free_mask
    while rest:
        low = rest & -rest
        i = low.bit_length() - 1
        adj[i] = (ctx.eadj[i] | ctx.e2adj[i]) & free_mask
        rest ^= low

    best: list = [None]  # (delta, closed mask)
    nodes = [0]

    def visit(s_mask: int) -> None:
        if lclosed:
            s_mask = s_mask | _forced_lines(ctx, amb_mask, a_eff | s_mask)
        d = kernels.delta_mask(ctx, a_eff | s_mask) - eff_delta
        if _better(d, s_mask, best[0]):
            best[0] = (d, s_mask)

    # classic once-per-subset connected enumeration: grow by one candidate,
    # ban it for the remaining siblings
    def grow(s_mask: int, s_delta: int, cand: int, banned: int, rem_neg: int):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(
                f"cluster scan exceeded {budget} nodes; raise cluster_cap"
            )
        visit(s_mask)
        if s_mask.bit_count() >= max_size:
            return
        cutoff = min(0, best[0][0] if best[0] is not None else 0)
        if s_delta + rem_neg >= cutoff:
            return
        done = 0
        it = cand
        while it:
            low = it & -it
            it ^= low
            u = low.bit_length() - 1
            nb = banned | done
            new_mask = s_mask | low
            new_cand = (cand & ~done & ~low) | (adj[u] & ~new_mask & ~nb)
            grow(
                new_mask,
                kernels.delta_mask(ctx, a_eff | new_mask) - eff_delta,
                new_cand,
                nb,
                rem_neg - margins[u],
            )
            done |= low
            # banned for the remaining siblings: drop its margin from the slack
            rem_neg -= margins[u]

    total_neg = sum(margins[i] for i in adj)
    banned = 0
    for v in sorted(adj):
        low = 1 << v
        grow(
            low,
            kernels.delta_mask(ctx, a_eff | low) - eff_delta,
            adj[v] & ~low & ~banned,
            banned,
            total_neg - margins[v],
        )
        banned |= low
        total_neg -= margins[v]

    if best[0] is None:
        if prefix:
            return (True, shift, prefix)
        return (False, 0, 0)
    d, mask = best[0]
    if prefix and shift + d >= 0 > d:
        # folded forced lines with a non-negative gain: unions of several
        # negative clusters could still dip below zero, so refuse to guess
        raise BudgetExceeded(
            "cluster scan is inconclusive: forced lines gained predimension"
        )
    return (True, shift + min(d, 0) if prefix else d, prefix | mask)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _trim_certificate(
    ctx, a_mask: int, mask: int, lclosed: bool, d: int, budgets: Budgets
) -> int:
    """Smallest subset of a solver optimum still attaining the optimum.

    Solver backends are free to pad a minimiser with zero-cost vertices.
    Closure adjoins the certificate verbatim, and only a set no smaller
    subset of which attains the minimum is guaranteed to sit inside every
    strong superset, so trim before reporting.
    """
    free = sorted(_bits(mask))
    if len(free) <= budgets.subset_cap:
        found, d2, best = kernels.scan_min(
            ctx, a_mask, free, a_mask | mask, lclosed, len(free)
        )
        if not found or d2 != d:
            raise OracleMismatch(
                f"restricted rescan of the optimiser gave {d2}, expected {d}"
            )
        return best
    for k in range(1, len(free)):
        try:
            d2, sub = mip.min_relative(ctx, a_mask, a_mask | mask, lclosed, k)
        except mip.Infeasible:
            continue
        if d2 == d:
            return sub
    return mask


def _min_rel_delta(
    g: TriGraph,
    a: frozenset,
    b: frozenset,
    lclosed: bool,
    max_size: int | None,
    budgets: Budgets,
):
    """(found, min delta, certificate mask, ctx) over admissible test sets."""
    ctx = context_for(g)
    a_mask = _mask(ctx, a)
    amb_mask = _mask(ctx, b)
    free = sorted(ctx.pos[v] for v in b - a)
    cap = len(free) if max_size is None else min(max_size, len(free))
    if len(free) <= budgets.subset_cap:
        found, d, mask = kernels.scan_min(ctx, a_mask, free, amb_mask, lclosed, cap)
    elif mip.available():
        d, mask = mip.min_relative(
            ctx, a_mask, amb_mask, lclosed, max_size
        )
        found = True
        if d < 0 and mask:
            mask = _trim_certificate(ctx, a_mask, mask, lclosed, d, budgets)
    else:
        found, d, mask = _cluster_scan(
            ctx, a_mask, amb_mask, lclosed, cap, budgets.cluster_cap
        )
    return found, d, mask, ctx


def is_strong(
    g: TriGraph,
    a,
    b,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
) -> Verdict:
    """Is A strong (self-sufficient) in B?

    LCLOSED mode quantifies over test sets C with A ∪ C L-closed in B;
    LITERAL mode over all C ⊆ B.
    """
    a, b = _require_chain(g, a, b)
    found, d, mask, ctx = _min_rel_delta(
        g, a, b, mode is StrongnessMode.LCLOSED, None, budgets
    )
    if found and d < 0:
        return Verdict(
            False,
            "is_strong",
            mode=mode,
            certificate=ctx.ids_of(mask),
            detail={"delta": d},
        )
    return Verdict(True, "is_strong", mode=mode, detail={"min_delta": d if found else 0})


def is_k_strong(
    g: TriGraph,
    a,
    b,
    k: int,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
) -> Verdict:
    """Is A strong in every k-element extension of A inside B?

    Equivalent in either mode to: no C ⊆ B \\ A with |C| ≤ k has
    delta(C/A) < 0, because any such C is an admissible test set of the
    extension A ∪ C itself.
    """
    if k < 0:
        raise BadParameter("k must be >= 0")
    a, b = _require_chain(g, a, b)
    if k == 0:
        return Verdict(True, "is_k_strong", mode=mode, detail={"k": k})
    found, d, mask, ctx = _min_rel_delta(g, a, b, False, k, budgets)
    if found and d < 0:
        return Verdict(
            False,
            "is_k_strong",
            mode=mode,
            certificate=ctx.ids_of(mask),
            detail={"delta": d, "k": k},
        )
    return Verdict(True, "is_k_strong", mode=mode, detail={"k": k})


# ---- closure and the d-function ----------------------------------------


def closure(
    g: TriGraph,
    a,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
    _skip_oracle: bool = False,
) -> frozenset[int]:
    """Smallest strong superset of A in G.

    Computed by repeatedly adjoining the minimal violating certificate;
    verified against the defining intersection of all strong supersets
    whenever |G| is within the oracle cap.
    """
    s = frozenset(a)
    for v in s:
        g.sort_of(v)
    everything = frozenset(g.ids)
    while True:
        verdict = is_strong(g, s, everything, mode, budgets)
        if verdict.holds:
            break
        s = s | verdict.certificate
    if not _skip_oracle and len(g) <= budgets.oracle_cap:
        brute = _closure_bruteforce(g, frozenset(a), mode)
        if brute != s:
            raise OracleMismatch(
                f"iterative closure {sorted(s)} != brute-force intersection "
                f"{sorted(brute)}"
            )
    return s


def _closure_bruteforce(g: TriGraph, a: frozenset, mode: StrongnessMode) -> frozenset:
    """Intersection of all S with A ⊆ S ⊆ G and S strong in G."""
    ctx = context_for(g)
    a_mask = _mask(ctx, a)
    free = sorted(ctx.pos[v] for v in frozenset(g.ids) - a)
    table, expand = kernels.delta_table(ctx, a_mask, free)
    k = len(free)
    full_compact = (1 << k) - 1
    lclosed = mode is StrongnessMode.LCLOSED
    inter = None
    for sup in range(1 << k):
        s_abs = a_mask | expand[sup]
        comp = full_compact & ~sup
        strong = True
        c = comp
        while c:
            if table[sup | c] - table[sup] < 0 and (
                not lclosed or ctx.lclosed_ok(ctx.full_mask, s_abs | expand[c])
            ):
                strong = False
                break
            c = (c - 1) & comp
        if strong:
            inter = s_abs if inter is None else inter & s_abs
    assert inter is not None  # the full graph is always strong in itself
    return ctx.ids_of(inter)


def d_value(
    g: TriGraph,
    a,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
) -> int:
    """d(A) = delta(cl(A))."""
    return delta(g, closure(g, a, mode, budgets))


def d_rel(
    g: TriGraph,
    a,
    b,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
) -> int:
    """d(A/B) = d(A ∪ B) - d(B)."""
    a = frozenset(a)
    b = frozenset(b)
    return d_value(g, a | b, mode, budgets) - d_value(g, b, mode, budgets)


def is_algebraic(
    g: TriGraph,
    a: int,
    base,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
) -> bool:
    """Finite-approximation algebraicity: d(a/A) = 0.

    The corresponding lemma concerns models of the limit theory; on a finite
    graph this is the budgeted analogue.
    """
    g.sort_of(a)
    return d_rel(g, {a}, base, mode, budgets) == 0


def d_independent(
    g: TriGraph,
    a,
    b,
    c,
    mode: StrongnessMode = StrongnessMode.LCLOSED,
    budgets: Budgets = _DEFAULT_BUDGETS,
) -> Verdict:
    """d-independence of A from C over B: d(A/B) = d(A/BC).

    On success the verdict carries the structural witness: the base
    B' = cl(AB) ∩ cl(BC), the free-decomposition checks across the two
    closures, and whether B' is algebraic over B.
    """
    a = frozenset(a)
    b = frozenset(b)
    c = frozenset(c)
    d_ab = d_rel(g, a, b, mode, budgets)
    d_abc = d_rel(g, a, b | c, mode, budgets)
    if d_ab != d_abc:
        return Verdict(
            False,
            "d_independent",
            mode=mode,
            certificate={"d_over_B": d_ab, "d_over_BC": d_abc},
        )
    cl_ab = closure(g, a | b, mode, budgets)
    cl_bc = closure(g, b | c, mode, budgets)
    cl_abc = closure(g, a | b | c, mode, budgets)
    bprime = cl_ab & cl_bc
    hat_ab = cl_ab - cl_bc
    hat_bc = cl_bc - cl_ab
    cross_e = [
        (x, y) for x, y in g.e
        if (x in hat_ab and y in hat_bc) or (x in hat_bc and y in hat_ab)
    ]
    cross_e2_noninduced = []
    sub = g.induced(cl_ab | cl_bc)
    for x, y in g.e2:
        if (x in hat_ab and y in hat_bc) or (x in hat_bc and y in hat_ab):
            if not set(sub.inducing_lines(x, y)) & bprime:
                cross_e2_noninduced.append((x, y))
    witness = {
        "b_prime": sorted(bprime),
        "union_is_closure": cl_abc == cl_ab | cl_bc,
        "no_cross_e": not cross_e,
        "cross_e2_induced_in_bprime": not cross_e2_noninduced,
        "bprime_algebraic_over_B": d_rel(g, bprime, b, mode, budgets) == 0,
    }
    return Verdict(
        True,
        "d_independent",
        mode=mode,
        detail={"d_over_B": d_ab, "d_over_BC": d_abc, "witness": witness},
    )
