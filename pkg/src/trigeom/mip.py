"""Exact subset-delta minimisation as a small integer program.

Beyond lattice-sweep scale both hard questions here are minimisations of
the same linear objective: strongness is min delta(C/A) >= 0 over
admissible test sets and the class floor is min delta(S) >= 3(n-1)+1 over
clean sets of size >= 3.  Vertex choice is binary; edge and flag counts
relax to box-bounded continuous variables because the minimiser pushes
each to its integral envelope (edges up, flags down).  L-closure and
condition-3 cleanliness are linear side constraints.  HiGHS solves these
instances (a few hundred variables) in milliseconds, which keeps the
checks exact at sizes the branch-and-bound cannot certify.

Everything returned by this module is re-evaluated by the caller against
the plain delta of the chosen set; a disagreement raises OracleMismatch.
"""
from __future__ import annotations

from .errors import OracleMismatch
from .masks import MaskContext


class Infeasible(Exception):
    """No selection satisfies the side constraints (e.g. a size cap too
    small to pick up forced closure lines)."""

try:
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix

    _HAVE_SOLVER = True
except Exception:  # pragma: no cover - exercised only without scipy
    _HAVE_SOLVER = False


def available() -> bool:
    return _HAVE_SOLVER


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _solve(
    ctx: MaskContext,
    amb_mask: int,
    fixed_mask: int = 0,
    closure_lines: bool = False,
    clean_pairs=None,
    min_size: int | None = None,
    max_free: int | None = None,
) -> tuple[int, int]:
    """Minimise delta over subsets of the ambient; returns (value, mask).

    fixed_mask vertices are forced in, closure_lines adds L-closure (a line
    joins as soon as two of its points or two of its planes are chosen),
    clean_pairs forbids condition-3 violating selections, min_size bounds
    the total choice from below and max_free the non-fixed part from above.
    """
    vs = list(_bits(amb_mask))
    vidx = {v: j for j, v in enumerate(vs)}
    nv = len(vs)

    edges: list[tuple[int, int, int]] = []  # (u, v, cost)
    for u in vs:
        for adjm, cost in ((ctx.eadj[u], ctx.e_w), (ctx.e2adj[u], ctx.e2_w)):
            m = adjm & amb_mask
            for v in _bits(m):
                if v > u:
                    edges.append((u, v, cost))
    flags: list[tuple[int, int, int]] = []
    for l in _bits(amb_mask & ctx.lines_mask):
        for p in _bits(ctx.line_pts[l] & amb_mask):
            for e in _bits(ctx.line_pls[l] & amb_mask):
                if (ctx.e2adj[p] >> e) & 1:
                    flags.append((p, l, e))

    ne, nf = len(edges), len(flags)
    total = nv + ne + nf
    cost = np.zeros(total)
    lb = np.zeros(total)
    ub = np.ones(total)
    integrality = np.zeros(total)
    integrality[:nv] = 1
    for j, v in enumerate(vs):
        cost[j] = ctx.weight[v]
        if (fixed_mask >> v) & 1:
            lb[j] = 1.0

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    con_lb: list[float] = []
    con_ub: list[float] = []
    nrow = 0

    def add_row(entries, lo, hi):
        nonlocal nrow
        for c, v in entries:
            rows.append(nrow)
            cols.append(c)
            vals.append(v)
        con_lb.append(lo)
        con_ub.append(hi)
        nrow += 1

    # an edge can be picked only inside the chosen set; the minimiser then
    # drives it to min(x_u, x_v) on its own
    for j, (u, v, c) in enumerate(edges):
        cost[nv + j] = -c
        add_row([(nv + j, 1.0), (vidx[u], -1.0)], -np.inf, 0.0)
        add_row([(nv + j, 1.0), (vidx[v], -1.0)], -np.inf, 0.0)
    # a flag is forced once all three vertices are in; the minimiser keeps
    # it at max(0, x_p + x_l + x_e - 2)
    for j, (p, l, e) in enumerate(flags):
        cost[nv + ne + j] = ctx.e2_w
        add_row(
            [
                (nv + ne + j, 1.0),
                (vidx[p], -1.0),
                (vidx[l], -1.0),
                (vidx[e], -1.0),
            ],
            -2.0,
            np.inf,
        )

    if closure_lines:
        for l in _bits(amb_mask & ctx.lines_mask):
            for supp in (ctx.line_pts[l] & amb_mask, ctx.line_pls[l] & amb_mask):
                sup = list(_bits(supp))
                for i1 in range(len(sup)):
                    for i2 in range(i1 + 1, len(sup)):
                        add_row(
                            [
                                (vidx[sup[i1]], 1.0),
                                (vidx[sup[i2]], 1.0),
                                (vidx[l], -1.0),
                            ],
                            -np.inf,
                            1.0,
                        )

    if clean_pairs:
        for u, v, common, lines in clean_pairs:
            if not ((amb_mask >> u) & 1 and (amb_mask >> v) & 1):
                continue
            cs = [w for w in sorted(common) if (amb_mask >> w) & 1]
            ls = [l for l in sorted(lines) if (amb_mask >> l) & 1]
            for i1 in range(len(cs)):
                for i2 in range(i1 + 1, len(cs)):
                    add_row(
                        [
                            (vidx[u], 1.0),
                            (vidx[v], 1.0),
                            (vidx[cs[i1]], 1.0),
                            (vidx[cs[i2]], 1.0),
                        ]
                        + [(vidx[l], -1.0) for l in ls],
                        -np.inf,
                        3.0,
                    )

    if min_size is not None:
        add_row([(j, 1.0) for j in range(nv)], float(min_size), np.inf)
    if max_free is not None:
        free_cols = [
            j for j, v in enumerate(vs) if not (fixed_mask >> v) & 1
        ]
        if free_cols:
            add_row([(j, 1.0) for j in free_cols], -np.inf, float(max_free))

    constraints = []
    if nrow:
        mat = csr_matrix((vals, (rows, cols)), shape=(nrow, total))
        constraints = [LinearConstraint(mat, con_lb, con_ub)]
    res = milp(
        c=cost,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lb, ub),
    )
    if res.status == 2:
        raise Infeasible(res.message)
    if res.status != 0:
        raise OracleMismatch(f"delta minimisation solver failed: {res.message}")
    value = round(float(res.fun))
    if abs(res.fun - value) > 1e-4:
        raise OracleMismatch(f"non-integral optimum {res.fun}")
    chosen = 0
    for j, v in enumerate(vs):
        if res.x[j] > 0.5:
            chosen |= 1 << v
    return value, chosen


def min_relative(
    ctx: MaskContext,
    a_mask: int,
    amb_mask: int,
    lclosed: bool,
    max_size: int | None,
) -> tuple[int, int]:
    """min delta(C/A) over admissible C inside the ambient; (value, C mask).

    The empty C is feasible, so the value is never positive; it is negative
    exactly when A fails to be strong.
    """
    from . import kernels

    base = kernels.delta_mask(ctx, a_mask)
    value, chosen = _solve(
        ctx,
        amb_mask,
        fixed_mask=a_mask,
        closure_lines=lclosed,
        max_free=max_size,
    )
    picked = kernels.delta_mask(ctx, chosen)
    if picked != value:
        raise OracleMismatch(
            f"solver value {value} disagrees with delta {picked}"
        )
    return value - base, chosen & ~a_mask


def min_clean_delta(ctx: MaskContext, clean_pairs, min_size: int) -> tuple[int, int]:
    """min delta(S) over condition-3-clean S of at least this size."""
    from . import kernels

    value, chosen = _solve(
        ctx,
        ctx.full_mask,
        clean_pairs=clean_pairs,
        min_size=min_size,
    )
    picked = kernels.delta_mask(ctx, chosen)
    if picked != value:
        raise OracleMismatch(
            f"solver value {value} disagrees with delta {picked}"
        )
    return value, chosen
