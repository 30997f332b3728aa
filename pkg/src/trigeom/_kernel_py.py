"""Pure-Python delta kernels; the reference twin of the compiled extension.

All functions take a :class:`trigeom.masks.MaskContext` and absolute bit
masks.  Semantics must stay identical to ``_kernel.pyx`` bit for bit; the
parity test suite enforces this.
"""

from __future__ import annotations

BACKEND = "python"


def _marginal(ctx, i: int, s: int) -> int:
    """delta(S + v_i) - delta(S) for i not in S."""
    d = ctx.weight[i]
    d -= ctx.e_w * (ctx.eadj[i] & s).bit_count()
    e2_in = ctx.e2adj[i] & s
    d -= ctx.e2_w * e2_in.bit_count()
    # flags gained: each complete flag cancels one E2 unit
    flags = 0
    code = ctx.sort_code[i]
    if code == 1:
        pts = ctx.line_pts[i] & s
        pls = ctx.line_pls[i] & s
        while pts:
            low = pts & -pts
            p = low.bit_length() - 1
            flags += (ctx.e2adj[p] & pls).bit_count()
            pts ^= low
    else:
        lns = ctx.eadj[i] & s & ctx.lines_mask
        other = ctx.line_pls if code == 0 else ctx.line_pts
        while lns:
            low = lns & -lns
            l = low.bit_length() - 1
            flags += (other[l] & e2_in).bit_count()
            lns ^= low
    return d + ctx.e2_w * flags


def delta_mask(ctx, mask: int) -> int:
    total = 0
    s = 0
    rest = mask
    while rest:
        low = rest & -rest
        total += _marginal(ctx, low.bit_length() - 1, s)
        s |= low
        rest ^= low
    return total


def delta_table(ctx, base_mask: int, free: list[int]) -> tuple[list[int], list[int]]:
    """Relative deltas over the subset lattice of ``free`` positions.

    Returns (table, expand) where table[c] = delta(base ∪ C) - delta(base)
    and expand[c] is the absolute mask of the compact submask ``c``.
    """
    k = len(free)
    size = 1 << k
    table = [0] * size
    expand = [0] * size
    bit_abs = [1 << p for p in free]
    for c in range(1, size):
        lowc = c & -c
        j = lowc.bit_length() - 1
        prev = c ^ lowc
        prev_abs = expand[prev]
        expand[c] = prev_abs | bit_abs[j]
        table[c] = table[prev] + _marginal(ctx, free[j], base_mask | prev_abs)
    return table, expand


def scan_min(
    ctx,
    base_mask: int,
    free: list[int],
    amb_mask: int,
    lclosed: bool,
    max_size: int,
):
    """Minimum relative delta over admissible nonempty C ⊆ free.

    Ties broken by size, then by lexicographic id order (lower ids first).
    Returns (found, best_delta, best_mask_absolute).
    """
    table, expand = delta_table(ctx, base_mask, free)
    best = None
    best_mask = 0
    best_size = 0
    for c in range(1, len(table)):
        csize = c.bit_count()
        if csize > max_size:
            continue
        s_abs = base_mask | expand[c]
        if lclosed and not ctx.lclosed_ok(amb_mask, s_abs):
            continue
        d = table[c]
        if best is None or d < best:
            better = True
        elif d == best:
            if csize != best_size:
                better = csize < best_size
            else:
                diff = expand[c] ^ best_mask
                better = bool(expand[c] & (diff & -diff))
        else:
            better = False
        if better:
            best = d
            best_mask = expand[c]
            best_size = csize
    if best is None:
        return (False, 0, 0)
    return (True, best, best_mask)
