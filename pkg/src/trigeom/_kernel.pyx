# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled delta kernels; semantics mirror ``_kernel_py`` exactly."""

from libc.stdlib cimport free as c_free, malloc

cdef extern from *:
    """
    #define POPCNT(x) __builtin_popcountll(x)
    #define CTZ(x) __builtin_ctzll(x)
    """
    int POPCNT(unsigned long long x) nogil
    int CTZ(unsigned long long x) nogil

BACKEND = "cython"

ctypedef unsigned long long u64


cdef long long _marginal_c(
    int i,
    u64 s,
    long long e_w,
    long long e2_w,
    long long[:] weight,
    long long[:] sort_code,
    u64[:] eadj,
    u64[:] e2adj,
    u64[:] line_pts,
    u64[:] line_pls,
    u64 lines_mask,
) nogil:
    cdef long long d = weight[i]
    cdef u64 e2_in, pts, pls, lns, low
    cdef int p, l
    cdef long long flags = 0
    d -= e_w * POPCNT(eadj[i] & s)
    e2_in = e2adj[i] & s
    d -= e2_w * POPCNT(e2_in)
    if sort_code[i] == 1:
        pts = line_pts[i] & s
        pls = line_pls[i] & s
        while pts:
            low = pts & (~pts + 1)
            p = CTZ(low)
            flags += POPCNT(e2adj[p] & pls)
            pts ^= low
    else:
        lns = eadj[i] & s & lines_mask
        while lns:
            low = lns & (~lns + 1)
            l = CTZ(low)
            if sort_code[i] == 0:
                flags += POPCNT(line_pls[l] & e2_in)
            else:
                flags += POPCNT(line_pts[l] & e2_in)
            lns ^= low
    return d + e2_w * flags


def delta_mask(ctx, mask):
    cdef long long[:] weight = ctx.weight_arr
    cdef long long[:] sort_code = ctx.sort_arr
    cdef u64[:] eadj = ctx.eadj_arr
    cdef u64[:] e2adj = ctx.e2adj_arr
    cdef u64[:] line_pts = ctx.line_pts_arr
    cdef u64[:] line_pls = ctx.line_pls_arr
    cdef u64 lines_mask = ctx.lines_mask
    cdef long long e_w = ctx.e_w
    cdef long long e2_w = ctx.e2_w
    cdef u64 rest = mask
    cdef u64 s = 0, low
    cdef long long total = 0
    while rest:
        low = rest & (~rest + 1)
        total += _marginal_c(
            CTZ(low), s, e_w, e2_w, weight, sort_code,
            eadj, e2adj, line_pts, line_pls, lines_mask,
        )
        s |= low
        rest ^= low
    return total


cdef int _fill_tables(
    ctx,
    u64 base_mask,
    free,
    long long **table_out,
    u64 **expand_out,
) except -1:
    cdef long long[:] weight = ctx.weight_arr
    cdef long long[:] sort_code = ctx.sort_arr
    cdef u64[:] eadj = ctx.eadj_arr
    cdef u64[:] e2adj = ctx.e2adj_arr
    cdef u64[:] line_pts = ctx.line_pts_arr
    cdef u64[:] line_pls = ctx.line_pls_arr
    cdef u64 lines_mask = ctx.lines_mask
    cdef long long e_w = ctx.e_w
    cdef long long e2_w = ctx.e2_w
    cdef int k = len(free)
    cdef size_t size = (<size_t>1) << k
    cdef long long *table = <long long *>malloc(size * sizeof(long long))
    cdef u64 *expand = <u64 *>malloc(size * sizeof(u64))
    if table == NULL or expand == NULL:
        if table != NULL:
            c_free(table)
        if expand != NULL:
            c_free(expand)
        raise MemoryError()
    cdef int *fpos = <int *>malloc(k * sizeof(int))
    if fpos == NULL:
        c_free(table)
        c_free(expand)
        raise MemoryError()
    cdef int j
    for j in range(k):
        fpos[j] = free[j]
    cdef size_t c
    cdef u64 lowc, prev_abs
    table[0] = 0
    expand[0] = 0
    with nogil:
        for c in range(1, size):
            lowc = c & (~<u64>c + 1)
            j = CTZ(lowc)
            prev_abs = expand[c ^ lowc]
            expand[c] = prev_abs | ((<u64>1) << fpos[j])
            table[c] = table[c ^ lowc] + _marginal_c(
                fpos[j], base_mask | prev_abs, e_w, e2_w, weight, sort_code,
                eadj, e2adj, line_pts, line_pls, lines_mask,
            )
    c_free(fpos)
    table_out[0] = table
    expand_out[0] = expand
    return 0


def delta_table(ctx, base_mask, free):
    cdef long long *table = NULL
    cdef u64 *expand = NULL
    _fill_tables(ctx, base_mask, list(free), &table, &expand)
    cdef size_t size = (<size_t>1) << len(free)
    cdef size_t c
    out_t = [0] * size
    out_e = [0] * size
    for c in range(size):
        out_t[c] = table[c]
        out_e[c] = expand[c]
    c_free(table)
    c_free(expand)
    return out_t, out_e


cdef bint _lclosed_ok_c(
    u64 amb_mask,
    u64 s_mask,
    u64 lines_mask,
    u64[:] line_pts,
    u64[:] line_pls,
) nogil:
    cdef u64 outside = amb_mask & ~s_mask & lines_mask
    cdef u64 low
    cdef int i
    while outside:
        low = outside & (~outside + 1)
        i = CTZ(low)
        if POPCNT(line_pts[i] & s_mask) >= 2:
            return 0
        if POPCNT(line_pls[i] & s_mask) >= 2:
            return 0
        outside ^= low
    return 1


def scan_min(ctx, base_mask, free, amb_mask, lclosed, max_size):
    cdef long long *table = NULL
    cdef u64 *expand = NULL
    free = list(free)
    _fill_tables(ctx, base_mask, free, &table, &expand)
    cdef u64[:] line_pts = ctx.line_pts_arr
    cdef u64[:] line_pls = ctx.line_pls_arr
    cdef u64 lines_mask = ctx.lines_mask
    cdef size_t size = (<size_t>1) << len(free)
    cdef u64 bmask = base_mask
    cdef u64 amb = amb_mask
    cdef bint lcl = 1 if lclosed else 0
    cdef int maxs = max_size
    cdef size_t c
    cdef int csize, best_size = 0
    cdef long long d, best = 0
    cdef bint found = 0, better
    cdef u64 best_mask = 0, diff, s_abs
    with nogil:
        for c in range(1, size):
            csize = POPCNT(c)
            if csize > maxs:
                continue
            s_abs = bmask | expand[c]
            if lcl and not _lclosed_ok_c(amb, s_abs, lines_mask, line_pts, line_pls):
                continue
            d = table[c]
            if not found or d < best:
                better = 1
            elif d == best:
                if csize != best_size:
                    better = csize < best_size
                else:
                    diff = expand[c] ^ best_mask
                    better = (expand[c] & (diff & (~diff + 1))) != 0
            else:
                better = 0
            if better:
                found = 1
                best = d
                best_mask = expand[c]
                best_size = csize
    c_free(table)
    c_free(expand)
    if not found:
        return (False, 0, 0)
    return (True, best, best_mask)
