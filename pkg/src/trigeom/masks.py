"""Bitmask compilation of a TriGraph for the subset-sweep kernels.

Vertex ids are mapped to bit positions in ascending id order, so mask
lexicographic comparisons agree with id-tuple lexicographic order.
"""

from __future__ import annotations

from array import array
from functools import lru_cache
from typing import Iterable

from .errors import BudgetExceeded
from .graph import Sort, TriGraph

MAX_MASK_VERTICES = 63


class MaskContext:
    """Per-graph bit tables consumed by the delta kernels."""

    __slots__ = (
        "graph",
        "n",
        "m",
        "ids",
        "pos",
        "e_w",
        "e2_w",
        "weight",
        "sort_code",
        "eadj",
        "e2adj",
        "line_pts",
        "line_pls",
        "points_mask",
        "lines_mask",
        "planes_mask",
        "full_mask",
        "weight_arr",
        "sort_arr",
        "eadj_arr",
        "e2adj_arr",
        "line_pts_arr",
        "line_pls_arr",
    )

    def __init__(self, g: TriGraph):
        if len(g) > MAX_MASK_VERTICES:
            raise BudgetExceeded(
                f"graph has {len(g)} vertices; mask kernels support at most "
                f"{MAX_MASK_VERTICES}"
            )
        self.graph = g
        n = g.n
        self.n = n
        self.ids = list(g.ids)
        self.pos = {v: i for i, v in enumerate(self.ids)}
        self.m = len(self.ids)
        self.e_w = 2 * (n - 1) - 1
        self.e2_w = n - 1

        sort_codes = {Sort.POINT: 0, Sort.LINE: 1, Sort.PLANE: 2}
        lw = 3 * (n - 1) - 1
        ppw = 2 * (n - 1)
        self.weight = [0] * self.m
        self.sort_code = [0] * self.m
        self.eadj = [0] * self.m
        self.e2adj = [0] * self.m
        self.line_pts = [0] * self.m
        self.line_pls = [0] * self.m
        self.points_mask = 0
        self.lines_mask = 0
        self.planes_mask = 0
        for v, s in g.vertices:
            i = self.pos[v]
            self.sort_code[i] = sort_codes[s]
            if s is Sort.LINE:
                self.weight[i] = lw
                self.lines_mask |= 1 << i
            else:
                self.weight[i] = ppw
                if s is Sort.POINT:
                    self.points_mask |= 1 << i
                else:
                    self.planes_mask |= 1 << i
        for a, b in g.e:
            ia, ib = self.pos[a], self.pos[b]
            self.eadj[ia] |= 1 << ib
            self.eadj[ib] |= 1 << ia
        for a, b in g.e2:
            ia, ib = self.pos[a], self.pos[b]
            self.e2adj[ia] |= 1 << ib
            self.e2adj[ib] |= 1 << ia
        for i in range(self.m):
            if self.sort_code[i] == 1:
                self.line_pts[i] = self.eadj[i] & self.points_mask
                self.line_pls[i] = self.eadj[i] & self.planes_mask
        self.full_mask = (1 << self.m) - 1 if self.m else 0

        self.weight_arr = array("q", self.weight)
        self.sort_arr = array("q", self.sort_code)
        self.eadj_arr = array("Q", self.eadj)
        self.e2adj_arr = array("Q", self.e2adj)
        self.line_pts_arr = array("Q", self.line_pts)
        self.line_pls_arr = array("Q", self.line_pls)

    # ---- id/mask conversions ----

    def mask_of(self, ids: Iterable[int]) -> int:
        m = 0
        for v in ids:
            m |= 1 << self.pos[v]
        return m

    def ids_of(self, mask: int) -> frozenset[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.ids[low.bit_length() - 1])
            mask ^= low
        return frozenset(out)

    def lclosed_ok(self, amb_mask: int, s_mask: int) -> bool:
        """No line of the ambient outside ``s`` joins two points or two
        planes of ``s``."""
        outside = amb_mask & ~s_mask & self.lines_mask
        lpts = self.line_pts
        lpls = self.line_pls
        while outside:
            low = outside & -outside
            i = low.bit_length() - 1
            if (lpts[i] & s_mask).bit_count() >= 2:
                return False
            if (lpls[i] & s_mask).bit_count() >= 2:
                return False
            outside ^= low
        return True


@lru_cache(maxsize=1024)
def context_for(g: TriGraph) -> MaskContext:
    return MaskContext(g)
