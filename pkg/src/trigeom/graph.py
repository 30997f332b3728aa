"""Finite 3-sorted incidence graphs: points, lines and planes.

A :class:`TriGraph` is immutable after construction.  Incidence comes in two
relations: ``E`` joins point-line and line-plane pairs, ``E2`` joins
point-plane pairs.  Complete flags (pairwise incident point/line/plane
triples) are always derived from E/E2, never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .errors import (
    BadParameter,
    BaseMismatch,
    DuplicateId,
    NotAnE2Edge,
    SortViolation,
    UnknownId,
)


class Sort(Enum):
    POINT = "point"
    LINE = "line"
    PLANE = "plane"

    @property
    def dual(self) -> "Sort":
        if self is Sort.POINT:
            return Sort.PLANE
        if self is Sort.PLANE:
            return Sort.POINT
        return Sort.LINE


# sort combinations allowed per edge relation
_E_SORTS = {
    frozenset({Sort.POINT, Sort.LINE}),
    frozenset({Sort.LINE, Sort.PLANE}),
}
_E2_SORTS = frozenset({Sort.POINT, Sort.PLANE})


def _norm_pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class TriGraph:
    """A finite 3-coloured incidence graph with polygon parameter ``n``.

    ``vertices`` maps vertex id to sort; ``e`` and ``e2`` hold normalized
    (ascending) id pairs.  Iteration order is deterministic everywhere.
    """

    n: int
    vertices: tuple[tuple[int, Sort], ...]
    e: tuple[tuple[int, int], ...]
    e2: tuple[tuple[int, int], ...]

    # ---- construction -------------------------------------------------

    @staticmethod
    def build(
        n: int,
        sorts: Mapping[int, Sort] | Iterable[tuple[int, Sort]],
        e: Iterable[tuple[int, int]] = (),
        e2: Iterable[tuple[int, int]] = (),
        allow_small_n: bool = False,
    ) -> "TriGraph":
        if not isinstance(n, int) or (n < 6 and not allow_small_n) or n < 2:
            raise BadParameter(f"polygon parameter n={n!r} (need n >= 6)")
        items = sorts.items() if isinstance(sorts, Mapping) else list(sorts)
        vmap: dict[int, Sort] = {}
        for vid, sort in items:
            if not isinstance(vid, int):
                raise BadParameter(f"vertex id {vid!r} is not an integer")
            if vid in vmap:
                raise DuplicateId(f"vertex id {vid} declared twice")
            vmap[vid] = Sort(sort)

        def norm_edges(pairs, allowed_e2: bool) -> tuple[tuple[int, int], ...]:
            seen = set()
            for a, b in pairs:
                for x in (a, b):
                    if x not in vmap:
                        raise UnknownId(f"edge endpoint {x} not declared")
                if a == b:
                    raise SortViolation(f"vertex {a} incident to itself")
                key = frozenset({vmap[a], vmap[b]})
                if allowed_e2:
                    if key != _E2_SORTS:
                        raise SortViolation(
                            f"E2 pair {a},{b} must join a point with a plane"
                        )
                elif key not in _E_SORTS:
                    raise SortViolation(
                        f"E pair {a},{b} must join point-line or line-plane"
                    )
                seen.add(_norm_pair(a, b))
            return tuple(sorted(seen))

        return TriGraph(
            n=n,
            vertices=tuple(sorted(vmap.items(), key=lambda kv: kv[0])),
            e=norm_edges(e, False),
            e2=norm_edges(e2, True),
        )

    # ---- basic accessors ----------------------------------------------

    @property
    def sort_map(self) -> dict[int, Sort]:
        return dict(self.vertices)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.vertices)

    def sort_of(self, v: int) -> Sort:
        s = self.sort_map.get(v)
        if s is None:
            raise UnknownId(f"unknown vertex id {v}")
        return s

    def of_sort(self, sort: Sort) -> frozenset[int]:
        return frozenset(v for v, s in self.vertices if s is sort)

    @property
    def points(self) -> frozenset[int]:
        return self.of_sort(Sort.POINT)

    @property
    def lines(self) -> frozenset[int]:
        return self.of_sort(Sort.LINE)

    @property
    def planes(self) -> frozenset[int]:
        return self.of_sort(Sort.PLANE)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: int) -> bool:
        return v in self.sort_map

    def has_e(self, a: int, b: int) -> bool:
        return _norm_pair(a, b) in set(self.e)

    def has_e2(self, a: int, b: int) -> bool:
        return _norm_pair(a, b) in set(self.e2)

    # adjacency maps are the workhorse for everything downstream; cache them
    @property
    def e_adj(self) -> dict[int, frozenset[int]]:
        return _adjacency(self)[0]

    @property
    def e2_adj(self) -> dict[int, frozenset[int]]:
        return _adjacency(self)[1]

    # ---- spec operations ----------------------------------------------

    def residue(self, x: int) -> frozenset[int]:
        """All vertices incident with x (through E or E2)."""
        if x not in self:
            raise UnknownId(f"unknown vertex id {x}")
        return self.e_adj[x] | self.e2_adj[x]

    def flags(self) -> frozenset[tuple[int, int, int]]:
        """All derived complete flags (p, l, e)."""
        out = []
        e2 = self.e2_adj
        for l in sorted(self.lines):
            nbrs = self.e_adj[l]
            pts = sorted(nbrs & self.points)
            pls = sorted(nbrs & self.planes)
            for p in pts:
                for epl in pls:
                    if epl in e2[p]:
                        out.append((p, l, epl))
        return frozenset(out)

    def induced(self, sub: Iterable[int]) -> "TriGraph":
        """Induced subgraph on ``sub``; vertex ids are kept stable."""
        s = set(sub)
        missing = s - set(self.sort_map)
        if missing:
            raise UnknownId(f"unknown vertex ids {sorted(missing)}")
        return TriGraph(
            n=self.n,
            vertices=tuple((v, srt) for v, srt in self.vertices if v in s),
            e=tuple(p for p in self.e if p[0] in s and p[1] in s),
            e2=tuple(p for p in self.e2 if p[0] in s and p[1] in s),
        )

    def inducing_lines(self, p: int, e: int) -> list[int]:
        """Lines witnessing that the E2 edge {p, e} is induced.

        Empty list means the edge is non-induced.
        """
        pr, er = _norm_pair(p, e)
        if (pr, er) not in set(self.e2):
            raise NotAnE2Edge(f"{{{p},{e}}} is not an E2 edge")
        if self.sort_of(p) is not Sort.POINT:
            p, e = e, p
        return sorted(self.e_adj[p] & self.e_adj[e] & self.lines)

    def dual(self) -> "TriGraph":
        """Swap the roles of points and planes."""
        return TriGraph(
            n=self.n,
            vertices=tuple((v, s.dual) for v, s in self.vertices),
            e=self.e,
            e2=self.e2,
        )

    def relabel(self, mapping: Mapping[int, int]) -> "TriGraph":
        def m(v: int) -> int:
            return mapping.get(v, v)

        verts = sorted((m(v), s) for v, s in self.vertices)
        if len({v for v, _ in verts}) != len(verts):
            raise DuplicateId("relabeling collapses vertex ids")
        return TriGraph(
            n=self.n,
            vertices=tuple(verts),
            e=tuple(sorted(_norm_pair(m(a), m(b)) for a, b in self.e)),
            e2=tuple(sorted(_norm_pair(m(a), m(b)) for a, b in self.e2)),
        )

    # ---- document format ----------------------------------------------

    def to_doc(self) -> dict:
        return {
            "n": self.n,
            "vertices": [{"id": v, "sort": s.value} for v, s in self.vertices],
            "e": [list(p) for p in self.e],
            "e2": [list(p) for p in self.e2],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":")) + "\n"


def parse_graph(document: str | dict, allow_small_n: bool = False) -> TriGraph:
    """Parse the structured-text graph document.

    Fields: ``n``, ``vertices`` (list of {id, sort}), ``e``, ``e2``.
    Unknown fields are rejected.
    """
    doc = json.loads(document) if isinstance(document, str) else document
    if not isinstance(doc, dict):
        raise BadParameter("graph document must be an object")
    unknown = set(doc) - {"n", "vertices", "e", "e2"}
    if unknown:
        raise BadParameter(f"unknown document fields {sorted(unknown)}")
    if "n" not in doc or "vertices" not in doc:
        raise BadParameter("graph document needs 'n' and 'vertices'")
    sorts = []
    for entry in doc["vertices"]:
        extra = set(entry) - {"id", "sort"}
        if extra:
            raise BadParameter(f"unknown vertex fields {sorted(extra)}")
        try:
            sort = Sort(entry["sort"])
        except ValueError:
            raise SortViolation(f"unknown sort {entry['sort']!r}")
        sorts.append((entry["id"], sort))
    return TriGraph.build(
        doc["n"],
        sorts,
        e=[tuple(p) for p in doc.get("e", [])],
        e2=[tuple(p) for p in doc.get("e2", [])],
        allow_small_n=allow_small_n,
    )


@lru_cache(maxsize=4096)
def _adjacency(g: TriGraph):
    e_adj: dict[int, set[int]] = {v: set() for v, _ in g.vertices}
    e2_adj: dict[int, set[int]] = {v: set() for v, _ in g.vertices}
    for a, b in g.e:
        e_adj[a].add(b)
        e_adj[b].add(a)
    for a, b in g.e2:
        e2_adj[a].add(b)
        e2_adj[b].add(a)
    return (
        {v: frozenset(s) for v, s in e_adj.items()},
        {v: frozenset(s) for v, s in e2_adj.items()},
    )


# ---- embeddings and isomorphism search --------------------------------


@dataclass(frozen=True)
class Embedding:
    """A sort-preserving partial map, identity on ``base``."""

    mapping: tuple[tuple[int, int], ...]
    base: frozenset[int] = field(default_factory=frozenset)

    @staticmethod
    def of(mapping: Mapping[int, int], base: Iterable[int] = ()) -> "Embedding":
        return Embedding(tuple(sorted(mapping.items())), frozenset(base))

    @property
    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    def apply(self, v: int) -> int:
        return self.as_dict[v]

    def image(self, s: Iterable[int]) -> frozenset[int]:
        m = self.as_dict
        return frozenset(m[v] for v in s)


def _cross_profile(g: TriGraph, v: int, against: frozenset[int]):
    return (g.e_adj[v] & against, g.e2_adj[v] & against)


def isomorphisms_over(
    g: TriGraph,
    base: Iterable[int],
    s1: Iterable[int],
    s2: Iterable[int],
) -> list[Embedding]:
    """All bijections S1 -> S2 fixing ``base`` pointwise that preserve and
    reflect E and E2 on base ∪ S1 (against base ∪ S2 on the image side).

    Deterministic order; backtracking with sort/degree pruning.
    """
    base = frozenset(base)
    s1 = sorted(set(s1))
    s2 = sorted(set(s2))
    if base & set(s1) or base & set(s2):
        raise BadParameter("S1/S2 must be disjoint from base")
    if len(s1) != len(s2):
        return []
    by_sort1: dict[Sort, int] = {}
    by_sort2: dict[Sort, int] = {}
    for v in s1:
        by_sort1[g.sort_of(v)] = by_sort1.get(g.sort_of(v), 0) + 1
    for v in s2:
        by_sort2[g.sort_of(v)] = by_sort2.get(g.sort_of(v), 0) + 1
    if by_sort1 != by_sort2:
        return []

    dom1 = base | set(s1)
    # order S1 by constrainedness: rarer sorts and higher degree first
    def key(v: int):
        return (-len(g.e_adj[v] & dom1), -len(g.e2_adj[v] & dom1), v)

    order = sorted(s1, key=key)
    results: list[Embedding] = []
    ident = {b: b for b in base}

    def backtrack(i: int, partial: dict[int, int], used: set[int]) -> None:
        if i == len(order):
            results.append(Embedding.of({**ident, **partial}, base))
            return
        v = order[i]
        sv = g.sort_of(v)
        need_e_base = g.e_adj[v] & base
        need_e2_base = g.e2_adj[v] & base
        mapped = list(partial.items())
        for w in s2:
            if w in used or g.sort_of(w) is not sv:
                continue
            if g.e_adj[w] & base != need_e_base:
                continue
            if g.e2_adj[w] & base != need_e2_base:
                continue
            ok = True
            for u, mu in mapped:
                if (u in g.e_adj[v]) != (mu in g.e_adj[w]):
                    ok = False
                    break
                if (u in g.e2_adj[v]) != (mu in g.e2_adj[w]):
                    ok = False
                    break
            if ok:
                partial[v] = w
                used.add(w)
                backtrack(i + 1, partial, used)
                del partial[v]
                used.discard(w)

    backtrack(0, {}, set())
    results.sort(key=lambda emb: emb.mapping)
    return results


def graphs_equal_on(g1: TriGraph, g2: TriGraph, ids: Iterable[int]) -> bool:
    """Same sorts and same induced E/E2 structure on a shared id set."""
    s = sorted(ids)
    try:
        a = g1.induced(s)
        b = g2.induced(s)
    except UnknownId:
        return False
    return a.vertices == b.vertices and a.e == b.e and a.e2 == b.e2


def require_shared_base(g1: TriGraph, g2: TriGraph, base: Iterable[int]) -> None:
    if not graphs_equal_on(g1, g2, base):
        raise BaseMismatch("base induces different structures in the two sides")


# ---- canonical codes ---------------------------------------------------


def canonical_code(g: TriGraph, marked: Iterable[int] = ()) -> str:
    """A canonical string for the isomorphism type of (g, marked-subset).

    Brute-force minimization over sort-preserving (and mark-preserving)
    relabelings; intended for desk-scale graphs only.
    """
    marked = frozenset(marked)
    verts = list(g.ids)
    groups: dict[tuple, list[int]] = {}
    for v in verts:
        groups.setdefault((g.sort_of(v).value, v in marked), []).append(v)

    # refine candidate groups by degree signature to shrink the search
    def sig(v: int) -> tuple:
        return (
            g.sort_of(v).value,
            v in marked,
            len(g.e_adj[v]),
            len(g.e2_adj[v]),
        )

    cells: dict[tuple, list[int]] = {}
    for v in verts:
        cells.setdefault(sig(v), []).append(v)
    cell_order = sorted(cells)
    slots: list[list[int]] = [cells[c] for c in cell_order]

    best: str | None = None

    def encode(perm: dict[int, int]) -> str:
        vs = sorted((perm[v], g.sort_of(v).value, v in marked) for v in verts)
        es = sorted(_norm_pair(perm[a], perm[b]) for a, b in g.e)
        e2s = sorted(_norm_pair(perm[a], perm[b]) for a, b in g.e2)
        return json.dumps([g.n, vs, es, e2s], separators=(",", ":"))

    def assign(cell_idx: int, perm: dict[int, int], next_id: int) -> None:
        nonlocal best
        if cell_idx == len(slots):
            code = encode(perm)
            if best is None or code < best:
                best = code
            return
        cell = slots[cell_idx]
        _permute_cell(cell, perm, next_id, cell_idx, slots, assign)

    def _permute_cell(cell, perm, next_id, cell_idx, slots_, cont):
        import itertools

        for order in itertools.permutations(cell):
            for i, v in enumerate(order):
                perm[v] = next_id + i
            cont(cell_idx + 1, perm, next_id + len(cell))
        for v in cell:
            perm.pop(v, None)

    assign(0, {}, 0)
    assert best is not None
    return best
