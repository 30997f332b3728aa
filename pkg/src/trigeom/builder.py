"""Grow finite strong approximations of the generic model, verify its
axioms at finite scale, and check the ampleness witness on a flag.

Build steps are tasks (A, C): a strong base A inside the current graph and
an extension type C over A.  Tasks are enumerated canonically by
(extension size, canonical pattern code, base position); bases are tight
(every base element has an edge into the extension), which makes the base
of a pattern well defined and keeps the approximation connected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .amalgam import (
    MuPolicy,
    PairOverBase,
    _max_packing,
    amalgamate,
    check_Kmu,
    enumerate_copies,
    mu_value,
    pair_core,
)
from .config import Budgets, Verdict
from .errors import BadParameter, BudgetExceeded, NotAFlag, NotStrong
from .graph import Sort, TriGraph, canonical_code, isomorphisms_over
from .kclass import check_geometry
from .predim import closure, d_rel, d_value, delta, is_k_strong, is_strong

_DEFAULT_BUDGETS = Budgets()

STATE_VERSION = 1

_E_OK = {
    (Sort.POINT, Sort.LINE),
    (Sort.LINE, Sort.POINT),
    (Sort.LINE, Sort.PLANE),
    (Sort.PLANE, Sort.LINE),
}
_E2_OK = {(Sort.POINT, Sort.PLANE), (Sort.PLANE, Sort.POINT)}


def seed_flag(n: int = 6) -> TriGraph:
    """The default seed: one complete flag on ids 0 (point), 1 (line),
    2 (plane)."""
    return TriGraph.build(
        n,
        {0: Sort.POINT, 1: Sort.LINE, 2: Sort.PLANE},
        e=[(0, 1), (1, 2)],
        e2=[(0, 2)],
        allow_small_n=n < 6,
    )


@dataclass(frozen=True)
class BuilderState:
    m: TriGraph
    steps: int
    max_ext: int
    max_base: int
    seed: int
    done: tuple[tuple[tuple[int, ...], str], ...]
    log: tuple[dict, ...]

    def to_doc(self) -> dict:
        return {
            "version": STATE_VERSION,
            "config": {
                "n": self.m.n,
                "steps": self.steps,
                "max_ext": self.max_ext,
                "max_base": self.max_base,
                "seed": self.seed,
            },
            "graph": self.m.to_doc(),
            "cursor": [[list(a), code] for a, code in self.done],
            "log": list(self.log),
        }

    def serialize(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":")) + "\n"


def _attachments(m: TriGraph, a: tuple[int, ...], size: int):
    """All extension graphs with ``size`` new vertices over the concrete
    base, every base element covered by an edge and every new vertex
    non-isolated."""
    base_g = m.induced(a)
    nid = max([-1] + list(m.ids)) + 1
    new = list(range(nid, nid + size))
    for sort_vec in _sort_vectors(size):
        sorts = dict(base_g.vertices)
        sorts.update({v: s for v, s in zip(new, sort_vec)})
        e_slots = []
        e2_slots = []
        verts = list(a) + new
        for i, u in enumerate(verts):
            for v in verts[i + 1:]:
                if u in new or v in new:
                    key = (sorts[u], sorts[v])
                    if key in _E_OK:
                        e_slots.append((u, v))
                    elif key in _E2_OK:
                        e2_slots.append((u, v))
        total = len(e_slots) + len(e2_slots)
        if total > 20:
            raise BudgetExceeded("attachment enumeration has too many edge slots")
        for bits in range(1 << total):
            e_extra = [
                e_slots[i] for i in range(len(e_slots)) if bits >> i & 1
            ]
            e2_extra = [
                e2_slots[i]
                for i in range(len(e2_slots))
                if bits >> (len(e_slots) + i) & 1
            ]
            chosen = e_extra + e2_extra
            covered = set()
            touched = set()
            for u, v in chosen:
                covered.update((u, v))
                touched.update(w for w in (u, v) if w in new)
            if set(a) - covered:
                continue  # base not tight
            if set(new) - {w for w in covered if w in new}:
                continue  # isolated new vertex
            yield TriGraph.build(
                m.n,
                sorts,
                list(base_g.e) + e_extra,
                list(base_g.e2) + e2_extra,
                allow_small_n=m.n < 6,
            )


def _sort_vectors(size: int):
    order = [Sort.POINT, Sort.LINE, Sort.PLANE]
    if size == 0:
        yield ()
        return
    for head in order:
        for tail in _sort_vectors(size - 1):
            yield (head,) + tail


def _candidates(m: TriGraph, size: int, max_base: int):
    """(pattern code, base tuple, extension graph) for every candidate
    task of one extension size, sorted canonically."""
    out = []
    ids = sorted(m.ids)
    for r in range(1, max_base + 1):
        for a in combinations(ids, r):
            for c in _attachments(m, a, size):
                out.append((canonical_code(c, marked=a), a, c))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def build(
    n: int = 6,
    steps: int = 50,
    max_ext: int = 4,
    max_base: int = 2,
    seed: int = 0,
    policy: MuPolicy | None = None,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
) -> BuilderState:
    """Fold ``steps`` canonical extension tasks into the seed flag.

    Deterministic: the task order is canonical and the seed is recorded in
    the state document, so identical inputs replay identical states.
    """
    if n < 6:
        raise BadParameter("builder requires n >= 6")
    if steps < 0 or max_ext < 1 or max_base < 1:
        raise BadParameter("budgets must be positive")
    policy = policy or MuPolicy()
    m = seed_flag(n)
    done: set[tuple[tuple[int, ...], str]] = set()
    log: list[dict] = []
    # strongness persists across steps (each amalgam embeds the old M
    # strongly, and violating witnesses survive extension), and the small
    # per-candidate checks only depend on the isomorphism type
    strong_cache: dict[tuple[int, ...], bool] = {}
    pattern_cache: dict[str, bool] = {}
    for step in range(steps):
        task = _next_task(
            m, max_ext, max_base, done, policy, budgets, dual6b,
            strong_cache, pattern_cache,
        )
        if task is None:
            break
        code, a, c = task
        delta_before = delta(m, m.ids)
        old_ids = set(m.ids)
        result = amalgamate(
            m.induced(a), m, c, policy, budgets, dual6b, assume_members=True
        )
        m = result.d
        done.add((a, code))
        log.append({
            "step": step,
            "base": list(a),
            "pattern": code,
            "added": sorted(set(m.ids) - old_ids),
            "resolutions": [entry["resolution"] for entry in result.path],
            "delta": delta(m, m.ids),
            "delta_gain": delta(m, m.ids) - delta_before,
        })
        # the in-loop membership invariant is enforced by amalgamate's
        # post-verification, which raises rather than return a non-member
    return BuilderState(
        m=m,
        steps=len(log),
        max_ext=max_ext,
        max_base=max_base,
        seed=seed,
        done=tuple(sorted(done)),
        log=tuple(log),
    )


def _next_task(
    m, max_ext, max_base, done, policy, budgets, dual6b,
    strong_cache=None, pattern_cache=None,
):
    strong_cache = {} if strong_cache is None else strong_cache
    pattern_cache = {} if pattern_cache is None else pattern_cache
    for size in range(1, max_ext + 1):
        for code, a, c in _candidates(m, size, max_base):
            if (a, code) in done:
                continue
            if a not in strong_cache:
                strong_cache[a] = is_strong(m, a, m.ids, budgets=budgets).holds
            if not strong_cache[a]:
                continue
            if code not in pattern_cache:
                pattern_cache[code] = (
                    is_strong(c, a, c.ids, budgets=budgets).holds
                    and check_Kmu(c, policy, budgets, dual6b).holds
                )
            if not pattern_cache[code]:
                continue
            return code, a, c
    return None


# ---- flag extraction and ampleness ---------------------------------------


def extract_flag_residue(m: TriGraph, a: int, b: int) -> frozenset[int]:
    """All x completing the incident pair {a, b} to a complete flag."""
    sa, sb = m.sort_of(a), m.sort_of(b)
    if sa is sb:
        raise NotAFlag("partial flag needs two distinct sorts")
    incident = b in (m.e_adj[a] | m.e2_adj[a])
    if not incident:
        raise NotAFlag(f"{a} and {b} are not incident")
    have = {sa, sb}
    (missing,) = set(Sort) - have
    out = set()
    for x in m.of_sort(missing):
        trio = {a: sa, b: sb, x: missing}
        ok = True
        for u, v in combinations(sorted(trio), 2):
            key = (trio[u], trio[v])
            if key in _E_OK or (key[1], key[0]) in _E_OK:
                ok = ok and v in m.e_adj[u]
            else:
                ok = ok and v in m.e2_adj[u]
        if ok:
            out.add(x)
    return frozenset(out)


@dataclass(frozen=True)
class AmpleReport:
    d_values: dict
    conditions: tuple[tuple[str, Verdict], ...]
    acl: dict

    @property
    def holds(self) -> bool:
        return all(v.holds for _, v in self.conditions)

    def to_doc(self) -> dict:
        return {
            "d_values": dict(self.d_values),
            "conditions": {name: v.to_doc() for name, v in self.conditions},
            "acl": {k: sorted(v) for k, v in self.acl.items()},
        }


def _acl_approx(m: TriGraph, s, budgets: Budgets) -> frozenset[int]:
    """Finite-approximation algebraic closure: the self-sufficient closure
    plus every vertex with d(x/S) = 0."""
    s = frozenset(s)
    base = closure(m, s, budgets=budgets)
    extra = {
        v for v in m.ids
        if v not in base and d_rel(m, {v}, base, budgets=budgets) == 0
    }
    return base | extra


def ample_check(
    m: TriGraph, p: int, l: int, e: int, budgets: Budgets = _DEFAULT_BUDGETS
) -> AmpleReport:
    """The three 2-ample condition groups on a strong flag, with d-values
    standing in for forking and finite closures for algebraic closure."""
    if (
        m.sort_of(p) is not Sort.POINT
        or m.sort_of(l) is not Sort.LINE
        or m.sort_of(e) is not Sort.PLANE
    ):
        raise NotAFlag("expected a (point, line, plane) triple")
    if not (l in m.e_adj[p] and e in m.e_adj[l] and e in m.e2_adj[p]):
        raise NotAFlag("the triple is not a complete flag")
    v = is_strong(m, {p, l, e}, m.ids, budgets=budgets)
    if not v.holds:
        raise NotStrong(f"flag is not strong in M: {v.certificate}")

    def d(s):
        return d_value(m, s, budgets=budgets)

    dv = {
        "d(p)": d({p}),
        "d(l)": d({l}),
        "d(e)": d({e}),
        "d(p/l)": d({p, l}) - d({l}),
        "d(p/e)": d({p, e}) - d({e}),
        "d(l/e)": d({l, e}) - d({e}),
        "d(p/le)": d({p, l, e}) - d({l, e}),
    }
    conds = []
    conds.append((
        "pairwise_dependence",
        Verdict(
            dv["d(p/l)"] < dv["d(p)"]
            and dv["d(p/e)"] < dv["d(p)"]
            and dv["d(l/e)"] < dv["d(l)"],
            "ample_check",
            detail={k: dv[k] for k in ("d(p)", "d(l)", "d(p/l)", "d(p/e)", "d(l/e)")},
        ),
    ))
    conds.append((
        "independence_over_line",
        Verdict(
            dv["d(p/l)"] == dv["d(p/le)"],
            "ample_check",
            detail={"d(p/l)": dv["d(p/l)"], "d(p/le)": dv["d(p/le)"]},
        ),
    ))
    acl = {
        "p": _acl_approx(m, {p}, budgets),
        "l": _acl_approx(m, {l}, budgets),
        "e": _acl_approx(m, {e}, budgets),
        "empty": closure(m, (), budgets=budgets),
    }
    triv = (acl["p"] & acl["l"] <= acl["empty"]) and (
        acl["l"] & acl["e"] <= acl["empty"]
    )
    conds.append((
        "closure_intersections_trivial",
        Verdict(
            triv,
            "ample_check",
            detail={
                "p_and_l": sorted(acl["p"] & acl["l"]),
                "l_and_e": sorted(acl["l"] & acl["e"]),
            },
        ),
    ))
    return AmpleReport(d_values=dv, conditions=tuple(conds), acl=acl)


# ---- axiom verification ----------------------------------------------------


def verify_Tmu(
    m: TriGraph,
    max_ext: int = 2,
    max_base: int = 2,
    policy: MuPolicy | None = None,
    budgets: Budgets = _DEFAULT_BUDGETS,
    dual6b: bool = False,
) -> dict:
    """Finite-scale report on the three axioms of the limit theory.

    Axiom 1 is exact; axioms 2 and 3 are quantified over the bounded task
    space and report deficits instead of failing, because no finite graph
    satisfies them outright.
    """
    policy = policy or MuPolicy()
    axiom1 = check_Kmu(m, policy, budgets, dual6b)
    report = {
        "axiom1": axiom1.to_doc(),
        "axiom2": {"satisfied": 0, "violated": 0, "out_of_budget": 0, "missing": []},
        "axiom3": {"satisfied": 0, "violated": 0, "out_of_budget": 0, "offending": []},
    }
    if not axiom1.holds:
        return report
    ax2 = report["axiom2"]
    ax3 = report["axiom3"]
    for size in range(1, max_ext + 1):
        for code, a, c in _candidates(m, size, max_base):
            base = frozenset(a)
            ext = frozenset(c.ids) - base
            try:
                if not is_strong(c, base, c.ids, budgets=budgets).holds:
                    continue
                if not check_Kmu(c, policy, budgets, dual6b).holds:
                    continue
                if not is_strong(m, base, m.ids, budgets=budgets).holds:
                    continue
                k = len(ext) + m.n - 1
                if not is_k_strong(m, base, m.ids, k, budgets=budgets).holds:
                    continue
                simple = (
                    d_rel(c, ext, base, budgets=budgets) == 0
                    and pair_core(c, base, ext) == base
                )
                copy = _find_copy(m, base, c, budgets)
                if copy is not None:
                    ax2["satisfied"] += 1
                else:
                    ax2["violated"] += 1
                    if len(ax2["missing"]) < 20:
                        ax2["missing"].append({"base": list(a), "pattern": code})
                if simple:
                    pair = PairOverBase(c, base, ext)
                    try:
                        mu = mu_value(policy, pair, budgets)
                    except Exception:
                        continue
                    packing = _max_packing(enumerate_copies(m, pair, budgets))
                    if packing >= mu:
                        ax3["satisfied"] += 1  # another copy would break the cap
                    else:
                        ax3["violated"] += 1
                        if len(ax3["offending"]) < 20:
                            ax3["offending"].append({
                                "base": list(a),
                                "pattern": code,
                                "chi": packing,
                                "mu": mu,
                            })
            except BudgetExceeded:
                ax2["out_of_budget"] += 1
    return report


def _find_copy(m: TriGraph, base: frozenset, c: TriGraph, budgets: Budgets):
    """A strong realization of the extension type over the base inside m."""
    ext = sorted(frozenset(c.ids) - base)
    combined = TriGraph.build(
        m.n,
        list(m.vertices) + [(v, c.sort_of(v)) for v in ext],
        list(m.e) + [p for p in c.e if p[0] in ext or p[1] in ext],
        list(m.e2) + [p for p in c.e2 if p[0] in ext or p[1] in ext],
        allow_small_n=m.n < 6,
    )
    pool = sorted(frozenset(m.ids) - base)
    seen = 0
    for cand in combinations(pool, len(ext)):
        seen += 1
        if seen > budgets.copies_cap:
            raise BudgetExceeded("copy search exceeded copies_cap")
        if not isomorphisms_over(combined, base, ext, cand):
            continue
        if is_strong(m, base | frozenset(cand), m.ids, budgets=budgets).holds:
            return frozenset(cand)
    return None


def geometry_report(m: TriGraph, budgets: Budgets = _DEFAULT_BUDGETS):
    return check_geometry(m, budgets)
