"""Exhaustive minimum-size certificate search relative to a finite move family.

Node sets are keyed by their normalized row set.  ``_Search.solve`` returns
the cheapest plan within a budget; plans are turned into checked trees with
evidence from the LP layer only at the end.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bctree import (BCNode, BCTree, Branch, Cut, Disjunction, Hull, Infeasibility, LeafFarkas,
                     Membership, Validity, check_tree, count_leaves, reverse_instance, tree_size)
from .core import (EmbeddingContext, GeometryError, Halfspace, Polyhedron, bounding_box, dot,
                   halfspace_to_json, integer_normalize, tighten_complement, vec_to_json)
from .cuts import build_cut_step, cg_cut
from .instances import InstanceBundle, close_leaf
from .lp import implies, lp_solve


@dataclass(frozen=True)
class MoveFamily:
    """Allowed moves.

    ``cuts`` are fixed CG sources, usable wherever they are valid.
    ``cut_normals`` are directions whose source is tightened by LP at each
    node, so their cut is the strongest CG rounding with that normal.
    """

    disjunctions: tuple = ()
    cuts: tuple = ()
    cut_normals: tuple = ()
    depth_cap: int | None = None
    size_cap: int = 25

    def __post_init__(self):
        for d in self.disjunctions:
            if d.kind not in ("split", "variable"):
                raise GeometryError("search families use split or variable disjunctions only")
        if self.size_cap < 1 or (self.depth_cap is not None and self.depth_cap < 1):
            raise GeometryError("caps must be at least 1")

    def without_disjunctions(self) -> MoveFamily:
        return MoveFamily((), self.cuts, self.cut_normals, self.depth_cap, self.size_cap)


@dataclass(frozen=True)
class MinTreeResult:
    size: int | None
    tree: BCTree | None
    cap_exceeded: bool
    states: int = 0

    @property
    def leaves(self) -> int | None:
        return None if self.tree is None else count_leaves(self.tree)


def _row_key(h: Halfspace):
    if h.trivial:
        return ("trivial", h.rhs < 0)
    a, b = integer_normalize(h.normal, h.rhs)
    return (a, b)


def _goal_targets(goal):
    if isinstance(goal, Infeasibility):
        return None
    if isinstance(goal, Hull):
        return tuple(goal.target.rows)
    if isinstance(goal, Validity):
        return (goal.target,)
    if isinstance(goal, Membership):
        return (goal.separator,)
    raise GeometryError(f"unknown goal {goal!r}")


class _Search:
    def __init__(self, system: Polyhedron, goal, family: MoveFamily):
        self.system = system
        self.n = system.dim
        self.targets = _goal_targets(goal)
        self.family = family
        self.memo = {}
        self.closable_memo = {}
        self.states = 0

    def key(self, rows):
        ks = set()
        for r in rows:
            k = _row_key(r)
            if k == ("trivial", False):
                continue
            ks.add(k)
        return frozenset(ks)

    def closable(self, poly: Polyhedron, key) -> bool:
        hit = self.closable_memo.get(key)
        if hit is None:
            if lp_solve(poly, [0] * self.n).status == "infeasible":
                hit = True
            elif self.targets is None:
                hit = False
            else:
                hit = all(implies(poly, t) for t in self.targets)
            self.closable_memo[key] = hit
        return hit

    def moves(self, poly: Polyhedron):
        for d in self.family.disjunctions:
            if any(all(implies(poly, h) for h in term) for term in d.terms):
                continue
            yield ("branch", d)
        sources = list(self.family.cuts)
        for a in self.family.cut_normals:
            res = lp_solve(poly, a, "max")
            if res.status == "optimal":
                sources.append(Halfspace(tuple(a), res.value))
        seen = set()
        for h in sources:
            if h.trivial or not implies(poly, h):
                continue
            cut = cg_cut(h)
            if cut in seen or implies(poly, cut):
                continue
            seen.add(cut)
            yield ("cut", h, cut)

    def solve(self, rows: tuple, budget: int, depth: int):
        """Cheapest plan of size at most ``budget`` for the node set ``rows``, else None."""
        key = self.key(rows)
        memo_key = key if self.family.depth_cap is None else (key, depth)
        hit = self.memo.get(memo_key)
        if hit is not None:
            kind, val, plan = hit
            if kind == "exact":
                return (val, plan) if val <= budget else None
            if val >= budget:
                return None
        self.states += 1
        poly = Polyhedron(self.n, rows)
        if self.closable(poly, key):
            self.memo[memo_key] = ("exact", 1, ("leaf",))
            return (1, ("leaf",)) if budget >= 1 else None
        if budget < 3 or (self.family.depth_cap is not None and depth >= self.family.depth_cap):
            self._bound(memo_key, budget)
            return None
        best = None
        for move in self.moves(poly):
            limit = budget if best is None else best[0] - 1
            if move[0] == "cut":
                _, src, cut = move
                sub = self.solve(rows + (cut,), limit - 2, depth + 1)
                if sub is not None:
                    best = (sub[0] + 2, ("cut", src, cut, sub[1]))
            else:
                d = move[1]
                k = len(d.terms)
                remaining = limit - 1
                plans = []
                ok = True
                for j, term in enumerate(d.terms):
                    sub = self.solve(rows + tuple(term), remaining - (k - 1 - j), depth + 1)
                    if sub is None:
                        ok = False
                        break
                    remaining -= sub[0]
                    plans.append(sub[1])
                if ok:
                    best = (limit - remaining, ("branch", d, tuple(plans)))
        if best is None:
            self._bound(memo_key, budget)
            return None
        self.memo[memo_key] = ("exact", best[0], best[1])
        return best

    def _bound(self, memo_key, budget):
        prev = self.memo.get(memo_key)
        if prev is None or (prev[0] == "gt" and prev[1] < budget):
            self.memo[memo_key] = ("gt", budget, None)

    def build(self, poly: Polyhedron, plan, label=()) -> BCNode:
        if plan[0] == "leaf":
            return close_leaf(poly, label, self.targets)
        if plan[0] == "cut":
            _, src, cut, sub = plan
            step = build_cut_step(poly, src)
            left = BCNode((tighten_complement(step.cut),), LeafFarkas(step.certifier))
            right = self.build(poly.intersect([step.cut]), sub, (step.cut,))
            return BCNode(label, Cut(step), (left, right))
        _, d, subs = plan
        kids = tuple(self.build(poly.intersect(t), p, tuple(t)) for t, p in zip(d.terms, subs))
        return BCNode(label, Branch(d), kids)


def min_tree(system: Polyhedron, goal, family: MoveFamily) -> MinTreeResult:
    """A minimum-size tree for ``goal`` using only moves from ``family``."""
    bounding_box(system)  # raises on unbounded systems
    if isinstance(goal, Membership) and dot(goal.separator.normal, goal.point) <= goal.separator.rhs:
        raise GeometryError("membership separator does not separate the point")
    s = _Search(system, goal, family)
    found = s.solve(tuple(system.rows), family.size_cap, 0)
    if found is None:
        return MinTreeResult(None, None, True, s.states)
    root = s.build(system, found[1])
    tree = BCTree(EmbeddingContext(system.dim), system, root, goal)
    v = check_tree(tree)
    if not v:
        raise AssertionError(f"search produced a rejected tree: {v.reason}")
    if tree_size(tree) != found[0]:
        raise AssertionError("search size bookkeeping disagrees with the built tree")
    return MinTreeResult(found[0], tree, False, s.states)


# -- families --------------------------------------------------------------------

def variable_disjunctions(n: int, beta_min: int, beta_max: int) -> list[Disjunction]:
    return [Disjunction.variable(n, i, b) for i in range(n) for b in range(beta_min, beta_max + 1)]


def split_disjunctions(splits) -> list[Disjunction]:
    """Split disjunctions ``alpha.x <= beta | alpha.x >= beta + 1`` from integral g-splits."""
    return [Disjunction.split(s.alpha, s.beta) for s in splits if s.is_split]


def default_family(bundle: InstanceBundle, size_cap: int = 25, depth_cap: int | None = None,
                   beta_pad: int = 1, extra_disjunctions: Sequence[Disjunction] = ()) -> MoveFamily:
    """Variable disjunctions over the system's bounding box, target splits, system-row and target-normal cuts.

    This contains every move the constructive certificates of the corpus use.
    """
    n = bundle.dim
    box = bounding_box(bundle.system)
    if box is None:
        lo, hi = [0] * n, [0] * n
    else:
        lo = [math.floor(v) for v in box[0]]
        hi = [math.ceil(v) for v in box[1]]
    beta_min, beta_max = min(lo) - beta_pad, max(hi) + beta_pad - 1
    disj = variable_disjunctions(n, beta_min, beta_max)
    normals = []
    seen = set()
    for i in range(n):
        for sgn in (1, -1):
            e = tuple(Fraction(sgn if j == i else 0) for j in range(n))
            normals.append(e)
            seen.add(e)
    for t in list(bundle.hull_target.rows) + list(bundle.extra_targets):
        if t.trivial:
            continue
        a, b = integer_normalize(t.normal, t.rhs)
        if a in seen:
            continue
        seen.add(a)
        normals.append(a)
        if sum(1 for v in a if v) > 1:
            fb = math.floor(b)
            for beta in (fb - 1, fb):
                disj.append(Disjunction.split(a, beta))
                if beta <= b < beta + 1 and b.denominator == 1:
                    break
    disj.extend(extra_disjunctions)
    cuts = tuple(r for r in bundle.system.rows if not r.trivial)
    return MoveFamily(tuple(disj), cuts, tuple(normals), depth_cap, size_cap)


# -- reports ---------------------------------------------------------------------

@dataclass
class ComplexityReport:
    instance: str
    family_note: str
    facet_each: list = field(default_factory=list)
    facet: int | None = None
    hull: int | None = None
    validity: list = field(default_factory=list)  # (target, size)
    reverse: list = field(default_factory=list)  # (target, size)
    membership_each: list = field(default_factory=list)  # (point, size, separator)
    membership: int | None = None
    f_nontrivial: int = 0
    cap_exceeded: list = field(default_factory=list)
    trees: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.cap_exceeded


def default_witnesses(bundle: InstanceBundle) -> list:
    """For each hull row, the LP optimum of its normal over the system when that point violates it."""
    out = []
    for row in bundle.hull_target.rows:
        res = lp_solve(bundle.system, row.normal, "max")
        if res.status == "optimal" and not row.contains(res.primal) and res.primal not in out:
            out.append(res.primal)
    return out


def _reverse_system(system: Polyhedron, target: Halfspace) -> Polyhedron:
    if target.trivial:
        # the target is empty or everything; its complement has no tightening to add
        return system if target.rhs < 0 else system.intersect([Halfspace((Fraction(0),) * system.dim, -1)])
    return reverse_instance(system, target)


def _job(args):
    tag, system, goal, family = args
    return tag, min_tree(system, goal, family)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HELLYCERT_THREADS", "1")))
    except ValueError:
        return 1


def complexity_report(bundle: InstanceBundle, family: MoveFamily, witnesses=None,
                      with_hull: bool = True) -> ComplexityReport:
    """Family-relative facet, hull, validity, reverse and membership complexities."""
    system = bundle.system
    if witnesses is None:
        witnesses = default_witnesses(bundle)
    facets = list(bundle.hull_target.rows)
    targets = facets + [t for t in bundle.extra_targets if t not in facets]
    jobs = []
    for i, t in enumerate(targets):
        jobs.append((("validity", i), system, Validity(t), family))
        jobs.append((("reverse", i), _reverse_system(system, t), Infeasibility(), family))
    if with_hull:
        jobs.append((("hull", 0), system, Hull(bundle.hull_target), family))
    for w, x in enumerate(witnesses):
        for j, row in enumerate(facets):
            if not row.contains(x):
                jobs.append((("membership", w, j), system, Membership(tuple(x), row), family))
    threads = _threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = dict(ex.map(_job, jobs))
    else:
        results = dict(_job(j) for j in jobs)

    rep = ComplexityReport(bundle.name, "all values are minima relative to the supplied move family")
    for tag, res in results.items():
        if res.cap_exceeded:
            rep.cap_exceeded.append(tag)
        else:
            rep.trees[tag] = res.tree

    def size(tag):
        r = results[tag]
        return None if r.cap_exceeded else r.size

    for i, t in enumerate(targets):
        rep.validity.append((t, size(("validity", i))))
        rep.reverse.append((t, size(("reverse", i))))
    rep.facet_each = [s for _, s in rep.validity[:len(facets)]]
    if rep.facet_each and all(s is not None for s in rep.facet_each):
        rep.facet = max(rep.facet_each)
    if with_hull:
        rep.hull = size(("hull", 0))
    for w, x in enumerate(witnesses):
        best = None
        for j, row in enumerate(facets):
            tag = ("membership", w, j)
            if tag in results and size(tag) is not None and (best is None or size(tag) < best[0]):
                best = (size(tag), row)
        if best is not None:
            rep.membership_each.append((tuple(x), best[0], best[1]))
    if rep.membership_each:
        rep.membership = max(s for _, s, _ in rep.membership_each)
    rep.f_nontrivial = sum(1 for r in facets if not implies(system, r))
    return rep


def report_to_json(rep: ComplexityReport) -> dict:
    return {
        "instance": rep.instance,
        "note": rep.family_note,
        "facet": rep.facet,
        "facet_each": rep.facet_each,
        "hull": rep.hull,
        "validity": [{"target": halfspace_to_json(t), "size": s} for t, s in rep.validity],
        "reverse": [{"target": halfspace_to_json(t), "size": s} for t, s in rep.reverse],
        "membership": rep.membership,
        "membership_each": [{"point": vec_to_json(p), "size": s, "separator": halfspace_to_json(h)}
                            for p, s, h in rep.membership_each],
        "f_nontrivial": rep.f_nontrivial,
        "cap_exceeded": [list(map(str, tag)) for tag in sorted(rep.cap_exceeded, key=str)],
    }
