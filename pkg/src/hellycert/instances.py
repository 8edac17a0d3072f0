"""Instance families with hand-built certificates of known size, plus Helly-number bounds."""
from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bctree import (BCNode, BCTree, Branch, Cut, Disjunction, Hull, Infeasibility, LeafDominance,
                     LeafFarkas, Validity, check_tree, tree_size, tree_to_json)
from .core import (EmbeddingContext, GeometryError, Halfspace, Polyhedron, dot, geq,
                   integer_normalize, nullspace_vector, polyhedron_to_json, tighten_complement, unit)
from .cuts import build_cut_step
from .lp import extract_dominance, extract_farkas


@dataclass
class InstanceBundle:
    name: str
    system: Polyhedron
    hull_target: Polyhedron
    certificates: list = field(default_factory=list)  # (file stem, BCTree)
    claimed_sizes: list = field(default_factory=list)  # (file stem, int)
    extra_targets: list = field(default_factory=list)  # non-facet valid halfspaces worth measuring

    @property
    def dim(self) -> int:
        return self.system.dim

    def certificate(self, stem: str) -> BCTree:
        return dict(self.certificates)[stem]

    def add(self, stem: str, tree: BCTree, claimed: int):
        self.certificates.append((stem, tree))
        self.claimed_sizes.append((stem, claimed))


# -- tree builders ---------------------------------------------------------------

def close_leaf(poly: Polyhedron, label, targets: Sequence[Halfspace] | None) -> BCNode:
    """A leaf proving its set empty, or contained in every target."""
    farkas, _ = extract_farkas(poly)
    if farkas is not None:
        return BCNode(label, LeafFarkas(farkas))
    if targets is None:
        raise GeometryError("leaf set is nonempty but the goal needs it empty")
    certs = []
    for t in targets:
        cert, point = extract_dominance(poly, t.normal, t.rhs)
        if cert is None:
            raise GeometryError(f"leaf set is not inside {t}: {point}")
        certs.append(cert)
    return BCNode(label, LeafDominance(tuple(certs)))


def cut_chain(poly: Polyhedron, sources: Sequence[Halfspace], targets, label=()) -> BCNode:
    """Derive the CG cut of each source in turn, then close with a leaf."""
    if not sources:
        return close_leaf(poly, label, targets)
    step = build_cut_step(poly, sources[0])
    comp = tighten_complement(step.cut)
    left = BCNode((comp,), LeafFarkas(step.certifier))
    right = cut_chain(poly.intersect([step.cut]), sources[1:], targets, (step.cut,))
    return BCNode(label, Cut(step), (left, right))


def branch_chain(poly: Polyhedron, disjunctions: Sequence[Disjunction], targets, label=()) -> BCNode:
    """Branch on each disjunction in turn along the last term; other terms are closed as leaves."""
    if not disjunctions:
        return close_leaf(poly, label, targets)
    d = disjunctions[0]
    kids = []
    for j, term in enumerate(d.terms):
        child_poly = poly.intersect(term)
        if j == len(d.terms) - 1:
            kids.append(branch_chain(child_poly, disjunctions[1:], targets, term))
        else:
            kids.append(close_leaf(child_poly, term, targets))
    return BCNode(label, Branch(d), tuple(kids))


def branch_until_empty(poly: Polyhedron, order: Sequence[Disjunction], label=()) -> BCNode:
    """Branch through ``order`` on every child until each leaf set is empty."""
    farkas, _ = extract_farkas(poly)
    if farkas is not None:
        return BCNode(label, LeafFarkas(farkas))
    if not order:
        raise GeometryError("ran out of disjunctions before every leaf became empty")
    d = order[0]
    kids = tuple(branch_until_empty(poly.intersect(t), order[1:], t) for t in d.terms)
    return BCNode(label, Branch(d), kids)


def validity_from_reverse(system: Polyhedron, h: Halfspace, reverse_tree: BCTree) -> BCTree:
    """Validity tree for ``h`` from an infeasibility tree of ``reverse_instance(system, h)``.

    The root branches on ``a.x <= floor(b) | a.x >= floor(b) + 1``; the first
    side is closed by dominance and the second carries the reverse tree.
    Size is the reverse size plus 2.
    """
    a, b = integer_normalize(h.normal, h.rhs)
    d = Disjunction.split(a, math.floor(b))
    left = close_leaf(system.intersect(d.terms[0]), d.terms[0], [h])
    old = reverse_tree.root
    if old.first_label:
        raise GeometryError("reverse tree root must not add constraints")
    right = BCNode(d.terms[1], old.second, old.children)
    return BCTree(EmbeddingContext(system.dim), system, BCNode((), Branch(d), (left, right)), Validity(h))


def _assert_claims(bundle: InstanceBundle):
    for (stem, tree), (_, claimed) in zip(bundle.certificates, bundle.claimed_sizes):
        v = check_tree(tree)
        if not v:
            raise AssertionError(f"{bundle.name}/{stem}: generated certificate rejected: {v.reason}")
        if tree_size(tree) != claimed:
            raise AssertionError(f"{bundle.name}/{stem}: size {tree_size(tree)} != claimed {claimed}")


def _facet_sources(system: Polyhedron, hull_target: Polyhedron):
    """Pair each hull facet with the system row whose CG rounding gives it."""
    from .cuts import cg_cut

    pairs = []
    for facet in hull_target.rows:
        src = next((r for r in system.rows if not r.trivial and cg_cut(r) == facet.normalized()), None)
        if src is None:
            raise GeometryError(f"no system row rounds to facet {facet}")
        pairs.append((facet, src))
    return pairs


def _cut_bundle(name, system, hull_target, validity_claim=3) -> InstanceBundle:
    n = system.dim
    ctx = EmbeddingContext(n)
    bundle = InstanceBundle(name, system, hull_target)
    pairs = _facet_sources(system, hull_target)
    hull_root = cut_chain(system, [s for _, s in pairs], hull_target.rows)
    bundle.add("hull", BCTree(ctx, system, hull_root, Hull(hull_target)), 2 * len(pairs) + 1)
    for k, (facet, src) in enumerate(pairs):
        root = cut_chain(system, [src], [facet])
        bundle.add(f"facet_{k}", BCTree(ctx, system, root, Validity(facet)), validity_claim)
    return bundle


# -- families --------------------------------------------------------------------

def gen_box(n: int) -> InstanceBundle:
    """``[-1/2, 3/2 + 2n]^n`` with integer hull ``[0, 2n+1]^n``.

    The hull certificate is a chain of ``2n`` CG cuts (size ``4n+1``); each
    facet has a one-cut validity certificate of size 3.
    """
    if n < 1:
        raise GeometryError("n must be at least 1")
    system = Polyhedron.cube(n, Fraction(-1, 2), Fraction(3, 2) + 2 * n)
    target = Polyhedron.cube(n, 0, 2 * n + 1)
    bundle = _cut_bundle(f"box_n{n}", system, target)
    _assert_claims(bundle)
    return bundle


def gen_simplex_validity(n: int) -> InstanceBundle:
    """``[1/(2n), 2 + n - 1/(2n)]^n`` and the valid inequality ``sum x_i >= n``.

    Branching on ``x_i <= 0 | x_i >= 1`` for every coordinate gives a
    certificate of size ``2n + 1``.
    """
    if n < 1:
        raise GeometryError("n must be at least 1")
    eps = Fraction(1, 2 * n)
    system = Polyhedron.cube(n, eps, 2 + n - eps)
    target = Polyhedron.cube(n, 1, n + 1)
    bundle = _cut_bundle(f"simplex_n{n}", system, target)
    ctx = EmbeddingContext(n)
    goal = geq([1] * n, n)
    disj = [Disjunction.variable(n, i, 0) for i in range(n)]
    root = branch_chain(system, disj, [goal])
    bundle.add("validity_sum", BCTree(ctx, system, root, Validity(goal)), 2 * n + 1)
    bundle.extra_targets.append(goal)
    _assert_claims(bundle)
    return bundle


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def polygon_facets(verts: Sequence) -> list[Halfspace]:
    """Edge inequalities of a strictly convex lattice polygon (either orientation)."""
    pts = [tuple(Fraction(c) for c in v) for v in verts]
    k = len(pts)
    if k < 3:
        raise GeometryError("polygon needs at least three vertices")
    signs = {(_cross(pts[i], pts[(i + 1) % k], pts[(i + 2) % k]) > 0) for i in range(k)}
    zero = any(_cross(pts[i], pts[(i + 1) % k], pts[(i + 2) % k]) == 0 for i in range(k))
    if zero or len(signs) != 1:
        raise GeometryError("base not in convex position")
    facets = []
    for i in range(k):
        p, q = pts[i], pts[(i + 1) % k]
        a = (q[1] - p[1], p[0] - q[0])
        b = dot(a, p)
        if any(dot(a, v) > b for v in pts):
            a, b = (-a[0], -a[1]), -b
        if any(dot(a, v) > b for v in pts):
            raise GeometryError("base not in convex position")
        na, nb = integer_normalize(a, b)
        facets.append(Halfspace(na, nb))
    return facets


def _lift(h: Halfspace, n: int) -> Halfspace:
    return Halfspace(tuple(h.normal) + (Fraction(0),) * (n - 2), h.rhs)


def exterior_points(verts: Sequence, facets: Sequence[Halfspace]) -> list:
    """One point per facet: edge midpoint pushed outward so it violates only that facet."""
    pts = [tuple(Fraction(c) for c in v) for v in verts]
    out = []
    k = len(pts)
    for j in range(k):
        p, q = pts[j], pts[(j + 1) % k]
        mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        a = facets[j].normal
        t = Fraction(1)
        for i, f in enumerate(facets):
            if i == j:
                continue
            rate = dot(f.normal, a)
            if rate > 0:
                t = min(t, f.slack(mid) / rate / 2)
        out.append((mid[0] + t * a[0], mid[1] + t * a[1]))
    return out


def _hyperplane_through(points: Sequence) -> tuple | None:
    """Exact normal of the affine hull of ``n`` points in R^n, or None if degenerate."""
    base = points[0]
    return nullspace_vector([[x - y for x, y in zip(p, base)] for p in points[1:]])


def convex_hull_halfspaces(points: Sequence) -> Polyhedron:
    """Facet description of the convex hull of full-dimensional rational points.

    Candidate facets come from qhull; each one is recomputed exactly, oriented,
    checked against every point, and deduplicated.
    """
    import numpy as np
    from scipy.spatial import ConvexHull

    pts = [tuple(Fraction(c) for c in p) for p in points]
    n = len(pts[0])
    arr = np.array([[float(c) for c in p] for p in pts])
    hull = ConvexHull(arr)
    seen = set()
    rows = []
    groups = {tuple(np.round(eq, 7)): eq for eq in hull.equations}
    for _, eq in sorted(groups.items()):
        on = [i for i in range(len(pts)) if abs(float(np.dot(eq[:-1], arr[i])) + eq[-1]) < 1e-7]
        normal = _hyperplane_through([pts[i] for i in on])
        if normal is None:
            raise GeometryError("degenerate facet from qhull")
        b = dot(normal, pts[on[0]])
        vals = [dot(normal, p) for p in pts]
        if all(v >= b for v in vals):
            normal, b = tuple(-c for c in normal), -b
        elif not all(v <= b for v in vals):
            raise GeometryError("qhull facet is not supporting in exact arithmetic")
        a, rhs = integer_normalize(normal, b)
        key = (a, rhs)
        if key not in seen:
            seen.add(key)
            rows.append(Halfspace(a, rhs))
    rows.sort(key=lambda h: (h.normal, h.rhs))
    return Polyhedron(n, tuple(rows))


def gen_lifted(base: Sequence, n: int) -> InstanceBundle:
    """``conv((base x [0,1]^(n-2)) | {v_j})`` with one exterior point per base edge at height 1/2.

    Its integer hull is ``base x [0,1]^(n-2)`` whatever the number of facets;
    one branch on ``x_3`` certifies it (size 3).
    """
    if n < 3:
        raise GeometryError("lifted example needs n >= 3")
    facets = polygon_facets(base)
    ext = exterior_points(base, facets)
    half = (Fraction(1, 2),) * (n - 2)
    points = [tuple(Fraction(c) for c in v) + tuple(Fraction(b) for b in bits)
              for v in base for bits in itertools.product((0, 1), repeat=n - 2)]
    points += [tuple(e) + half for e in ext]
    system = convex_hull_halfspaces(points)
    target_rows = [_lift(f, n) for f in facets]
    for i in range(2, n):
        target_rows.append(Halfspace(unit(n, i), 1))
        target_rows.append(Halfspace(unit(n, i, -1), 0))
    target = Polyhedron(n, tuple(target_rows))
    ctx = EmbeddingContext(n)
    bundle = InstanceBundle(f"lifted_{len(facets)}gon_n{n}", system, target)
    d = Disjunction.variable(n, 2, 0)
    root = BCNode((), Branch(d), tuple(close_leaf(system.intersect(t), t, target.rows) for t in d.terms))
    bundle.add("hull", BCTree(ctx, system, root, Hull(target)), 3)
    _assert_claims(bundle)
    return bundle


OCTAGON = ((1, 0), (0, 1), (0, 2), (1, 3), (2, 3), (3, 2), (3, 1), (2, 0))  # clockwise
UNIT_SQUARE = ((0, 0), (0, 1), (1, 1), (1, 0))


def critical_member(v: Sequence[int]) -> Polyhedron:
    """``conv({0,1}^n minus v)``: the unit cube with the corner at ``v`` sliced off."""
    n = len(v)
    rows = list(Polyhedron.cube(n, 0, 1).rows)
    normal = [1 if vi == 0 else -1 for vi in v]
    rows.append(geq(normal, 1 - sum(v)))
    return Polyhedron(n, tuple(rows))


def gen_critical_family(n: int) -> list[Polyhedron]:
    """A critical family of ``2^n`` lattice-convex sets: all cube-minus-one-vertex hulls."""
    if not 1 <= n <= 4:
        raise GeometryError("critical family supported for 1 <= n <= 4")
    return [critical_member(v) for v in itertools.product((0, 1), repeat=n)]


def critical_system(n: int) -> Polyhedron:
    rows = []
    for member in gen_critical_family(n):
        rows.extend(member.rows)
    return Polyhedron(n, tuple(rows))


def gen_critical(n: int) -> InstanceBundle:
    """The critical family as one infeasible system, closed by variable branching."""
    system = critical_system(n)
    ctx = EmbeddingContext(n)
    order = [Disjunction.variable(n, i, 0) for i in range(n)]
    root = branch_until_empty(system, order)
    bundle = InstanceBundle(f"critical_n{n}", system, Polyhedron(n, (Halfspace((0,) * n, -1),)))
    tree = BCTree(ctx, system, root, Infeasibility())
    bundle.add("infeasibility", tree, tree_size(tree))
    _assert_claims(bundle)
    return bundle


def helly_bound(t: int, h_prime: int) -> Fraction:
    """Leaf-count lower bound ``t / (h' - 1)`` for a critical family of size ``t``."""
    if h_prime < 2:
        raise GeometryError("Helly number of the relaxation must be at least 2")
    return Fraction(t, h_prime - 1)


def helly_number_mixed(n1: int, n2: int) -> int:
    """Helly number of Z^n1 x R^n2: ``2^n1 (n2 + 1)``."""
    if n1 < 0 or n2 < 0 or n1 + n2 < 1:
        raise GeometryError("need n1, n2 >= 0 with n1 + n2 >= 1")
    return 2 ** n1 * (n2 + 1)


GENERATORS = {
    "box": gen_box,
    "simplex": gen_simplex_validity,
    "lifted": lambda n: gen_lifted(OCTAGON, n),
    "lifted-square": lambda n: gen_lifted(UNIT_SQUARE, n),
    "critical": gen_critical,
}


def write_bundle(bundle: InstanceBundle, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def dump(name, obj):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(path)

    from .bctree import halfspace_to_json

    dump("instance.json", {"name": bundle.name, "system": polyhedron_to_json(bundle.system),
                           "hull_target": polyhedron_to_json(bundle.hull_target),
                           "extra_targets": [halfspace_to_json(h) for h in bundle.extra_targets]})
    for stem, tree in bundle.certificates:
        dump(f"{stem}.json", tree_to_json(tree))
    dump("claims.json", {f"{stem}.json": size for stem, size in bundle.claimed_sizes})
    return written


def read_bundle(in_dir: str) -> InstanceBundle:
    from .bctree import tree_from_json
    from .core import halfspace_from_json, polyhedron_from_json

    with open(os.path.join(in_dir, "instance.json"), encoding="utf-8") as fh:
        inst = json.load(fh)
    with open(os.path.join(in_dir, "claims.json"), encoding="utf-8") as fh:
        claims = json.load(fh)
    bundle = InstanceBundle(inst["name"], polyhedron_from_json(inst["system"]),
                            polyhedron_from_json(inst["hull_target"]),
                            extra_targets=[halfspace_from_json(h) for h in inst.get("extra_targets", [])])
    for fname in sorted(claims):
        with open(os.path.join(in_dir, fname), encoding="utf-8") as fh:
            bundle.add(fname[:-5], tree_from_json(json.load(fh)), claims[fname])
    return bundle
