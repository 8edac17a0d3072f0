"""Branch-and-cut trees and their checkers.

A node stores only the halfspaces it adds (its first label); the set of a
node is the root system intersected with every addition on the path from the
root.  Rows of a node polyhedron are ordered root rows first, then additions
in path order, and certificate multipliers index into that list.

Second labels:

* :class:`Branch` - a split disjunction; one child per term.
* :class:`Cut` - a Chvatal-Gomory cut.  The left child is the cutting plane
  certifier (a :class:`LeafFarkas` whose first label is the tightened
  complement of the cut), the right child continues with the cut added.
* :class:`LeafEmpty`, :class:`LeafFarkas`, :class:`LeafDominance` - leaves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .certificates import (DominanceCert, FarkasCert, Verdict, cert_from_json, cert_to_json,
                           check_dominance, check_farkas)
from .core import (EmbeddingContext, GeometryError, Halfspace, Polyhedron, RVec, dot, geq,
                   halfspace_from_json, halfspace_to_json, integer_normalize, is_integral,
                   parse_rational, polyhedron_from_json, polyhedron_to_json, rational_to_str,
                   tighten_complement, unit, vec_from_json, vec_to_json)
from .cuts import CutStep, verify_cut_step


# -- disjunctions ----------------------------------------------------------------

@dataclass(frozen=True)
class Disjunction:
    terms: tuple
    kind: str = "general"  # "split" | "variable" | "general"
    alpha: RVec | None = None
    beta: Fraction | None = None
    index: int | None = None

    @classmethod
    def split(cls, alpha: Sequence, beta) -> Disjunction:
        a = tuple(Fraction(v) for v in alpha)
        b = Fraction(beta)
        return cls(((Halfspace(a, b),), (geq(a, b + 1),)), "split", a, b)

    @classmethod
    def variable(cls, n: int, i: int, beta) -> Disjunction:
        d = cls.split(unit(n, i), beta)
        return cls(d.terms, "variable", d.alpha, d.beta, i)

    def __str__(self):
        if self.kind == "variable":
            return f"x{self.index + 1} <= {self.beta} or x{self.index + 1} >= {self.beta + 1}"
        return " or ".join("(" + " and ".join(str(h) for h in t) + ")" for t in self.terms)


def check_disjunction(d: Disjunction, dim: int) -> str | None:
    """Reason string if ``d`` is not a valid lattice disjunction, else None."""
    if d.kind in ("split", "variable"):
        if d.alpha is None or d.beta is None or len(d.alpha) != dim:
            return "split disjunction lacks alpha/beta of the right dimension"
        if not is_integral(d.alpha) or all(v == 0 for v in d.alpha):
            return "split normal must be a nonzero integer vector"
        g = 0
        for v in d.alpha:
            g = math.gcd(g, int(v))
        if g != 1:
            return "split normal must be coprime"
        if d.beta.denominator != 1:
            return "non-integer split offset is a g-split, not a valid disjunction"
        if d.kind == "variable":
            if d.index is None or not 0 <= d.index < dim or d.alpha != unit(dim, d.index):
                return "variable disjunction normal must be the unit vector of its index"
        expected = Disjunction.split(d.alpha, d.beta).terms
        if tuple(tuple(t) for t in d.terms) != expected:
            return "disjunction terms do not match alpha/beta"
        return None
    if d.kind != "general":
        return f"unknown disjunction kind {d.kind!r}"
    # general: only two single-halfspace terms a.x <= b | a.x >= c with ceil(c) <= floor(b) + 1
    if len(d.terms) != 2 or any(len(t) != 1 for t in d.terms):
        return "general disjunctions must be split-shaped (two single-halfspace terms)"
    h1, h2 = d.terms[0][0], d.terms[1][0]
    if h1.dim != dim or h2.dim != dim or h1.trivial or h2.trivial:
        return "general disjunction terms must be nontrivial halfspaces of the right dimension"
    a1, b1 = integer_normalize(h1.normal, h1.rhs)
    a2, b2 = integer_normalize(h2.normal, h2.rhs)
    if a2 != tuple(-v for v in a1):
        return "general disjunction terms are not opposite halfspaces"
    if math.ceil(-b2) > math.floor(b1) + 1:
        return "disjunction terms leave lattice points uncovered"
    return None


# -- second labels ---------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    disjunction: Disjunction


@dataclass(frozen=True)
class Cut:
    step: CutStep


@dataclass(frozen=True)
class LeafEmpty:
    pass


@dataclass(frozen=True)
class LeafFarkas:
    cert: FarkasCert


@dataclass(frozen=True)
class LeafDominance:
    certs: tuple


@dataclass(frozen=True)
class BCNode:
    first_label: tuple = ()
    second: object = LeafEmpty()
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "first_label", tuple(self.first_label))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_leaf(self) -> bool:
        return isinstance(self.second, (LeafEmpty, LeafFarkas, LeafDominance))


# -- goals -----------------------------------------------------------------------

@dataclass(frozen=True)
class Infeasibility:
    pass


@dataclass(frozen=True)
class Hull:
    target: Polyhedron


@dataclass(frozen=True)
class Validity:
    target: Halfspace


@dataclass(frozen=True)
class Membership:
    point: RVec
    separator: Halfspace


@dataclass(frozen=True)
class BCTree:
    ctx: EmbeddingContext
    system: Polyhedron
    root: BCNode
    goal: object = field(default_factory=Infeasibility)


# -- traversal -------------------------------------------------------------------

def iter_nodes(tree: BCTree) -> Iterator[tuple[tuple, BCNode, Polyhedron, bool]]:
    """Yield ``(path, node, node polyhedron, is_certifier)`` in preorder."""
    stack = [((), tree.root, tree.system.intersect(tree.root.first_label), False)]
    while stack:
        path, node, poly, certifier = stack.pop()
        yield path, node, poly, certifier
        is_cut = isinstance(node.second, Cut)
        for i in reversed(range(len(node.children))):
            child = node.children[i]
            stack.append((path + (i,), child, poly.intersect(child.first_label), is_cut and i == 0))


def node_polyhedron(tree: BCTree, path: Sequence[int]) -> Polyhedron:
    node = tree.root
    poly = tree.system.intersect(node.first_label)
    for step in path:
        if not 0 <= step < len(node.children):
            raise GeometryError(f"invalid node path {tuple(path)}")
        node = node.children[step]
        poly = poly.intersect(node.first_label)
    return poly


def count_nodes(tree: BCTree) -> int:
    return sum(1 for _ in iter_nodes(tree))


def count_leaves(tree: BCTree) -> int:
    return sum(1 for _, n, _, _ in iter_nodes(tree) if not n.children)


def tree_size(tree: BCTree) -> int:
    """Number of nodes.

    Cutting plane certifiers enter as their own leaf node, so the closed forms
    (``4n+1`` for the box hull, ``3`` per facet) are node counts.
    """
    return count_nodes(tree)


def _leaf_support(node: BCNode) -> int:
    if isinstance(node.second, LeafFarkas):
        return node.second.cert.support
    if isinstance(node.second, LeafDominance):
        return sum(c.support for c in node.second.certs)
    return 0


def tree_complexity(tree: BCTree) -> int:
    """Nodes plus the multiplier support of every certificate in the tree."""
    return sum(1 + _leaf_support(n) for _, n, _, _ in iter_nodes(tree))


def certifier_size(tree: BCTree) -> int:
    return sum(_leaf_support(n) for _, n, _, cert in iter_nodes(tree) if cert)


# -- checkers --------------------------------------------------------------------

def _guarded(fn):
    """Turn geometry errors raised while walking a malformed tree into rejections."""
    import functools

    @functools.wraps(fn)
    def wrapper(tree, *args, **kwargs):
        try:
            return fn(tree, *args, **kwargs)
        except (GeometryError, TypeError, ValueError) as exc:
            return Verdict(False, f"malformed tree: {exc}", 1)
    return wrapper


def _fail(reason: str, work: int, path: tuple) -> Verdict:
    where = "root" if not path else "/".join(str(p) for p in path)
    return Verdict(False, f"node {where}: {reason}", work, path)


@_guarded
def check_structure(tree: BCTree) -> Verdict:
    """Check every internal node's children and every cutting plane certifier."""
    if tree.system.dim != tree.ctx.dim:
        return _fail("system dimension does not match context", 1, ())
    if tree.root.first_label:
        return _fail("root must not add constraints", 1, ())
    work = 0
    nodes = leaves = 0
    for path, node, poly, _ in iter_nodes(tree):
        nodes += 1
        work += 1
        if any(h.dim != tree.ctx.dim for h in node.first_label):
            return _fail("first label has wrong dimension", work, path)
        second = node.second
        if node.is_leaf:
            leaves += 1
            if node.children:
                return _fail("leaf has children", work, path)
            continue
        if isinstance(second, Branch):
            d = second.disjunction
            why = check_disjunction(d, tree.ctx.dim)
            if why:
                return _fail(why, work, path)
            if len(node.children) != len(d.terms):
                return _fail(f"branch has {len(node.children)} children for {len(d.terms)} terms", work, path)
            for i, (child, term) in enumerate(zip(node.children, d.terms)):
                if child.first_label != tuple(term):
                    return _fail(f"child {i} label does not match disjunction term {i}", work, path)
        elif isinstance(second, Cut):
            step = second.step
            if step.cut.dim != tree.ctx.dim or step.cut.trivial:
                return _fail("cut must be a nontrivial halfspace", work, path)
            if len(node.children) != 2:
                return _fail("cut node must have exactly two children", work, path)
            left, right = node.children
            if right.first_label != (step.cut,):
                return _fail("right child must add exactly the cut", work, path)
            if left.first_label != (tighten_complement(step.cut),):
                return _fail("left child must add exactly the tightened complement of the cut", work, path)
            if not isinstance(left.second, LeafFarkas) or left.children:
                return _fail("left child of a cut must be a Farkas certifier leaf", work, path)
            step = CutStep(step.cut, left.second.cert, step.source, step.source_evidence)
            v = verify_cut_step(poly, step)
            work += v.work
            if not v:
                return _fail(v.reason, work, path + (0,))
        else:
            return _fail(f"unknown second label {type(second).__name__}", work, path)
    if nodes > 2 * leaves:
        return _fail(f"size bound violated: {nodes} nodes, {leaves} leaves", work, ())
    return Verdict(True, "", work)


@_guarded
def _check_leaves(tree: BCTree, targets: Sequence[Halfspace] | None) -> Verdict:
    """Structure plus per-leaf evidence; ``targets`` None means every leaf must be empty."""
    v = check_structure(tree)
    if not v:
        return v
    work = v.work
    for path, node, poly, certifier in iter_nodes(tree):
        if node.children or certifier:
            continue
        second = node.second
        if isinstance(second, LeafFarkas):
            lv = check_farkas(poly, second.cert)
            work += lv.work
            if not lv:
                return _fail(f"leaf infeasibility certificate rejected: {lv.reason}", work, path)
            continue
        if targets is None:
            return _fail("leaf is not closed by an infeasibility certificate", work, path)
        if not isinstance(second, LeafDominance):
            return _fail("leaf carries no evidence", work, path)
        for t in targets:
            matching = [c for c in second.certs if c.target == t]
            if not matching:
                return _fail(f"no dominance certificate for target {t}", work, path)
            lv = check_dominance(poly, matching[0])
            work += lv.work
            if not lv:
                return _fail(f"dominance certificate for {t} rejected: {lv.reason}", work, path)
    return Verdict(True, "", work)


@_guarded
def check_infeasibility(tree: BCTree) -> Verdict:
    if not isinstance(tree.goal, Infeasibility):
        return _fail("tree goal is not infeasibility", 1, ())
    return _check_leaves(tree, None)


@_guarded
def check_hull(tree: BCTree) -> Verdict:
    """Every leaf set lies inside the hull target, so conv of the lattice points does too."""
    if not isinstance(tree.goal, Hull):
        return _fail("tree goal is not a hull target", 1, ())
    q = tree.goal.target
    if q.dim != tree.ctx.dim:
        return _fail("hull target dimension mismatch", 1, ())
    return _check_leaves(tree, q.rows)


@_guarded
def check_validity(tree: BCTree) -> Verdict:
    if not isinstance(tree.goal, Validity):
        return _fail("tree goal is not a validity target", 1, ())
    if tree.goal.target.dim != tree.ctx.dim:
        return _fail("validity target dimension mismatch", 1, ())
    return _check_leaves(tree, (tree.goal.target,))


@_guarded
def check_membership(tree: BCTree) -> Verdict:
    """The separator is violated by the point and holds on every leaf set."""
    goal = tree.goal
    if not isinstance(goal, Membership):
        return _fail("tree goal is not a membership target", 1, ())
    if len(goal.point) != tree.ctx.dim or goal.separator.dim != tree.ctx.dim:
        return _fail("membership point or separator dimension mismatch", 1, ())
    if dot(goal.separator.normal, goal.point) <= goal.separator.rhs:
        return _fail("separator does not separate", tree.ctx.dim + 1, ())
    return _check_leaves(tree, (goal.separator,))


def check_tree(tree: BCTree) -> Verdict:
    goal = tree.goal
    if isinstance(goal, Infeasibility):
        return check_infeasibility(tree)
    if isinstance(goal, Hull):
        return check_hull(tree)
    if isinstance(goal, Validity):
        return check_validity(tree)
    if isinstance(goal, Membership):
        return check_membership(tree)
    return _fail(f"unknown goal {goal!r}", 1, ())


def reverse_instance(system: Polyhedron, h: Halfspace, ctx: EmbeddingContext | None = None) -> Polyhedron:
    """``system`` with the tightened complement of ``h`` appended."""
    return system.intersect([tighten_complement(h, ctx)])


# -- JSON ------------------------------------------------------------------------

def disjunction_to_json(d: Disjunction) -> dict:
    out = {"kind": d.kind}
    if d.kind == "variable":
        out["index"] = d.index
    if d.kind in ("split", "variable"):
        out["alpha"] = vec_to_json(d.alpha)
        out["beta"] = rational_to_str(d.beta)
    out["terms"] = [[halfspace_to_json(h) for h in t] for t in d.terms]
    return out


def disjunction_from_json(data) -> Disjunction:
    if not isinstance(data, dict) or not isinstance(data.get("terms"), list):
        raise GeometryError("disjunction must be an object with 'terms'")
    terms = []
    for t in data["terms"]:
        if not isinstance(t, list):
            raise GeometryError("disjunction term must be an array of halfspaces")
        terms.append(tuple(halfspace_from_json(h) for h in t))
    kind = data.get("kind", "general")
    alpha = vec_from_json(data["alpha"]) if "alpha" in data else None
    beta = parse_rational(data["beta"]) if "beta" in data else None
    index = data.get("index")
    if index is not None and (not isinstance(index, int) or isinstance(index, bool)):
        raise GeometryError("variable index must be an integer")
    return Disjunction(tuple(terms), kind, alpha, beta, index)


def node_to_json(node: BCNode) -> dict:
    s = node.second
    if isinstance(s, Branch):
        second = {"type": "branch", "disjunction": disjunction_to_json(s.disjunction)}
    elif isinstance(s, Cut):
        second = {"type": "cut", "cut": halfspace_to_json(s.step.cut)}
        if s.step.source is not None:
            second["source"] = halfspace_to_json(s.step.source)
        if s.step.source_evidence is not None:
            second["source_evidence"] = cert_to_json(s.step.source_evidence)
    elif isinstance(s, LeafFarkas):
        second = {"type": "leaf_farkas", "certificate": cert_to_json(s.cert)}
    elif isinstance(s, LeafDominance):
        second = {"type": "leaf_dominance", "certificates": [cert_to_json(c) for c in s.certs]}
    else:
        second = {"type": "leaf_empty"}
    return {"label": [halfspace_to_json(h) for h in node.first_label], "second": second,
            "children": [node_to_json(c) for c in node.children]}


def node_from_json(data) -> BCNode:
    if not isinstance(data, dict):
        raise GeometryError("node must be a JSON object")
    label = data.get("label", [])
    children = data.get("children", [])
    second = data.get("second", {"type": "leaf_empty"})
    if not isinstance(label, list) or not isinstance(children, list) or not isinstance(second, dict):
        raise GeometryError("node fields have the wrong JSON types")
    kids = tuple(node_from_json(c) for c in children)
    kind = second.get("type")
    if kind == "branch":
        s = Branch(disjunction_from_json(second.get("disjunction")))
    elif kind == "cut":
        source = halfspace_from_json(second["source"]) if "source" in second else None
        ev = cert_from_json(second["source_evidence"]) if "source_evidence" in second else None
        if ev is not None and not isinstance(ev, DominanceCert):
            raise GeometryError("source evidence must be a dominance certificate")
        certifier = FarkasCert()
        if kids and isinstance(kids[0].second, LeafFarkas):
            certifier = kids[0].second.cert
        s = Cut(CutStep(halfspace_from_json(second.get("cut")), certifier, source, ev))
    elif kind == "leaf_farkas":
        c = cert_from_json(second.get("certificate"))
        if not isinstance(c, FarkasCert):
            raise GeometryError("leaf_farkas must carry a farkas certificate")
        s = LeafFarkas(c)
    elif kind == "leaf_dominance":
        certs = second.get("certificates")
        if not isinstance(certs, list):
            raise GeometryError("leaf_dominance needs a certificate array")
        parsed = tuple(cert_from_json(c) for c in certs)
        if not all(isinstance(c, DominanceCert) for c in parsed):
            raise GeometryError("leaf_dominance certificates must be dominance certificates")
        s = LeafDominance(parsed)
    elif kind == "leaf_empty":
        s = LeafEmpty()
    else:
        raise GeometryError(f"unknown node type {kind!r}")
    return BCNode(tuple(halfspace_from_json(h) for h in label), s, kids)


def goal_to_json(goal) -> dict:
    if isinstance(goal, Infeasibility):
        return {"type": "infeasibility"}
    if isinstance(goal, Hull):
        return {"type": "hull", "target": polyhedron_to_json(goal.target)}
    if isinstance(goal, Validity):
        return {"type": "validity", "target": halfspace_to_json(goal.target)}
    if isinstance(goal, Membership):
        return {"type": "membership", "point": vec_to_json(goal.point),
                "separator": halfspace_to_json(goal.separator)}
    raise TypeError(f"unknown goal {goal!r}")


def goal_from_json(data):
    if not isinstance(data, dict):
        raise GeometryError("goal must be a JSON object")
    kind = data.get("type")
    if kind == "infeasibility":
        return Infeasibility()
    if kind == "hull":
        return Hull(polyhedron_from_json(data.get("target")))
    if kind == "validity":
        return Validity(halfspace_from_json(data.get("target")))
    if kind == "membership":
        return Membership(vec_from_json(data.get("point")), halfspace_from_json(data.get("separator")))
    raise GeometryError(f"unknown goal type {kind!r}")


def tree_to_json(tree: BCTree) -> dict:
    return {"context": {"dim": tree.ctx.dim}, "system": polyhedron_to_json(tree.system),
            "goal": goal_to_json(tree.goal), "root": node_to_json(tree.root)}


def tree_from_json(data) -> BCTree:
    if not isinstance(data, dict):
        raise GeometryError("certificate document must be a JSON object")
    for key in ("context", "system", "goal", "root"):
        if key not in data:
            raise GeometryError(f"certificate document lacks {key!r}")
    ctx = data["context"]
    if not isinstance(ctx, dict) or not isinstance(ctx.get("dim"), int) or isinstance(ctx.get("dim"), bool):
        raise GeometryError("context must carry an integer 'dim'")
    try:
        return BCTree(EmbeddingContext(ctx["dim"]), polyhedron_from_json(data["system"]),
                      node_from_json(data["root"]), goal_from_json(data["goal"]))
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise GeometryError(f"malformed certificate: {exc}") from exc
