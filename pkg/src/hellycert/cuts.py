"""Single-step Chvatal-Gomory cuts and the evidence attached to a cut node."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .certificates import DominanceCert, FarkasCert, check_farkas
from .core import GeometryError, Halfspace, Polyhedron, integer_normalize, tighten_complement
from .lp import extract_dominance, extract_farkas


class CutError(GeometryError):
    pass


def cg_cut(h: Halfspace) -> Halfspace:
    """Round ``h`` to ``a.x <= floor(b)`` after scaling ``a`` to a coprime integer vector."""
    if h.trivial:
        raise CutError("zero normal has no Chvatal-Gomory cut")
    a, b = integer_normalize(h.normal, h.rhs)
    return Halfspace(a, math.floor(b))


@dataclass(frozen=True)
class CutStep:
    cut: Halfspace
    certifier: FarkasCert
    source: Halfspace | None = None
    source_evidence: DominanceCert | None = None


def build_cut_step(node_poly: Polyhedron, h: Halfspace) -> CutStep:
    """Derive ``cg_cut(h)`` at a node and collect both pieces of evidence.

    ``h`` must be implied by ``node_poly``; the certifier is a Farkas
    certificate for ``node_poly`` intersected with the tightened complement of
    the cut, indexed over that combined row list.
    """
    if h.dim != node_poly.dim:
        raise CutError("source halfspace dimension does not match node")
    farkas, _ = extract_farkas(node_poly)
    if farkas is not None:
        raise CutError("node polyhedron is empty; close it with a Farkas leaf instead")
    evidence, _ = extract_dominance(node_poly, h.normal, h.rhs)
    if evidence is None:
        raise CutError("source halfspace not valid for node")
    cut = cg_cut(h)
    certifier, _ = extract_farkas(node_poly.intersect([tighten_complement(cut)]))
    if certifier is None:
        raise CutError("CG certifier unavailable")
    return CutStep(cut, certifier, h, evidence)


def certifier_polyhedron(node_poly: Polyhedron, cut: Halfspace) -> Polyhedron:
    return node_poly.intersect([tighten_complement(cut)])


def verify_cut_step(node_poly: Polyhedron, step: CutStep):
    """Check the certifier and, when present, the source evidence."""
    from .certificates import Verdict, check_dominance

    v = check_farkas(certifier_polyhedron(node_poly, step.cut), step.certifier)
    if not v:
        return Verdict(False, f"cut certifier rejected: {v.reason}", v.work)
    work = v.work
    if step.source is not None:
        if step.source_evidence is None or step.source_evidence.target != step.source:
            return Verdict(False, "source evidence missing or targets a different halfspace", work)
        ev = check_dominance(node_poly, step.source_evidence)
        work += ev.work
        if not ev:
            return Verdict(False, f"source evidence rejected: {ev.reason}", work)
        if step.source.trivial or cg_cut(step.source) != step.cut:
            return Verdict(False, "cut is not the Chvatal-Gomory rounding of its source", work)
    return Verdict(True, "", work)
