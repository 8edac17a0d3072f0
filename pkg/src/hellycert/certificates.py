"""Leaf-level certificates and their checkers.

Every checker returns a :class:`Verdict` instead of raising; ``work`` counts the
elementary rational operations performed, so the cost of checking can be
compared against the size of the certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (Halfspace, Polyhedron, RVec, GeometryError, halfspace_from_json,
                   halfspace_to_json, parse_rational, rational_to_str, vec_from_json,
                   vec_to_json)


def _clean(multipliers) -> tuple:
    out = []
    for idx, val in multipliers:
        out.append((idx, Fraction(val)))
    out.sort(key=lambda e: (str(type(e[0])), e[0], e[1]))
    return tuple(out)


def _support(multipliers) -> int:
    return sum(1 for _, v in multipliers if v != 0)


@dataclass(frozen=True)
class FarkasCert:
    """Nonnegative row multipliers.  Entries are kept verbatim, zeros included, so the checker sees them."""

    multipliers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "multipliers", _clean(self.multipliers))

    @property
    def support(self) -> int:
        return _support(self.multipliers)


@dataclass(frozen=True)
class BoundCert:
    """Multipliers combining the rows into ``objective . x >= bound``."""

    objective: RVec
    bound: Fraction
    multipliers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(Fraction(v) for v in self.objective))
        object.__setattr__(self, "bound", Fraction(self.bound))
        object.__setattr__(self, "multipliers", _clean(self.multipliers))

    @property
    def support(self) -> int:
        return _support(self.multipliers)


@dataclass(frozen=True)
class DominanceCert:
    """Multipliers combining the rows into the target inequality (or something stronger)."""

    target: Halfspace
    multipliers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "multipliers", _clean(self.multipliers))

    @property
    def support(self) -> int:
        return _support(self.multipliers)


@dataclass
class Verdict:
    accepted: bool
    reason: str = ""
    work: int = 0
    path: tuple = field(default=())

    def __post_init__(self):
        if not self.accepted and not self.reason:
            self.reason = "rejected"

    def __bool__(self):
        return self.accepted


def _combine(p: Polyhedron, multipliers) -> tuple[list, Fraction, int] | str:
    """Sum of ``u_i * row_i``; returns a reason string when the multipliers are malformed."""
    normal = [Fraction(0)] * p.dim
    rhs = Fraction(0)
    work = 0
    seen = set()
    for idx, u in multipliers:
        if not isinstance(idx, int) or idx < 0 or idx >= len(p.rows):
            return f"multiplier index {idx} out of range (polyhedron has {len(p.rows)} rows)"
        if idx in seen:
            return f"duplicate multiplier index {idx}"
        seen.add(idx)
        if u < 0:
            return f"negative multiplier {rational_to_str(u)} on row {idx}"
        row = p.rows[idx]
        for j, a in enumerate(row.normal):
            if a:
                normal[j] += u * a
        rhs += u * row.rhs
        work += p.dim + 1
    return normal, rhs, work


def check_farkas(p: Polyhedron, cert: FarkasCert) -> Verdict:
    """Accept iff the multipliers sum the rows to ``0 . x <= r`` with ``r < 0``."""
    res = _combine(p, cert.multipliers)
    if isinstance(res, str):
        return Verdict(False, res, 1)
    normal, rhs, work = res
    work += p.dim + 1
    if any(v != 0 for v in normal):
        return Verdict(False, "normal sum nonzero", work)
    if rhs >= 0:
        return Verdict(False, f"right-hand side sum {rational_to_str(rhs)} is not negative", work)
    return Verdict(True, "", work)


def check_lower_bound(p: Polyhedron, cert: BoundCert) -> Verdict:
    """Accept iff the rows combine into ``objective . x >= bound``.

    In ``<=`` orientation this means ``sum u_i a_i = -c`` and ``sum u_i (-b_i) >= bound``.
    """
    if len(cert.objective) != p.dim:
        return Verdict(False, "objective dimension mismatch", 1)
    res = _combine(p, cert.multipliers)
    if isinstance(res, str):
        return Verdict(False, res, 1)
    normal, rhs, work = res
    work += p.dim + 1
    if any(v != -c for v, c in zip(normal, cert.objective)):
        return Verdict(False, "multipliers do not reproduce the objective", work)
    if -rhs < cert.bound:
        return Verdict(False, f"combined bound {rational_to_str(-rhs)} is below {rational_to_str(cert.bound)}", work)
    return Verdict(True, "", work)


def check_dominance(p: Polyhedron, cert: DominanceCert) -> Verdict:
    """Accept iff ``sum u_i a_i = target.a`` and ``sum u_i b_i <= target.b``."""
    if cert.target.dim != p.dim:
        return Verdict(False, "target dimension mismatch", 1)
    res = _combine(p, cert.multipliers)
    if isinstance(res, str):
        return Verdict(False, res, 1)
    normal, rhs, work = res
    work += p.dim + 1
    if any(v != t for v, t in zip(normal, cert.target.normal)):
        return Verdict(False, "multipliers do not reproduce the target normal", work)
    if rhs > cert.target.rhs:
        return Verdict(False, f"combined rhs {rational_to_str(rhs)} exceeds target {rational_to_str(cert.target.rhs)}", work)
    return Verdict(True, "", work)


# -- JSON -----------------------------------------------------------------------

def multipliers_to_json(mult) -> list:
    return [[i, rational_to_str(v)] for i, v in mult]


def multipliers_from_json(data) -> tuple:
    if not isinstance(data, list):
        raise GeometryError("multipliers must be an array of [index, value] pairs")
    out = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)
                and not isinstance(item[0], bool)):
            raise GeometryError(f"malformed multiplier entry {item!r}")
        out.append((item[0], parse_rational(item[1])))
    # duplicates, negatives and zeros all stay visible to the checker
    return tuple(out)


def cert_to_json(cert) -> dict:
    if isinstance(cert, FarkasCert):
        return {"kind": "farkas", "multipliers": multipliers_to_json(cert.multipliers)}
    if isinstance(cert, BoundCert):
        return {"kind": "bound", "objective": vec_to_json(cert.objective),
                "bound": rational_to_str(cert.bound),
                "multipliers": multipliers_to_json(cert.multipliers)}
    if isinstance(cert, DominanceCert):
        return {"kind": "dominance", "target": halfspace_to_json(cert.target),
                "multipliers": multipliers_to_json(cert.multipliers)}
    raise TypeError(f"not a certificate: {cert!r}")


def cert_from_json(data):
    if not isinstance(data, dict):
        raise GeometryError("certificate must be a JSON object")
    kind = data.get("kind")
    mult = multipliers_from_json(data.get("multipliers", []))
    if kind == "farkas":
        return FarkasCert(mult)
    if kind == "bound":
        return BoundCert(vec_from_json(data["objective"]), parse_rational(data["bound"]), mult)
    if kind == "dominance":
        return DominanceCert(halfspace_from_json(data["target"]), mult)
    raise GeometryError(f"unknown certificate kind {kind!r}")


def check(p: Polyhedron, cert) -> Verdict:
    if isinstance(cert, FarkasCert):
        return check_farkas(p, cert)
    if isinstance(cert, BoundCert):
        return check_lower_bound(p, cert)
    if isinstance(cert, DominanceCert):
        return check_dominance(p, cert)
    raise TypeError(f"not a certificate: {cert!r}")


def check_all(p: Polyhedron, certs: Sequence) -> Verdict:
    work = 0
    for c in certs:
        v = check(p, c)
        work += v.work
        if not v:
            return Verdict(False, v.reason, work)
    return Verdict(True, "", work)
