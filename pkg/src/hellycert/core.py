"""Exact rational geometry: halfspaces, polyhedra, vertices and lattice points.

All numbers are :class:`fractions.Fraction`.  Halfspaces are always stored in
``a.x <= b`` orientation; callers negate ``>=`` constraints themselves.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

RVec = tuple  # tuple of Fraction


class GeometryError(ValueError):
    pass


def rational_make(p: int, q: int = 1) -> Fraction:
    if q == 0:
        raise GeometryError("zero denominator")
    return Fraction(p, q)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted; pass a Fraction or 'p/q' string")
    return Fraction(x)


def rvec(values: Iterable) -> RVec:
    return tuple(as_fraction(v) for v in values)


def dot(a: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((ai * xi for ai, xi in zip(a, x)), Fraction(0))


def unit(n: int, i: int, scale=1) -> RVec:
    return tuple(Fraction(scale) if j == i else Fraction(0) for j in range(n))


def is_integral(v: Sequence[Fraction]) -> bool:
    return all(x.denominator == 1 for x in v)


def integer_normalize(a: Sequence[Fraction], b: Fraction) -> tuple[RVec, Fraction]:
    """Scale ``a.x <= b`` by a positive factor so that ``a`` is a coprime integer vector.

    Denominators are cleared by their lcm, then the gcd is divided out.  The
    factor is positive, so orientation and the sign of every entry survive.
    """
    if all(x == 0 for x in a):
        raise GeometryError("zero normal vector")
    lcm = 1
    for x in a:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in a]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    scale = Fraction(lcm, g)
    return tuple(Fraction(v // g) for v in ints), b * scale


@dataclass(frozen=True)
class Halfspace:
    """The closed set ``{x : normal . x <= rhs}``."""

    normal: RVec
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", rvec(self.normal))
        object.__setattr__(self, "rhs", as_fraction(self.rhs))

    @property
    def dim(self) -> int:
        return len(self.normal)

    @property
    def trivial(self) -> bool:
        return all(x == 0 for x in self.normal)

    def contains(self, x: Sequence[Fraction]) -> bool:
        return dot(self.normal, x) <= self.rhs

    def slack(self, x: Sequence[Fraction]) -> Fraction:
        return self.rhs - dot(self.normal, x)

    def negated(self) -> Halfspace:
        """The closed halfspace ``normal . x >= rhs`` in ``<=`` form."""
        return Halfspace(tuple(-v for v in self.normal), -self.rhs)

    def normalized(self) -> Halfspace:
        a, b = integer_normalize(self.normal, self.rhs)
        return Halfspace(a, b)

    def __str__(self):
        terms = " ".join(f"{'+' if v >= 0 else '-'}{abs(v)}*x{i + 1}"
                         for i, v in enumerate(self.normal) if v != 0)
        return f"{terms or '0'} <= {self.rhs}"


def geq(normal: Iterable, rhs) -> Halfspace:
    """``normal . x >= rhs`` stored as ``-normal . x <= -rhs``."""
    return Halfspace(tuple(-as_fraction(v) for v in normal), -as_fraction(rhs))


@dataclass(frozen=True)
class EmbeddingContext:
    """Fixes the lattice Z^n inside R^n."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryError("dimension must be at least 1")


@dataclass(frozen=True)
class Polyhedron:
    dim: int
    rows: tuple = ()

    def __post_init__(self):
        rows = tuple(self.rows)
        for r in rows:
            if not isinstance(r, Halfspace):
                raise TypeError("rows must be Halfspace instances")
            if r.dim != self.dim:
                raise GeometryError(f"row dimension {r.dim} does not match polyhedron dimension {self.dim}")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(r.contains(x) for r in self.rows)

    def intersect(self, extra: Iterable[Halfspace]) -> Polyhedron:
        return Polyhedron(self.dim, self.rows + tuple(extra))

    @property
    def matrix(self):
        return [list(r.normal) for r in self.rows], [r.rhs for r in self.rows]

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> Polyhedron:
        """Axis-parallel box ``lower <= x <= upper``; rows alternate upper, lower per coordinate."""
        n = len(lower)
        rows = []
        for i in range(n):
            rows.append(Halfspace(unit(n, i), as_fraction(upper[i])))
            rows.append(Halfspace(unit(n, i, -1), -as_fraction(lower[i])))
        return cls(n, tuple(rows))

    @classmethod
    def cube(cls, n: int, lo, hi) -> Polyhedron:
        return cls.box([lo] * n, [hi] * n)


def tighten_complement(h: Halfspace, ctx: EmbeddingContext | None = None) -> Halfspace:
    """Closed halfspace ``a.x >= floor(b) + 1`` holding every lattice point that violates ``h``.

    ``(a, b)`` is the coprime-integer normalization of ``h``.
    """
    if h.trivial:
        raise GeometryError("trivial halfspace has no tightened complement")
    if ctx is not None and ctx.dim != h.dim:
        raise GeometryError("halfspace dimension does not match context")
    a, b = integer_normalize(h.normal, h.rhs)
    return geq(a, math.floor(b) + 1)


def _solve_square(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Gauss-Jordan on a square system; None if singular."""
    n = len(rows)
    m = [list(r) + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def nullspace_vector(rows: Sequence[Sequence[Fraction]]):
    """The kernel basis vector of a matrix with one-dimensional kernel, else None."""
    m = [list(map(Fraction, r)) for r in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    if len(free) != 1:
        return None
    fc = free[0]
    v = [Fraction(0)] * ncols
    v[fc] = Fraction(1)
    for i, pc in enumerate(pivots):
        v[pc] = -m[i][fc]
    return tuple(v)


def bounding_box(p: Polyhedron):
    """Exact per-coordinate (min, max) of a nonempty bounded polyhedron.

    Returns None for an empty polyhedron, raises on unboundedness.
    """
    from .lp import lp_solve

    lo, hi = [], []
    for i in range(p.dim):
        e = unit(p.dim, i)
        r_min = lp_solve(p, e, "min")
        if r_min.status == "infeasible":
            return None
        r_max = lp_solve(p, e, "max")
        if "unbounded" in (r_min.status, r_max.status):
            raise GeometryError("unbounded polyhedron")
        lo.append(r_min.value)
        hi.append(r_max.value)
    return lo, hi


def vertices(p: Polyhedron) -> list[RVec]:
    """All vertices of a bounded polyhedron, by enumerating nonsingular row subsets."""
    if bounding_box(p) is None:
        return []
    n = p.dim
    seen = set()
    out = []
    for combo in itertools.combinations(range(len(p.rows)), n):
        sol = _solve_square([p.rows[i].normal for i in combo], [p.rows[i].rhs for i in combo])
        if sol is None or sol in seen or not p.contains(sol):
            continue
        seen.add(sol)
        out.append(sol)
    out.sort()
    return out


def lattice_points(p: Polyhedron) -> list[RVec]:
    """Every integer point of a bounded polyhedron, by scanning its integer bounding box."""
    box = bounding_box(p)
    if box is None:
        return []
    lo, hi = box
    ranges = [range(math.ceil(l), math.floor(h) + 1) for l, h in zip(lo, hi)]
    pts = []
    for z in itertools.product(*ranges):
        zf = tuple(Fraction(v) for v in z)
        if p.contains(zf):
            pts.append(zf)
    return pts


# -- canonical text form ---------------------------------------------------------

def rational_to_str(x: Fraction) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, bool):
        raise GeometryError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise GeometryError(f"not a rational: {s!r}")
    parts = s.strip().split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            return rational_make(int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise GeometryError(f"not a rational: {s!r}") from exc
    raise GeometryError(f"not a rational: {s!r}")


def vec_to_json(v) -> list:
    return [rational_to_str(x) for x in v]


def vec_from_json(data) -> RVec:
    if not isinstance(data, list):
        raise GeometryError("vector must be a JSON array")
    return tuple(parse_rational(x) for x in data)


def halfspace_to_json(h: Halfspace) -> dict:
    return {"a": vec_to_json(h.normal), "b": rational_to_str(h.rhs)}


def halfspace_from_json(data) -> Halfspace:
    if not isinstance(data, dict) or "a" not in data or "b" not in data:
        raise GeometryError("halfspace must be an object with 'a' and 'b'")
    return Halfspace(vec_from_json(data["a"]), parse_rational(data["b"]))


def polyhedron_to_json(p: Polyhedron) -> dict:
    return {"dim": p.dim, "rows": [halfspace_to_json(r) for r in p.rows]}


def polyhedron_from_json(data) -> Polyhedron:
    if not isinstance(data, dict) or not isinstance(data.get("dim"), int):
        raise GeometryError("polyhedron must be an object with integer 'dim'")
    rows = data.get("rows", [])
    if not isinstance(rows, list):
        raise GeometryError("polyhedron rows must be an array")
    return Polyhedron(data["dim"], tuple(halfspace_from_json(r) for r in rows))
