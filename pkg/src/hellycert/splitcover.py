"""Split sets, exact cover decisions for regions ``outer \\ inner``, and split-cover numbers.

A region point ``x`` is uncovered by a list of open splits when it lies in
``outer``, strictly violates some row of ``inner``, and sits on a closed side
(``alpha.x <= beta`` or ``alpha.x >= beta + 1``) of every split.  For a fixed
choice of sides and a fixed inner row this is one LP in ``(x, t)``: maximize
``t`` with the strict rows relaxed by ``t``.  An optimum with ``t > 0`` is an
exact witness; otherwise that piece is covered.  Closure mode makes the split
sides strict as well.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (GeometryError, Halfspace, Polyhedron, as_fraction, bounding_box, dot, geq,
                   parse_rational, polyhedron_from_json, polyhedron_to_json, rational_to_str,
                   unit, vertices)
from .lp import lp_solve


@dataclass(frozen=True)
class GSplit:
    """The open slab ``beta < alpha.x < beta + 1``."""

    alpha: tuple
    beta: Fraction

    def __post_init__(self):
        alpha = tuple(int(a) for a in self.alpha)
        if any(Fraction(a) != Fraction(b) for a, b in zip(alpha, self.alpha)):
            raise GeometryError("split normal must be integral")
        if not any(alpha):
            raise GeometryError("split normal must be nonzero")
        if math.gcd(*alpha) != 1:
            raise GeometryError("split normal must be coprime")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", as_fraction(self.beta))

    @property
    def dim(self) -> int:
        return len(self.alpha)

    @property
    def is_split(self) -> bool:
        return self.beta.denominator == 1

    def canonical(self) -> GSplit:
        """Same open set with the first nonzero entry of ``alpha`` positive."""
        if next(a for a in self.alpha if a) > 0:
            return self
        return GSplit(tuple(-a for a in self.alpha), -self.beta - 1)

    def contains(self, x, closed: bool = False) -> bool:
        v = dot(self.alpha, x)
        if closed:
            return self.beta <= v <= self.beta + 1
        return self.beta < v < self.beta + 1

    def sides(self) -> tuple[Halfspace, Halfspace]:
        """Lower side ``alpha.x <= beta`` and upper side ``alpha.x >= beta + 1``."""
        a = tuple(Fraction(v) for v in self.alpha)
        return Halfspace(a, self.beta), geq(a, self.beta + 1)

    def __str__(self):
        return f"{self.beta} < {self.alpha}.x < {self.beta + 1}"


@dataclass(frozen=True)
class Region:
    """``outer \\ inner``."""

    outer: Polyhedron
    inner: Polyhedron

    def __post_init__(self):
        if self.outer.dim != self.inner.dim:
            raise GeometryError("region polyhedra differ in dimension")

    @property
    def dim(self) -> int:
        return self.outer.dim

    def contains(self, x) -> bool:
        return self.outer.contains(x) and not self.inner.contains(x)


@dataclass(frozen=True)
class CoverResult:
    covered: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.covered


def _lift(h: Halfspace, t_coef) -> Halfspace:
    return Halfspace(tuple(h.normal) + (Fraction(t_coef),), h.rhs)


def _strict_point(base: Sequence[Halfspace], strict: Sequence[Halfspace], n: int):
    """A point of ``base`` satisfying every ``strict`` row strictly, or None."""
    rows = [_lift(h, 0) for h in base] + [_lift(h, 1) for h in strict]
    rows.append(Halfspace(unit(n + 1, n), 1))
    res = lp_solve(Polyhedron(n + 1, tuple(rows)), unit(n + 1, n), "max")
    if res.status != "optimal" or res.value <= 0:
        return None
    return res.primal[:n]


def _require_bounded(region: Region):
    try:
        bounding_box(region.outer)
    except GeometryError as exc:
        raise GeometryError("outer polyhedron of a region must be bounded") from exc


def covers(region: Region, splits: Sequence[GSplit], closed: bool = False,
           check_bounded: bool = True) -> CoverResult:
    """Decide ``region`` within the union of the open splits (their closures if ``closed``)."""
    n = region.dim
    for s in splits:
        if s.dim != n:
            raise GeometryError("split dimension does not match region")
    if check_bounded:
        _require_bounded(region)
    violated = [r.negated() for r in region.inner.rows]  # strict: a.x > b  <=>  -a.x < -b
    if not violated:
        return CoverResult(True)
    sides = [s.sides() for s in splits]
    outer = list(region.outer.rows)

    def search(k, chosen):
        if closed:
            if _strict_point(outer, chosen, n) is None:
                return None
        elif lp_solve(Polyhedron(n, tuple(outer + chosen)), [0] * n).status == "infeasible":
            return None
        if k == len(sides):
            for v in violated:
                if closed:
                    pt = _strict_point(outer, chosen + [v], n)
                else:
                    pt = _strict_point(outer + chosen, [v], n)
                if pt is not None:
                    return pt
            return None
        for side in sides[k]:
            pt = search(k + 1, chosen + [side])
            if pt is not None:
                return pt
        return None

    pt = search(0, [])
    return CoverResult(True) if pt is None else CoverResult(False, pt)


# -- cheap sample prefilter --------------------------------------------------------

def sample_points(region: Region, step: Fraction = Fraction(1, 4)) -> list:
    """Region points on a rational grid over the outer bounding box, plus outer vertices."""
    box = bounding_box(region.outer)
    if box is None:
        return []
    lo, hi = box
    axes = []
    for l, h in zip(lo, hi):
        k0, k1 = math.ceil(l / step), math.floor(h / step)
        axes.append([k * step for k in range(k0, k1 + 1)])
    pts = [p for p in itertools.product(*axes) if region.contains(p)]
    pts += [v for v in vertices(region.outer) if region.contains(v)]
    return pts


def _masks(points, family, closed):
    return [sum(1 << i for i, p in enumerate(points) if s.contains(p, closed)) for s in family]


def meets(region: Region, s: GSplit, closed: bool = False) -> bool:
    """Whether the split (or its closure) intersects the region."""
    lower, upper = s.sides()
    n = region.dim
    outer = list(region.outer.rows)
    for v in (r.negated() for r in region.inner.rows):
        if closed:
            pt = _strict_point(outer + [lower.negated(), upper.negated()], [v], n)
        else:
            pt = _strict_point(outer, [lower.negated(), upper.negated(), v], n)
        if pt is not None:
            return True
    return False


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HELLYCERT_THREADS", "1")))
    except ValueError:
        return 1


def _covers_job(args):
    region, subset, closed = args
    return covers(region, subset, closed, check_bounded=False).covered


def min_split_cover(region: Region, family: Sequence[GSplit], closed: bool = False,
                    max_size: int | None = None):
    """Smallest number of family members covering ``region``, or None.

    Returns ``(size, subset)``.  Subsets are tried in increasing size and in
    family order; a grid of sample points rejects most non-covers before any
    LP is solved.
    """
    _require_bounded(region)
    fam = []
    seen = set()
    for s in family:
        c = s.canonical()
        if c in seen:
            continue
        seen.add(c)
        if meets(region, c, closed):
            fam.append(c)
    pts = sample_points(region)
    full = (1 << len(pts)) - 1
    masks = _masks(pts, fam, closed)
    if covers(region, [], closed, check_bounded=False):
        return 0, ()
    top = len(fam) if max_size is None else min(max_size, len(fam))
    threads = _threads()
    for k in range(1, top + 1):
        cands = []
        for idx in itertools.combinations(range(len(fam)), k):
            m = 0
            for i in idx:
                m |= masks[i]
            if m == full:
                cands.append(tuple(fam[i] for i in idx))
        if threads > 1 and len(cands) > 1:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                for subset, ok in zip(cands, ex.map(_covers_job, [(region, c, closed) for c in cands])):
                    if ok:
                        return k, subset
        else:
            for subset in cands:
                if covers(region, subset, closed, check_bounded=False):
                    return k, subset
    return None


def hull_lb_from_cover(ell: int) -> int:
    """Lower bound on tree size from a split-cover number ``ell``."""
    if ell < 0:
        raise GeometryError("cover number must be nonnegative")
    return 2 * ell + 1


# -- families and regions ----------------------------------------------------------

def split_family(n: int, alpha_max: int, beta_min, beta_max, beta_step=1) -> list[GSplit]:
    """Every canonical ``alpha`` with ``1 <= ||alpha||_inf <= alpha_max``, crossed with a beta grid."""
    beta_min, beta_max, beta_step = map(as_fraction, (beta_min, beta_max, beta_step))
    if alpha_max < 1 or beta_step <= 0 or beta_min > beta_max:
        raise GeometryError("empty split family")
    alphas = []
    for a in itertools.product(range(-alpha_max, alpha_max + 1), repeat=n):
        if any(a) and math.gcd(*a) == 1 and next(v for v in a if v) > 0:
            alphas.append(a)
    alphas.sort(key=lambda a: (sum(abs(v) for v in a), tuple(-abs(v) for v in a), a))
    betas = []
    b = beta_min
    while b <= beta_max:
        betas.append(b)
        b += beta_step
    return [GSplit(a, b) for a in alphas for b in betas]


def axis_family(n: int, beta_min, beta_max) -> list[GSplit]:
    return [GSplit(unit(n, i), b) for i in range(n) for b in range(int(beta_min), int(beta_max) + 1)]


def box_region(n: int) -> Region:
    """``[-1/2, 3/2 + 2n]^n`` minus its integer hull ``[0, 2n+1]^n``."""
    return Region(Polyhedron.cube(n, Fraction(-1, 2), Fraction(3, 2) + 2 * n), Polyhedron.cube(n, 0, 2 * n + 1))


def box_constructive_cover(n: int) -> list[GSplit]:
    """``2n`` axis splits hugging the two faces of the box in each coordinate."""
    out = []
    for i in range(n):
        out.append(GSplit(unit(n, i), -1))
        out.append(GSplit(unit(n, i), 2 * n + 1))
    return out


def simplex_region(n: int, eps=None, b=None) -> Region:
    """``{x_i >= eps, sum x < n eps + b}`` as a closed outer set minus ``{sum x >= n eps + b}``.

    Defaults ``eps = 1/(2n)`` and ``b = n - 1/2`` put the strict face at ``sum x = n``.
    """
    eps = Fraction(1, 2 * n) if eps is None else as_fraction(eps)
    b = Fraction(2 * n - 1, 2) if b is None else as_fraction(b)
    top = n * eps + b
    rows = [geq(unit(n, i), eps) for i in range(n)]
    rows.append(Halfspace((Fraction(1),) * n, top))
    return Region(Polyhedron(n, tuple(rows)), Polyhedron(n, (geq((1,) * n, top),)))


def cube_region(d: int, k: int) -> Region:
    """``[0, 2k+1]^d`` in full, as a region with an empty inner set."""
    return Region(Polyhedron.cube(d, 0, 2 * k + 1), Polyhedron(d, (Halfspace((0,) * d, -1),)))


# -- JSON ------------------------------------------------------------------------

def gsplit_to_json(s: GSplit) -> dict:
    return {"alpha": list(s.alpha), "beta": rational_to_str(s.beta)}


def gsplit_from_json(data) -> GSplit:
    if not isinstance(data, dict) or "alpha" not in data or "beta" not in data:
        raise GeometryError("split must be an object with 'alpha' and 'beta'")
    alpha = data["alpha"]
    if not isinstance(alpha, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in alpha):
        raise GeometryError("split alpha must be an array of integers")
    return GSplit(tuple(alpha), parse_rational(data["beta"]))


def region_to_json(r: Region) -> dict:
    return {"outer": polyhedron_to_json(r.outer), "inner": polyhedron_to_json(r.inner)}


def region_from_json(data) -> Region:
    if not isinstance(data, dict) or "outer" not in data or "inner" not in data:
        raise GeometryError("region must be an object with 'outer' and 'inner'")
    return Region(polyhedron_from_json(data["outer"]), polyhedron_from_json(data["inner"]))
