"""Exact two-phase simplex over the rationals.

The solver works on ``min c.x`` subject to ``A x <= b`` with free ``x``.  It
is rewritten as ``A x+ - A x- + s = b`` with every row sign-flipped to make
the right-hand side nonnegative and one artificial per row.  Artificial
columns are kept for the whole run: they carry ``B^-1``, from which dual
multipliers and Farkas rays are read off directly.

Bland's rule (lowest index entering, lowest basic index on ratio ties) makes
the pivot sequence deterministic and cycle-free.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .certificates import DominanceCert, FarkasCert
from .core import GeometryError, Halfspace, Polyhedron, RVec, dot

try:  # gmpy2 rationals are several times faster than Fraction inside the pivot loop
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

ZERO = Fraction(0)
_QZERO = _Q(0)
_QONE = _Q(1)


def _to_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(int(v.numerator), int(v.denominator))


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    primal: RVec | None = None
    value: Fraction | None = None
    # optimal: multipliers u >= 0 with sum u_i a_i = c (max) or -c (min) and sum u_i b_i = value (max) or -value (min)
    dual: tuple | None = None
    # infeasible: multipliers u >= 0 with sum u_i a_i = 0 and sum u_i b_i < 0
    ray: tuple | None = None
    # unbounded: direction d with A d <= 0 and c.d improving
    direction: RVec | None = None


class _Tableau:
    def __init__(self, A, b, n):
        m = len(A)
        self.m, self.n = m, n
        self.sign = [1 if bi >= 0 else -1 for bi in b]
        # columns: x+ (n), x- (n), slack (m), artificial (m)
        self.n_struct = 2 * n + m
        self.width = self.n_struct + m
        rows = []
        for i in range(m):
            s = self.sign[i]
            row = [_QZERO] * (self.width + 1)
            for j in range(n):
                a = A[i][j]
                if a:
                    q = _Q(s * a.numerator, a.denominator)
                    row[j] = q
                    row[n + j] = -q
            row[2 * n + i] = _Q(s)
            row[self.n_struct + i] = _QONE
            row[-1] = _Q(s * b[i].numerator, b[i].denominator)
            rows.append(row)
        self.T = rows
        self.basis = [self.n_struct + i for i in range(m)]

    def pivot(self, r, c):
        T = self.T
        prow = T[r]
        p = prow[c]
        if p != 1:
            prow = [v / p if v else v for v in prow]
            T[r] = prow
        nz = [j for j, v in enumerate(prow) if v]
        for i in range(len(T)):
            if i == r:
                continue
            f = T[i][c]
            if f:
                row = T[i]
                for j in nz:
                    row[j] -= f * prow[j]
        self.basis[r] = c

    def run(self, cost, cols):
        """Minimize ``cost`` moving only through ``cols``; returns None or an unbounded column.

        The reduced-cost row rides along as an extra tableau row during the run
        and is left in ``self.rc`` afterwards.
        """
        T, m = self.T, self.m
        rc = [_Q(c.numerator, c.denominator) for c in cost] + [_QZERO]
        for i, k in enumerate(self.basis):
            ck = cost[k]
            if ck:
                row = T[i]
                for j, v in enumerate(row):
                    if v:
                        rc[j] -= ck * v
        T.append(rc)
        try:
            while True:
                rc = T[m]
                enter = next((j for j in cols if rc[j] < 0), None)
                if enter is None:
                    return None
                best = None
                for i in range(m):
                    a = T[i][enter]
                    if a > 0:
                        key = (T[i][-1] / a, self.basis[i])
                        if best is None or key < best[0]:
                            best = (key, i)
                if best is None:
                    return enter
                self.pivot(best[1], enter)
        finally:
            self.rc = T.pop()

    def duals(self, cost):
        """``y = c_B^T B^-1`` for the sign-flipped system, read off the artificial reduced costs."""
        return [cost[self.n_struct + i] - _to_fraction(self.rc[self.n_struct + i]) for i in range(self.m)]

    def primal(self):
        vals = [ZERO] * self.width
        for i, k in enumerate(self.basis):
            vals[k] = _to_fraction(self.T[i][-1])
        return tuple(vals[j] - vals[self.n + j] for j in range(self.n))


def _sparse(values) -> tuple:
    return tuple((i, v) for i, v in enumerate(values) if v != 0)


def lp_solve(p: Polyhedron, objective: Sequence, direction: str = "min") -> LPResult:
    """Optimize ``objective . x`` over ``p`` exactly."""
    c = [Fraction(v) for v in objective]
    if len(c) != p.dim:
        raise GeometryError(f"objective has dimension {len(c)}, polyhedron has {p.dim}")
    if direction not in ("min", "max"):
        raise GeometryError("direction must be 'min' or 'max'")
    A, b = p.matrix
    n, m = p.dim, len(A)
    tab = _Tableau(A, b, n)
    struct_cols = list(range(tab.n_struct))

    phase1 = [ZERO] * tab.n_struct + [Fraction(1)] * m
    tab.run(phase1, struct_cols)
    infeas = sum((_to_fraction(tab.T[i][-1]) for i in range(m) if tab.basis[i] >= tab.n_struct), ZERO)
    if infeas > 0:
        y = tab.duals(phase1)
        ray = [-tab.sign[i] * y[i] for i in range(m)]
        return LPResult("infeasible", ray=_sparse(ray))

    # drive zero-level artificials out where a structural pivot exists
    for i in range(m):
        if tab.basis[i] >= tab.n_struct:
            j = next((j for j in struct_cols if tab.T[i][j] != 0), None)
            if j is not None:
                tab.pivot(i, j)

    sgn = 1 if direction == "min" else -1
    cost = [sgn * v for v in c] + [-sgn * v for v in c] + [ZERO] * (2 * m)
    unb = tab.run(cost, struct_cols)
    if unb is not None:
        d = [ZERO] * tab.width
        d[unb] = Fraction(1)
        for i, k in enumerate(tab.basis):
            d[k] -= _to_fraction(tab.T[i][unb])
        dirv = tuple(d[j] - d[n + j] for j in range(n))
        return LPResult("unbounded", direction=dirv)
    x = tab.primal()
    y = tab.duals(cost)
    u = [-tab.sign[i] * y[i] for i in range(m)]
    value = dot(c, x)
    return LPResult("optimal", primal=x, value=value, dual=_sparse(u))


def feasible_point(p: Polyhedron) -> RVec | None:
    res = lp_solve(p, [0] * p.dim, "min")
    return res.primal if res.status == "optimal" else None


def extract_farkas(p: Polyhedron):
    """``(FarkasCert, None)`` when ``p`` is empty, else ``(None, witness point)``."""
    res = lp_solve(p, [0] * p.dim, "min")
    if res.status == "infeasible":
        return FarkasCert(res.ray), None
    return None, res.primal


def extract_dominance(p: Polyhedron, a: Sequence, b):
    """Prove ``a.x <= b`` over nonempty ``p``.

    Returns ``(DominanceCert, None)`` or ``(None, point)`` with ``a.point > b``.
    """
    target = Halfspace(tuple(a), b)
    if target.dim != p.dim:
        raise GeometryError("target dimension does not match polyhedron")
    res = lp_solve(p, target.normal, "max")
    if res.status == "infeasible":
        raise GeometryError("dominance over empty set is vacuous; use extract_farkas")
    if res.status == "unbounded":
        x0 = feasible_point(p)
        d = res.direction
        slope = dot(target.normal, d)
        gap = target.rhs - dot(target.normal, x0)
        t = max(ZERO, gap / slope) + 1
        return None, tuple(xi + t * di for xi, di in zip(x0, d))
    if res.value > target.rhs:
        return None, res.primal
    return DominanceCert(target, res.dual), None


def implies(p: Polyhedron, h: Halfspace) -> bool:
    """True when every point of nonempty-or-empty ``p`` satisfies ``h``."""
    res = lp_solve(p, h.normal, "max")
    if res.status == "infeasible":
        return True
    if res.status == "unbounded":
        return False
    return res.value <= h.rhs
