from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hellycert.certificates import BoundCert, check_dominance, check_farkas, check_lower_bound
from hellycert.core import GeometryError, Halfspace, Polyhedron, dot, geq
from hellycert.lp import extract_dominance, extract_farkas, feasible_point, implies, lp_solve

import oracles

small = st.integers(-4, 4)
row = st.tuples(small, small, st.fractions(min_value=-8, max_value=8, max_denominator=4))


def _poly(extra):
    rows = list(Polyhedron.cube(2, -3, 3).rows)
    rows += [Halfspace([a1, a2], b) for a1, a2, b in extra if (a1, a2) != (0, 0)]
    return Polyhedron(2, tuple(rows))


def test_lp_examples():
    r = lp_solve(Polyhedron(1, (geq([1], 1),)), [1], "min")
    assert r.status == "optimal" and r.value == 1 and r.dual == ((0, F(1)),)
    r = lp_solve(Polyhedron(1, (geq([1], 1), Halfspace([1], 0))), [5], "max")
    assert r.status == "infeasible" and r.ray == ((0, F(1)), (1, F(1)))
    r = lp_solve(Polyhedron.cube(2, 0, 1), [1, 1], "max")
    assert r.value == 2 and r.primal == (1, 1)


def test_unbounded_direction():
    r = lp_solve(Polyhedron(2, (geq([1, 0], 0),)), [1, 1], "max")
    assert r.status == "unbounded"
    assert dot([1, 1], r.direction) > 0 and dot([-1, 0], r.direction) <= 0


def test_bad_arguments():
    with pytest.raises(GeometryError):
        lp_solve(Polyhedron.cube(2, 0, 1), [1], "min")
    with pytest.raises(GeometryError):
        lp_solve(Polyhedron.cube(2, 0, 1), [1, 1], "sideways")


@settings(max_examples=80, deadline=None)
@given(st.lists(row, max_size=4), small, small)
def test_optimum_matches_vertex_oracle_and_dual_certifies(extra, c1, c2):
    p = _poly(extra)
    verts = oracles.clip_polygon([(r.normal, r.rhs) for r in p.rows])
    r = lp_solve(p, [c1, c2], "max")
    if not verts:
        assert r.status == "infeasible"
        assert check_farkas(p, extract_farkas(p)[0])
        return
    best = max(c1 * x + c2 * y for x, y in verts)
    assert r.status == "optimal" and r.value == best and p.contains(r.primal)
    # the dual is a lower-bound certificate for the minimization of -c
    assert check_lower_bound(p, BoundCert((-F(c1), -F(c2)), -best, r.dual))
    low = lp_solve(p, [c1, c2], "min")
    assert low.value == min(c1 * x + c2 * y for x, y in verts)
    assert check_lower_bound(p, BoundCert((F(c1), F(c2)), low.value, low.dual))


def test_farkas_extraction_examples():
    cert, wit = extract_farkas(Polyhedron(1, (geq([1], 1), Halfspace([1], 0))))
    assert wit is None and cert.multipliers == ((0, F(1)), (1, F(1)))
    cert, wit = extract_farkas(Polyhedron.cube(2, 0, 1))
    assert cert is None and Polyhedron.cube(2, 0, 1).contains(wit)
    leaf = Polyhedron.cube(1, 0, 3).intersect([geq([1], 4)])
    cert, _ = extract_farkas(leaf)
    total = sum(u * leaf.rows[i].normal[0] for i, u in cert.multipliers)
    rhs = sum(u * leaf.rows[i].rhs for i, u in cert.multipliers)
    assert total == 0 and rhs < 0


def test_dominance_examples():
    sq = Polyhedron.cube(2, 0, 1)
    cert, _ = extract_dominance(sq, [1, 1], 2)
    assert cert.multipliers == ((0, F(1)), (2, F(1)))
    cert, pt = extract_dominance(sq, [1, 1], F(3, 2))
    assert cert is None and pt == (1, 1)
    cert, _ = extract_dominance(Polyhedron.cube(1, 0, 3), [1], 3)
    assert cert.multipliers == ((0, F(1)),)
    with pytest.raises(GeometryError):
        extract_dominance(Polyhedron(1, (geq([1], 1), Halfspace([1], 0))), [1], 0)


def test_dominance_on_unbounded_set_returns_far_point():
    p = Polyhedron(2, (geq([1, 0], 0), geq([0, 1], 0)))
    cert, pt = extract_dominance(p, [1, 1], 10)
    assert cert is None and p.contains(pt) and pt[0] + pt[1] > 10


@settings(max_examples=80, deadline=None)
@given(st.lists(row, max_size=4), small, small, st.fractions(min_value=-8, max_value=8, max_denominator=3))
def test_dominance_is_exact(extra, a1, a2, b):
    assume((a1, a2) != (0, 0))
    p = _poly(extra)
    if feasible_point(p) is None:
        return
    verts = oracles.clip_polygon([(r.normal, r.rhs) for r in p.rows])
    valid = all(a1 * x + a2 * y <= b for x, y in verts)
    cert, pt = extract_dominance(p, [a1, a2], b)
    assert (cert is not None) == valid == implies(p, Halfspace([a1, a2], b))
    if cert is not None:
        assert check_dominance(p, cert)
    else:
        assert p.contains(pt) and a1 * pt[0] + a2 * pt[1] > b
