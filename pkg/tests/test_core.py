import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hellycert.core import (EmbeddingContext, GeometryError, Halfspace, Polyhedron, geq, integer_normalize,
                            lattice_points, nullspace_vector, parse_rational, polyhedron_from_json,
                            polyhedron_to_json, rational_make, rational_to_str, tighten_complement, vertices)

import oracles

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_vecs = st.lists(st.integers(-6, 6), min_size=1, max_size=3).filter(any)


def test_rational_make_canonical():
    assert rational_make(2, 4) == F(1, 2)
    assert rational_make(-3, -6) == F(1, 2)
    z = rational_make(0, 7)
    assert (z.numerator, z.denominator) == (0, 1)
    with pytest.raises(GeometryError, match="zero denominator"):
        rational_make(1, 0)


def test_tighten_complement_examples():
    assert tighten_complement(Halfspace([1], 3)) == geq([1], 4)
    assert tighten_complement(Halfspace([2, -1], F(3, 2))) == geq([2, -1], 2)
    assert tighten_complement(Halfspace([2], 3)) == geq([1], 2)
    with pytest.raises(GeometryError):
        tighten_complement(Halfspace([0, 0], 1))
    with pytest.raises(GeometryError):
        tighten_complement(Halfspace([1], 1), EmbeddingContext(2))


@given(st.lists(rationals.filter(lambda v: v != 0), min_size=1, max_size=4), rationals)
def test_integer_normalize_keeps_the_halfspace(a, b):
    na, nb = integer_normalize(a, b)
    assert all(v.denominator == 1 for v in na)
    assert math.gcd(*(int(v) for v in na)) == 1
    ratio = na[0] / a[0]
    assert ratio > 0
    assert all(x * ratio == y for x, y in zip(a, na)) and b * ratio == nb


@settings(max_examples=60)
@given(nonzero_vecs, rationals)
def test_tightened_complement_splits_lattice_points(a, b):
    h = Halfspace([F(v) for v in a], b)
    comp = tighten_complement(h)
    for z in itertools.product(range(-3, 4), repeat=len(a)):
        z = tuple(F(v) for v in z)
        assert h.contains(z) != comp.contains(z)


def test_vertices_examples():
    sq = Polyhedron.cube(2, 0, 1)
    assert vertices(sq) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert vertices(Polyhedron(1, (geq([1], 1), Halfspace([1], 0)))) == []
    big = Polyhedron.cube(2, F(-1, 2), F(7, 2))
    rows = [(r.normal, r.rhs) for r in big.rows]
    assert vertices(big) == oracles.clip_polygon(rows)
    assert vertices(big) == oracles.box_vertices([F(-1, 2)] * 2, [F(7, 2)] * 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-6, 10)), max_size=4))
def test_vertices_match_polygon_clipping(extra):
    rows = list(Polyhedron.cube(2, -3, 3).rows)
    rows += [Halfspace([a1, a2], b) for a1, a2, b in extra if (a1, a2) != (0, 0)]
    p = Polyhedron(2, tuple(rows))
    expect = oracles.clip_polygon([(r.normal, r.rhs) for r in rows])
    assert vertices(p) == expect


def test_lattice_points_examples():
    assert len(lattice_points(Polyhedron.cube(2, 0, 1))) == 4
    assert [z[0] for z in lattice_points(Polyhedron.cube(1, F(-1, 2), F(7, 2)))] == [0, 1, 2, 3]
    tri = Polyhedron(2, (Halfspace([1, 1], 1), geq([1, 0], 0), geq([0, 1], 0)))
    assert sorted(lattice_points(tri)) == [(0, 0), (0, 1), (1, 0)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), rationals), max_size=3))
def test_lattice_points_match_scan(extra):
    rows = list(Polyhedron.cube(2, F(-5, 2), F(7, 3)).rows)
    rows += [Halfspace([a1, a2], b) for a1, a2, b in extra]
    got = sorted(lattice_points(Polyhedron(2, tuple(rows))))
    assert got == oracles.scan_lattice([(r.normal, r.rhs) for r in rows], -4, 4)


def test_unbounded_lattice_points_refused():
    with pytest.raises(GeometryError, match="unbounded"):
        lattice_points(Polyhedron(1, (Halfspace([1], 0),)))


@given(st.lists(st.tuples(st.lists(rationals, min_size=2, max_size=2), rationals), max_size=5))
def test_polyhedron_json_round_trip(rows):
    p = Polyhedron(2, tuple(Halfspace(a, b) for a, b in rows))
    assert polyhedron_from_json(polyhedron_to_json(p)) == p


def test_rational_text_form():
    assert rational_to_str(F(-3, 6)) == "-1/2"
    assert rational_to_str(F(4)) == "4"
    assert parse_rational(" 6/-4 ") == F(-3, 2)
    for bad in ("1/0", "x", "1.5", True, 1.5, None):
        with pytest.raises(GeometryError):
            parse_rational(bad)


def test_mismatched_dimensions_rejected():
    with pytest.raises(GeometryError):
        Polyhedron(2, (Halfspace([1], 0),))
    with pytest.raises(TypeError):
        Halfspace([0.5], 1)


def test_nullspace_vector():
    v = nullspace_vector([[1, 1, 0], [0, 1, 1]])
    assert v is not None and any(v) and v[0] + v[1] == 0 and v[1] + v[2] == 0
    assert nullspace_vector([[1, 0, 0]]) is None
