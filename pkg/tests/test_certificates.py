from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hellycert.certificates import (BoundCert, DominanceCert, FarkasCert, cert_from_json, cert_to_json,
                                    check_dominance, check_farkas, check_lower_bound)
from hellycert.core import GeometryError, Halfspace, Polyhedron, geq

EMPTY = Polyhedron(1, (geq([1], 1), Halfspace([1], 0)))
SQUARE = Polyhedron.cube(2, 0, 1)


def test_farkas_examples():
    assert check_farkas(EMPTY, FarkasCert(((0, 1), (1, 1))))
    v = check_farkas(EMPTY, FarkasCert(((0, 1),)))
    assert not v and "normal sum" in v.reason


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(0, 3), st.fractions(min_value=0, max_value=5, max_denominator=6)),
                max_size=6))
def test_farkas_never_accepted_on_nonempty_set(mults):
    assert not check_farkas(SQUARE, FarkasCert(tuple(mults)))


def test_malformed_multipliers_rejected():
    for mult in [((0, -1), (1, 2)), ((0, 1), (0, 1), (1, 1)), ((5, 1),), ((-1, 1),)]:
        assert not check_farkas(EMPTY, FarkasCert(mult))


def test_lower_bound_examples():
    p = Polyhedron(1, (geq([1], 1),))
    assert check_lower_bound(p, BoundCert((1,), 1, ((0, 1),)))
    assert not check_lower_bound(p, BoundCert((1,), 2, ((0, 1),)))
    q = Polyhedron(2, (geq([1, 0], 0), geq([0, 1], 0)))
    assert check_lower_bound(q, BoundCert((1, 1), 0, ((0, 1), (1, 1))))


def test_dominance_examples():
    assert check_dominance(SQUARE, DominanceCert(Halfspace([1, 1], 2), ((0, 1), (2, 1))))
    assert not check_dominance(SQUARE, DominanceCert(Halfspace([1, 1], F(3, 2)), ((0, 1), (2, 1))))
    assert check_dominance(Polyhedron.cube(1, 0, 3), DominanceCert(Halfspace([1], 3), ((0, 1),)))
    assert not check_dominance(SQUARE, DominanceCert(Halfspace([1], 2), ((0, 1),)))


def test_json_round_trip_and_errors():
    for c in (FarkasCert(((0, F(1, 3)), (2, 1))), DominanceCert(Halfspace([1, 1], 2), ((0, 1),))):
        assert cert_from_json(cert_to_json(c)) == c
    for bad in ({"kind": "farkas", "multipliers": [[0]]}, {"kind": "magic", "multipliers": []},
                {"kind": "farkas", "multipliers": [["a", "1"]]}, [], {"kind": "farkas", "multipliers": [[True, "1"]]}):
        with pytest.raises(GeometryError):
            cert_from_json(bad)


def test_work_counts_grow_with_support():
    big = Polyhedron(1, tuple([geq([1], 1)] * 5 + [Halfspace([1], 0)]))
    small = check_farkas(big, FarkasCert(((0, 1), (5, 1))))
    large = check_farkas(big, FarkasCert(tuple((i, F(1, 5)) for i in range(5)) + ((5, 1),)))
    assert small and large and large.work > small.work


def test_zero_multiplier_with_bad_index_is_rejected():
    p = Polyhedron(1, (Halfspace([1], 0), geq([1], 1)))
    good = [[0, "1"], [1, "1"]]
    assert check_farkas(p, cert_from_json({"kind": "farkas", "multipliers": good}))
    for extra in ([2, "0"], [0, "0"], [-1, "0"]):
        cert = cert_from_json({"kind": "farkas", "multipliers": good + [extra]})
        assert not check_farkas(p, cert)
    assert FarkasCert(((0, F(1)), (1, F(0)))).support == 1
