from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import as_tuples, hull_area_2d, naive_iterated, naive_sumset
from strategies import int_sets, point_lists, set_pairs
from sumsetlab.errors import (
    ArgumentError,
    CapacityError,
    DimensionError,
    EmptyInputError,
    UnsupportedDimensionError,
)
from sumsetlab.lattice import (
    Box,
    PointSet,
    convex_hull_volume,
    difference_set,
    dilate,
    format_pointset,
    gcd_normalize,
    iterated_sumset,
    minus,
    parse_pointset,
    read_pointset,
    sumset,
    write_pointset,
)


def P(*vals):
    return PointSet(list(vals))


# ---------------------------------------------------------------- PointSet


def test_pointset_is_canonical():
    a = PointSet([(1, 0), (0, 5), (1, 0), (0, -1)])
    assert a.points == ((0, -1), (0, 5), (1, 0))
    assert len(a) == 3
    with pytest.raises(ValueError):
        a.coords[0, 0] = 7


def test_pointset_inputs():
    assert P(3, 1, 2) == PointSet(np.array([[2], [1], [3]]))
    assert PointSet(P(1, 2)) == P(1, 2)
    assert (2,) in P(1, 2) and 2 in P(1, 2)
    assert PointSet.empty(3).dim == 3
    with pytest.raises(ArgumentError):
        PointSet([])
    with pytest.raises(DimensionError):
        PointSet([(1, 2), (3,)])


def test_pointset_hash_and_eq():
    assert hash(P(1, 2)) == hash(P(2, 1))
    assert P(1, 2) != PointSet([(1, 2)])


def test_translate_and_corners():
    a = PointSet([(1, 2), (3, -1)])
    assert a.translate((1, 1)).points == ((2, 3), (4, 0))
    assert a.min_corner() == (1, -1) and a.max_corner() == (3, 2)
    assert a.diameter() == 3


def test_mask_roundtrip():
    a = P(-3, 0, 4, 5)
    mask, offset = a.to_mask()
    assert PointSet.from_mask(mask, offset) == a


def test_box_points():
    b = Box((1, 2))
    assert b.count == 6
    assert len(b.points()) == 6
    with pytest.raises(CapacityError):
        Box((10, 10)).points(cap=50)


# ---------------------------------------------------------------- sumset


def test_sumset_examples():
    assert sumset(P(0, 1), P(0, 2)) == P(0, 1, 2, 3)
    b = P(4, 9, 11)
    assert sumset(P(0), b) == b
    assert sumset(P(0, 1, 3), P(0, 1, 3)) == P(0, 1, 2, 3, 4, 6)


def test_sumset_errors():
    with pytest.raises(DimensionError):
        sumset(P(0), PointSet([(0, 0)]))
    with pytest.raises(EmptyInputError):
        sumset(PointSet.empty(1), P(0))
    with pytest.raises(ArgumentError):
        sumset(P(0), P(0), kernel="fft")


@given(set_pairs(max_size=20))
def test_sumset_matches_oracle_every_kernel(case):
    dim, a, b = case
    want = naive_sumset(a, b)
    for kernel in ("auto", "bitset", "pairwise"):
        got = sumset(PointSet(a), PointSet(b), kernel=kernel)
        assert set(got.points) == want


@given(set_pairs(max_size=15))
def test_sumset_size_bounds(case):
    _, a, b = case
    a, b = PointSet(a), PointSet(b)
    s = sumset(a, b)
    assert max(len(a), len(b)) <= len(s) <= len(a) * len(b)


@given(set_pairs(max_size=10), st.data())
def test_sumset_commutative_associative(case, data):
    dim, a, b = case
    c = PointSet(data.draw(point_lists(dim, max_size=6)))
    a, b = PointSet(a), PointSet(b)
    assert sumset(a, b) == sumset(b, a)
    assert sumset(sumset(a, b), c) == sumset(a, sumset(b, c))


@given(set_pairs(max_size=10), st.data())
def test_sumset_translation_invariance(case, data):
    dim, a, b = case
    t = data.draw(st.tuples(*[st.integers(-100, 100)] * dim))
    a, b = PointSet(a), PointSet(b)
    assert len(sumset(a.translate(t), b)) == len(sumset(a, b))


@given(int_sets(-20, 20, max_size=10), int_sets(-20, 20, max_size=10))
def test_one_dimensional_floor(a, b):
    assert len(sumset(P(*a), P(*b))) >= len(a) + len(b) - 1


@given(st.integers(-5, 5), st.integers(1, 7), st.integers(1, 10), st.integers(1, 10))
def test_one_dimensional_floor_equality_for_aps(start, step, m, n):
    a = PointSet([start + step * i for i in range(m)])
    b = PointSet([step * i for i in range(n)])
    assert len(sumset(a, b)) == m + n - 1


def test_bitset_kernel_large_dense():
    a = PointSet(np.arange(0, 200000, 3).reshape(-1, 1))
    b = PointSet(np.arange(0, 50000, 5).reshape(-1, 1))
    s = sumset(a, b, kernel="bitset")
    vals = np.asarray(s.values())
    assert vals[0] == 0 and vals[-1] == 199998 + 49995
    assert len(s) == len(sumset(a, b, kernel="pairwise"))


# ---------------------------------------------------------------- iterated


def test_iterated_examples():
    assert iterated_sumset(P(0, 1), 5) == P(0, 1, 2, 3, 4, 5)
    assert iterated_sumset(P(0, 1, 5), 2) == P(0, 1, 2, 5, 6, 10)
    a = P(2, 3, 9)
    assert iterated_sumset(a, 1) == a
    with pytest.raises(ArgumentError):
        iterated_sumset(a, 0)


def test_iterated_exhaustive_small():
    universe = range(7)
    for size in range(1, 5):
        for a in combinations(universe, size):
            for h in (2, 3, 5, 8):
                got = iterated_sumset(P(*a), h)
                assert set(got.points) == naive_iterated(as_tuples(a), h)


@given(point_lists(2, max_size=6), st.integers(1, 6))
def test_iterated_matches_fold_2d(a, h):
    assert set(iterated_sumset(PointSet(a), h).points) == naive_iterated(a, h)


# ---------------------------------------------------------------- dilation, minus


def test_dilate_examples():
    assert dilate(P(0, 1, 2), 3) == P(0, 3, 6)
    assert dilate(P(-1, 1), -1) == P(-1, 1)
    assert dilate(P(0, 2, 5), 2) == P(0, 4, 10)
    assert len(dilate(PointSet([(1, 2), (3, 4)]), 0)) == 1


def test_minus_and_difference():
    assert minus(P(1, 2)) == P(-2, -1)
    assert difference_set(P(0, 1, 3), P(0, 1, 3)) == P(*range(-3, 4))


@given(point_lists(2, max_size=10))
def test_difference_set_symmetric_with_zero(a):
    a = PointSet(a)
    d = difference_set(a, a)
    assert (0, 0) in d
    assert minus(d) == d


def test_gcd_normalize():
    assert gcd_normalize(P(0, 4, 10)) == (P(0, 2, 5), 2)
    assert gcd_normalize(P(0, 1, 7)) == (P(0, 1, 7), 1)
    assert gcd_normalize(P(-6, 0, 6)) == (P(-1, 0, 1), 6)
    with pytest.raises(ArgumentError):
        gcd_normalize(P(0))


# ---------------------------------------------------------------- hull volume


def test_hull_volume_examples():
    assert convex_hull_volume(PointSet([(0, 0), (1, 0), (0, 1)])) == Fraction(1, 2)
    assert convex_hull_volume(PointSet([(0, 0), (1, 1), (3, 3)])) == 0
    assert convex_hull_volume(PointSet([(0, 0), (2, 0), (0, 2), (2, 2)])) == 4
    assert convex_hull_volume(P(3, 9)) == 6


def test_hull_volume_higher_dims():
    cube = Box((2, 3, 1)).points()
    assert convex_hull_volume(cube) == 6
    tetra = PointSet([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert convex_hull_volume(tetra) == Fraction(1, 6)
    simplex4 = PointSet([(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    assert convex_hull_volume(simplex4) == Fraction(1, 24)
    flat = PointSet([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)])
    assert convex_hull_volume(flat) == 0
    with pytest.raises(UnsupportedDimensionError):
        convex_hull_volume(PointSet([(0,) * 5]))


@given(point_lists(2, min_size=1, max_size=15, lo=-10, hi=10))
def test_hull_area_matches_shoelace(pts):
    assert convex_hull_volume(PointSet(pts)) == hull_area_2d(pts)


# ---------------------------------------------------------------- text format


def test_text_roundtrip(tmp_path):
    a = PointSet([(3, -1), (0, 2)])
    text = format_pointset(a)
    assert text.splitlines()[0] == "dim 2"
    assert parse_pointset(text) == a
    path = tmp_path / "a.txt"
    write_pointset(a, path)
    assert read_pointset(path) == a


def test_parse_comments_and_errors():
    assert parse_pointset("# header\ndim 1\n5 # five\n\n2\n") == P(2, 5)
    with pytest.raises(ValueError):
        parse_pointset("1 2\n")
    with pytest.raises(ValueError):
        parse_pointset("dim 2\n1 2 3\n")
