"""Coordinate compressions, the cube-summand inequality, and Ruzsa covering."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError, DimensionError, EmptyInputError
from .exact import compare_root_sum
from .lattice import PointSet, difference_set, sumset
from .report import InequalityReport, root_sum_sides

MAX_CUBE_DIM = 3


def normalize_corner(a: PointSet) -> tuple[PointSet, tuple]:
    """Translate a so its bounding box has min corner 0; returns (set, shift applied)."""
    if len(a) == 0:
        raise EmptyInputError("cannot normalise an empty set")
    shift = tuple(-c for c in a.min_corner())
    return a.translate(shift), shift


def compress(a: PointSet, axis: int) -> PointSet:
    """Push every line parallel to e_axis down to {0, ..., m-1} (axis is 1-based).

    The set is first moved so its bounding box starts at the origin; use
    ``normalize_corner`` to recover that shift.
    """
    if len(a) == 0:
        raise EmptyInputError("cannot compress an empty set")
    if not 1 <= axis <= a.dim:
        raise ArgumentError(f"axis {axis} out of range 1..{a.dim}")
    shifted, _ = normalize_corner(a)
    ax = axis - 1
    coords = shifted.coords
    other = [i for i in range(a.dim) if i != ax]
    if not other:
        return PointSet(np.arange(len(a)).reshape(-1, 1))
    keys = coords[:, other]
    order = np.lexsort(keys.T[::-1])
    keys = keys[order]
    new_line = np.empty(len(a), dtype=np.int64)
    heads = np.concatenate([[0], np.flatnonzero(np.any(keys[1:] != keys[:-1], axis=1)) + 1])
    sizes = np.diff(np.concatenate([heads, [len(a)]]))
    # Position of each point inside its line: 0, 1, ..., |line| - 1.
    new_line[:] = np.arange(len(a)) - np.repeat(heads, sizes)
    out = np.empty_like(coords)
    out[:, other] = keys
    out[:, ax] = new_line
    return PointSet(out)


def compress_fully(a: PointSet) -> PointSet:
    """Compress along axes 1..k repeatedly until nothing moves."""
    current = compress(a, 1)
    while True:
        nxt = current
        for axis in range(1, a.dim + 1):
            nxt = compress(nxt, axis)
        if nxt == current:
            return current
        current = nxt


def unit_cube(d: int) -> PointSet:
    grid = np.stack(np.meshgrid(*[np.arange(2)] * d, indexing="ij"), axis=-1)
    return PointSet(grid.reshape(-1, d))


def cube_summand_identity_check(a: PointSet, b: PointSet) -> InequalityReport:
    """|A + B + {0,1}^d|^(1/d) >= |A|^(1/d) + |B|^(1/d), decided exactly."""
    if a.dim != b.dim:
        raise DimensionError("sets of different dimension")
    if len(a) == 0 or len(b) == 0:
        raise EmptyInputError("cube summand check needs non-empty sets")
    d = a.dim
    if d > MAX_CUBE_DIM:
        raise ArgumentError(f"cube summand check supports d <= {MAX_CUBE_DIM}")
    total = len(sumset(sumset(a, b), unit_cube(d)))
    sign = compare_root_sum(total, len(a), len(b), d)
    lhs, rhs = root_sum_sides(total, len(a), len(b), d)
    return InequalityReport(
        name="cube-summand",
        hypothesis_values={"|A|": len(a), "|B|": len(b), "d": d},
        hypotheses_ok=True,
        lhs=lhs,
        rhs=rhs,
        passed=sign >= 0,
        details={"|A+B+{0,1}^d|": total, "sign": sign},
    )


def ruzsa_cover(a: PointSet, b: PointSet) -> PointSet:
    """X subset of a with a subset of X + b - b and |X| <= |a + b| / |b|.

    Greedy maximal family of pairwise disjoint translates x + b, scanning a
    in canonical order.  Both conclusions are re-checked before returning.
    """
    if a.dim != b.dim:
        raise DimensionError("sets of different dimension")
    if len(a) == 0 or len(b) == 0:
        raise EmptyInputError("ruzsa_cover needs non-empty sets")
    diffs = set(difference_set(b, b).points)
    chosen: list = []
    for p in a.points:
        if all(tuple(u - v for u, v in zip(p, x)) not in diffs for x in chosen):
            chosen.append(p)
    x = PointSet(chosen, dim=a.dim)
    if len(x) * len(b) > len(sumset(a, b)):
        raise AssertionError("Ruzsa cover is larger than |a+b|/|b|")
    if not a.issubset(sumset(x, difference_set(b, b))):
        raise AssertionError("Ruzsa cover does not cover a")
    return x
