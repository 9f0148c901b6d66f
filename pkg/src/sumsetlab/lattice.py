"""Finite point sets in Z^k and the exact sumset kernels.

A PointSet is immutable and always held in canonical form: an (n, k) int64
array whose rows are strictly increasing in lexicographic order.  Equality
of sets is equality of these arrays.

Two sumset kernels are provided:

* ``pairwise`` adds every pair of rows and canonicalises the result;
* ``bitset`` splits both sets into fibres parallel to one axis, stores each
  fibre as a Python-int bit vector, and convolves fibres by shifting one of
  them across the maximal runs of the other (each run of length L costs
  O(log L) big-int shift-ors).

``auto`` picks the bitset kernel when the fibres are long enough to pay for
themselves and the combined fibre range stays below ``BITSET_RANGE_LIMIT``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import (
    ArgumentError,
    CapacityError,
    DimensionError,
    EmptyInputError,
    UnsupportedDimensionError,
)
from .exact import affine_rank, int_det

BITSET_RANGE_LIMIT = 1 << 24
# Coordinates stay well inside int64 so a single addition cannot overflow.
COORD_LIMIT = 1 << 62
_PAIRWISE_CHUNK = 1 << 22


def _canonical(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] > 1:
        if arr.shape[1] == 1:
            arr = np.unique(arr[:, 0]).reshape(-1, 1)
        else:
            order = np.lexsort(arr.T[::-1])
            arr = arr[order]
            keep = np.empty(arr.shape[0], dtype=bool)
            keep[0] = True
            np.any(arr[1:] != arr[:-1], axis=1, out=keep[1:])
            arr = arr[keep]
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def _to_array(points, dim) -> np.ndarray:
    if isinstance(points, PointSet):
        if dim is not None and dim != points.dim:
            raise DimensionError(f"expected dim {dim}, got {points.dim}")
        return points.coords
    if isinstance(points, np.ndarray):
        arr = points
        if arr.ndim == 1:
            if dim not in (None, 1) and arr.size:
                raise DimensionError("flat array given for a multi-dimensional set")
            arr = arr.reshape(-1, 1)
        elif arr.ndim != 2:
            raise DimensionError("point arrays must be 1- or 2-dimensional")
        if dim is not None and arr.shape[0] and arr.shape[1] != dim:
            raise DimensionError(f"expected dim {dim}, got {arr.shape[1]}")
        if arr.shape[0] == 0:
            if dim is None and arr.shape[1] == 0:
                raise ArgumentError("an empty point set needs an explicit dim")
            return np.zeros((0, dim or arr.shape[1]), dtype=np.int64)
        if arr.dtype.kind not in "iu":
            raise ArgumentError("coordinates must be integers")
        return arr.astype(np.int64, copy=False)

    rows = []
    width = None
    for p in points:
        row = (p,) if isinstance(p, (int, np.integer)) else tuple(p)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DimensionError("points of different lengths in one set")
        for c in row:
            if not isinstance(c, (int, np.integer)) or isinstance(c, bool):
                raise ArgumentError(f"non-integer coordinate {c!r}")
            if not -COORD_LIMIT < c < COORD_LIMIT:
                raise CapacityError(f"coordinate {c} outside the 64-bit working range")
        rows.append(row)
    if not rows:
        if dim is None:
            raise ArgumentError("an empty point set needs an explicit dim")
        return np.zeros((0, dim), dtype=np.int64)
    if dim is not None and width != dim:
        raise DimensionError(f"expected dim {dim}, got {width}")
    if width == 0:
        raise DimensionError("points must have at least one coordinate")
    return np.array(rows, dtype=np.int64).reshape(len(rows), width)


class PointSet:
    """Immutable finite subset of Z^k in canonical (sorted, duplicate-free) form.

    >>> PointSet([3, 1, 1, 2]).values()
    (1, 2, 3)
    >>> PointSet([(1, 0), (0, 1)]).points
    ((0, 1), (1, 0))
    """

    __slots__ = ("_coords", "_tuples", "_lookup")

    def __init__(self, points=(), dim: int | None = None):
        self._coords = _canonical(_to_array(points, dim))
        self._tuples = None
        self._lookup = None

    @classmethod
    def _from_canonical(cls, arr: np.ndarray) -> "PointSet":
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.flags.writeable = False
        obj._coords = arr
        obj._tuples = None
        obj._lookup = None
        return obj

    @classmethod
    def empty(cls, dim: int) -> "PointSet":
        return cls((), dim=dim)

    @property
    def dim(self) -> int:
        return self._coords.shape[1]

    @property
    def coords(self) -> np.ndarray:
        """Read-only (n, dim) int64 array of the points in canonical order."""
        return self._coords

    @property
    def points(self) -> tuple:
        if self._tuples is None:
            self._tuples = tuple(map(tuple, self._coords.tolist()))
        return self._tuples

    def values(self) -> tuple:
        """The elements of a one-dimensional set as plain ints."""
        if self.dim != 1:
            raise DimensionError("values() is only defined for subsets of Z")
        return tuple(self._coords[:, 0].tolist())

    def __len__(self) -> int:
        return self._coords.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        if self._lookup is None:
            self._lookup = frozenset(self.points)
        key = (p,) if isinstance(p, (int, np.integer)) else tuple(p)
        return key in self._lookup

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self._coords, other._coords)

    def __hash__(self) -> int:
        return hash((self.dim, self._coords.tobytes()))

    def __repr__(self) -> str:
        shown = self.values() if self.dim == 1 else self.points
        if len(self) > 12:
            head = ", ".join(map(str, shown[:6]))
            return f"PointSet(dim={self.dim}, n={len(self)}, [{head}, ...])"
        return f"PointSet(dim={self.dim}, {list(shown)})"

    def issubset(self, other: "PointSet") -> bool:
        _check_dims(self, other)
        if len(self) > len(other):
            return False
        if self.dim == 1:
            return bool(np.isin(self._coords[:, 0], other._coords[:, 0]).all())
        return set(self.points) <= set(other.points)

    def union(self, other: "PointSet") -> "PointSet":
        _check_dims(self, other)
        return PointSet(np.concatenate([self._coords, other._coords]), dim=self.dim)

    def translate(self, shift) -> "PointSet":
        shift = np.asarray((shift,) if np.isscalar(shift) else shift, dtype=np.int64)
        if shift.shape != (self.dim,):
            raise DimensionError("translation vector has the wrong length")
        # Translation preserves lexicographic order.
        return PointSet._from_canonical(self._coords + shift)

    def min_corner(self) -> tuple:
        _require_nonempty(self)
        return tuple(self._coords.min(axis=0).tolist())

    def max_corner(self) -> tuple:
        _require_nonempty(self)
        return tuple(self._coords.max(axis=0).tolist())

    def diameter(self) -> int:
        """Largest coordinate range max_i (max x_i - min x_i)."""
        if len(self) == 0:
            return 0
        return int((self._coords.max(axis=0) - self._coords.min(axis=0)).max())

    def to_mask(self) -> tuple[int, int]:
        """(bitmask, offset) with bit j set iff offset + j is in the set (dim 1)."""
        if self.dim != 1:
            raise DimensionError("bit masks are only defined for subsets of Z")
        _require_nonempty(self)
        v = self._coords[:, 0]
        lo = int(v[0])
        return _indices_to_int(v - lo, int(v[-1]) - lo + 1), lo

    @classmethod
    def from_mask(cls, mask: int, offset: int = 0) -> "PointSet":
        if mask < 0:
            raise ArgumentError("mask must be non-negative")
        idx = _int_to_indices(mask) + offset
        return cls._from_canonical(idx.reshape(-1, 1))


@dataclass(frozen=True)
class Box:
    """The lattice box prod_i [0, sides[i]]."""

    sides: tuple

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        if not sides:
            raise DimensionError("a box needs at least one side")
        if min(sides) < 0:
            raise ArgumentError("box sides must be non-negative")
        object.__setattr__(self, "sides", sides)

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def count(self) -> int:
        return math.prod(s + 1 for s in self.sides)

    def points(self, cap: int = 10**7) -> PointSet:
        if self.count > cap:
            raise CapacityError(f"box has {self.count} points, cap is {cap}")
        grids = np.meshgrid(*[np.arange(s + 1) for s in self.sides], indexing="ij")
        arr = np.stack([g.ravel() for g in grids], axis=1)
        return PointSet._from_canonical(arr)


def _check_dims(a: PointSet, b: PointSet) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _require_nonempty(*sets: PointSet) -> None:
    for s in sets:
        if len(s) == 0:
            raise EmptyInputError("operation needs a non-empty point set")


def _check_range(a: PointSet, b: PointSet) -> None:
    bound = int(np.abs(a.coords).max()) + int(np.abs(b.coords).max())
    if bound >= COORD_LIMIT:
        raise CapacityError("sumset coordinates would leave the 64-bit working range")


# ---------------------------------------------------------------- bit vectors


def _indices_to_int(idx: np.ndarray, length: int) -> int:
    bits = np.zeros(length, dtype=bool)
    bits[idx] = True
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _int_to_indices(x: int) -> np.ndarray:
    if x == 0:
        return np.zeros(0, dtype=np.int64)
    raw = np.frombuffer(x.to_bytes((x.bit_length() + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")).astype(np.int64)


def _runs(idx: np.ndarray) -> list:
    """Maximal runs of consecutive integers in a sorted index array as (start, length)."""
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) != 1) + 1
    starts = np.concatenate([[0], breaks])
    ends = np.concatenate([breaks, [idx.size]])
    return list(zip(idx[starts].tolist(), (ends - starts).tolist()))


def _smear(x: int, length: int) -> int:
    """OR of x << i over 0 <= i < length, by doubling."""
    out, width = x, 1
    while width < length:
        step = min(width, length - width)
        out |= out << step
        width += step
    return out


def bitset_convolve(x: int, runs) -> int:
    """Sumset of bit vector ``x`` with the set given as runs (start, length)."""
    cache = {}
    out = 0
    for start, length in runs:
        block = cache.get(length)
        if block is None:
            block = cache[length] = _smear(x, length)
        out |= block << start
    return out


class _Fibres:
    """A point set split into lines parallel to one axis."""

    def __init__(self, coords: np.ndarray, axis: int):
        k = coords.shape[1]
        other = [i for i in range(k) if i != axis]
        perm = coords[:, other + [axis]]
        if k > 1:
            perm = perm[np.lexsort(perm.T[::-1])]
        self.base = int(perm[:, -1].min())
        line = perm[:, -1] - self.base
        if k > 1:
            heads = np.concatenate(
                [[0], np.flatnonzero(np.any(perm[1:, :-1] != perm[:-1, :-1], axis=1)) + 1]
            )
        else:
            heads = np.array([0])
        ends = np.concatenate([heads[1:], [perm.shape[0]]])
        self.keys = [tuple(perm[h, :-1].tolist()) for h in heads]
        self.lines = [line[h:e] for h, e in zip(heads, ends)]
        self.span = int(line.max()) + 1
        self._ints = None
        self._runs = None

    @property
    def ints(self):
        if self._ints is None:
            self._ints = [_indices_to_int(li, int(li[-1]) + 1) for li in self.lines]
        return self._ints

    @property
    def runs(self):
        if self._runs is None:
            self._runs = [_runs(li) for li in self.lines]
        return self._runs


def _bitset_axis(a: PointSet, b: PointSet) -> int:
    spans = (a.coords.max(axis=0) - a.coords.min(axis=0)) + (
        b.coords.max(axis=0) - b.coords.min(axis=0)
    )
    return int(np.argmax(spans))


def _sumset_bitset(a: PointSet, b: PointSet) -> PointSet:
    k = a.dim
    axis = _bitset_axis(a, b)
    fa, fb = _Fibres(a.coords, axis), _Fibres(b.coords, axis)
    if fa.span + fb.span > BITSET_RANGE_LIMIT:
        raise CapacityError("fibre range exceeds the bit-vector limit")
    acc: dict = {}
    for ka, ia, ra in zip(fa.keys, fa.ints, fa.runs):
        for kb, ib, rb in zip(fb.keys, fb.ints, fb.runs):
            key = tuple(x + y for x, y in zip(ka, kb))
            conv = bitset_convolve(ia, rb) if len(rb) <= len(ra) else bitset_convolve(ib, ra)
            acc[key] = acc.get(key, 0) | conv
    base = fa.base + fb.base
    blocks = []
    for key, bits in acc.items():
        line = _int_to_indices(bits) + base
        block = np.empty((line.size, k), dtype=np.int64)
        other = [i for i in range(k) if i != axis]
        for col, val in zip(other, key):
            block[:, col] = val
        block[:, axis] = line
        blocks.append(block)
    return PointSet._from_canonical(_canonical(np.concatenate(blocks)))


def _sumset_pairwise(a: PointSet, b: PointSet) -> PointSet:
    ca, cb = a.coords, b.coords
    if len(a) < len(b):
        ca, cb = cb, ca
    rows_per_chunk = max(1, _PAIRWISE_CHUNK // cb.shape[0])
    parts = []
    for start in range(0, ca.shape[0], rows_per_chunk):
        chunk = ca[start : start + rows_per_chunk]
        sums = (chunk[:, None, :] + cb[None, :, :]).reshape(-1, ca.shape[1])
        parts.append(_canonical(sums))
    arr = parts[0] if len(parts) == 1 else _canonical(np.concatenate(parts))
    return PointSet._from_canonical(arr)


def _fibre_count_bound(coords: np.ndarray, axis: int) -> int:
    """Upper bound on the number of fibres: points vs. cross-section of the bounding box."""
    if coords.shape[1] == 1:
        return 1
    other = np.delete(coords, axis, axis=1)
    cells = math.prod(int(r) + 1 for r in (other.max(axis=0) - other.min(axis=0)))
    return min(coords.shape[0], cells)


def _choose_kernel(a: PointSet, b: PointSet) -> str:
    pairs = len(a) * len(b)
    if pairs <= 64:
        return "pairwise"
    axis = _bitset_axis(a, b)
    span = int(np.ptp(a.coords[:, axis]) + np.ptp(b.coords[:, axis])) + 2
    if span > BITSET_RANGE_LIMIT:
        return "pairwise"
    fibre_pairs = _fibre_count_bound(a.coords, axis) * _fibre_count_bound(b.coords, axis)
    # A fibre pair costs a few big-int operations on span/64 words.
    bitset_cost = fibre_pairs * (8 + span // 64)
    return "bitset" if bitset_cost < pairs else "pairwise"


def sumset(a: PointSet, b: PointSet, kernel: str = "auto") -> PointSet:
    """Minkowski sum {x + y : x in a, y in b} in canonical form."""
    _check_dims(a, b)
    _require_nonempty(a, b)
    _check_range(a, b)
    if kernel == "auto":
        kernel = _choose_kernel(a, b)
    if kernel == "bitset":
        return _sumset_bitset(a, b)
    if kernel == "pairwise":
        return _sumset_pairwise(a, b)
    raise ArgumentError(f"unknown sumset kernel {kernel!r}")


def iterated_sumset(a: PointSet, h: int) -> PointSet:
    """h-fold sumset a + ... + a via h.A = floor(h/2).A + ceil(h/2).A."""
    if isinstance(h, bool) or not isinstance(h, (int, np.integer)) or h < 1:
        raise ArgumentError(f"h must be a positive integer, got {h!r}")
    _require_nonempty(a)
    memo = {1: a}

    def fold(j):
        if j not in memo:
            memo[j] = sumset(fold(j // 2), fold(j - j // 2))
        return memo[j]

    return fold(int(h))


def dilate(a: PointSet, c: int) -> PointSet:
    """Coordinate-wise scalar multiple {c*x : x in a} (not an iterated sumset)."""
    _require_nonempty(a)
    if abs(c) * int(np.abs(a.coords).max()) >= COORD_LIMIT:
        raise CapacityError("dilation leaves the 64-bit working range")
    return PointSet(a.coords * int(c), dim=a.dim)


def minus(a: PointSet) -> PointSet:
    _require_nonempty(a)
    return PointSet(-a.coords, dim=a.dim)


def difference_set(a: PointSet, b: PointSet) -> PointSet:
    """a - b = a + (-b)."""
    _check_dims(a, b)
    _require_nonempty(a, b)
    return sumset(a, minus(b))


def gcd_normalize(a: PointSet) -> tuple[PointSet, int]:
    """Divide a subset of Z containing 0 by the gcd r of its elements."""
    if a.dim != 1:
        raise DimensionError("gcd_normalize works on subsets of Z")
    if len(a) < 2:
        raise ArgumentError("gcd_normalize needs at least two elements")
    vals = a.values()
    if 0 not in vals:
        raise ArgumentError("translate the set so that it contains 0 first")
    r = reduce(math.gcd, (abs(v) for v in vals))
    if r == 0:
        raise ArgumentError("all-zero set has no gcd")
    return PointSet._from_canonical(a.coords // r), r


def convex_hull_volume(a: PointSet) -> Fraction:
    """Exact Lebesgue volume of the convex hull of the points (dim <= 4).

    Facets come from Qhull's triangulated hull; every volume is then an
    integer determinant, so the result is exact.
    """
    _require_nonempty(a)
    k = a.dim
    if k > 4:
        raise UnsupportedDimensionError("convex_hull_volume supports dim <= 4")
    pts = a.points
    if k == 1:
        return Fraction(pts[-1][0] - pts[0][0])
    if affine_rank(pts) < k:
        return Fraction(0)
    from scipy.spatial import ConvexHull

    hull = ConvexHull(a.coords.astype(float), qhull_options="Qt")
    verts = sorted({int(v) for v in hull.vertices})
    total = [sum(pts[v][i] for v in verts) for i in range(k)]
    m = len(verts)
    # Cone over each facet from the vertex centroid c = total/m; scaling by m
    # keeps every entry integral.
    acc = 0
    for facet in hull.simplices:
        rows = [[m * pts[int(v)][i] - total[i] for i in range(k)] for v in facet]
        acc += abs(int_det(rows))
    return Fraction(acc, m**k * math.factorial(k))


# ---------------------------------------------------------------- text format


def format_pointset(a: PointSet) -> str:
    lines = [f"dim {a.dim}"]
    lines.extend(" ".join(map(str, p)) for p in a.points)
    return "\n".join(lines) + "\n"


def parse_pointset(text: str) -> PointSet:
    dim = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if dim is None:
            head = line.split()
            if len(head) != 2 or head[0] != "dim":
                raise ArgumentError(f"line {lineno}: expected 'dim k' header")
            dim = int(head[1])
            if dim < 1:
                raise ArgumentError("dim must be positive")
            continue
        try:
            row = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise ArgumentError(f"line {lineno}: non-integer coordinate") from None
        if len(row) != dim:
            raise DimensionError(f"line {lineno}: expected {dim} coordinates")
        rows.append(row)
    if dim is None:
        raise ArgumentError("missing 'dim k' header")
    return PointSet(rows, dim=dim)


def read_pointset(path) -> PointSet:
    return parse_pointset(Path(path).read_text())


def write_pointset(a: PointSet, path) -> None:
    Path(path).write_text(format_pointset(a))
