"""Hyperplane covers, general position, and the standard extremal families."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import ArgumentError, CapacityError, EmptyInputError, GenerationError
from .exact import affine_rank, int_det
from .lattice import COORD_LIMIT, PointSet, iterated_sumset

POINT_CAP = 10**7
_LEVEL_CHUNK = 1 << 23


@dataclass(frozen=True)
class CoverCertificate:
    """Parallel hyperplanes <normal, x> = level, one per level, covering a set."""

    normal: tuple
    levels: tuple
    normal_bound: int

    @property
    def count(self) -> int:
        return len(self.levels)

    def covers(self, b: PointSet) -> bool:
        lv = b.coords @ np.asarray(self.normal, dtype=np.int64)
        return set(lv.tolist()) <= set(self.levels)

    def to_json(self) -> dict:
        return {
            "kind": "cover_certificate",
            "normal": list(self.normal),
            "levels": list(self.levels),
            "count": self.count,
            "normal_bound": self.normal_bound,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoverCertificate":
        cert = cls(tuple(data["normal"]), tuple(data["levels"]), int(data["normal_bound"]))
        if data.get("count", cert.count) != cert.count:
            raise ValueError("certificate count disagrees with its levels")
        return cert


@lru_cache(maxsize=64)
def primitive_normals(k: int, bound: int) -> np.ndarray:
    """Primitive vectors in [-bound, bound]^k with positive first non-zero entry, lex order."""
    if k < 1 or bound < 1:
        raise ArgumentError("need k >= 1 and bound >= 1")
    count = (2 * bound + 1) ** k
    if count > POINT_CAP:
        raise CapacityError(f"{count} candidate normals exceed the cap {POINT_CAP}")
    axes = [np.arange(-bound, bound + 1, dtype=np.int64)] * k
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    nz = grid != 0
    first = np.argmax(nz, axis=1)
    lead = grid[np.arange(grid.shape[0]), first]
    keep = nz.any(axis=1) & (lead > 0)
    grid = grid[keep]
    g = np.gcd.reduce(np.abs(grid), axis=1)
    out = grid[g == 1]
    out.flags.writeable = False
    return out


def default_normal_bound(b: PointSet) -> int:
    return max(1, 2 * b.diameter())


def cover_number(b: PointSet, normal_bound: int | None = None) -> CoverCertificate:
    """Fewest parallel hyperplanes covering b, over primitive normals in a bounded box.

    The minimum is exact within [-normal_bound, normal_bound]^k; ties go to
    the lexicographically least normal (sign fixed by a positive leading
    entry).  The bound is part of the returned claim.
    """
    if len(b) == 0:
        raise EmptyInputError("cover_number needs a non-empty set")
    bound = default_normal_bound(b) if normal_bound is None else int(normal_bound)
    normals = primitive_normals(b.dim, bound)
    pts = b.coords - b.coords.min(axis=0)
    if bound * int(pts.max(initial=0)) * b.dim >= COORD_LIMIT:
        raise CapacityError("hyperplane levels leave the 64-bit working range")
    best_count, best_idx = None, None
    step = max(1, _LEVEL_CHUNK // len(b))
    for start in range(0, normals.shape[0], step):
        chunk = normals[start : start + step]
        lv = np.sort(pts @ chunk.T, axis=0)
        counts = 1 + np.count_nonzero(np.diff(lv, axis=0), axis=0)
        i = int(np.argmin(counts))
        if best_count is None or counts[i] < best_count:
            best_count, best_idx = int(counts[i]), start + i
        if best_count == 1:
            break
    normal = normals[best_idx]
    levels = np.unique(b.coords @ normal)
    cert = CoverCertificate(tuple(normal.tolist()), tuple(levels.tolist()), bound)
    if not cert.covers(b):
        raise AssertionError("cover certificate does not cover the set")
    return cert


def scaled_cover_lower_bound(b: PointSet, ell: int, normal_bound: int | None = None) -> int:
    """Cover count of ell.B, checked against ell*(count(B) - 1) + 1.

    Both counts use the same normal family, which is what makes the
    comparison valid: on each normal the levels of ell.B are the ell-fold
    sumset of the levels of B.
    """
    if ell < 1:
        raise ArgumentError("ell must be positive")
    bound = default_normal_bound(b) if normal_bound is None else int(normal_bound)
    base = cover_number(b, bound).count
    scaled = cover_number(iterated_sumset(b, ell), bound).count
    if scaled < ell * (base - 1) + 1:
        raise AssertionError(
            f"cover count {scaled} of {ell}.B below {ell * (base - 1) + 1}"
        )
    return scaled


def simplex(k: int, n: int, cap: int = POINT_CAP) -> PointSet:
    """The discrete simplex S_n = {x in [0,n]^k : sum x_i <= n}."""
    if k < 1 or n < 0:
        raise ArgumentError("need k >= 1 and n >= 0")
    size = math.comb(n + k, k)
    if size > cap:
        raise CapacityError(f"S_{n} in Z^{k} has {size} points, cap is {cap}")
    pts = np.zeros((1, 0), dtype=np.int64)
    budget = np.array([n], dtype=np.int64)
    for _ in range(k):
        reps = budget + 1
        prefix = np.repeat(pts, reps, axis=0)
        nxt = np.concatenate([np.arange(r) for r in reps.tolist()])
        pts = np.column_stack([prefix, nxt])
        budget = np.repeat(budget, reps) - nxt
    return PointSet(pts)


def cone(k: int, n: int, cap: int = POINT_CAP) -> PointSet:
    """Pyramid {x >= 0 : x_1 + ... + x_{k-1} <= x_k <= n} over a (k-1)-simplex."""
    if k < 2:
        raise ArgumentError("a cone needs k >= 2")
    layers = []
    for h in range(n + 1):
        base = simplex(k - 1, h, cap)
        layers.append(np.column_stack([base.coords, np.full(len(base), h)]))
        if sum(map(len, layers)) > cap:
            raise CapacityError("cone exceeds the point cap")
    return PointSet(np.concatenate(layers))


def in_general_position(points, k: int) -> bool:
    """No k+1 of the points on a common affine hyperplane (and fewer are independent)."""
    pts = [tuple(p) for p in points]
    if len(set(pts)) != len(pts):
        return False
    r = min(len(pts), k + 1)
    for sub in combinations(pts, r):
        if affine_rank(sub) != r - 1:
            return False
    return True


def general_position_points(k: int, count: int, seed: int, max_tries: int = 1000) -> PointSet:
    """``count`` points of Z^k with no k+1 on a hyperplane, deterministic in ``seed``.

    Coordinates are uniform in [0, 10*count^2); every candidate is checked
    with exact determinants before it is accepted.
    """
    if k < 2:
        raise ArgumentError("general position is only meaningful for k >= 2")
    if count < 0:
        raise ArgumentError("count must be non-negative")
    rng = random.Random(seed)
    side = 10 * max(count, 1) ** 2
    chosen: list = []
    for _ in range(count):
        for _attempt in range(max_tries):
            p = tuple(rng.randrange(side) for _ in range(k))
            if p in chosen:
                continue
            if _extends_general_position(chosen, p, k):
                chosen.append(p)
                break
        else:
            raise GenerationError(f"no point in general position after {max_tries} tries")
    return PointSet(chosen, dim=k)


def _extends_general_position(chosen, p, k) -> bool:
    # Subsets of size < k+1 that contain p must stay affinely independent;
    # size k+1 subsets must span. Both reduce to a non-zero k x k minor for
    # full subsets and a rank test for short ones.
    if len(chosen) < k:
        return affine_rank(chosen + [p]) == len(chosen)
    for sub in combinations(chosen, k):
        rows = [[a - b for a, b in zip(q, p)] for q in sub]
        if int_det(rows) == 0:
            return False
    return True

