"""Generalised arithmetic progressions and the additive hull gap_n^k(B).

A k-GAP is stored as a box prod_i [0, n_i], integer coefficients c_i and an
offset; its image is offset + {sum_i c_i x_i : 0 <= x_i <= n_i}.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations, product

import numpy as np

from .errors import ArgumentError, CapacityError, DimensionError, NoCoverError
from .lattice import COORD_LIMIT, PointSet

ENUM_CAP = 10**7
EXACT_MAX_SIZE = 12
EXACT_MAX_DIAMETER = 200


@dataclass(frozen=True)
class Gap:
    sides: tuple
    coeffs: tuple
    offset: int = 0

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(sides) != len(coeffs):
            raise DimensionError("sides and coeffs must have the same length")
        if any(s < 0 for s in sides):
            raise ArgumentError("GAP sides must be non-negative")
        object.__setattr__(self, "sides", sides)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def symmetric(cls, sides, coeffs) -> "Gap":
        """GAP on the centred box prod [-n_i/2, n_i/2]; all sides must be even."""
        sides = tuple(int(s) for s in sides)
        if any(s % 2 for s in sides):
            raise ArgumentError("symmetric GAPs need even sides")
        offset = -sum(c * s // 2 for c, s in zip(coeffs, sides))
        return cls(sides, tuple(coeffs), offset)

    @property
    def k(self) -> int:
        return len(self.sides)

    ambient_dim = k

    @property
    def box_count(self) -> int:
        return math.prod(s + 1 for s in self.sides)

    def translate(self, t: int) -> "Gap":
        return Gap(self.sides, self.coeffs, self.offset + t)

    def multiple(self, h: int) -> "Gap":
        """The h-fold sumset h.P, itself a GAP on the box hC."""
        if h < 1:
            raise ArgumentError("h must be positive")
        return Gap(tuple(h * s for s in self.sides), self.coeffs, h * self.offset)

    def to_record(self) -> str:
        join = lambda xs: ",".join(map(str, xs))  # noqa: E731
        return f"gap k={self.k} sides={join(self.sides)} coeffs={join(self.coeffs)} offset={self.offset}"

    @classmethod
    def from_record(cls, text: str) -> "Gap":
        m = re.fullmatch(
            r"\s*gap\s+k=(\d+)\s+sides=([-\d,]*)\s+coeffs=([-\d,]*)\s+offset=(-?\d+)\s*", text
        )
        if not m:
            raise ArgumentError(f"malformed gap record: {text!r}")
        split = lambda s: tuple(int(x) for x in s.split(",")) if s else ()  # noqa: E731
        g = cls(split(m.group(2)), split(m.group(3)), int(m.group(4)))
        if g.k != int(m.group(1)):
            raise ArgumentError("gap record: k does not match the number of sides")
        return g

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "sides": list(self.sides),
            "coeffs": list(self.coeffs),
            "offset": self.offset,
            "record": self.to_record(),
        }


def _check_magnitude(sides, coeffs, offset) -> None:
    bound = abs(offset) + sum(abs(c) * s for c, s in zip(coeffs, sides))
    if bound >= COORD_LIMIT:
        raise CapacityError("GAP values leave the 64-bit working range")


def _image_values(sides, coeffs, offset, cap) -> np.ndarray:
    count = math.prod(s + 1 for s in sides)
    if count > cap:
        raise CapacityError(f"box has {count} lattice points, cap is {cap}")
    _check_magnitude(sides, coeffs, offset)
    vals = np.array([offset], dtype=np.int64)
    for s, c in zip(sides, coeffs):
        vals = (vals[:, None] + c * np.arange(s + 1, dtype=np.int64)[None, :]).ravel()
    return vals


def enumerate_gap(g: Gap, cap: int = ENUM_CAP) -> PointSet:
    """The image offset + phi(C cap Z^k) as a subset of Z."""
    return PointSet(_image_values(g.sides, g.coeffs, g.offset, cap).reshape(-1, 1))


def scaled_sides(g: Gap, t) -> tuple:
    t = Fraction(t)
    if t <= 0:
        raise ArgumentError("t must be positive")
    return tuple(math.floor(t * s) for s in g.sides)


def _injective_closed_form(sides, coeffs) -> bool:
    """phi injective on prod [0, T_i] for k <= 2, via the primitive kernel vector."""
    active = [(s, c) for s, c in zip(sides, coeffs) if s > 0]
    if not active:
        return True
    if len(active) == 1:
        return active[0][1] != 0
    (t1, c1), (t2, c2) = active
    g = math.gcd(c1, c2)
    if g == 0:
        return False
    # Kernel of (c1, c2) is Z.(c2/g, -c1/g); it misses [-T1,T1]x[-T2,T2]\{0}
    # iff its generator does.
    return abs(c2 // g) > t1 or abs(c1 // g) > t2


def is_t_proper(g: Gap, t=1, cap: int = ENUM_CAP) -> bool:
    """Whether phi is injective on the lattice points of tC, C anchored at 0.

    GAPs with at most two non-degenerate sides are decided from the kernel
    lattice of phi; higher ranks by collision detection over the box.
    """
    T = scaled_sides(g, t)
    if sum(1 for s in T if s > 0) <= 2:
        return _injective_closed_form(T, g.coeffs)
    return is_injective_by_enumeration(T, g.coeffs, cap)


def is_injective_by_enumeration(sides, coeffs, cap: int = ENUM_CAP) -> bool:
    vals = _image_values(sides, coeffs, 0, cap)
    return np.unique(vals).size == vals.size


def is_n_full(g: Gap, n: int) -> bool:
    return min(g.sides, default=n) >= n


def scale(g: Gap, num: int, den: int) -> Gap:
    """Rescale the box: n_i -> floor(n_i * num / den); coefficients and offset kept."""
    if num < 1 or den < 1:
        raise ArgumentError("scale factors must be positive integers")
    return Gap(tuple(s * num // den for s in g.sides), g.coeffs, g.offset)


def is_separated(x: PointSet, g: Gap, cap: int = ENUM_CAP) -> bool:
    """True iff no difference of distinct elements of x lies in P u -P."""
    if x.dim != 1:
        raise DimensionError("separation is checked for subsets of Z")
    image = _image_values(g.sides, g.coeffs, g.offset, cap)
    forbidden = set(image.tolist()) | set((-image).tolist())
    vals = x.values()
    return not any(b - a in forbidden for a, b in combinations(vals, 2))


# ---------------------------------------------------------------- additive hull


@dataclass(frozen=True)
class GapHullResult:
    x_set: PointSet
    gap: Gap
    total_size: int
    status: str  # "exact-optimal" | "certified-upper-bound"

    def to_json(self) -> dict:
        return {
            "kind": "gap_hull",
            "x_set": list(self.x_set.values()),
            "gap": self.gap.to_json(),
            "total_size": self.total_size,
            "status": self.status,
        }


def _ap_mask(c: int, s: int) -> int:
    m = 0
    for i in range(s + 1):
        m |= 1 << (c * i)
    return m


def _gap_mask(coeffs, sides) -> int:
    mask = 1
    for c, s in zip(coeffs, sides):
        ap = _ap_mask(c, s)
        acc = 0
        for j in range(ap.bit_length()):
            if ap >> j & 1:
                acc |= mask << j
        mask = acc
    return mask


def _bits(mask: int) -> list:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _canonical_params(coeffs, sides, k) -> tuple:
    pad = k - len(coeffs)
    return (0,) * pad + tuple(coeffs), (0,) * pad + tuple(sides)


@lru_cache(maxsize=256)
def _exact_family(steps: tuple, diameter: int, k: int) -> tuple:
    """Proper GAP images (min 0) with coefficients from ``steps`` and c_i n_i <= diameter."""
    fam = []
    for j in range(1, k + 1):
        for coeffs in combinations(steps, j):
            ranges = [range(1, diameter // c + 1) for c in coeffs]
            for sides in product(*ranges):
                mask = _gap_mask(coeffs, sides)
                size = mask.bit_count()
                if size != math.prod(s + 1 for s in sides):
                    continue  # not 1-proper
                fam.append((size, coeffs, sides, mask))
    fam.sort(key=lambda e: (e[0],) + _canonical_params(e[1], e[2], k))
    return tuple(fam)


def _best_translates(bmask: int, pmask: int, pelems: list, n: int, limit: int):
    """Cheapest X with |X| <= n and b subset of X + P, searched exhaustively.

    Bit j of ``bmask``/``pmask`` stands for value j; translates are kept in a
    frame shifted by max(P) so that every candidate index is non-negative.
    Each new translate must cover the smallest uncovered element of b, which
    loses nothing: a translate covering no element of b can be dropped.
    Returns (size, sorted X) minimising (size, X), or None if nothing fits
    within ``limit``.
    """
    shift = pelems[-1]
    target = bmask << shift
    best = None

    def go(union, xs):
        nonlocal best
        size = union.bit_count()
        if size > limit or (best is not None and size > best[0]):
            return
        missing = target & ~union
        if not missing:
            cand = (size, tuple(sorted(xs)))
            if best is None or cand < best:
                best = cand
            return
        if len(xs) == n:
            return
        u = (missing & -missing).bit_length() - 1
        for p in pelems:
            x = u - p
            go(union | (pmask << x), xs + [x - shift])

    go(0, [])
    return best


def _positive_differences(vals) -> Counter:
    return Counter(b - a for a, b in combinations(vals, 2))


def _exact_steps(vals) -> tuple:
    diffs = set(_positive_differences(vals))
    steps = {d for d in range(1, max(diffs) + 1) if any(e % d == 0 for e in diffs)}
    return tuple(sorted(steps))


def _hull_exact(vals: list, n: int, k: int):
    bmask = sum(1 << v for v in vals)
    diameter = vals[-1]
    best = None  # (size, coeffs, sides, X)
    for size, coeffs, sides, mask in _exact_family(_exact_steps(vals), diameter, k):
        if best is not None and size > best[0]:
            break
        limit = best[0] if best is not None else diameter + 1
        found = _best_translates(bmask, mask, _bits(mask), n, limit)
        if found is None:
            continue
        cc, ss = _canonical_params(coeffs, sides, k)
        cand = (found[0], cc, ss, found[1])
        if best is None or cand < best:
            best = cand
    return best


def _cluster(vals: list, parts: int) -> list:
    """Split sorted values into at most ``parts`` groups at the widest gaps."""
    if parts <= 1 or len(vals) <= 1:
        return [vals]
    gaps = sorted(range(1, len(vals)), key=lambda i: (-(vals[i] - vals[i - 1]), i))
    cuts = sorted(gaps[: parts - 1])
    bounds = [0] + cuts + [len(vals)]
    return [vals[a:b] for a, b in zip(bounds, bounds[1:])]


def _min_sides(groups, coeffs, diameter):
    """Smallest box (by image size) making every group coverable from its minimum."""
    c_first, rest = coeffs[0], coeffs[1:]
    best = None
    ranges = [range(0, diameter // c + 1) for c in rest]
    for tail in product(*ranges):
        tail_vals = [0]
        for c, s in zip(rest, tail):
            tail_vals = [t + c * i for t in tail_vals for i in range(s + 1)]
        need = 0
        for g in groups:
            for y in g:
                d = y - g[0]
                opts = [(d - t) // c_first for t in tail_vals if d >= t and (d - t) % c_first == 0]
                if not opts:
                    break
                need = max(need, min(opts))
            else:
                continue
            break
        else:
            sides = (need,) + tuple(tail)
            mask = _gap_mask(coeffs, sides)
            if mask.bit_count() != math.prod(s + 1 for s in sides):
                continue
            cand = (mask.bit_count(), sides)
            if best is None or cand < best:
                best = cand
    return None if best is None else best[1]


def _hull_heuristic(vals: list, n: int, k: int):
    diameter = vals[-1]
    diffs = _positive_differences(vals)
    ranked = sorted(diffs, key=lambda d: (-diffs[d], d))[:4]
    steps = sorted(set(ranked) | {reduce(math.gcd, diffs)})
    groups = _cluster(vals, n)
    xs = tuple(g[0] for g in groups)
    cands = [((1,), (diameter,), (0,))]
    for j in range(1, min(k, 2) + 1):
        for coeffs in combinations(steps, j):
            sides = _min_sides(groups, coeffs, diameter)
            if sides is not None:
                cands.append((coeffs, sides, xs))
    best = None
    for coeffs, sides, x in cands:
        mask = _gap_mask(coeffs, sides)
        union = 0
        for xv in x:
            union |= mask << xv
        cc, ss = _canonical_params(coeffs, sides, k)
        cand = (union.bit_count(), cc, ss, tuple(x))
        if best is None or cand < best:
            best = cand
    return best


def _certify(b: PointSet, res: GapHullResult, n: int) -> GapHullResult:
    cover = set()
    image = enumerate_gap(res.gap).values()
    for x in res.x_set.values():
        cover.update(x + p for p in image)
    if not set(b.values()) <= cover:
        raise AssertionError("hull does not contain b")
    if len(res.x_set) > n or len(cover) != res.total_size:
        raise AssertionError("hull certificate is inconsistent")
    if not is_t_proper(res.gap, 1):
        raise AssertionError("hull GAP is not proper")
    return res


def gap_hull(
    b: PointSet,
    n: int,
    k: int,
    mode: str = "exact",
    max_size: int = EXACT_MAX_SIZE,
    max_diameter: int = EXACT_MAX_DIAMETER,
) -> GapHullResult:
    """Smallest X + P containing b with |X| <= n and P a proper k-GAP.

    ``exact`` searches every GAP whose coefficients divide a difference of b
    and whose generators each span at most diam(b); the search is
    exponential and capped by ``max_size``/``max_diameter``.  ``heuristic``
    returns some valid cover guided by the most frequent differences.
    Ties between equal sizes go to the lexicographically least
    (coeffs, sides, X).
    """
    if b.dim != 1:
        raise DimensionError("gap_hull works on subsets of Z")
    if len(b) == 0:
        raise ArgumentError("gap_hull needs a non-empty set")
    if n < 1 or k < 0:
        raise ArgumentError("need n >= 1 and k >= 0")
    if mode not in ("exact", "heuristic"):
        raise ArgumentError(f"unknown mode {mode!r}")
    raw = b.values()
    base = raw[0]
    vals = [v - base for v in raw]
    status = "exact-optimal" if mode == "exact" else "certified-upper-bound"

    if len(vals) <= n:
        gap = Gap((0,) * k, (0,) * k, 0)
        return _certify(b, GapHullResult(b, gap, len(vals), "exact-optimal"), n)
    if k == 0:
        raise NoCoverError(f"{len(vals)} points cannot be covered by {n} single points")

    if mode == "exact":
        if len(vals) > max_size or vals[-1] > max_diameter:
            raise CapacityError(
                f"exact gap_hull is capped at |b| <= {max_size}, diameter <= {max_diameter}"
            )
        size, coeffs, sides, xs = _hull_exact(vals, n, k)
    else:
        size, coeffs, sides, xs = _hull_heuristic(vals, n, k)
    res = GapHullResult(
        PointSet([x + base for x in xs], dim=1), Gap(sides, coeffs, 0), size, status
    )
    return _certify(b, res, n)
