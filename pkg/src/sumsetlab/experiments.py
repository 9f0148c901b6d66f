"""Batch experiments: the interval-plus-points tightness example, simplex
doubling tables, extremal search for low doubling, and empirical constants."""

from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import ArgumentError, CapacityError, InfeasibleError
from .geometry import (
    POINT_CAP,
    CoverCertificate,
    cone,
    cover_number,
    default_normal_bound,
    general_position_points,
    simplex,
)
from .inequalities import c_hat_interval, verify_bm
from .lattice import Box, PointSet, sumset
from .report import InequalityReport

TIGHTNESS_BAND = (Fraction(4, 5), Fraction(5, 4))


# ------------------------------------------------------------------ tightness


def tightness_sets(k: int, n: int, t, m: int, seed: int = 0) -> tuple[PointSet, PointSet]:
    """A = {0..m-1} e_1 and B = an interval on the e_1 axis plus k+n points in
    general position, with |A| = m and |B| = floor(m/t).

    The extra points come from ``general_position_points`` with the first
    coordinate stretched by m and the others lifted off the axis, so the
    translates A + p are pairwise disjoint and miss the axis.  n = 0 gives no
    extra points.
    """
    t = Fraction(t)
    extra = 0 if n == 0 else k + n
    b_size = math.floor(m / t)
    length = b_size - extra
    if length < 1:
        raise ArgumentError("|B| must exceed the number of extra points")
    axis = np.zeros((length, k), dtype=np.int64)
    axis[:, 0] = np.arange(length)
    a_pts = np.zeros((m, k), dtype=np.int64)
    a_pts[:, 0] = np.arange(m)
    parts = [axis]
    if extra:
        if k == 1:
            # On the line "general position" only asks for distinct points;
            # spread them beyond the interval so translates stay disjoint.
            gp = np.arange(1, extra + 1, dtype=np.int64).reshape(-1, 1) * (length + m)
        else:
            gp = general_position_points(k, extra, seed).coords.copy()
            gp[:, 0] *= m
            gp[:, 1:] += 1
        parts.append(gp)
    return PointSet(a_pts), PointSet(np.concatenate(parts))


def tightness_example(
    k: int,
    n: int,
    t,
    m: int | None = None,
    seed: int = 0,
    check_ratios: bool = True,
    min_mt=100,
    max_tn=Fraction(1, 10),
    min_n_per_k=4,
    normal_bound: int = 1,
) -> tuple[PointSet, PointSet, InequalityReport]:
    """Build the tightness example and measure |A+B| / ((1 + nt)|B|).

    The regime m >> 1/t >> n >> k is enforced as m*t >= min_mt,
    t*n <= max_tn and n >= min_n_per_k * k unless ``check_ratios`` is off.
    The report passes when the ratio lies in ``TIGHTNESS_BAND``.
    """
    t = Fraction(t)
    if k < 1 or n < 0 or not 0 < t <= 1:
        raise ArgumentError("need k >= 1, n >= 0 and 0 < t <= 1")
    if m is None:
        m = math.ceil(Fraction(min_mt) / t)
    if check_ratios:
        bad = []
        if m * t < min_mt:
            bad.append(f"m*t = {m * t} < {min_mt}")
        if t * n > Fraction(max_tn):
            bad.append(f"t*n = {t * n} > {max_tn}")
        if n < min_n_per_k * k:
            bad.append(f"n = {n} < {min_n_per_k}*k")
        if bad:
            raise ArgumentError("tightness regime not met: " + "; ".join(bad))
    a, b = tightness_sets(k, n, t, m, seed)
    size = len(sumset(a, b))
    predicted = (1 + n * t) * len(b)
    ratio = Fraction(size) / predicted
    lo, hi = TIGHTNESS_BAND
    details = {
        "|A|": len(a),
        "|B|": len(b),
        "|A+B|": size,
        "ratio": ratio,
        "band": [lo, hi],
    }
    cover = None
    if n >= 1:
        cover = cover_number(b, normal_bound)
        details["c_hat"] = c_hat_interval(size, len(a), len(b), k, n)
        details["cover_certificate"] = cover
    report = InequalityReport(
        name="tightness",
        hypothesis_values={"k": k, "n": n, "t": t, "m": m, "seed": seed},
        hypotheses_ok=cover is None or cover.count > n,
        lhs=size,
        rhs=predicted,
        passed=lo <= ratio <= hi,
        caps_used={"normal_bound": normal_bound, "check_ratios": check_ratios},
        details=details,
    )
    return a, b, report


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray([float(x) for x in xs]))
    ly = np.log(np.asarray([float(y) for y in ys]))
    return float(np.polyfit(lx, ly, 1)[0])


def tightness_slope(k: int, n: int, ts, seed: int = 0, min_mt=100) -> tuple[float, list]:
    """Slope of log c_hat against log t for the tightness family, with the per-t rows."""
    rows = []
    for t in ts:
        _, _, rep = tightness_example(k, n, t, seed=seed, check_ratios=False, min_mt=min_mt)
        rows.append((Fraction(t), rep.details["c_hat"].mid, rep))
    return loglog_slope([r[0] for r in rows], [r[1] for r in rows]), rows


# ------------------------------------------------------------- simplex table

SIMPLEX_COLUMNS = ["k", "n", "size", "sum_size", "binomial", "paths_agree", "ratio", "c_hat", "k_over_4"]


def simplex_doubling_table(k_max: int, n_max: int, cap: int = POINT_CAP) -> list[dict]:
    """|S_n + S_n| by explicit sumset and by C(2n+k, k), with c_hat = n(1 - ratio/2^k).

    Rows are ordered by (k, n) for 1 <= k <= k_max, 1 <= n <= n_max.
    """
    if k_max < 1 or n_max < 1:
        raise ArgumentError("k_max and n_max must be positive")
    if math.comb(2 * n_max + k_max, k_max) > cap:
        raise CapacityError("largest simplex sumset exceeds the point cap")
    rows = []
    for k in range(1, k_max + 1):
        for n in range(1, n_max + 1):
            s = simplex(k, n, cap)
            doubled = sumset(s, s)
            binom = math.comb(2 * n + k, k)
            agree = len(doubled) == binom and doubled == simplex(k, 2 * n, cap)
            ratio = Fraction(len(doubled), len(s))
            rows.append(
                {
                    "k": k,
                    "n": n,
                    "size": len(s),
                    "sum_size": len(doubled),
                    "binomial": binom,
                    "paths_agree": agree,
                    "ratio": ratio,
                    "c_hat": n * (1 - ratio / 2**k),
                    "k_over_4": Fraction(k, 4),
                }
            )
    return rows


# ------------------------------------------------------------ extremal search


def doubling(a: PointSet) -> Fraction:
    return Fraction(len(sumset(a, a)), len(a))


@dataclass(frozen=True)
class FrontierRecord:
    """A set avoiding n parallel hyperplanes together with its doubling ratio."""

    k: int
    n: int
    points: PointSet
    ratio: Fraction
    certificate: CoverCertificate
    params: dict = field(default_factory=dict, compare=False)

    def verify(self) -> "FrontierRecord":
        """Recompute the cover count and doubling; raise if anything disagrees."""
        if self.points.dim != self.k:
            raise ValueError("record dimension does not match its points")
        cert = cover_number(self.points, self.certificate.normal_bound)
        if cert.count != self.certificate.count or not self.certificate.covers(self.points):
            raise ValueError("stored cover certificate does not reproduce")
        if cert.count <= self.n:
            raise ValueError(f"set is covered by {cert.count} <= n hyperplanes")
        if doubling(self.points) != self.ratio:
            raise ValueError("stored doubling ratio does not reproduce")
        return self

    def to_json(self) -> dict:
        return {
            "kind": "frontier_record",
            "k": self.k,
            "n": self.n,
            "size": len(self.points),
            "points": [list(p) for p in self.points.points],
            "ratio": str(self.ratio),
            "certificate": self.certificate.to_json(),
            "params": dict(self.params),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FrontierRecord":
        rec = cls(
            int(data["k"]),
            int(data["n"]),
            PointSet([tuple(p) for p in data["points"]], dim=int(data["k"])),
            Fraction(data["ratio"]),
            CoverCertificate.from_json(data["certificate"]),
            dict(data.get("params", {})),
        )
        return rec.verify()


class FrontierStore:
    """Append-only JSON-lines file of frontier records.

    ``merge`` appends a record only when it beats the best stored ratio for
    the same (k, n, size); loading re-verifies every line.
    """

    def __init__(self, path):
        self.path = Path(path)

    def load(self) -> list[FrontierRecord]:
        if not self.path.exists():
            return []
        out = []
        for line in self.path.read_text().splitlines():
            if line.strip():
                out.append(FrontierRecord.from_json(json.loads(line)))
        return out

    def best(self) -> dict:
        table = {}
        for rec in self.load():
            key = (rec.k, rec.n, len(rec.points))
            if key not in table or rec.ratio < table[key].ratio:
                table[key] = rec
        return table

    def merge(self, record: FrontierRecord) -> bool:
        record.verify()
        key = (record.k, record.n, len(record.points))
        current = self.best().get(key)
        if current is not None and current.ratio <= record.ratio:
            return False
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(record.to_json(), sort_keys=True) + "\n")
        return True


DEFAULT_BUDGET = {"exhaustive": 3_000_000, "local": 2000}


def _min_feasible_size(k: int, n: int) -> int:
    # In Z^1 the cover count is |A|.  For k >= 2 any n+1 points lie on n
    # parallel lines (take the direction through two of them).
    return n + 1 if k == 1 else n + 2


def _record(k, n, pts, bound, params) -> FrontierRecord | None:
    a = PointSet(pts, dim=k)
    cert = cover_number(a, bound)
    if cert.count <= n:
        return None
    return FrontierRecord(k, n, a, doubling(a), cert, params)


def _exhaustive(n: int, size: int, budget: int, normal_bound) -> FrontierRecord:
    side = 4
    grid = [(x, y) for x in range(side + 1) for y in range(side + 1)]
    total = math.comb(len(grid), size)
    if total > budget:
        raise CapacityError(f"exhaustive search needs {total} subsets, budget is {budget}")
    base = 2 * side + 1
    code = [x * base + y for x, y in grid]
    best, best_ratio = None, None
    for combo in combinations(range(len(grid)), size):
        # Translates are equivalent; keep only sets touching both axes.
        if min(grid[i][0] for i in combo) or min(grid[i][1] for i in combo):
            continue
        sums = {code[i] + code[j] for ii, i in enumerate(combo) for j in combo[ii:]}
        ratio = Fraction(len(sums), size)
        if best_ratio is not None and ratio >= best_ratio:
            continue
        pts = [grid[i] for i in combo]
        bound = normal_bound if normal_bound is not None else default_normal_bound(PointSet(pts))
        rec = _record(2, n, pts, bound, {})
        if rec is not None:
            best, best_ratio = rec, ratio
    return best


def _seed_sets(k: int, size: int, rng: random.Random) -> list:
    """Starting sets: simplex prefix, box slice, random points."""
    order = 0
    while math.comb(order + k, k) < size:
        order += 1
    simp = sorted(simplex(k, order).points, key=lambda p: (sum(p), p))[:size]
    side = 1
    while (side + 1) ** k < size:
        side += 1
    box = list(Box((side,) * k).points().points)[:size]
    span = max(side, order) + 1
    cells = list(Box((span,) * k).points().points)
    rand = rng.sample(cells, size)
    return [("simplex", simp), ("box-slice", box), ("random", rand)]


def _local(k, n, size, budget, seed, normal_bound, restarts) -> FrontierRecord | None:
    rng = random.Random(seed)
    best = None
    starts = _seed_sets(k, size, rng)
    while len(starts) < restarts:
        starts += _seed_sets(k, size, rng)[2:]
    for label, start in starts[:restarts]:
        cur = [tuple(p) for p in start]
        bound = normal_bound if normal_bound is not None else default_normal_bound(PointSet(cur))
        rec = _record(k, n, cur, bound, {})
        if rec is None:
            continue
        for _ in range(budget):
            pts = rec.points.points
            lo = np.asarray(rec.points.min_corner()) - 1
            hi = np.asarray(rec.points.max_corner()) + 1
            i = rng.randrange(size)
            new = tuple(rng.randint(int(l), int(h)) for l, h in zip(lo, hi))
            if new in pts:
                continue
            cand = PointSet([p for j, p in enumerate(pts) if j != i] + [new], dim=k)
            if doubling(cand) >= rec.ratio:
                continue
            b = normal_bound if normal_bound is not None else default_normal_bound(cand)
            nxt = _record(k, n, cand.points, b, {})
            if nxt is not None:
                rec = nxt
        if best is None or (rec.ratio, rec.points.points) < (best.ratio, best.points.points):
            best = rec
    return best


def extremal_search(
    k: int,
    n: int,
    size: int,
    budget: int | None = None,
    strategy: str = "local",
    seed: int = 0,
    normal_bound: int | None = None,
    restarts: int = 3,
    store: FrontierStore | None = None,
) -> FrontierRecord:
    """Lowest-doubling set of the given size whose cover count exceeds n.

    ``exhaustive`` scans all subsets of [0,4]^2 (k = 2, size <= 9, at most
    ``budget`` subsets) and returns the lexicographically least minimiser.
    ``local`` relocates one point at a time inside the bounding box grown by
    one, accepting strict improvements that keep the cover constraint;
    ``budget`` is the number of proposals per restart.
    """
    if k < 1 or n < 1 or size < 1:
        raise ArgumentError("need k, n, size >= 1")
    if budget is None:
        budget = DEFAULT_BUDGET.get(strategy, 0)
    params = {"strategy": strategy, "seed": seed, "budget": budget, "normal_bound": normal_bound}
    if size < _min_feasible_size(k, n):
        raise InfeasibleError(f"every set of {size} points in Z^{k} lies on {n} parallel hyperplanes")
    if strategy == "exhaustive":
        if k != 2 or size > 9:
            raise ArgumentError("exhaustive search is limited to k = 2 and size <= 9")
        rec = _exhaustive(n, size, budget, normal_bound)
    elif strategy == "local":
        if restarts < 1:
            raise ArgumentError("need at least one restart")
        params["restarts"] = restarts
        rec = _local(k, n, size, budget, seed, normal_bound, restarts)
    else:
        raise ArgumentError(f"unknown strategy {strategy!r}")
    if rec is None:
        raise InfeasibleError("no feasible set found")
    rec = FrontierRecord(rec.k, rec.n, rec.points, rec.ratio, rec.certificate, params)
    if store is not None:
        store.merge(rec)
    return rec


# ---------------------------------------------------------- constant estimation

FAMILIES = ("box", "simplex", "cone", "tightness", "random")
ESTIMATE_COLUMNS = [
    "family", "k", "n", "t", "seed", "samples", "normal_bound",
    "size_A", "size_B", "size_AB", "cover_count", "hypotheses_ok",
    "c_hat_lo", "c_hat_hi", "c_hat",
]


@dataclass
class ExperimentGrid:
    ks: tuple
    ns: tuple
    ts: tuple
    family: str
    seed: int = 0
    samples: int = 1
    normal_bound: int = 2
    cap_points: int = POINT_CAP
    threads: int = 1

    def __post_init__(self):
        if not self.ks or not self.ns or not self.ts:
            raise ArgumentError("grid ranges must be non-empty")
        if self.family not in FAMILIES:
            raise ArgumentError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.samples < 1:
            raise ArgumentError("samples must be positive")
        self.ts = tuple(Fraction(t) for t in self.ts)

    def cells(self):
        for k in self.ks:
            for n in self.ns:
                for t in self.ts:
                    yield k, n, t


def _smallest_at_least(make, target, start=0):
    j = start
    while len(make(j)) < target:
        j += 1
    return make(j)


def family_pair(family: str, k: int, n: int, t, seed: int, cap: int) -> tuple[PointSet, PointSet]:
    """(A, B) for one grid cell, with |A| >= t|B| and B spread over n+1 hyperplanes or more."""
    t = Fraction(t)
    if family == "box":
        b = Box((n,) * k).points(cap)
        a = _smallest_at_least(lambda j: Box((j,) * k).points(cap), t * len(b))
    elif family == "simplex":
        b = simplex(k, n, cap)
        a = _smallest_at_least(lambda j: simplex(k, j, cap), t * len(b))
    elif family == "cone":
        b = cone(k, n, cap)
        a = _smallest_at_least(lambda j: cone(k, j, cap), t * len(b))
    elif family == "tightness":
        a, b, _ = tightness_example(k, n, t, seed=seed, check_ratios=False)
    elif family == "random":
        rng = np.random.default_rng(seed)
        side = 2 * n + 1
        cells = Box((side,) * k).points(cap).coords
        keep = rng.random(len(cells)) < 0.5
        keep[0] = True
        b = PointSet(cells[keep])
        want = max(1, math.ceil(t * len(b)))
        a_side = 0
        while (a_side + 1) ** k < want:
            a_side += 1
        a_cells = Box((a_side,) * k).points(cap).coords
        a = PointSet(a_cells[rng.permutation(len(a_cells))[:want]])
    else:
        raise ArgumentError(f"unknown family {family!r}")
    if len(a) + len(b) > cap:
        raise CapacityError("family instance exceeds the point cap")
    return a, b


def _run_cell(args) -> dict:
    family, k, n, t, seed, samples, bound, cap = args
    best = None
    for s in range(samples):
        a, b = family_pair(family, k, n, t, seed + s, cap)
        rep = verify_bm(a, b, n, 0, normal_bound=bound)
        c = rep.details["c_hat"]
        if best is None or c.hi > best[0].hi:
            best = (c, rep)
    c, rep = best
    return {
        "family": family,
        "k": k,
        "n": n,
        "t": str(t),
        "seed": seed,
        "samples": samples,
        "normal_bound": bound,
        "size_A": rep.details["|A|"],
        "size_B": rep.details["|B|"],
        "size_AB": rep.details["|A+B|"],
        "cover_count": rep.hypothesis_values["cover_count"],
        "hypotheses_ok": rep.hypotheses_ok,
        "c_hat_lo": str(c.lo),
        "c_hat_hi": str(c.hi),
        "c_hat": f"{float(c.mid):.6f}",
    }


def constant_estimation(grid: ExperimentGrid) -> list[dict]:
    """Largest observed c_hat per (k, n, t) cell over ``grid.samples`` instances.

    Rows follow the grid order (k, then n, then t) regardless of ``threads``.
    """
    tasks = [
        (grid.family, k, n, t, grid.seed, grid.samples, grid.normal_bound, grid.cap_points)
        for k, n, t in grid.cells()
    ]
    if grid.family == "cone" and min(grid.ks) < 2:
        raise ArgumentError("the cone family needs k >= 2")
    if grid.threads > 1:
        with ProcessPoolExecutor(max_workers=grid.threads) as pool:
            return list(pool.map(_run_cell, tasks))
    return [_run_cell(t) for t in tasks]


def rows_to_csv(rows: list[dict], columns: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _csv_cell(row[c]) for c in columns})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, Fraction):
        return str(v)
    return v
