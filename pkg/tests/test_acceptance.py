"""Acceptance suite: one test per headline criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible in ``pytest -v``
output) and then asserts, so a failing criterion shows up red.
"""

import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from oracles import hull_size_oracle, minimal_h, naive_sumset, random_root_weights
from sumsetlab.errors import NoCoverError
from sumsetlab.experiments import (
    FrontierRecord,
    FrontierStore,
    extremal_search,
    simplex_doubling_table,
    tightness_example,
    tightness_slope,
)
from sumsetlab.gap import enumerate_gap, gap_hull, is_t_proper
from sumsetlab.inequalities import (
    verify_ap_containment,
    verify_lev,
    verify_plunnecke,
    verify_superadditivity,
)
from sumsetlab.lattice import PointSet, sumset
from sumsetlab.transforms import compress, cube_summand_identity_check, ruzsa_cover
from test_inequalities import ap_instances, lev_instances


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail

    return emit


def _random_points(rng, dim, size, lo=-20, hi=20):
    return [tuple(rng.randint(lo, hi) for _ in range(dim)) for _ in range(size)]


def test_sumset_oracle_equivalence(verdict):
    rng = random.Random(1)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        dim = rng.randint(1, 3)
        a = _random_points(rng, dim, rng.randint(1, 50))
        b = _random_points(rng, dim, rng.randint(1, 50))
        want = naive_sumset(a, b)
        for kernel in ("auto", "bitset", "pairwise"):
            if set(sumset(PointSet(a), PointSet(b), kernel=kernel).points) != want:
                bad += 1
    elapsed = time.perf_counter() - start
    verdict("sumset oracle equivalence", bad == 0 and elapsed < 60, f"1000 pairs x 3 kernels, {bad} mismatches, {elapsed:.1f}s (< 60s)")


def test_one_dimensional_floor(verdict):
    subsets = [PointSet(list(s)) for r in range(1, 10) for s in combinations(range(9), r)]
    bad = 0
    for a in subsets:
        for b in subsets:
            if len(sumset(a, b)) < len(a) + len(b) - 1:
                bad += 1
    verdict("1-D floor |a+b| >= |a|+|b|-1", bad == 0, f"{len(subsets) ** 2} pairs over {{0..8}}, {bad} failures")


def test_lev_suite(verdict):
    start = time.perf_counter()
    count = bad = 0
    for vals, h in lev_instances(8, 6):
        count += 1
        if not verify_lev(PointSet(list(vals)), h).passed:
            bad += 1
    elapsed = time.perf_counter() - start
    verdict("Lev chain", bad == 0 and elapsed < 120, f"{count} instances, {bad} failures, {elapsed:.1f}s (< 120s)")


def test_ap_containment_suite(verdict):
    count = bad = 0
    for vals, m in ap_instances(6, 3):
        count += 1
        if not verify_ap_containment(PointSet(vals), m).passed:
            bad += 1
    verdict("AP containment", bad == 0 and count > 0, f"{count} symmetric sets in [-6,6] with m <= 3, {bad} failures")


def test_compression_monotonicity(verdict):
    rng = random.Random(2)
    bad = 0
    for _ in range(500):
        dim = rng.randint(1, 3)
        a = PointSet(_random_points(rng, dim, rng.randint(1, 30), -8, 8))
        b = PointSet(_random_points(rng, dim, rng.randint(1, 30), -8, 8))
        base = len(sumset(a, b))
        for axis in range(1, dim + 1):
            if len(sumset(compress(a, axis), compress(b, axis))) > base:
                bad += 1
    verdict("compression monotonicity", bad == 0, f"500 pairs, every axis, {bad} failures")


def test_cube_summand(verdict):
    rng = random.Random(3)
    bad = 0
    for _ in range(200):
        dim = rng.randint(1, 3)
        a = PointSet(_random_points(rng, dim, rng.randint(1, 40), -6, 6))
        b = PointSet(_random_points(rng, dim, rng.randint(1, 40), -6, 6))
        if not cube_summand_identity_check(a, b).passed:
            bad += 1
    verdict("cube-summand inequality", bad == 0, f"200 pairs, d <= 3, exact root comparison, {bad} failures")


def test_ruzsa_cover(verdict):
    rng = random.Random(4)
    bad = 0
    for _ in range(300):
        dim = rng.randint(1, 3)
        a = _random_points(rng, dim, rng.randint(1, 30), -10, 10)
        b = _random_points(rng, dim, rng.randint(1, 15), -4, 4)
        x = ruzsa_cover(PointSet(a), PointSet(b))
        diffs = {tuple(p - q for p, q in zip(u, v)) for u in b for v in b}
        covered = set(a) <= naive_sumset(list(x.points), list(diffs))
        if not covered or len(x) * len(set(b)) > len(naive_sumset(a, b)):
            bad += 1
    verdict("Ruzsa cover", bad == 0, f"300 pairs, a in X+b-b and |X| <= |a+b|/|b|, {bad} failures")


def test_superadditivity(verdict):
    rng = random.Random(5)
    bad = 0
    for _ in range(500):
        d = rng.randint(1, 3)
        f, g, h = minimal_h(random_root_weights(rng), random_root_weights(rng), d)
        if not verify_superadditivity(f, g, h, d).passed:
            bad += 1
    verdict("superadditivity with minimal h", bad == 0, f"500 (f, g), d <= 3, {bad} failures")


def test_plunnecke_petridis(verdict):
    subsets = [PointSet(list(s)) for r in range(1, 8) for s in combinations(range(7), r)]
    count = bad = with_hyp = not_minimal = 0
    for a in subsets:
        if len(a) > 6:
            continue
        for b in subsets:
            for ell in range(1, 5):
                rep = verify_plunnecke(a, b, ell)
                count += 1
                if not rep.details["minimiser_holds"]:
                    bad += 1
                if rep.hypotheses_ok:
                    with_hyp += 1
                    bad += not rep.passed
                elif not rep.details["full_set_holds"]:
                    not_minimal += 1
    verdict(
        "Plunnecke-Petridis",
        bad == 0,
        f"{count} (a, b, l), {bad} failures on minimising sets "
        f"({with_hyp} with |a+b|/|a| minimal; {not_minimal} non-minimal a exceed K^l|a|, outside the statement)",
    )


def test_simplex_table(verdict):
    start = time.perf_counter()
    rows = [r for r in simplex_doubling_table(2, 10) if r["k"] == 2]
    elapsed = time.perf_counter() - start
    exact = all(r["sum_size"] == r["binomial"] == (2 * r["n"] + 2) * (2 * r["n"] + 1) // 2 and r["paths_agree"] for r in rows)
    c = [r["c_hat"] for r in rows]
    trend = ", ".join(f"{float(x):.3f}" for x in c)
    increasing = all(x < y for x, y in zip(c, c[1:]))
    verdict(
        "simplex table k=2",
        exact and elapsed < 30,
        f"|S_n+S_n| = C(2n+2,2) for n=1..10: {exact}; c_hat trend [{trend}] increasing={increasing}; {elapsed:.2f}s",
    )


def test_tightness_example(verdict):
    start = time.perf_counter()
    _, _, rep = tightness_example(2, 4, Fraction(1, 64), 6400, check_ratios=False)
    ratio = rep.details["ratio"]
    ratio_ok = Fraction(4, 5) <= ratio <= Fraction(5, 4)
    ts = [Fraction(1, 2**i) for i in range(4, 9)]
    slope, rows = tightness_slope(2, 4, ts)
    slope_ok = abs(slope - 0.5) <= 0.15
    elapsed = time.perf_counter() - start
    c = ", ".join(f"{float(r[1]):.3f}" for r in rows)
    verdict(
        "tightness example",
        ratio_ok and slope_ok and elapsed < 300,
        f"ratio {float(ratio):.4f} in [0.8, 1.25]: {ratio_ok}; "
        f"log-log slope of c_hat over t=2^-4..2^-8 is {slope:.3f} (c_hat [{c}]), target 0.5 +- 0.15: {slope_ok}; {elapsed:.1f}s",
    )


def test_gap_hull_exact_optimality(verdict):
    start = time.perf_counter()
    cache = {}
    count = bad = heuristic_bad = 0
    for size in range(1, 7):
        for b in combinations(range(13), size):
            pb = PointSet(list(b))
            key = tuple(v - b[0] for v in b)
            for n in (1, 2):
                for k in (0, 1, 2):
                    count += 1
                    if (key, n, k) not in cache:
                        cache[key, n, k] = hull_size_oracle(key, n, k)
                    want = cache[key, n, k]
                    for mode in ("exact", "heuristic"):
                        try:
                            res = gap_hull(pb, n, k, mode=mode)
                        except NoCoverError:
                            if want is not None:
                                bad += 1
                            continue
                        cover = set()
                        for x in res.x_set.values():
                            cover |= {x + p for p in enumerate_gap(res.gap).values()}
                        valid = set(b) <= cover and len(res.x_set) <= n and len(cover) == res.total_size and is_t_proper(res.gap, 1)
                        if mode == "exact":
                            bad += not valid or res.total_size != want
                        else:
                            heuristic_bad += not valid or res.total_size < want
    elapsed = time.perf_counter() - start
    verdict(
        "gap_hull exact optimality",
        bad == 0 and heuristic_bad == 0,
        f"{count} (b, n, k) over {{0..12}}, |b| <= 6: {bad} exact mismatches, {heuristic_bad} invalid heuristic returns, {elapsed:.1f}s",
    )


def test_extremal_search_sanity(verdict, tmp_path):
    store = FrontierStore(tmp_path / "frontier.jsonl")
    rec = extremal_search(2, 1, 3, strategy="exhaustive", store=store)
    reloaded = store.load()
    ok_reload = reloaded == [rec] and all(isinstance(r, FrontierRecord) for r in reloaded)
    verdict(
        "extremal search sanity",
        rec.ratio == 2 and ok_reload,
        f"best ratio {rec.ratio} at {list(rec.points.points)}, reload re-verified: {ok_reload}",
    )
