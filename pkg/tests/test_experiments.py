import json
import math
from fractions import Fraction

import pytest

from sumsetlab.errors import ArgumentError, CapacityError, InfeasibleError
from sumsetlab.experiments import (
    ESTIMATE_COLUMNS,
    SIMPLEX_COLUMNS,
    ExperimentGrid,
    FrontierRecord,
    FrontierStore,
    constant_estimation,
    doubling,
    extremal_search,
    family_pair,
    loglog_slope,
    rows_to_csv,
    simplex_doubling_table,
    tightness_example,
    tightness_sets,
)
from sumsetlab.geometry import cover_number, in_general_position, simplex
from sumsetlab.lattice import PointSet, sumset

# ---------------------------------------------------------------- tightness


def test_tightness_headline_ratio():
    a, b, rep = tightness_example(2, 4, Fraction(1, 64), 6400, check_ratios=False)
    assert len(a) == 6400 and len(b) == 6400 * 64
    ratio = rep.details["ratio"]
    assert Fraction(4, 5) <= ratio <= Fraction(5, 4) and rep.passed
    assert rep.hypotheses_ok
    assert rep.lhs == len(sumset(a, b))


def test_tightness_regime_checks():
    with pytest.raises(ArgumentError):
        tightness_example(2, 4, Fraction(1, 64), 6400)
    with pytest.raises(ArgumentError):
        tightness_example(2, 8, Fraction(1, 80), 100)
    _, _, rep = tightness_example(1, 4, Fraction(1, 40), seed=3)
    assert rep.hypothesis_values["m"] == 4000


@pytest.mark.parametrize("k", [1, 2, 3])
def test_tightness_degenerate_n_zero(k):
    a, b, rep = tightness_example(k, 0, Fraction(1, 8), 40, check_ratios=False)
    assert rep.lhs == len(a) + len(b) - 1
    assert "c_hat" not in rep.details


def test_tightness_sets_shape():
    a, b = tightness_sets(2, 4, Fraction(1, 16), 200, seed=1)
    assert len(a) == 200 and len(b) == 3200
    off_axis = [p for p in b.points if p[1] != 0]
    assert len(off_axis) == 6
    assert in_general_position(off_axis, 2)
    assert cover_number(b, 1).count > 4


def test_tightness_ratio_approaches_one_as_t_shrinks():
    ratios = []
    for t in (Fraction(1, 32), Fraction(1, 64), Fraction(1, 128)):
        _, _, rep = tightness_example(2, 4, t, check_ratios=False)
        ratios.append(abs(rep.details["ratio"] - 1))
    assert ratios[0] > ratios[1] > ratios[2]


def test_loglog_slope():
    xs = [1, 2, 4, 8]
    assert loglog_slope(xs, [3 * x**0.5 for x in xs]) == pytest.approx(0.5)


# ---------------------------------------------------------------- simplex table


def test_simplex_table_values():
    rows = simplex_doubling_table(3, 10)
    assert [(r["k"], r["n"]) for r in rows] == [(k, n) for k in (1, 2, 3) for n in range(1, 11)]
    assert all(r["paths_agree"] for r in rows)
    first = next(r for r in rows if r["k"] == 2 and r["n"] == 1)
    assert (first["size"], first["sum_size"], first["ratio"], first["c_hat"]) == (3, 6, 2, Fraction(1, 2))
    for r in rows:
        assert r["size"] == math.comb(r["n"] + r["k"], r["k"])
        assert r["sum_size"] == math.comb(2 * r["n"] + r["k"], r["k"])
        assert set(r) == set(SIMPLEX_COLUMNS)


def test_simplex_table_one_dimensional_limit():
    rows = simplex_doubling_table(1, 40)
    for r in rows:
        assert r["ratio"] == Fraction(2 * r["n"] + 1, r["n"] + 1)
    c = [r["c_hat"] for r in rows]
    assert all(x < y for x, y in zip(c, c[1:]))
    assert abs(c[-1] - Fraction(1, 2)) < Fraction(1, 50)


def test_simplex_c_hat_exceeds_k_over_4_for_large_n():
    rows = [r for r in simplex_doubling_table(2, 10) if r["k"] == 2]
    c = [r["c_hat"] for r in rows]
    assert all(x < y for x, y in zip(c, c[1:]))
    assert c[-1] > Fraction(1, 2)


def test_simplex_table_errors():
    with pytest.raises(CapacityError):
        simplex_doubling_table(4, 100, cap=1000)
    with pytest.raises(ArgumentError):
        simplex_doubling_table(0, 3)


def test_simplex_table_csv():
    text = rows_to_csv(simplex_doubling_table(1, 2), SIMPLEX_COLUMNS)
    lines = text.splitlines()
    assert lines[0] == ",".join(SIMPLEX_COLUMNS)
    assert lines[1] == "1,1,2,3,3,True,3/2,1/4,1/4"


# ---------------------------------------------------------------- extremal search


def test_exhaustive_search_finds_simplex():
    rec = extremal_search(2, 1, 3, strategy="exhaustive")
    assert rec.ratio == 2
    assert rec.points == simplex(2, 1)
    assert rec.certificate.count == 2


def test_search_infeasible_and_errors():
    with pytest.raises(InfeasibleError):
        extremal_search(2, 2, 2)
    with pytest.raises(InfeasibleError):
        extremal_search(2, 1, 2, strategy="exhaustive")
    with pytest.raises(ArgumentError):
        extremal_search(3, 1, 4, strategy="exhaustive")
    with pytest.raises(ArgumentError):
        extremal_search(2, 1, 4, strategy="anneal")
    with pytest.raises(CapacityError):
        extremal_search(2, 1, 6, strategy="exhaustive", budget=10)


def test_local_search_reproducible():
    one = extremal_search(2, 1, 5, budget=300, seed=4)
    two = extremal_search(2, 1, 5, budget=300, seed=4)
    assert one == two and one.to_json() == two.to_json()
    assert one.certificate.count > 1


def test_local_search_does_not_beat_simplex_at_size_six():
    rec = extremal_search(2, 2, 6, budget=500, seed=0)
    assert rec.ratio >= doubling(simplex(2, 2))


def test_exhaustive_agrees_with_local_at_size_four():
    ex = extremal_search(2, 1, 4, strategy="exhaustive")
    loc = extremal_search(2, 1, 4, budget=500)
    assert ex.ratio <= loc.ratio
    assert ex.ratio == Fraction(9, 4)


def test_frontier_store_roundtrip(tmp_path):
    store = FrontierStore(tmp_path / "frontier.jsonl")
    assert store.load() == []
    rec = extremal_search(2, 1, 3, strategy="exhaustive", store=store)
    loaded = store.load()
    assert loaded == [rec]
    # A worse record of the same shape is not appended.
    worse = extremal_search(2, 1, 3, budget=1, seed=9)
    if worse.ratio >= rec.ratio:
        assert not store.merge(worse)
    assert len(store.load()) == 1
    assert store.best()[(2, 1, 3)] == rec


def test_frontier_store_keeps_strict_improvements(tmp_path):
    store = FrontierStore(tmp_path / "f.jsonl")
    line = PointSet([(0, 0), (5, 0), (0, 1), (2, 3)])
    worse = FrontierRecord(2, 1, line, doubling(line), cover_number(line, 2))
    assert store.merge(worse)
    better = extremal_search(2, 1, 4, strategy="exhaustive")
    assert better.ratio < worse.ratio
    assert store.merge(better)
    assert not store.merge(better)
    assert len(store.load()) == 2
    assert store.best()[(2, 1, 4)] == better


def test_frontier_record_tamper_detection(tmp_path):
    rec = extremal_search(2, 1, 3, strategy="exhaustive")
    data = rec.to_json()
    assert FrontierRecord.from_json(json.loads(json.dumps(data))) == rec
    for key, value in [("ratio", "1"), ("n", 2), ("points", [[0, 0], [1, 0], [2, 0]])]:
        bad = dict(data, **{key: value})
        with pytest.raises(ValueError):
            FrontierRecord.from_json(bad)
    path = tmp_path / "f.jsonl"
    path.write_text(json.dumps(dict(data, ratio="3/2")) + "\n")
    with pytest.raises(ValueError):
        FrontierStore(path).load()


# ---------------------------------------------------------------- constant estimation


def test_grid_validation():
    with pytest.raises(ArgumentError):
        ExperimentGrid((), (1,), (1,), "box")
    with pytest.raises(ArgumentError):
        ExperimentGrid((2,), (1,), (1,), "blob")
    with pytest.raises(ArgumentError):
        constant_estimation(ExperimentGrid((1,), (2,), (1,), "cone"))


@pytest.mark.parametrize("family", ["box", "simplex", "cone", "random"])
def test_family_pairs_respect_size_ratio(family):
    for t in (Fraction(1, 4), Fraction(1, 2), 1):
        a, b = family_pair(family, 2, 3, t, 0, 10**6)
        assert len(a) >= t * len(b)


def test_box_family_small_c_hat():
    rows = constant_estimation(ExperimentGrid((2,), (4, 8), (1,), "box"))
    for r in rows:
        assert abs(float(r["c_hat"])) < 1
        assert r["hypotheses_ok"]


def test_simplex_family_matches_table():
    rows = constant_estimation(ExperimentGrid((2,), (2, 5), (1,), "simplex", normal_bound=1))
    table = {r["n"]: r for r in simplex_doubling_table(2, 5) if r["k"] == 2}
    for r in rows:
        n = r["n"]
        assert r["size_AB"] == table[n]["sum_size"]
        # With A = B the root-form and ratio-form constants differ only by the root.
        ratio = table[n]["ratio"]
        want = n * (1 - (math.sqrt(ratio) - 1))
        assert float(r["c_hat"]) == pytest.approx(want, abs=1e-5)


def test_estimation_rows_and_threads_agree():
    grid = ExperimentGrid((2,), (2, 3), (Fraction(1, 2), 1), "random", seed=7, samples=2)
    rows = constant_estimation(grid)
    assert [(r["n"], r["t"]) for r in rows] == [(2, "1/2"), (2, "1"), (3, "1/2"), (3, "1")]
    grid.threads = 2
    assert constant_estimation(grid) == rows
    text = rows_to_csv(rows, ESTIMATE_COLUMNS)
    assert text.splitlines()[0] == ",".join(ESTIMATE_COLUMNS)


def test_tightness_family_matches_direct_example():
    ts = (Fraction(1, 64), Fraction(1, 256))
    rows = constant_estimation(ExperimentGrid((2,), (4,), ts, "tightness", normal_bound=1))
    for r, t in zip(rows, ts):
        _, _, rep = tightness_example(2, 4, t, check_ratios=False)
        assert r["c_hat_lo"] == str(rep.details["c_hat"].lo)
    # Deep in the small-t regime the constant falls with t.
    assert float(rows[0]["c_hat"]) > float(rows[1]["c_hat"]) > 0
