"""Exact verifiers for the sumset inequalities.

Each verifier checks its hypotheses first, then the conclusion, and returns
an ``InequalityReport``.  Root comparisons go through ``compare_root_sum``
so every verdict is exact; only the reported sides are enclosures.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import ArgumentError, CapacityError, DimensionError, EmptyInputError, HypothesisError
from .exact import REPORT_PRECISION, Interval, compare_root_sum, root_interval
from .gap import ENUM_CAP, Gap, enumerate_gap, is_n_full, is_t_proper, scale
from .geometry import cover_number, default_normal_bound
from .lattice import PointSet, iterated_sumset, sumset
from .report import InequalityReport, root_sum_sides

PLUNNECKE_EXACT_MAX = 15


def _same_dim(a: PointSet, b: PointSet) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _nonempty(*sets) -> None:
    if any(len(s) == 0 for s in sets):
        raise EmptyInputError("verifiers need non-empty sets")


def _one_dim(*sets) -> None:
    if any(s.dim != 1 for s in sets):
        raise DimensionError("this statement is about subsets of Z")


def c_hat_interval(sum_size, a_size, b_size, k: int, n, precision=REPORT_PRECISION) -> Interval:
    """Enclosure of n * (1 - (|A+B|^(1/k) - |A|^(1/k)) / |B|^(1/k)) of width <= precision."""
    bits = 32
    while True:
        s = root_interval(sum_size, k, bits)
        a = root_interval(a_size, k, bits)
        b = root_interval(b_size, k, bits)
        out = Fraction(n) * (1 - (s - a) / b)
        if out.width <= precision:
            return out
        bits *= 2


def verify_bm(a: PointSet, b: PointSet, n: int, epsilon, normal_bound: int | None = None) -> InequalityReport:
    """|A+B|^(1/k) >= |A|^(1/k) + (1 - epsilon)|B|^(1/k) for B off n parallel hyperplanes.

    The hypothesis is certified by ``cover_number`` within the normal bound;
    a failure is reported (hypotheses_ok False), not raised.
    """
    _same_dim(a, b)
    _nonempty(a, b)
    epsilon = Fraction(epsilon)
    if not 0 <= epsilon <= 1:
        raise ArgumentError("epsilon must lie in [0, 1]")
    if n < 1:
        raise ArgumentError("n must be positive")
    k = a.dim
    bound = default_normal_bound(b) if normal_bound is None else int(normal_bound)
    cert = cover_number(b, bound)
    hyp_ok = cert.count > n
    size = len(sumset(a, b))
    w = (1 - epsilon) ** k * len(b)
    sign = compare_root_sum(size, len(a), w, k)
    lhs, rhs = root_sum_sides(size, len(a), w, k)
    return InequalityReport(
        name="bm",
        hypothesis_values={"k": k, "n": n, "epsilon": epsilon, "cover_count": cert.count},
        hypotheses_ok=hyp_ok,
        lhs=lhs,
        rhs=rhs,
        passed=hyp_ok and sign >= 0,
        caps_used={"normal_bound": bound},
        details={
            "|A|": len(a),
            "|B|": len(b),
            "|A+B|": size,
            "conclusion_holds": sign >= 0,
            "c_hat": c_hat_interval(size, len(a), len(b), k, n),
            "cover_certificate": cert,
        },
    )


def _lev_check(vals) -> str | None:
    if len(vals) < 3:
        return "need |A| >= 3"
    if vals[0] != 0:
        return "need 0 = min A"
    if math.gcd(*vals) != 1:
        return "need gcd(A) = 1"
    return None


def verify_lev(a: PointSet, h: int) -> InequalityReport:
    """|h.A| >= |h.A'| >= h*l - l^2/(|A| - 2) with A' = {0..|A|-2} u {l}."""
    _one_dim(a)
    if h < 1:
        raise ArgumentError("h must be positive")
    vals = a.values()
    problem = _lev_check(vals)
    if problem:
        raise HypothesisError(problem, [problem])
    ell = vals[-1]
    a_prime = PointSet(list(range(len(vals) - 1)) + [ell])
    size = len(iterated_sumset(a, h))
    size_prime = len(iterated_sumset(a_prime, h))
    bound = Fraction(h * ell) - Fraction(ell * ell, len(vals) - 2)
    return InequalityReport(
        name="lev",
        hypothesis_values={"l": ell, "|A|": len(vals), "h": h},
        hypotheses_ok=True,
        lhs=size,
        rhs=bound,
        passed=size >= size_prime >= bound,
        details={"|h.A|": size, "|h.A'|": size_prime, "bound": bound},
    )


def verify_ap_containment(a: PointSet, m: int) -> InequalityReport:
    """r[-2ml', 2ml'] inside 20m.A for dense symmetric A in [-l, l]."""
    _one_dim(a)
    _nonempty(a)
    vals = a.values()
    ell = vals[-1]
    problems = []
    if set(-v for v in vals) != set(vals):
        problems.append("need A = -A")
    if 0 not in vals:
        problems.append("need 0 in A")
    if ell < 2:
        problems.append("need l >= 2")
    if not 1 <= m <= ell // 2:
        problems.append("need m in [1, l/2]")
    if len(vals) * (m + 1) <= 2 * ell + 1:
        problems.append("need |A| > (2l+1)/(m+1)")
    if problems:
        raise HypothesisError("; ".join(problems), problems)
    r = math.gcd(*vals)
    ell_p = ell // r
    sums = set(iterated_sumset(a, 20 * m).values())
    target = [r * z for z in range(-2 * m * ell_p, 2 * m * ell_p + 1)]
    missing = [z for z in target if z not in sums]
    return InequalityReport(
        name="ap-containment",
        hypothesis_values={"l": ell, "m": m, "|A|": len(vals)},
        hypotheses_ok=True,
        lhs=len(target) - len(missing),
        rhs=len(target),
        passed=not missing,
        details={"r": r, "l'": ell_p, "r<=m": r <= m, "missing": missing[:20]},
    )


def _fitting_translates(s: PointSet, target_vals: np.ndarray, cap: int) -> tuple:
    """All t with s + t inside target, plus the best coverage max_t |(s+t) & target|."""
    pairs = len(s) * target_vals.size
    if pairs > cap:
        raise CapacityError(f"translate search needs {pairs} candidates, cap is {cap}")
    sv = s.coords[:, 0]
    cand = (target_vals[None, :] - sv[:, None]).ravel()
    t, counts = np.unique(cand, return_counts=True)
    full = t[counts == len(s)]
    return [int(x) for x in full], int(counts.max(initial=0))


def verify_box_shrinking(p: Gap, x: PointSet, b: PointSet, ell: int, m: int, cap: int = ENUM_CAP) -> InequalityReport:
    """If l.B lies in X + l.P (P 40ml-proper, |X| <= m) then X + 20m m!.P/m! holds a translate of B."""
    _one_dim(x, b)
    _nonempty(x, b)
    if ell < 1 or m < 1:
        raise ArgumentError("l and m must be positive")
    problems = []
    if len(x) > m:
        problems.append(f"|X| = {len(x)} exceeds m = {m}")
    if not is_t_proper(p, 40 * m * ell, cap):
        problems.append(f"P is not {40 * m * ell}-proper")
    lb = iterated_sumset(b, ell)
    cover = sumset(x, enumerate_gap(p.multiple(ell), cap))
    if not lb.issubset(cover):
        problems.append("l.B is not inside X + l.P")
    if problems:
        raise HypothesisError("; ".join(problems), problems)
    f = math.factorial(m)
    q = scale(p, 20 * m * f, f)
    target = sumset(x, enumerate_gap(q, cap))
    witnesses, best = _fitting_translates(b, target.coords[:, 0], cap)
    return InequalityReport(
        name="box-shrinking",
        hypothesis_values={"l": ell, "m": m, "|X|": len(x), "properness": 40 * m * ell},
        hypotheses_ok=True,
        lhs=best,
        rhs=len(b),
        passed=bool(witnesses),
        caps_used={"cap_enum": cap},
        details={
            "witness": witnesses[0] if witnesses else None,
            "witness_count": len(witnesses),
            "target_gap": q,
            "|target|": len(target),
        },
    )


def verify_bm_in_boxes(y: PointSet, z: PointSet, p: Gap, ell: int, n: int, cap: int = ENUM_CAP) -> InequalityReport:
    """|Y+Z|^(1/d) >= (|Y| - d|P|/n)_+^(1/d) + |Z|^(1/d) for Y in P, Z in l.P."""
    _one_dim(y, z)
    _nonempty(y, z)
    if ell < 1 or n < 1:
        raise ArgumentError("l and n must be positive")
    problems = []
    if not is_n_full(p, n):
        problems.append(f"P is not {n}-full")
    if not is_t_proper(p, ell + 1, cap):
        problems.append(f"P is not {ell + 1}-proper")
    if not y.issubset(enumerate_gap(p, cap)):
        problems.append("Y is not inside P")
    if not z.issubset(enumerate_gap(p.multiple(ell), cap)):
        problems.append("Z is not inside l.P")
    if problems:
        raise HypothesisError("; ".join(problems), problems)
    d = p.k
    size = len(sumset(y, z))
    loss = Fraction(d * p.box_count, n)
    first = max(Fraction(0), len(y) - loss)
    sign = compare_root_sum(size, first, len(z), d)
    lhs, rhs = root_sum_sides(size, first, len(z), d)
    return InequalityReport(
        name="bm-in-boxes",
        hypothesis_values={"d": d, "n": n, "l": ell, "|P|": p.box_count},
        hypotheses_ok=True,
        lhs=lhs,
        rhs=rhs,
        passed=sign >= 0,
        caps_used={"cap_enum": cap},
        details={"|Y|": len(y), "|Z|": len(z), "|Y+Z|": size, "(|Y|-d|P|/n)_+": first},
    )


def _as_weights(f, label) -> dict:
    out = {}
    for x, v in dict(f).items():
        v = Fraction(v)
        if v < 0:
            raise ArgumentError(f"{label} takes a negative value at {x}")
        if v:
            out[int(x)] = v
    return out


def verify_superadditivity(f, g, h, d: int) -> InequalityReport:
    """Sigma(h)^(1/d) >= Sigma(f)^(1/d) + Sigma(g)^(1/d) given the pointwise hypothesis."""
    if d < 1:
        raise ArgumentError("d must be positive")
    f, g, h = _as_weights(f, "f"), _as_weights(g, "g"), _as_weights(h, "h")
    if not f or not g:
        raise HypothesisError("Sigma(f) and Sigma(g) must be positive", ["empty support"])
    bad = [
        (x, y)
        for (x, fx), (y, gy) in product(sorted(f.items()), sorted(g.items()))
        if compare_root_sum(h.get(x + y, 0), fx, gy, d) < 0
    ]
    if bad:
        raise HypothesisError(f"h fails the pointwise hypothesis at {len(bad)} pairs", bad)
    sf, sg, sh = sum(f.values()), sum(g.values()), sum(h.values())
    sign = compare_root_sum(sh, sf, sg, d)
    lhs, rhs = root_sum_sides(sh, sf, sg, d)
    details = {"Sigma(f)": sf, "Sigma(g)": sg, "Sigma(h)": sh}
    if len(f) >= 2 or len(g) >= 2:
        details["gain_ratio"] = _gain_ratio(sh, sf, sg, d)
    return InequalityReport(
        name="superadditivity",
        hypothesis_values={"d": d, "t": sf / sg},
        hypotheses_ok=True,
        lhs=lhs,
        rhs=rhs,
        passed=sign >= 0,
        details=details,
    )


def _gain_ratio(sh, sf, sg, d, precision=REPORT_PRECISION) -> Interval:
    bits = 32
    while True:
        r = root_interval(sh, d, bits) / (root_interval(sf, d, bits) + root_interval(sg, d, bits))
        if r.width <= precision:
            return r
        bits *= 2


def _translate_masks(a: PointSet, b: PointSet) -> list:
    """For each a_i, the bitmask of a_i + b inside an indexing of a + b."""
    s = sumset(a, b)
    index = {p: i for i, p in enumerate(s.points)}
    masks = []
    for p in a.points:
        m = 0
        for q in b.points:
            m |= 1 << index[tuple(u + v for u, v in zip(p, q))]
        masks.append(m)
    return masks


def petridis_constant(a: PointSet, b: PointSet, max_size: int = PLUNNECKE_EXACT_MAX) -> tuple:
    """(K, minimising subset): K = min over non-empty A' in a of |A'+b|/|A'|.

    Ties go to the smallest subset, then the first in subset-bitmask order.
    """
    _same_dim(a, b)
    _nonempty(a, b)
    if len(a) > max_size:
        raise CapacityError(f"exact K needs subset enumeration; |a| = {len(a)} > {max_size}")
    masks = _translate_masks(a, b)
    n = len(masks)
    union = [0] * (1 << n)
    best = None
    for s in range(1, 1 << n):
        low = s & -s
        union[s] = union[s ^ low] | masks[low.bit_length() - 1]
        ratio = Fraction(union[s].bit_count(), s.bit_count())
        key = (ratio, s.bit_count())
        if best is None or key < best[0]:
            best = (key, s)
    pts = a.points
    subset = PointSet([pts[i] for i in range(n) if best[1] >> i & 1], dim=a.dim)
    return best[0][0], subset


def verify_plunnecke(a: PointSet, b: PointSet, ell: int, max_size: int = PLUNNECKE_EXACT_MAX) -> InequalityReport:
    """K^l |A| >= |A + l.B| where K = |A+B|/|A| is the minimum over non-empty A' in A.

    The minimum hypothesis is checked.  When the full set is not a minimiser
    the report fails its hypothesis and the conclusion is checked on the
    minimising subset instead (which satisfies the hypothesis by construction).
    """
    _same_dim(a, b)
    _nonempty(a, b)
    if ell < 1:
        raise ArgumentError("l must be positive")
    k_full = Fraction(len(sumset(a, b)), len(a))
    lb = iterated_sumset(b, ell)
    size = len(sumset(a, lb))
    if len(a) > max_size:
        return InequalityReport(
            name="plunnecke",
            hypothesis_values={"K": k_full, "l": ell},
            hypotheses_ok=False,
            lhs=k_full**ell * len(a),
            rhs=size,
            passed=False,
            caps_used={"exact_K_max": max_size},
            details={"unminimized_K": True, "inequality_holds": size <= k_full**ell * len(a)},
        )
    k_min, a_min = petridis_constant(a, b, max_size)
    hyp_ok = k_full == k_min
    rhs = k_min**ell * len(a)
    min_size = len(sumset(a_min, lb))
    min_rhs = k_min**ell * len(a_min)
    return InequalityReport(
        name="plunnecke",
        hypothesis_values={"K": k_min, "|A+B|/|A|": k_full, "l": ell},
        hypotheses_ok=hyp_ok,
        lhs=rhs,
        rhs=size,
        passed=hyp_ok and size <= rhs,
        caps_used={"exact_K_max": max_size},
        details={
            "minimiser": a_min,
            "minimiser_lhs": min_size,
            "minimiser_rhs": min_rhs,
            "minimiser_holds": min_size <= min_rhs,
            "full_set_holds": size <= rhs,
        },
    )


def verify_stability_containment(a: PointSet, b: PointSet, p: Gap, cap: int = ENUM_CAP) -> InequalityReport:
    """Whether a and b each lie in one translate of P; reports |P|/|A| without a threshold."""
    _one_dim(a, b)
    _nonempty(a, b)
    image = enumerate_gap(p, cap).coords[:, 0]
    found = {}
    coverage = {}
    for label, s in (("A", a), ("B", b)):
        witnesses, best = _fitting_translates(s, image, cap)
        # t with s inside t + P is the negative of a shift moving s into P.
        found[label] = -witnesses[-1] if witnesses else None
        coverage[label] = best
    fits = sum(v is not None for v in found.values())
    return InequalityReport(
        name="stability-containment",
        hypothesis_values={"|P|": len(image), "|A|": len(a), "|B|": len(b)},
        hypotheses_ok=True,
        lhs=fits,
        rhs=2,
        passed=fits == 2,
        caps_used={"cap_enum": cap},
        details={
            "translate_A": found["A"],
            "translate_B": found["B"],
            "max_covered_A": coverage["A"],
            "max_covered_B": coverage["B"],
            "|P|/|A|": Fraction(len(image), len(a)),
        },
    )
