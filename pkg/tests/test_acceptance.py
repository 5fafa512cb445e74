"""Acceptance criteria 1-7, each at its stated tolerance and time budget.

Criterion 7 re-reads every compatible pair and bracket produced by 1-6; the
producers are cached so the whole file does each computation once.
"""
import math
import random
import time
from functools import lru_cache

from mergedist.filtration import (
    CellComplex1,
    CellularFunction,
    geometric_lift,
    incidence_presentation,
    lp_function_distance,
    random_monotone_pair,
    sublevel_merge_forest,
)
from mergedist.fuzz import (
    check_elder_rank,
    check_stability,
    check_wasserstein_oracle,
    random_barcode_pair,
    random_tree,
)
from mergedist.metrics.cophenetic import cophenetic_distance
from mergedist.metrics.interleaving import interleaving_distance, interleaving_exists
from mergedist.metrics.presentation_distance import (
    interleaving_to_presentations,
    presentation_distance_bracket,
    presentations_to_interleaving,
)
from mergedist.presentation import (
    Presentation,
    Relation,
    coequalize,
    label_distance,
    minimal_presentation,
    pad_concatenate,
)
from mergedist.trees import is_isomorphic, nested

INF = math.inf
PS = (1.0, 2.0, INF)


class Outcome:
    def __init__(self):
        self.failures: list[str] = []
        self.pairs: list[tuple[Presentation, Presentation]] = []
        self.brackets: list[tuple] = []  # (lower at p=1, p=2, p=inf)
        self.seconds = 0.0
        self.detail = ""

    def expect(self, ok: bool, msg: str):
        if not ok:
            self.failures.append(msg)


def _timed(fn):
    @lru_cache(maxsize=None)
    def wrapper() -> Outcome:
        out = Outcome()
        t0 = time.perf_counter()
        fn(out)
        out.seconds = time.perf_counter() - t0
        return out

    return wrapper


def _finish(record_property, out: Outcome, limit: float):
    record_property("detail", f"{out.detail}; {out.seconds:.2f}s (limit {limit:g}s)")
    line = "PASS" if not out.failures and out.seconds < limit else "FAIL"
    print(f"{line}: {out.detail}; {out.seconds:.2f}s")
    assert not out.failures, out.failures[:5]
    assert out.seconds < limit


# -- producers ---------------------------------------------------------------------

@_timed
def instability_example(out: Outcome):
    X = CellComplex1(3, ((0, 1), (1, 2)))
    f = CellularFunction((0, 0, 0), (0, 0))
    g = CellularFunction((0, 0, 0), (1, 1))
    M = sublevel_merge_forest(X, f).single()
    N = sublevel_merge_forest(X, g).single()
    c1, c2 = cophenetic_distance(M, N, 1), cophenetic_distance(M, N, 2)
    out.expect(c1 == 3, f"cophenetic p=1 is {c1}")
    out.expect(abs(c2 - math.sqrt(3)) <= 1e-9, f"cophenetic p=2 is {c2}")
    pf, pg = incidence_presentation(X, f), incidence_presentation(X, g)
    out.pairs.append((pf, pg))
    for p in (1, 2):
        lab = label_distance(pf, pg, p)
        fun = lp_function_distance(f, g, p)
        out.expect(abs(lab - 2 ** (1 / p)) <= 1e-9, f"label distance p={p} is {lab}")
        upper = presentation_distance_bracket(M, N, p).upper
        cop = cophenetic_distance(M, N, p)
        out.expect(upper <= fun + 1e-9 < cop, f"p={p}: upper {upper}, |f-g| {fun}, cophenetic {cop}")
    out.brackets.append(tuple(presentation_distance_bracket(M, N, p).lower for p in PS))
    out.detail = f"cophenetic {c1:g} / {c2:.9f}, label distance 2 / {math.sqrt(2):.9f}"


@_timed
def triangle_failure_example(out: Outcome):
    r = 10
    M, N, Q = nested(0), nested((1, [0, 0])), nested(r)
    for eps in (0, 0.25):
        pm = Presentation((0, eps), (Relation(eps, 0, 1),))
        pn = Presentation((0, 0), (Relation(1, 0, 1),))
        out.pairs.append((pm, pn))
        d = label_distance(pm, pn, 1)
        out.expect(d == abs(1 - eps) + eps, f"eps={eps}: label distance {d}")
    a, b = pad_concatenate(minimal_presentation(M), minimal_presentation(Q), r)
    out.pairs.append((a, b))
    out.expect(label_distance(a, b, 1) == r, "M/Q single-generator pair")
    a, b = pad_concatenate(minimal_presentation(N), minimal_presentation(Q), r)
    out.pairs.append((a, b))
    nq = label_distance(a, b, 1)
    out.expect(nq == (r - 1) + 2 * r == 29, f"N/Q at eps=0 gives {nq}")
    br = presentation_distance_bracket(N, Q, 1, pivots=[M])
    out.expect(br.upper <= 11 < 29, f"bracket upper via pivot is {br.upper}")
    for step in br.upper_certificate:
        out.pairs.append(
            (Presentation.from_dict(step["pm"]), Presentation.from_dict(step["pn"]))
        )
    out.brackets.append(
        tuple(presentation_distance_bracket(N, Q, p, pivots=[M]).lower for p in PS)
    )
    out.detail = f"N/Q direct {nq:g}, via pivot {br.upper:g}"


@_timed
def infinity_distance_equality(out: Outcome):
    for trial in range(200):
        rng = random.Random(f"accept3:{trial}")
        M, N = random_tree(rng), random_tree(rng)
        dI = interleaving_distance(M, N)
        br = presentation_distance_bracket(M, N, INF)
        out.expect(br.lower == br.upper == dI, f"trial {trial}: {br.lower}, {br.upper}, {dI}")
        w = interleaving_exists(M, N, dI)
        a, b = interleaving_to_presentations(M, N, w)
        out.pairs.append((a, b))
        out.expect(abs(label_distance(a, b, INF) - dI) <= 1e-9, f"trial {trial}: witness -> pair")
        back = presentations_to_interleaving(a, b)
        out.expect(abs(back.epsilon - dI) <= 1e-9, f"trial {trial}: pair -> witness")
        if trial < 40:
            out.brackets.append(
                tuple(presentation_distance_bracket(M, N, p, budget=500).lower for p in PS)
            )
    out.detail = "200 pairs, lower = upper = d_I, both conversions round trip"


@_timed
def stability_fuzz(out: Outcome):
    for trial in range(500):
        rng = random.Random(f"accept4:{trial}")
        X, f, g = random_monotone_pair(rng, 12)
        msg = check_stability(X, f, g)
        out.expect(msg is None, f"trial {trial}: {msg}")
        out.pairs.append((incidence_presentation(X, f), incidence_presentation(X, g)))
    out.detail = f"500 monotone pairs, {len(out.failures)} violations"


@_timed
def oracle_equivalence(out: Outcome):
    for trial in range(300):
        rng = random.Random(f"accept5:{trial}")
        msg = check_wasserstein_oracle(*random_barcode_pair(rng))
        out.expect(msg is None, f"barcodes {trial}: {msg}")
        msg = check_elder_rank(random_tree(rng))
        out.expect(msg is None, f"tree {trial}: {msg}")
    out.detail = "300 barcode pairs and 300 trees agree with their oracles"


@_timed
def lifting_round_trip(out: Outcome):
    for trial in range(200):
        rng = random.Random(f"accept6:{trial}")
        M, N = random_tree(rng), random_tree(rng)
        pm, pn = minimal_presentation(M), minimal_presentation(N)
        t = max(pm.labels.values.max(), pn.labels.values.max())
        a, b = pad_concatenate(pm, pn, t)
        out.pairs.append((a, b))
        X, f, g = geometric_lift(a, b)
        for fn, P in ((f, a), (g, b)):
            ok = is_isomorphic(sublevel_merge_forest(X, fn).single(), coequalize(P).single())
            out.expect(ok, f"trial {trial}: lifted sublevel tree differs")
        for p in PS:
            out.expect(
                lp_function_distance(f, g, p) == label_distance(a, b, p),
                f"trial {trial}: p={p} distances differ",
            )
    out.detail = "200 padded pairs lift back exactly"


# -- criteria ----------------------------------------------------------------------

def test_criterion_1_cophenetic_instability(record_property):
    _finish(record_property, instability_example(), 1)


def test_criterion_2_presentation_triangle_failure(record_property):
    _finish(record_property, triangle_failure_example(), 1)


def test_criterion_3_infinity_bracket_is_interleaving(record_property):
    _finish(record_property, infinity_distance_equality(), 300)


def test_criterion_4_stability_fuzz(record_property):
    _finish(record_property, stability_fuzz(), 600)


def test_criterion_5_oracle_equivalence(record_property):
    _finish(record_property, oracle_equivalence(), 120)


def test_criterion_6_lifting_round_trip(record_property):
    _finish(record_property, lifting_round_trip(), 120)


def test_criterion_7_monotone_in_p(record_property):
    producers = (
        instability_example,
        triangle_failure_example,
        infinity_distance_equality,
        stability_fuzz,
        oracle_equivalence,
        lifting_round_trip,
    )
    results = [p() for p in producers]
    out = Outcome()
    t0 = time.perf_counter()
    npairs = nbr = 0
    for res in results:
        for a, b in res.pairs:
            d1, d2, di = (label_distance(a, b, p) for p in PS)
            out.expect(d1 >= d2 >= di, f"label distances not monotone: {d1}, {d2}, {di}")
            npairs += 1
        for lo in res.brackets:
            out.expect(lo[0] >= lo[1] >= lo[2], f"bracket lower bounds not monotone: {lo}")
            nbr += 1
    out.seconds = time.perf_counter() - t0
    out.detail = f"{npairs} certificates and {nbr} brackets, {len(out.failures)} violations"
    _finish(record_property, out, 60)
