#!/usr/bin/env python3
"""Print the worked-example numbers the test suite pins down.

    python3 scripts/worked_examples.py
"""
import math

from mergedist import (
    CellComplex1,
    CellularFunction,
    Presentation,
    Relation,
    cophenetic_distance,
    elder_barcode,
    incidence_presentation,
    interleaving_distance,
    label_distance,
    lp_function_distance,
    nested,
    presentation_distance_bracket,
    sublevel_merge_forest,
    to_persistent_set,
    wasserstein,
)

INF = math.inf


def three_leaf_tree():
    t = nested((5, [(3, [0, 1]), 2]))
    ps = to_persistent_set(t)
    print("three-leaf tree")
    print(f"  critical times {ps.times}, set sizes {ps.sizes}")
    bars = elder_barcode(t)
    print(f"  elder barcode {[(b.birth, b.death) for b in bars]}")
    strand = elder_barcode(nested(0))
    print(f"  W1 to a single strand at 0: {wasserstein(bars, strand, 1)[0]:g}")
    print(f"  interleaving distance to that strand: {interleaving_distance(t, nested(0)):g}")


def cophenetic_instability():
    X = CellComplex1(3, ((0, 1), (1, 2)))
    f = CellularFunction((0, 0, 0), (0, 0))
    g = CellularFunction((0, 0, 0), (1, 1))
    M, N = sublevel_merge_forest(X, f).single(), sublevel_merge_forest(X, g).single()
    pf, pg = incidence_presentation(X, f), incidence_presentation(X, g)
    print("subdivided edge, f = 0 against g = 1 on edges")
    print(f"  labels {pf.labels} vs {pg.labels}")
    for p in (1, 2, INF):
        br = presentation_distance_bracket(M, N, p)
        cop = cophenetic_distance(M, N, p)
        print(
            f"  p={p:g}: |f-g| {lp_function_distance(f, g, p):.6f}  label {label_distance(pf, pg, p):.6f}"
            f"  bracket [{br.lower:.6f}, {br.upper:.6f}]  cophenetic {cop:.6f}"
        )


def triangle_failure(r: float = 10):
    M, N, Q = nested(0), nested((1, [0, 0])), nested(r)
    print(f"strand / pair / late strand, r = {r:g}")
    for eps in (0, 0.25, 0.5):
        pm = Presentation((0, eps), (Relation(eps, 0, 1),))
        pn = Presentation((0, 0), (Relation(1, 0, 1),))
        print(f"  eps={eps:g}: M/N label distance p=1 {label_distance(pm, pn, 1):g}")
    direct = presentation_distance_bracket(N, Q, 1)
    via = presentation_distance_bracket(N, Q, 1, pivots=[M])
    print(f"  N/Q direct upper {direct.upper:g}, through M {via.upper:g}, lower {via.lower:g}")
    for step in via.upper_certificate:
        print(f"    {step['from']} -> {step['to']}: {step['value']} ({step['strategy']})")


if __name__ == "__main__":
    three_leaf_tree()
    cophenetic_instability()
    triangle_failure()
