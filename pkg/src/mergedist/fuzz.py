"""Seeded randomized checks of the cross-module invariants, with shrinking."""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .filtration import (
    CellComplex1,
    CellularFunction,
    incidence_presentation,
    lp_function_distance,
    geometric_lift,
    random_monotone_pair,
    sublevel_merge_forest,
)
from .formats import tree_to_dict, write_json
from .metrics.barcodes import Barcode, Interval, elder_barcode, rank_from_barcode, rank_from_tree
from .metrics.interleaving import check_witness, optimal_interleaving
from .metrics.presentation_distance import (
    interleaving_to_presentations,
    presentations_to_interleaving,
)
from .metrics.wasserstein import wasserstein, wasserstein_brute_force
from .norms import INF
from .presentation import coequalize, label_distance, minimal_presentation, pad_concatenate
from .trees import MergeNode, MergeTree, is_isomorphic, leaves

log = logging.getLogger(__name__)

PS = (1.0, 2.0, INF)
TOL = 1e-9
MUTANTS = ("drop-triangle",)


# -- random instances -------------------------------------------------------------

def random_tree(rng: random.Random, max_leaves: int = 5, grid: float = 0.25) -> MergeTree:
    """Random merge tree with heights on a grid; equal heights give multi-way merges."""
    n = rng.randint(1, max_leaves)
    nodes: list[MergeNode] = []
    comps = []
    for i in range(n):
        h = grid * rng.randint(0, 8)
        nodes.append(MergeNode(f"l{i}", h))
        comps.append((f"l{i}", h))
    k = 0
    while len(comps) > 1:
        m = 2 if len(comps) == 2 or rng.random() < 0.8 else 3
        rng.shuffle(comps)
        group, comps = comps[:m], comps[m:]
        h = max(c[1] for c in group) + grid * rng.randint(0, 4)
        nid = f"i{k}"
        k += 1
        nodes.append(MergeNode(nid, h, tuple(c[0] for c in group)))
        comps.append((nid, h))
    return MergeTree(tuple(nodes), comps[0][0]).normalized()


def random_barcode_pair(rng: random.Random, max_total: int = 8, grid: float = 0.25):
    def bars(n, unbounded):
        out = []
        for i in range(n):
            b = grid * rng.randint(0, 12)
            if i < unbounded:
                out.append(Interval(b, INF))
            else:
                out.append(Interval(b, b + grid * rng.randint(0, 8)))
        return Barcode(tuple(out))

    nb = rng.randint(0, max_total)
    nc = rng.randint(0, max_total - nb)
    ub = rng.randint(0, min(1, nb))
    uc = ub if rng.random() < 0.8 else rng.randint(0, min(1, nc))
    return bars(nb, min(ub, nb)), bars(nc, min(uc, nc))


# -- invariants -------------------------------------------------------------------
# Each check returns None when the invariant holds, else a message.

def check_wasserstein_oracle(B: Barcode, C: Barcode) -> str | None:
    for p in PS:
        fast, _ = wasserstein(B, C, p)
        slow = wasserstein_brute_force(B, C, p)
        if p == INF or math.isinf(slow):
            if fast != slow:
                return f"p={p}: wasserstein {fast} != brute force {slow}"
        elif abs(fast - slow) > TOL:
            return f"p={p}: wasserstein {fast} != brute force {slow}"
    return None


def check_elder_rank(tree: MergeTree) -> str | None:
    B = elder_barcode(tree)
    times = sorted({n.height for n in tree.normalized().nodes})
    for i, s in enumerate(times):
        for t in times[i:]:
            a, b = rank_from_barcode(B, s, t), rank_from_tree(tree, s, t)
            if a != b:
                return f"rank at ({s}, {t}): barcode {a}, tree {b}"
    return None


def check_conversions(M: MergeTree, N: MergeTree, mutant: str | None = None) -> str | None:
    w = optimal_interleaving(M, N, _skip_triangles=mutant == "drop-triangle")
    errs = check_witness(w)
    if errs:
        return f"witness at eps={w.epsilon} fails verification: {errs[0]}"
    dB, _ = wasserstein(elder_barcode(M), elder_barcode(N), INF)
    if dB > w.epsilon + TOL:
        return f"bottleneck {dB} exceeds interleaving distance {w.epsilon}"
    pm, pn = interleaving_to_presentations(M, N, w)
    d = label_distance(pm, pn, INF)
    if abs(d - w.epsilon) > TOL:
        return f"interleaving -> presentations gives label distance {d}, expected {w.epsilon}"
    if not (is_isomorphic(coequalize(pm).single(), M) and is_isomorphic(coequalize(pn).single(), N)):
        return "presentations built from the interleaving do not present the trees"
    back = presentations_to_interleaving(pm, pn)
    if abs(back.epsilon - w.epsilon) > TOL:
        return f"presentations -> interleaving at {back.epsilon}, expected {w.epsilon}"
    return None


def check_triangle(M, N, P, mutant=None) -> str | None:
    skip = mutant == "drop-triangle"
    d = lambda a, b: optimal_interleaving(a, b, _skip_triangles=skip).epsilon  # noqa: E731
    mp, mn, np_ = d(M, P), d(M, N), d(N, P)
    if mp > mn + np_ + TOL:
        return f"d_I triangle fails: {mp} > {mn} + {np_}"
    return None


def check_lift(M: MergeTree, N: MergeTree) -> str | None:
    pm, pn = minimal_presentation(M), minimal_presentation(N)
    t = max(pm.generators + pn.generators + tuple(r.birth for r in pm.relations + pn.relations))
    a, b = pad_concatenate(pm, pn, t)
    X, f, g = geometric_lift(a, b)
    for which, fn, P in (("f", f, a), ("g", g, b)):
        forest = sublevel_merge_forest(X, fn)
        if len(forest) != 1 or not is_isomorphic(forest.single(), coequalize(P).single()):
            return f"sublevel tree of lifted {which} differs from the coequalizer"
    for p in PS:
        if lp_function_distance(f, g, p) != label_distance(a, b, p):
            return f"p={p}: lifted function distance differs from label distance"
    return None


def check_stability(X: CellComplex1, f: CellularFunction, g: CellularFunction, mutant=None) -> str | None:
    M = sublevel_merge_forest(X, f).single()
    N = sublevel_merge_forest(X, g).single()
    pf, pg = incidence_presentation(X, f), incidence_presentation(X, g)
    BM, BN = elder_barcode(M), elder_barcode(N)
    for p in PS:
        lab = label_distance(pf, pg, p)
        fun = lp_function_distance(f, g, p)
        if lab != fun:
            return f"p={p}: incidence label distance {lab} != function distance {fun}"
        w, _ = wasserstein(BM, BN, p)
        if w > lab + TOL:
            return f"p={p}: Wasserstein {w} exceeds label distance {lab}"
    dI = optimal_interleaving(M, N, _skip_triangles=mutant == "drop-triangle").epsilon
    sup = lp_function_distance(f, g, INF)
    if dI > sup + TOL:
        return f"interleaving distance {dI} exceeds sup distance {sup}"
    if mutant == "drop-triangle":
        w = optimal_interleaving(M, N, _skip_triangles=True)
        errs = check_witness(w)
        if errs:
            return f"witness at eps={w.epsilon} fails verification: {errs[0]}"
    return None


# -- shrinking --------------------------------------------------------------------

def _tree_reductions(tree: MergeTree):
    nt = tree.normalized()
    lv = leaves(nt)
    if len(lv) > 1:
        for drop in lv:
            kept = tuple(
                MergeNode(n.id, n.height, tuple(c for c in n.children if c != drop))
                for n in nt.nodes
                if n.id != drop
            )
            yield MergeTree(kept, nt.root).normalized()
    for step in (1.0, 0.5):
        rounded = tuple(
            MergeNode(n.id, math.floor(n.height / step) * step, n.children) for n in nt.nodes
        )
        cand = MergeTree(rounded, nt.root)
        if cand != nt:
            yield cand.normalized()


def _complex_reductions(X: CellComplex1, f: CellularFunction, g: CellularFunction):
    for j in range(len(X.edges)):
        edges = X.edges[:j] + X.edges[j + 1 :]
        Y = CellComplex1(X.vertex_count, edges)
        if len(Y.components()) == 1:
            drop = lambda h: CellularFunction(h.vertex_values, h.edge_values[:j] + h.edge_values[j + 1 :])  # noqa: E731
            yield Y, drop(f), drop(g)
    for v in range(X.vertex_count):
        keep = [j for j, e in enumerate(X.edges) if v not in e]
        remap = lambda x: x - (x > v)  # noqa: E731
        Y = CellComplex1(X.vertex_count - 1, tuple((remap(a), remap(b)) for a, b in (X.edges[j] for j in keep)))
        if Y.vertex_count and len(Y.components()) == 1:
            def drop(h):
                vv = h.vertex_values[:v] + h.vertex_values[v + 1 :]
                return CellularFunction(vv, tuple(h.edge_values[j] for j in keep))
            yield Y, drop(f), drop(g)
    for step in (1.0, 0.5, 0.25):
        r = lambda h: CellularFunction(  # noqa: E731
            tuple(math.floor(x / step) * step for x in h.vertex_values),
            tuple(math.floor(x / step) * step for x in h.edge_values),
        )
        if (r(f), r(g)) != (f, g):
            yield X, r(f), r(g)


def shrink(instance: tuple, fails: Callable[..., bool], reductions: Callable) -> tuple:
    """Greedy shrinking: take the first reduction that still fails, repeat."""
    current = instance
    progress = True
    while progress:
        progress = False
        for cand in reductions(*current):
            try:
                still = fails(*cand)
            except Exception:  # a reduction may leave the instance's domain
                still = False
            if still:
                current = cand
                progress = True
                break
    return current


def _tree_pair_reductions(*trees):
    for i, t in enumerate(trees):
        for r in _tree_reductions(t):
            yield trees[:i] + (r,) + trees[i + 1 :]


def _barcode_reductions(B: Barcode, C: Barcode):
    for i in range(len(B)):
        yield Barcode(B.bars[:i] + B.bars[i + 1 :]), C
    for i in range(len(C)):
        yield B, Barcode(C.bars[:i] + C.bars[i + 1 :])


# -- driver -----------------------------------------------------------------------

@dataclass
class FuzzReport:
    trials: int
    seed: int
    mutant: str | None
    passed: bool
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "mutant": self.mutant,
            "passed": self.passed,
            "checks": self.counts,
            "failures": self.failures,
            "warnings": self.warnings,
        }


def _encode_instance(kind, inst):
    if kind == "barcodes":
        return {"B": inst[0].to_dict(), "C": inst[1].to_dict()}
    if kind == "complex":
        X, f, g = inst
        return {"complex": X.to_dict(), "f": f.to_dict(), "g": g.to_dict()}
    return {"trees": [tree_to_dict(t) for t in inst]}


def run_fuzz(
    trials: int = 500,
    seed: int = 0,
    out_dir: str | Path | None = None,
    mutant: str | None = None,
    max_leaves: int = 5,
    max_cells: int = 12,
) -> FuzzReport:
    if mutant is not None and mutant not in MUTANTS:
        raise ValueError(f"unknown mutant {mutant!r}; choose from {MUTANTS}")
    report = FuzzReport(trials, seed, mutant, True)
    if trials == 0:
        report.warnings.append("zero trials requested: nothing was checked")
        log.warning("zero fuzz trials: vacuous pass")
        return report
    checks = {
        "wasserstein_oracle": ("barcodes", check_wasserstein_oracle, _barcode_reductions),
        "elder_rank": ("trees", check_elder_rank, _tree_pair_reductions),
        "conversion_roundtrip": ("trees", lambda M, N: check_conversions(M, N, mutant), _tree_pair_reductions),
        "lift_roundtrip": ("trees", check_lift, _tree_pair_reductions),
        "dI_triangle": ("trees", lambda a, b, c: check_triangle(a, b, c, mutant), _tree_pair_reductions),
        "stability": ("complex", lambda X, f, g: check_stability(X, f, g, mutant), _complex_reductions),
    }
    report.counts = {k: 0 for k in checks}
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        M, N, P = (random_tree(rng, max_leaves) for _ in range(3))
        instances = {
            "wasserstein_oracle": random_barcode_pair(rng),
            "elder_rank": (M,),
            "conversion_roundtrip": (M, N),
            "lift_roundtrip": (M, N),
            "dI_triangle": (M, N, P),
            "stability": random_monotone_pair(rng, max_cells),
        }
        for name, (kind, check, reductions) in checks.items():
            inst = instances[name]
            msg = check(*inst)
            report.counts[name] += 1
            if msg is None:
                continue
            small = shrink(inst, lambda *a: check(*a) is not None, reductions)
            entry = {
                "trial": trial,
                "invariant": name,
                "message": check(*small),
                "instance": _encode_instance(kind, small),
            }
            if out_dir is not None:
                path = Path(out_dir) / f"repro-{name}-{trial}.json"
                path.parent.mkdir(parents=True, exist_ok=True)
                write_json(path, entry)
                entry["reproducer"] = str(path)
            report.failures.append(entry)
            report.passed = False
            log.error("trial %d: %s failed: %s", trial, name, entry["message"])
    return report
