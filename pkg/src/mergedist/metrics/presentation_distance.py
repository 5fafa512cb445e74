"""Compatible presentation pairs as distance certificates.

Converts interleavings into compatible presentation pairs and back, searches
for small p-label distances, and assembles certified brackets for the
p-presentation distance (a path-infimum of the semi-distance).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from ..errors import IncompatibleError, PresentationError
from ..norms import INF, parse_p
from ..presentation import (
    Presentation,
    Relation,
    are_compatible,
    coequalize,
    coequalizer_points,
    label_distance,
    minimal_presentation,
    pad_concatenate,
)
from ..trees import MergeTree, ancestor_at, is_isomorphic, leaves
from .barcodes import elder_barcode
from .interleaving import TOL, InterleavingWitness, check_witness, optimal_interleaving
from .wasserstein import wasserstein

__all__ = [
    "Certificate",
    "DistanceBracket",
    "interleaving_to_presentations",
    "presentations_to_interleaving",
    "semi_distance_upper",
    "presentation_distance_bracket",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 2000


@dataclass(frozen=True)
class Certificate:
    """A compatible pair presenting the two trees, and its p-label distance."""

    value: float
    pm: Presentation
    pn: Presentation
    strategy: str

    def mirrored(self) -> "Certificate":
        return Certificate(self.value, self.pn, self.pm, self.strategy)

    def to_dict(self) -> dict:
        return {
            "value": _num(self.value),
            "strategy": self.strategy,
            "pm": self.pm.to_dict(),
            "pn": self.pn.to_dict(),
        }


@dataclass(frozen=True)
class DistanceBracket:
    lower: float
    upper: float
    p: float
    lower_certificate: dict = field(default_factory=dict)
    upper_certificate: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lower": _num(self.lower),
            "upper": _num(self.upper),
            "p": _num(self.p),
            "lower_certificate": self.lower_certificate,
            "upper_certificate": self.upper_certificate,
        }


def _num(x: float):
    return "inf" if x == INF else x


# -- interleavings <-> compatible presentations -------------------------------------

def _first_leaf(tree: MergeTree, v: str) -> str:
    while tree.by_id[v].children:
        v = tree.by_id[v].children[0]
    return v


def _rel(birth, f, g, gens, tol):
    need = max(gens[f], gens[g])
    if birth < need:
        if need - birth > tol:
            raise PresentationError(f"relation at {birth} precedes generator at {need}")
        birth = need
    return Relation(birth, f, g)


def interleaving_to_presentations(
    M: MergeTree, N: MergeTree, w: InterleavingWitness, tol: float = TOL
) -> tuple[Presentation, Presentation]:
    """Compatible presentations whose labels differ by exactly the witness epsilon.

    Rows are the generators of both minimal presentations; columns are the
    relations of both, then one column per generator tying it to its image
    under the interleaving.  Each label is shifted by 0, eps or 2 eps
    according to which side it is read from.
    """
    errs = check_witness(w, tol)
    if errs:
        raise ValueError("invalid interleaving witness: " + "; ".join(errs))
    if not (is_isomorphic(M, w.m_tree) and is_isomorphic(N, w.n_tree)):
        raise ValueError("witness was built for different trees")
    A, B, eps = w.m_tree, w.n_tree, w.epsilon
    pa, pb = minimal_presentation(A), minimal_presentation(B)
    la, lb = leaves(A), leaves(B)
    ka = pa.k
    phi_gen = [lb.index(_first_leaf(B, w.phi[v])) for v in la]
    psi_gen = [la.index(_first_leaf(A, w.psi[v])) for v in lb]
    ga, gb = pa.generators, pb.generators

    cols = (
        [(r.birth, 0, r.f, r.g) for r in pa.relations]
        + [(r.birth, 1, ka + r.f, ka + r.g) for r in pb.relations]
        + [(ga[i], 2, i, ka + phi_gen[i]) for i in range(ka)]
        + [(gb[j], 3, psi_gen[j], ka + j) for j in range(pb.k)]
    )
    # column shifts (for M's copy, for N's copy) by block
    shift_m = {0: 0.0, 1: eps, 2: 2 * eps, 3: eps}
    shift_n = {0: eps, 1: 0.0, 2: eps, 3: 2 * eps}
    gens_m = tuple(ga) + tuple(x + eps for x in gb)
    gens_n = tuple(x + eps for x in ga) + tuple(gb)
    rel_m = tuple(_rel(b + shift_m[blk], f, g, gens_m, tol) for b, blk, f, g in cols)
    rel_n = tuple(_rel(b + shift_n[blk], f, g, gens_n, tol) for b, blk, f, g in cols)
    return Presentation(gens_m, rel_m), Presentation(gens_n, rel_n)


def presentations_to_interleaving(
    pM: Presentation, pN: Presentation, tol: float = TOL
) -> InterleavingWitness:
    """Interleaving at the infinity-label distance, induced on the coequalizers.

    Generator ``i`` of one side is sent to generator ``i`` of the other,
    shifted; matching relation columns make this descend to the quotients.
    """
    if not are_compatible(pM, pN):
        raise IncompatibleError("presentations are not compatible")
    eps = label_distance(pM, pN, INF)
    fa, pts_a = coequalizer_points(pM)
    fb, pts_b = coequalizer_points(pN)
    A, B = fa.single(), fb.single()

    def leaf_map(P, pts_src, S, pts_dst, T):
        out = {}
        for i, birth in enumerate(P.generators):
            v = pts_src[i][1]
            if not S.by_id[v].children and S.by_id[v].height == birth and v not in out:
                out[v] = ancestor_at(T, pts_dst[i][1], birth + eps + tol)
        return out

    w = InterleavingWitness(
        eps, leaf_map(pM, pts_a, A, pts_b, B), leaf_map(pN, pts_b, B, pts_a, A), A, B
    )
    errs = check_witness(w, tol)
    if errs:
        raise RuntimeError("induced maps are not an interleaving: " + "; ".join(errs))
    return w


# -- semi-distance search ---------------------------------------------------------

def _sorted_gens(P: Presentation) -> Presentation:
    order = sorted(range(P.k), key=lambda i: (P.generators[i], i))
    return P.permuted(order)


def _presents(P: Presentation, canon) -> bool:
    forest = coequalize(P)
    return len(forest) == 1 and forest[0].canonical == canon


@lru_cache(maxsize=4096)
def _optimal(M: MergeTree, N: MergeTree) -> InterleavingWitness:
    return optimal_interleaving(M, N)


def _concatenated(M, N, p) -> Certificate:
    pm, pn = _sorted_gens(minimal_presentation(M)), _sorted_gens(minimal_presentation(N))
    if pm.k == pn.k and are_compatible(pm, pn):
        return Certificate(label_distance(pm, pn, p), pm, pn, "aligned-minimal")
    t = max(pm.generators + pn.generators + tuple(r.birth for r in pm.relations + pn.relations))
    a, b = pad_concatenate(pm, pn, t)
    a, b = _sorted_pair(a, b)
    return Certificate(label_distance(a, b, p), a, b, "pad-concatenate")


def _sorted_pair(a: Presentation, b: Presentation):
    """Reorder rows of a compatible pair jointly by (birth in a, birth in b)."""
    order = sorted(range(a.k), key=lambda i: (a.generators[i], b.generators[i], i))
    return a.permuted(order), b.permuted(order)


def _from_interleaving(M, N, p) -> Certificate:
    w = _optimal(M.normalized(), N.normalized())
    a, b = interleaving_to_presentations(M, N, w)
    return Certificate(label_distance(a, b, p), a, b, "interleaving")


def _local_search(cert: Certificate, M, N, p, budget) -> tuple[Certificate, int]:
    """Greedy coordinate moves toward the partner label, keeping both coequalizers."""
    canon = (M.canonical, N.canonical)
    labs = [
        list(cert.pm.labels.generator_labels + cert.pm.labels.relation_labels),
        list(cert.pn.labels.generator_labels + cert.pn.labels.relation_labels),
    ]
    pres = [cert.pm, cert.pn]
    best = cert.value
    evals = 0
    improved = True
    while improved and evals < budget:
        improved = False
        for side in (0, 1):
            mine, other = labs[side], labs[1 - side]
            pool = sorted(set(mine) | set(other))
            for c in range(len(mine)):
                gap = abs(mine[c] - other[c])
                if gap == 0:
                    continue
                for v in sorted(pool, key=lambda x: (abs(x - other[c]), x)):
                    if abs(v - other[c]) >= gap or evals >= budget:
                        break
                    evals += 1
                    trial = mine.copy()
                    trial[c] = v
                    try:
                        P = pres[side].with_labels(trial)
                    except PresentationError:
                        continue
                    if not _presents(P, canon[side]):
                        continue
                    pair = (P, pres[1]) if side == 0 else (pres[0], P)
                    d = label_distance(pair[0], pair[1], p)
                    if d < best or (p == INF and d <= best):
                        labs[side] = mine = trial
                        pres[side] = P
                        best = d
                        improved = True
                        break
    return Certificate(best, pres[0], pres[1], cert.strategy + "+local"), evals


def semi_distance_upper(M: MergeTree, N: MergeTree, p=1.0, budget: int = DEFAULT_BUDGET) -> Certificate:
    """Best compatible pair found for M and N; its p-label distance bounds the semi-distance.

    Exact for p = inf (the interleaving-derived pair).  Symmetric: swapping the
    arguments mirrors the certificate.
    """
    p = parse_p(p)
    M, N = M.normalized(), N.normalized()
    if N.canonical < M.canonical:
        return semi_distance_upper(N, M, p, budget).mirrored()
    cands = [_concatenated(M, N, p), _from_interleaving(M, N, p)]
    best = min(cands, key=lambda c: c.value)
    if p != INF and budget > 0 and best.value > 0:
        remaining = budget
        improved = []
        for c in sorted(cands, key=lambda c: c.value):
            if remaining <= 0:
                break
            r, used = _local_search(c, M, N, p, remaining)
            remaining -= used
            improved.append(r)
        best = min(improved + [best], key=lambda c: c.value)
    return best


def presentation_distance_bracket(
    M: MergeTree,
    N: MergeTree,
    p=1.0,
    pivots: Sequence[MergeTree] = (),
    budget: int = DEFAULT_BUDGET,
) -> DistanceBracket:
    """Certified lower bound and best-found upper bound on the p-presentation distance.

    lower = max(Wasserstein distance of elder barcodes, interleaving distance);
    upper = cheapest path M -> pivots... -> N of semi-distance certificates.
    """
    p = parse_p(p)
    M, N = M.normalized(), N.normalized()
    wd, matching = wasserstein(elder_barcode(M), elder_barcode(N), p)
    wit = _optimal(M, N)
    lower = max(wd, wit.epsilon)
    lower_cert = {
        "wasserstein": {"value": _num(wd), "matching": matching.to_dict()},
        "interleaving": wit.to_dict(),
        "binding": "wasserstein" if wd >= wit.epsilon else "interleaving",
    }
    nodes = [M, *(q.normalized() for q in pivots), N]
    n = len(nodes)
    edge: dict[tuple[int, int], Certificate] = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = semi_distance_upper(nodes[i], nodes[j], p, budget)
            edge[i, j] = c
            edge[j, i] = c.mirrored()
    dist = [INF] * n
    prev = [-1] * n
    dist[0] = 0.0
    heap = [(0.0, 0)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in range(n):
            if v != u and v not in done:
                nd = d + edge[u, v].value
                if nd < dist[v]:
                    dist[v], prev[v] = nd, u
                    heapq.heappush(heap, (nd, v))
    path = [n - 1]
    while path[-1] != 0:
        path.append(prev[path[-1]])
    path.reverse()
    steps = []
    for a, b in zip(path, path[1:]):
        steps.append({"from": _label(a, n), "to": _label(b, n), **edge[a, b].to_dict()})
    return DistanceBracket(lower, dist[n - 1], p, lower_cert, steps)


def _label(i, n):
    return "source" if i == 0 else ("target" if i == n - 1 else f"pivot{i - 1}")
