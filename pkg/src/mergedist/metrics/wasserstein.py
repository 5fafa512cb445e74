"""p-Wasserstein and bottleneck distances between barcodes.

Deleting an interval costs its distance to the empty interval at its
midpoint; unbounded intervals can only be matched with each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ..errors import ScaleGuardError
from ..norms import INF, parse_p
from .barcodes import Barcode, Interval

__all__ = [
    "Matching",
    "pair_cost",
    "deletion_cost",
    "matching_cost",
    "wasserstein",
    "wasserstein_brute_force",
    "BRUTE_FORCE_LIMIT",
]

BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs]}


def pair_cost(I: Interval, J: Interval, p: float) -> float:
    """``||I - J||_p`` raised to the p-th power (the plain norm when p = inf)."""
    if I.bounded != J.bounded:
        return INF
    db = abs(I.birth - J.birth)
    dd = abs(I.death - J.death) if I.bounded else 0.0
    if p == INF:
        return max(db, dd)
    if not I.bounded:
        return db**p
    return db**p + dd**p


def deletion_cost(I: Interval, p: float) -> float:
    """``||I - Mid(I)||_p`` to the p-th power (plain norm for p = inf)."""
    if not I.bounded:
        return INF
    m = I.midpoint
    a, b = abs(I.birth - m), abs(I.death - m)
    if p == INF:
        return max(a, b)
    return a**p + b**p


def matching_cost(B: Barcode, C: Barcode, pairs, p) -> float:
    p = parse_p(p)
    mb = {i for i, _ in pairs}
    mc = {j for _, j in pairs}
    terms = [pair_cost(B.bars[i], C.bars[j], p) for i, j in pairs]
    terms += [deletion_cost(I, p) for i, I in enumerate(B.bars) if i not in mb]
    terms += [deletion_cost(J, p) for j, J in enumerate(C.bars) if j not in mc]
    if p == INF:
        return max(terms, default=0.0)
    total = math.fsum(terms)
    if total == INF:
        return INF
    if p == 1:
        return total
    if p == 2:
        return math.sqrt(total)
    return total ** (1.0 / p)


def _split(B: Barcode):
    unb = [i for i, I in enumerate(B.bars) if not I.bounded]
    bnd = [i for i, I in enumerate(B.bars) if I.bounded]
    return unb, bnd


def _augmented(B: Barcode, C: Barcode, ib, ic, p):
    """Square cost matrix on (B-bars + C-diagonal) x (C-bars + B-diagonal)."""
    nb, nc = len(ib), len(ic)
    n = nb + nc
    cost = np.full((n, n), INF)
    for r, i in enumerate(ib):
        for c, j in enumerate(ic):
            cost[r, c] = pair_cost(B.bars[i], C.bars[j], p)
        cost[r, nc + r] = deletion_cost(B.bars[i], p)
    for c, j in enumerate(ic):
        cost[nb + c, c] = deletion_cost(C.bars[j], p)
    cost[nb:, nc:] = 0.0
    return cost


def _decode(rows, cols, ib, ic):
    nb, nc = len(ib), len(ic)
    return [(ib[r], ic[c]) for r, c in zip(rows, cols) if r < nb and c < nc]


def wasserstein(B: Barcode, C: Barcode, p=1.0) -> tuple[float, Matching]:
    """Optimal matching cost and one optimal matching."""
    p = parse_p(p)
    ub, bb = _split(B)
    uc, bc = _split(C)
    if len(ub) != len(uc):
        return INF, Matching(())
    pairs: list[tuple[int, int]] = []
    if p == INF:
        pairs = _bottleneck_pairs(B, C, ub, uc, bb, bc)
    else:
        if ub:
            cu = np.array([[pair_cost(B.bars[i], C.bars[j], p) for j in uc] for i in ub])
            r, c = linear_sum_assignment(cu)
            pairs += [(ub[a], uc[b]) for a, b in zip(r, c)]
        if bb or bc:
            r, c = linear_sum_assignment(_augmented(B, C, bb, bc, p))
            pairs += _decode(r, c, bb, bc)
    pairs.sort()
    return matching_cost(B, C, pairs, p), Matching(tuple(pairs))


def _perfect(adj: np.ndarray):
    n = adj.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)
    m = maximum_bipartite_matching(csr_matrix(adj.astype(np.int8)), perm_type="column")
    return m if np.all(m >= 0) else None


def _bottleneck_pairs(B, C, ub, uc, bb, bc):
    cu = np.array([[pair_cost(B.bars[i], C.bars[j], INF) for j in uc] for i in ub]).reshape(
        len(ub), len(uc)
    )
    cb = _augmented(B, C, bb, bc, INF)
    cands = sorted({0.0, *cu[np.isfinite(cu)].tolist(), *cb[np.isfinite(cb)].tolist()})
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        d = cands[mid]
        if _perfect(cu <= d) is not None and _perfect(cb <= d) is not None:
            hi = mid
        else:
            lo = mid + 1
    d = cands[lo]
    mu = _perfect(cu <= d)
    mb = _perfect(cb <= d)
    pairs = [(ub[r], uc[c]) for r, c in enumerate(mu)]
    pairs += _decode(range(len(mb)), mb, bb, bc)
    return pairs


def wasserstein_brute_force(B: Barcode, C: Barcode, p=1.0) -> float:
    """Exact optimum by enumerating every partial bijection (small inputs only)."""
    p = parse_p(p)
    size = len(B) + len(C)
    if size > BRUTE_FORCE_LIMIT:
        raise ScaleGuardError("wasserstein brute force", size, BRUTE_FORCE_LIMIT)
    best = INF
    m = len(C)

    def rec(i, used, pairs):
        nonlocal best
        if i == len(B):
            best = min(best, matching_cost(B, C, pairs, p))
            return
        rec(i + 1, used, pairs)
        for j in range(m):
            if not used >> j & 1:
                pairs.append((i, j))
                rec(i + 1, used | (1 << j), pairs)
                pairs.pop()

    rec(0, 0, [])
    return best
