"""Cophenetic vectors and the p-cophenetic distance over shared leaf labelings."""
from __future__ import annotations

import math
from itertools import combinations_with_replacement, product

import numpy as np

from ..errors import ScaleGuardError
from ..norms import lp_norm, parse_p
from ..trees import MergeTree, lca, leaves

__all__ = ["cophenetic_vector", "cophenetic_distance", "optimal_labeling", "LABELING_LIMIT"]

LABELING_LIMIT = 200_000


def _lca_heights(tree: MergeTree):
    nt = tree.normalized()
    lv = leaves(nt)
    return lv, {(a, b): lca(nt, a, b)[1] for a in lv for b in lv}


def cophenetic_vector(tree: MergeTree, labeling) -> np.ndarray:
    """Upper-triangular matrix of LCA heights for a surjective leaf labeling.

    ``labeling[i]`` is the leaf id carrying label ``i``; the diagonal holds
    leaf birth heights.  Entries below the diagonal are NaN.
    """
    lv, H = _lca_heights(tree)
    missing = set(lv) - set(labeling)
    if missing:
        raise ValueError(f"labeling is not surjective; unlabeled leaves {sorted(missing)}")
    unknown = set(labeling) - set(lv)
    if unknown:
        raise ValueError(f"labels point at non-leaves {sorted(unknown)}")
    k = len(labeling)
    C = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i, k):
            C[i, j] = H[labeling[i], labeling[j]]
    return C


def _upper(H, lab) -> list[float]:
    k = len(lab)
    return [H[lab[i], lab[j]] for i in range(k) for j in range(i, k)]


def cophenetic_distance(M: MergeTree, N: MergeTree, p=1.0, k_max: int | None = None) -> float:
    """Minimum labeled distance over all shared labelings with up to ``k_max`` labels."""
    return optimal_labeling(M, N, p, k_max)[0]


def optimal_labeling(
    M: MergeTree, N: MergeTree, p=1.0, k_max: int | None = None
) -> tuple[float, list[tuple[str, str]]]:
    """The cophenetic distance and a shared labeling attaining it.

    A shared labeling is a multiset of (leaf of M, leaf of N) pairs covering
    both leaf sets; label order only permutes vector entries, so multisets suffice.
    """
    p = parse_p(p)
    lm, HM = _lca_heights(M)
    ln, HN = _lca_heights(N)
    k_min = max(len(lm), len(ln))
    if k_max is None:
        k_max = len(lm) + len(ln)
    if k_max < k_min:
        raise ValueError(f"k_max={k_max} is below the leaf count {k_min}")
    pairs = list(product(range(len(lm)), range(len(ln))))
    total = sum(math.comb(len(pairs) + k - 1, k) for k in range(k_min, k_max + 1))
    if total > LABELING_LIMIT:
        raise ScaleGuardError("cophenetic labelings", total, LABELING_LIMIT)
    best, arg = math.inf, ()
    for k in range(k_min, k_max + 1):
        for combo in combinations_with_replacement(pairs, k):
            if len({a for a, _ in combo}) < len(lm) or len({b for _, b in combo}) < len(ln):
                continue
            vm = _upper(HM, [lm[a] for a, _ in combo])
            vn = _upper(HN, [ln[b] for _, b in combo])
            d = lp_norm([x - y for x, y in zip(vm, vn)], p)
            if d < best:
                best, arg = d, combo
    return best, [(lm[a], ln[b]) for a, b in arg]
