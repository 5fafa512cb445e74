"""Exact interleaving distance between small merge trees.

A natural transformation ``phi: M -> N S_eps`` is fixed by where it sends each
leaf of M (a point of N at height ``birth + eps``); every other point is
pushed up from a leaf below it.  The extension is well defined iff any two
leaves' images have met by the time the leaves meet, shifted by ``eps``.  The
decision procedure backtracks over leaf images with that pruning and then
checks both triangle identities on leaves, which determine the composites.

:func:`check_witness` verifies a witness independently, on component tables
at every time where either side can change, using evolution maps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ScaleGuardError
from ..trees import (
    MergeTree,
    alive_nodes,
    ancestor_at,
    evolution_map,
    leaves,
    to_persistent_set,
)

__all__ = [
    "InterleavingWitness",
    "interleaving_exists",
    "interleaving_distance",
    "optimal_interleaving",
    "check_witness",
    "candidate_epsilons",
    "LEAF_LIMIT",
    "TOL",
]

LEAF_LIMIT = 10
TOL = 1e-10


@dataclass(frozen=True)
class InterleavingWitness:
    epsilon: float
    phi: dict  # leaf of M -> node of N (the point at leaf height + epsilon)
    psi: dict  # leaf of N -> node of M
    m_tree: MergeTree = field(repr=False)
    n_tree: MergeTree = field(repr=False)

    def tables(self, tol: float = TOL) -> dict:
        """Component maps at each critical time of the source, as index lists."""
        return {
            "phi": _tables(self.m_tree, self.n_tree, self.phi, self.epsilon, tol),
            "psi": _tables(self.n_tree, self.m_tree, self.psi, self.epsilon, tol),
        }

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "phi_leaves": dict(sorted(self.phi.items())),
            "psi_leaves": dict(sorted(self.psi.items())),
            **self.tables(),
        }


def _tables(A, B, leafmap, eps, tol):
    out = []
    for s in sorted({n.height for n in A.nodes}):
        src = alive_nodes(A, s)
        dst = {v: i for i, v in enumerate(alive_nodes(B, s + eps + tol))}
        out.append(
            {"time": s, "map": [dst[_push(A, B, leafmap, x, s, eps, tol)] for x in src]}
        )
    return out


def _first_leaf(tree: MergeTree, v: str) -> str:
    while tree.by_id[v].children:
        v = tree.by_id[v].children[0]
    return v


def _push(A, B, leafmap, x, t, eps, tol):
    """Image of the point ``x`` of A at height ``t`` under the leaf-determined map."""
    return ancestor_at(B, leafmap[_first_leaf(A, x)], t + eps + tol)


class _Tree:
    """Precomputed leaf data for one side of the search."""

    def __init__(self, tree: MergeTree):
        self.tree = tree.normalized()
        self.leaves = leaves(self.tree)
        self.h = [self.tree.by_id[v].height for v in self.leaves]
        par = self.tree.parent
        self.up = {}
        for n in self.tree.nodes:
            chain = [n.id]
            while chain[-1] in par:
                chain.append(par[chain[-1]])
            self.up[n.id] = chain
        n = len(self.leaves)
        self.leaf_lca = [[self.meet(a, b) for b in self.leaves] for a in self.leaves]

    def meet(self, x, y, tx=-math.inf, ty=-math.inf):
        """Height at which points x (at height tx) and y (at ty) coincide."""
        ys = set(self.up[y])
        z = next(v for v in self.up[x] if v in ys)
        return max(tx, ty, self.tree.by_id[z].height)

    def points(self, t):
        return alive_nodes(self.tree, t)


def _guard(a: _Tree, b: _Tree):
    for side in (a, b):
        if len(side.leaves) > LEAF_LIMIT:
            raise ScaleGuardError("interleaving search leaves", len(side.leaves), LEAF_LIMIT)


def _leaf_maps(S: _Tree, T: _Tree, eps, tol):
    """All well-defined leaf maps S -> T shifted by eps, lazily."""
    n = len(S.leaves)
    cands = [T.points(S.h[i] + eps + tol) for i in range(n)]
    if any(not c for c in cands):
        return
    order = sorted(range(n), key=lambda i: len(cands[i]))
    chosen: dict[int, str] = {}

    def ok(i, x):
        ti = S.h[i] + eps
        for j, y in chosen.items():
            tj = S.h[j] + eps
            if T.meet(x, y, ti, tj) > S.leaf_lca[i][j] + eps + tol:
                return False
        return True

    def rec(k):
        if k == n:
            yield dict(chosen)
            return
        i = order[k]
        for x in cands[i]:
            if ok(i, x):
                chosen[i] = x
                yield from rec(k + 1)
                del chosen[i]

    yield from rec(0)


def _search(A: _Tree, B: _Tree, eps: float, tol: float, skip_triangles: bool = False):
    na, nb = len(A.leaves), len(B.leaves)
    for phi in _leaf_maps(A, B, eps, tol):

        def phi_point(x, t):
            return ancestor_at(B.tree, phi[A.leaves.index(_first_leaf(A.tree, x))], t + eps + tol)

        # unary filters on psi(leaf of B)
        cands = []
        for j in range(nb):
            t = B.h[j] + eps
            target = ancestor_at(B.tree, B.leaves[j], t + eps + tol)
            cj = [
                y
                for y in A.points(t + tol)
                if skip_triangles or phi_point(y, t) == target
            ]
            cands.append(cj)
        # psi(phi(a)) = a shifted by 2 eps, expressed on the first leaf under phi(a)
        need: dict[int, list[tuple[float, str]]] = {}
        if not skip_triangles:
            for i in range(na):
                x = phi[i]
                j = B.leaves.index(_first_leaf(B.tree, x))
                t = A.h[i] + eps
                need.setdefault(j, []).append((t, ancestor_at(A.tree, A.leaves[i], t + eps + tol)))
        for j, reqs in need.items():
            cands[j] = [
                y for y in cands[j] if all(ancestor_at(A.tree, y, t + eps + tol) == z for t, z in reqs)
            ]
        if any(not c for c in cands):
            continue
        order = sorted(range(nb), key=lambda j: len(cands[j]))
        chosen: dict[int, str] = {}

        def rec(k):
            if k == nb:
                return True
            j = order[k]
            tj = B.h[j] + eps
            for y in cands[j]:
                if all(
                    A.meet(y, z, tj, B.h[i] + eps) <= B.leaf_lca[i][j] + eps + tol
                    for i, z in chosen.items()
                ):
                    chosen[j] = y
                    if rec(k + 1):
                        return True
                    del chosen[j]
            return False

        if rec(0):
            return phi, dict(chosen)
    return None


def interleaving_exists(
    M: MergeTree, N: MergeTree, eps: float, tol: float = TOL, _skip_triangles: bool = False
) -> Optional[InterleavingWitness]:
    """An eps-interleaving between M and N, or None after exhausting the search."""
    if eps < 0:
        raise ValueError("epsilon must be non-negative")
    A, B = _Tree(M), _Tree(N)
    _guard(A, B)
    found = _search(A, B, eps, tol, _skip_triangles)
    if found is None:
        return None
    phi, psi = found
    return InterleavingWitness(
        eps,
        {A.leaves[i]: x for i, x in phi.items()},
        {B.leaves[j]: y for j, y in psi.items()},
        A.tree,
        B.tree,
    )


def candidate_epsilons(M: MergeTree, N: MergeTree) -> list[float]:
    hs = sorted({n.height for n in M.normalized().nodes} | {n.height for n in N.normalized().nodes})
    cands = {0.0}
    for a in hs:
        for b in hs:
            d = abs(a - b)
            cands.add(d)
            cands.add(d / 2)
    return sorted(cands)


def optimal_interleaving(
    M: MergeTree, N: MergeTree, tol: float = TOL, check: float = 1e-6, _skip_triangles=False
) -> InterleavingWitness:
    """Witness at the interleaving distance, found by bisection over the candidate set.

    The returned value is cross-checked: infeasible ``check`` below, feasible
    ``check`` above.  A mismatch means the candidate set missed the optimum
    and raises ``RuntimeError``.
    """
    cands = candidate_epsilons(M, N)
    lo, hi = 0, len(cands) - 1
    best = interleaving_exists(M, N, cands[hi], tol, _skip_triangles)
    if best is None:
        raise RuntimeError("no interleaving at the largest candidate; trees malformed?")
    while lo < hi:
        mid = (lo + hi) // 2
        w = interleaving_exists(M, N, cands[mid], tol, _skip_triangles)
        if w is not None:
            hi, best = mid, w
        else:
            lo = mid + 1
    if best.epsilon != cands[lo]:
        best = interleaving_exists(M, N, cands[lo], tol, _skip_triangles)
    e = best.epsilon
    if interleaving_exists(M, N, e + check, tol, _skip_triangles) is None or (
        e - check >= 0 and interleaving_exists(M, N, e - check, tol, _skip_triangles) is not None
    ):
        raise RuntimeError(f"interleaving distance {e} failed the +/-{check} cross-check")
    return best


def interleaving_distance(M: MergeTree, N: MergeTree, tol: float = TOL) -> float:
    return optimal_interleaving(M, N, tol).epsilon


def check_witness(w: InterleavingWitness, tol: float = TOL) -> list[str]:
    """Independent verification on component tables; returns the failures found."""
    M, N, eps = w.m_tree, w.n_tree, w.epsilon
    errs = []
    for S, T, fwd, back in ((M, N, w.phi, w.psi), (N, M, w.psi, w.phi)):
        if set(fwd) != set(leaves(S)):
            errs.append("leaf map does not cover every leaf")
            return errs
        ps = to_persistent_set(S)
        times = {n.height for n in S.nodes}
        times |= {n.height - eps for n in T.nodes}
        times |= {n.height - 2 * eps for n in S.nodes}
        s0 = min(n.height for n in S.nodes)
        prev = None
        for t in sorted(x for x in times if x >= s0):
            src = alive_nodes(S, t + tol)
            mid = alive_nodes(T, t + eps + tol)
            dst = alive_nodes(S, t + 2 * eps + tol)
            mid_ix = {v: i for i, v in enumerate(mid)}
            dst_ix = {v: i for i, v in enumerate(dst)}
            f = []
            for x in src:
                below = [lf for lf in leaves(S) if x in _chain(S, lf)]
                imgs = {ancestor_at(T, fwd[lf], t + eps + tol) for lf in below}
                if len(imgs) != 1:
                    errs.append(f"map not well defined at t={t} on {x!r}")
                    break
                f.append(mid_ix[imgs.pop()])
            else:
                g = []
                for y in mid:
                    g.append(dst_ix[_push(T, S, back, y, t + eps, eps, tol)])
                composite = tuple(g[i] for i in f)
                shift = evolution_map(ps, t + tol, t + 2 * eps + tol)
                if composite != shift:
                    errs.append(f"triangle identity fails at t={t}")
                if prev is not None:
                    pt, pf = prev
                    lhs = tuple(
                        mid_ix[ancestor_at(T, alive_nodes(T, pt + eps + tol)[k], t + eps + tol)]
                        for k in pf
                    )
                    step = evolution_map(ps, pt + tol, t + tol)
                    rhs = tuple(f[step[k]] for k in range(len(pf)))
                    if lhs != rhs:
                        errs.append(f"naturality fails between t={pt} and t={t}")
                prev = (t, f)
    return errs


def _chain(tree, v):
    par = tree.parent
    out = [v]
    while out[-1] in par:
        out.append(par[out[-1]])
    return out
