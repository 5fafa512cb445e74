"""Merge trees as height-labelled rooted trees and as constructible persistent sets.

A :class:`MergeTree` is stored exactly as given (so that :func:`validate` can
report on malformed input).  Every operation that needs a well-formed tree goes
through :meth:`MergeTree.normalized`, which validates and then removes nodes
that are invisible to the persistent set: 1-child chain nodes (including a
root cap), leaves born at their parent's height, and internal nodes sitting at
their parent's height (their children are spliced upward, giving multi-way
merges).

Points of a tree at height ``t`` are identified by the lowest node ``v`` with
``height(v) <= t < height(parent(v))``; the root's ray extends to +inf.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidTreeError, UnknownNodeError

__all__ = [
    "MergeNode",
    "MergeTree",
    "MergeForest",
    "PersistentSetRep",
    "nested",
    "validate",
    "to_persistent_set",
    "from_persistent_set",
    "evolution_map",
    "lca",
    "is_isomorphic",
    "canonical_form",
    "component_count_at",
    "leaves",
    "alive_nodes",
    "ancestor_at",
    "merge_heights",
    "sweep",
    "realization",
]


@dataclass(frozen=True)
class MergeNode:
    id: str
    height: float
    children: tuple[str, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class MergeTree:
    nodes: tuple[MergeNode, ...]
    root: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @cached_property
    def by_id(self) -> dict[str, MergeNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def parent(self) -> dict[str, str]:
        par = {}
        for n in self.nodes:
            for c in n.children:
                par[c] = n.id
        return par

    def node(self, node_id: str) -> MergeNode:
        try:
            return self.by_id[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def height(self, node_id: str) -> float:
        return self.node(node_id).height

    def children(self, node_id: str) -> tuple[str, ...]:
        return self.node(node_id).children

    @cached_property
    def _normalized(self):
        problems = validate(self)
        if problems:
            return InvalidTreeError(problems)
        if _is_normal(self):
            return self
        return _normalize(self)

    def normalized(self) -> "MergeTree":
        """Validated, normalized copy (``self`` when already normal)."""
        out = self._normalized
        if isinstance(out, InvalidTreeError):
            raise out
        return out

    @cached_property
    def canonical(self):
        return canonical_form(self)

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class MergeForest:
    trees: tuple[MergeTree, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    def single(self) -> MergeTree:
        if len(self.trees) != 1:
            raise InvalidTreeError([f"forest has {len(self.trees)} components, expected 1"])
        return self.trees[0]


@dataclass(frozen=True)
class PersistentSetRep:
    """Critical times, critical-set sizes and the maps ``m_i: M(s_i) -> M(s_{i+1})``."""

    times: tuple[float, ...]
    sizes: tuple[int, ...]
    maps: tuple[tuple[int, ...], ...]

    def index_at(self, t: float) -> int:
        """Index of the last critical time ``<= t``; -1 below the first one."""
        return bisect.bisect_right(self.times, t) - 1

    def size_at(self, t: float) -> int:
        i = self.index_at(t)
        return 0 if i < 0 else self.sizes[i]

    def is_minimal(self) -> bool:
        for i in range(1, len(self.times)):
            m = self.maps[i - 1]
            if len(set(m)) == len(m) and len(m) == self.sizes[i]:
                return False
        return True


def nested(spec, prefix: str = "n") -> MergeTree:
    """Build a tree from a nested spec: a leaf is a number, an internal
    node is ``(height, [child, ...])``.  Ids are assigned in preorder.

    >>> t = nested((5, [(3, [0, 1]), 2]))
    >>> sorted(n.height for n in t.nodes)
    [0, 1, 2, 3, 5]
    """
    nodes: list[MergeNode] = []

    def rec(s) -> str:
        nid = f"{prefix}{len(nodes)}"
        slot = len(nodes)
        nodes.append(None)  # type: ignore[arg-type]
        if isinstance(s, tuple):
            h, kids = s
            ids = tuple(rec(k) for k in kids)
        else:
            h, ids = s, ()
        nodes[slot] = MergeNode(nid, h, ids)
        return nid

    root = rec(spec)
    return MergeTree(tuple(nodes), root)


# -- validation and normalization ------------------------------------------------

def validate(tree: MergeTree) -> list[str]:
    """List every broken invariant; an empty list means the tree is valid."""
    out: list[str] = []
    ids = [n.id for n in tree.nodes]
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            out.append(f"duplicate node id {i!r}")
        seen.add(i)
    index = {n.id: n for n in tree.nodes}
    for n in tree.nodes:
        if not isinstance(n.height, (int, float)) or not math.isfinite(n.height):
            out.append(f"node {n.id!r}: height {n.height!r} is not a finite real")
    if tree.root not in index:
        out.append(f"root {tree.root!r} is not a node")
        return out
    parents: dict[str, list[str]] = {}
    for n in tree.nodes:
        for c in n.children:
            if c not in index:
                out.append(f"node {n.id!r}: child {c!r} does not exist")
                continue
            parents.setdefault(c, []).append(n.id)
    for c, ps in parents.items():
        if len(ps) > 1:
            out.append(f"node {c!r} has several parents {ps}")
    if tree.root in parents:
        out.append(f"root {tree.root!r} has a parent {parents[tree.root]}")
    # reachability / cycles from the root
    reached: set[str] = set()
    stack = [tree.root]
    while stack:
        v = stack.pop()
        if v in reached:
            out.append(f"cycle through node {v!r}")
            continue
        reached.add(v)
        stack.extend(c for c in index[v].children if c in index)
    for i in ids:
        if i not in reached:
            out.append(f"node {i!r} is not reachable from root {tree.root!r}")
    for n in tree.nodes:
        for c in n.children:
            if c in index and _finite(n.height) and _finite(index[c].height):
                if index[c].height > n.height:
                    out.append(
                        f"height-order violation: parent {n.id!r} at {n.height} "
                        f"below child {c!r} at {index[c].height}"
                    )
    return out


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def _is_normal(tree: MergeTree) -> bool:
    for n in tree.nodes:
        if len(n.children) == 1:
            return False
        for c in n.children:
            if tree.by_id[c].height == n.height:
                return False
    return True


def _normalize(tree: MergeTree) -> MergeTree:
    index = tree.by_id
    out: dict[str, MergeNode] = {}

    def build(vid: str) -> str:
        v = index[vid]
        kids: list[str] = []
        for c in v.children:
            cid = build(c)
            cn = out[cid]
            if cn.height == v.height:
                kids.extend(cn.children)  # splice; a bare leaf here is invisible
                del out[cid]
            else:
                kids.append(cid)
        if len(kids) == 1:
            return kids[0]
        out[vid] = MergeNode(vid, v.height, tuple(kids))
        return vid

    root = build(tree.root)
    order = [n.id for n in tree.nodes if n.id in out]
    return MergeTree(tuple(out[i] for i in order), root)


# -- basic structure -------------------------------------------------------------

def leaves(tree: MergeTree) -> list[str]:
    """Leaf ids of the normalized tree in depth-first (input child) order."""
    t = tree.normalized()
    res = []
    stack = [t.root]
    while stack:
        v = stack.pop()
        kids = t.by_id[v].children
        if not kids:
            res.append(v)
        stack.extend(reversed(kids))
    return res


def merge_heights(tree: MergeTree) -> list[float]:
    t = tree.normalized()
    return sorted(n.height for n in t.nodes if n.children)


def ancestor_at(tree: MergeTree, node_id: str, t: float) -> str:
    """The point at height ``t`` above ``node_id`` (requires height <= t)."""
    h = tree.height(node_id)
    if t < h:
        raise ValueError(f"height {t} is below node {node_id!r} at {h}")
    par = tree.parent
    v = node_id
    while v in par and tree.by_id[par[v]].height <= t:
        v = par[v]
    return v


def alive_nodes(tree: MergeTree, t: float) -> list[str]:
    """Elements of M(t), as node ids, in elder order (eldest branch first)."""
    nt = tree.normalized()
    par = nt.parent
    alive = [
        n.id
        for n in nt.nodes
        if n.height <= t and (n.id not in par or nt.by_id[par[n.id]].height > t)
    ]
    rank = _elder_rank(nt)
    return sorted(alive, key=rank.__getitem__)


def _elder_rank(tree: MergeTree) -> dict[str, tuple]:
    """Sort key per node: (eldest leaf birth, leaf canonical code, leaf position)."""
    cached = tree.__dict__.get("_elder_rank_cache")
    if cached is not None:
        return cached
    order = {v: i for i, v in enumerate(leaves(tree))}
    key: dict[str, tuple] = {}

    def rec(v):
        n = tree.by_id[v]
        if not n.children:
            key[v] = (n.height, order[v])
        else:
            for c in n.children:
                rec(c)
            key[v] = min(key[c] for c in n.children)

    rec(tree.root)
    tree.__dict__["_elder_rank_cache"] = key
    return key


def component_count_at(tree: MergeTree, t: float) -> int:
    nt = tree.normalized()
    par = nt.parent
    return sum(
        1
        for n in nt.nodes
        if n.height <= t and (n.id not in par or nt.by_id[par[n.id]].height > t)
    )


def lca(tree: MergeTree, u: str, v: str) -> tuple[str, float]:
    """Least common ancestor of ``u`` and ``v`` in the tree as given."""
    tree.node(u)
    tree.node(v)
    problems = validate(tree)
    if problems:
        raise InvalidTreeError(problems)
    par = tree.parent
    up = {u}
    x = u
    while x in par:
        x = par[x]
        up.add(x)
    y = v
    while y not in up:
        y = par[y]
    return y, tree.by_id[y].height


def canonical_form(tree: MergeTree):
    t = tree.normalized()

    def code(v):
        n = t.by_id[v]
        return (n.height, tuple(sorted(code(c) for c in n.children)))

    return code(t.root)


def is_isomorphic(a: MergeTree, b: MergeTree) -> bool:
    return a.canonical == b.canonical


# -- persistent-set view ---------------------------------------------------------

def _critical_elements(tree: MergeTree) -> tuple[list[float], list[list[str]]]:
    nt = tree.normalized()
    times = sorted({n.height for n in nt.nodes})
    return times, [alive_nodes(nt, s) for s in times]


def to_persistent_set(tree: MergeTree) -> PersistentSetRep:
    nt = tree.normalized()
    times, elems = _critical_elements(nt)
    maps = []
    for i in range(len(times) - 1):
        nxt = {v: k for k, v in enumerate(elems[i + 1])}
        maps.append(tuple(nxt[ancestor_at(nt, v, times[i + 1])] for v in elems[i]))
    return PersistentSetRep(tuple(times), tuple(len(e) for e in elems), tuple(maps))


def from_persistent_set(ps: PersistentSetRep) -> MergeForest:
    """Rebuild the tree(s) by sweeping the critical sets upward."""
    if not ps.times:
        return MergeForest(())
    nodes: dict[str, MergeNode] = {}
    counter = 0

    def new(h, kids=()):
        nonlocal counter
        nid = f"p{counter}"
        counter += 1
        nodes[nid] = MergeNode(nid, h, tuple(kids))
        return nid

    current = [new(ps.times[0]) for _ in range(ps.sizes[0])]
    for i, m in enumerate(ps.maps):
        h = ps.times[i + 1]
        pre: list[list[str]] = [[] for _ in range(ps.sizes[i + 1])]
        for k, tgt in enumerate(m):
            pre[tgt].append(current[k])
        current = [
            new(h) if not p else (p[0] if len(p) == 1 else new(h, p)) for p in pre
        ]
    trees = []
    for r in current:
        keep = {}
        stack = [r]
        while stack:
            v = stack.pop()
            keep[v] = nodes[v]
            stack.extend(nodes[v].children)
        trees.append(MergeTree(tuple(keep[k] for k in nodes if k in keep), r))
    return MergeForest(tuple(trees))


def evolution_map(ps: PersistentSetRep, s: float, t: float) -> tuple[int, ...]:
    """The composite ``M(s <= t)`` as a tuple: element k of M(s) maps to entry k."""
    if s > t:
        raise ValueError(f"evolution map needs s <= t, got s={s}, t={t}")
    i, j = ps.index_at(s), ps.index_at(t)
    if i < 0:
        return ()
    f = tuple(range(ps.sizes[i]))
    for k in range(i, j):
        m = ps.maps[k]
        f = tuple(m[x] for x in f)
    return f


def realization(tree: MergeTree) -> dict:
    """Node/edge structure of the geometric realization, with heights."""
    nt = tree.normalized()
    return {
        "nodes": {n.id: n.height for n in nt.nodes},
        "edges": [(c, n.id) for n in nt.nodes for c in n.children],
        "root": nt.root,
        "root_ray": [nt.by_id[nt.root].height, math.inf],
    }


# -- union-find sweep (coequalizers and sublevel sets) ---------------------------

class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra, False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra, True


def sweep(
    births: Sequence[float],
    unions: Iterable[tuple[float, int, int]],
    leaf_prefix: str = "g",
) -> tuple[MergeForest, list[tuple[int, str]]]:
    """Components of a family of elements born at ``births`` and glued by ``unions``.

    Each union ``(t, a, b)`` identifies elements ``a`` and ``b`` from time ``t``
    on; both must be born by then.  Returns the merge forest (already normal)
    and, per element, ``(tree index, node id)`` of the point it represents at
    its own birth.
    """
    k = len(births)
    unions = list(unions)
    for t, a, b in unions:
        if not (0 <= a < k and 0 <= b < k):
            raise IndexError(f"union ({t}, {a}, {b}) refers to a missing element")
        if births[a] > t or births[b] > t:
            raise ValueError(f"union at {t} precedes the birth of element {a} or {b}")
    by_time_b: dict[float, list[int]] = {}
    for i, h in enumerate(births):
        by_time_b.setdefault(h, []).append(i)
    by_time_u: dict[float, list[tuple[int, int]]] = {}
    for t, a, b in unions:
        by_time_u.setdefault(t, []).append((a, b))

    uf = _UnionFind(k)
    comp_node: dict[int, str] = {}
    nodes: dict[str, MergeNode] = {}
    point: list[str | None] = [None] * k
    n_internal = 0
    for t in sorted(set(by_time_b) | set(by_time_u)):
        born = by_time_b.get(t, [])
        olds: dict[int, list[str]] = {i: [] for i in born}
        for a, b in by_time_u.get(t, []):
            ra, rb = uf.find(a), uf.find(b)
            if ra == rb:
                continue
            la = olds.pop(ra) if ra in olds else [comp_node.pop(ra)]
            lb = olds.pop(rb) if rb in olds else [comp_node.pop(rb)]
            r, _ = uf.union(ra, rb)
            olds[r] = la + lb
        for r, lst in olds.items():
            if len(lst) >= 2:
                nid = f"m{n_internal}"
                n_internal += 1
                nodes[nid] = MergeNode(nid, t, tuple(lst))
                comp_node[r] = nid
            elif len(lst) == 1:
                comp_node[r] = lst[0]
            else:
                nid = f"{leaf_prefix}{r}"
                nodes[nid] = MergeNode(nid, t, ())
                comp_node[r] = nid
        for i in born:
            point[i] = comp_node[uf.find(i)]
    roots = sorted(comp_node)
    tree_of: dict[str, int] = {}
    trees = []
    for ti, r in enumerate(roots):
        keep = []
        stack = [comp_node[r]]
        while stack:
            v = stack.pop()
            keep.append(v)
            tree_of[v] = ti
            stack.extend(nodes[v].children)
        keep_set = set(keep)
        trees.append(MergeTree(tuple(n for nid, n in nodes.items() if nid in keep_set), comp_node[r]))
    # a point recorded at birth may since have been absorbed as a child: still a node of its tree
    pts = [(tree_of[p], p) for p in point]  # type: ignore[index]
    return MergeForest(tuple(trees)), pts
