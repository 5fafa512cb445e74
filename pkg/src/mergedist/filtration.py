"""Monotone cellular functions on 1-dimensional regular cell complexes.

The sublevel merge forest only sees the 1-skeleton, so complexes here are
graphs without loops: ``k`` vertices and a list of edges between distinct
vertices.  A cellular function is a value per vertex and per edge.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import IncompatibleError
from .norms import lp_norm, parse_p
from .presentation import Presentation, Relation, are_compatible
from .trees import MergeForest, sweep

__all__ = [
    "CellComplex1",
    "CellularFunction",
    "is_monotone",
    "sublevel_merge_forest",
    "incidence_presentation",
    "component_presentations",
    "lp_function_distance",
    "geometric_lift",
    "random_monotone_pair",
]


@dataclass(frozen=True)
class CellComplex1:
    vertex_count: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 0:
            raise ValueError("negative vertex count")
        for j, (u, v) in enumerate(edges):
            if u == v:
                raise ValueError(f"edge {j} is a loop at vertex {u}; complex must be regular")
            for x in (u, v):
                if not 0 <= x < self.vertex_count:
                    raise ValueError(f"edge {j} endpoint {x} out of range")

    @property
    def cell_count(self) -> int:
        return self.vertex_count + len(self.edges)

    def components(self) -> list[list[int]]:
        parent = list(range(self.vertex_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        groups: dict[int, list[int]] = {}
        for x in range(self.vertex_count):
            groups.setdefault(find(x), []).append(x)
        return sorted(groups.values())

    def to_dict(self) -> dict:
        return {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, d: dict) -> "CellComplex1":
        return cls(int(d["vertices"]), tuple(tuple(e) for e in d.get("edges", [])))


@dataclass(frozen=True)
class CellularFunction:
    vertex_values: tuple[float, ...]
    edge_values: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertex_values", tuple(float(x) for x in self.vertex_values))
        object.__setattr__(self, "edge_values", tuple(float(x) for x in self.edge_values))

    @property
    def values(self) -> tuple[float, ...]:
        return self.vertex_values + self.edge_values

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertex_values), "edges": list(self.edge_values)}

    @classmethod
    def from_dict(cls, d: dict) -> "CellularFunction":
        return cls(tuple(d["vertices"]), tuple(d.get("edges", [])))


def _check_dims(X: CellComplex1, f: CellularFunction):
    if len(f.vertex_values) != X.vertex_count or len(f.edge_values) != len(X.edges):
        raise ValueError(
            f"function has {len(f.vertex_values)}+{len(f.edge_values)} values, "
            f"complex has {X.vertex_count}+{len(X.edges)} cells"
        )


def is_monotone(X: CellComplex1, f: CellularFunction) -> bool:
    _check_dims(X, f)
    return all(
        f.edge_values[j] >= f.vertex_values[u] and f.edge_values[j] >= f.vertex_values[v]
        for j, (u, v) in enumerate(X.edges)
    )


def _require_monotone(X, f):
    if not is_monotone(X, f):
        raise ValueError("cellular function is not monotone")


def sublevel_merge_forest(X: CellComplex1, f: CellularFunction) -> MergeForest:
    """Components of the sublevel subcomplexes: vertices are born, edges glue."""
    _require_monotone(X, f)
    forest, _ = sweep(
        f.vertex_values,
        [(f.edge_values[j], u, v) for j, (u, v) in enumerate(X.edges)],
        leaf_prefix="v",
    )
    return forest


def incidence_presentation(X: CellComplex1, f: CellularFunction) -> Presentation:
    """Generators are vertices, relations are edges, labels are the function values."""
    _require_monotone(X, f)
    if len(X.components()) != 1:
        raise ValueError("complex is disconnected; use component_presentations")
    return Presentation(
        f.vertex_values,
        tuple(Relation(f.edge_values[j], u, v) for j, (u, v) in enumerate(X.edges)),
    )


def component_presentations(X: CellComplex1, f: CellularFunction) -> list[Presentation]:
    """One incidence presentation per connected component of X."""
    _require_monotone(X, f)
    out = []
    for comp in X.components():
        idx = {v: i for i, v in enumerate(comp)}
        rels = tuple(
            Relation(f.edge_values[j], idx[u], idx[v])
            for j, (u, v) in enumerate(X.edges)
            if u in idx
        )
        out.append(Presentation(tuple(f.vertex_values[v] for v in comp), rels))
    return out


def lp_function_distance(f: CellularFunction, g: CellularFunction, p=1.0) -> float:
    p = parse_p(p)
    if len(f.vertex_values) != len(g.vertex_values) or len(f.edge_values) != len(g.edge_values):
        raise ValueError("functions live on complexes of different shapes")
    return lp_norm([a - b for a, b in zip(f.values, g.values)], p)


def geometric_lift(
    pM: Presentation, pN: Presentation
) -> tuple[CellComplex1, CellularFunction, CellularFunction]:
    """A complex and two monotone functions whose sublevel trees are the coequalizers.

    One vertex per generator and one edge per relation.  A relation with both
    merge functions landing in the same generator would be a loop; it is
    attached instead to another vertex already in that generator's component
    at the relation's birth on both sides (no change to the distance), or,
    failing that, to a fresh vertex born at the relation's birth (invisible in
    both sublevel trees, but adding that column's term once more).
    """
    if not are_compatible(pM, pN):
        raise IncompatibleError("geometric lifting needs compatible presentations")
    edges = []
    fv, gv = list(pM.generators), list(pN.generators)
    fe, ge = [], []
    for j, (rm, rn) in enumerate(zip(pM.relations, pN.relations)):
        u, v = rm.f, rm.g
        if u == v:
            v = _partner(pM, pN, j, u)
            if v is None:
                v = len(fv)
                fv.append(rm.birth)
                gv.append(rn.birth)
        edges.append((u, v))
        fe.append(rm.birth)
        ge.append(rn.birth)
    X = CellComplex1(len(fv), tuple(edges))
    return X, CellularFunction(tuple(fv), tuple(fe)), CellularFunction(tuple(gv), tuple(ge))


def _partner(pM: Presentation, pN: Presentation, j: int, u: int):
    """A generator other than ``u`` joined to ``u`` by relation ``j``'s birth in both."""

    def joined(P):
        t = P.relations[j].birth
        alive = [i for i, b in enumerate(P.generators) if b <= t]
        idx = {g: n for n, g in enumerate(alive)}
        rels = [
            (r.birth, idx[r.f], idx[r.g])
            for i, r in enumerate(P.relations)
            if i != j and r.birth <= t
        ]
        # the forest at t has one tree per component of the sublevel set
        _, pts = sweep([P.generators[i] for i in alive], rels)
        tree_of = {g: pts[n][0] for n, g in enumerate(alive)}
        return {g for g in alive if g != u and tree_of[g] == tree_of[u]}

    common = joined(pM) & joined(pN)
    return min(common) if common else None


def random_monotone_pair(rng: random.Random, max_cells: int = 12):
    """Random connected graph with two monotone functions on it.

    Vertex values are uniform on [0, 1]; each edge takes the max of its
    endpoints plus uniform [0, 1] slack.  Values are rounded to 1/64 so runs
    are exactly reproducible and arithmetic on them is exact.
    """
    nv = rng.randint(1, max(1, (max_cells + 1) // 2))
    edges: list[tuple[int, int]] = []
    for v in range(1, nv):
        edges.append((rng.randrange(v), v))
    extra = [(a, b) for a in range(nv) for b in range(a + 1, nv) if (a, b) not in edges]
    rng.shuffle(extra)
    budget = max_cells - nv - len(edges)
    edges += extra[: rng.randint(0, max(0, min(budget, len(extra))))]
    X = CellComplex1(nv, tuple(edges))

    def draw():
        vv = [_grid(rng.random()) for _ in range(nv)]
        ev = [_grid(max(vv[a], vv[b]) + rng.random()) for a, b in edges]
        return CellularFunction(tuple(vv), tuple(ev))

    return X, draw(), draw()


def _grid(x: float) -> float:
    return math.floor(x * 64) / 64
