"""Presentations of merge trees by generating and relating strands.

A presentation stores generator births and, for each relation, its birth and
the two generator indices its merge functions land in.  The 0/1 presentation
matrix is derived from those endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import IncompatibleError, PresentationError
from .norms import lp_norm, parse_p
from .trees import MergeForest, MergeTree, leaves, sweep

__all__ = [
    "Relation",
    "Presentation",
    "PresentationMatrix",
    "LabelVector",
    "minimal_presentation",
    "coequalize",
    "coequalizer_points",
    "add_trivial_pair",
    "are_compatible",
    "pad_concatenate",
    "label_distance",
]


@dataclass(frozen=True)
class Relation:
    birth: float
    f: int
    g: int


@dataclass(frozen=True)
class LabelVector:
    generator_labels: tuple[float, ...]
    relation_labels: tuple[float, ...]

    @property
    def values(self) -> np.ndarray:
        return np.array(self.generator_labels + self.relation_labels, dtype=float)

    def __len__(self):
        return len(self.generator_labels) + len(self.relation_labels)

    def __str__(self):
        gens = ",".join(_fmt(x) for x in self.generator_labels)
        if not self.relation_labels:
            return f"[{gens}]"
        rels = ",".join(_fmt(x) for x in self.relation_labels)
        return f"[{gens};{rels}]"


def _fmt(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class PresentationMatrix:
    entries: np.ndarray
    row_labels: tuple[float, ...]
    col_labels: tuple[float, ...]

    def same_entries(self, other: "PresentationMatrix") -> bool:
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )


@dataclass(frozen=True)
class Presentation:
    generators: tuple[float, ...]
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        gens = tuple(float(x) for x in self.generators)
        rels = tuple(r if isinstance(r, Relation) else Relation(*r) for r in self.relations)
        rels = tuple(Relation(float(r.birth), int(r.f), int(r.g)) for r in rels)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", rels)
        for x in gens:
            if not math.isfinite(x):
                raise PresentationError(f"generator birth {x} is not finite")
        k = len(gens)
        for j, r in enumerate(rels):
            if not math.isfinite(r.birth):
                raise PresentationError(f"relation {j}: birth {r.birth} is not finite")
            for end in (r.f, r.g):
                if not 0 <= end < k:
                    raise PresentationError(f"relation {j}: generator index {end} out of range")
                if gens[end] > r.birth:
                    raise PresentationError(
                        f"relation {j} born at {r.birth} maps into generator {end} "
                        f"born later at {gens[end]}"
                    )

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def l(self) -> int:
        return len(self.relations)

    @cached_property
    def matrix(self) -> PresentationMatrix:
        m = np.zeros((self.k, self.l), dtype=np.int8)
        for j, r in enumerate(self.relations):
            m[r.f, j] = 1
            m[r.g, j] = 1
        return PresentationMatrix(m, self.generators, tuple(r.birth for r in self.relations))

    @property
    def labels(self) -> LabelVector:
        return LabelVector(self.generators, tuple(r.birth for r in self.relations))

    def with_labels(self, values: Sequence[float]) -> "Presentation":
        """Same endpoints, new label vector (generators first)."""
        if len(values) != self.k + self.l:
            raise PresentationError(f"expected {self.k + self.l} labels, got {len(values)}")
        gens = tuple(values[: self.k])
        rels = tuple(
            Relation(values[self.k + j], r.f, r.g) for j, r in enumerate(self.relations)
        )
        return Presentation(gens, rels)

    def permuted(self, order: Sequence[int]) -> "Presentation":
        """Reorder generators: new generator ``i`` is old generator ``order[i]``."""
        inv = {old: new for new, old in enumerate(order)}
        return Presentation(
            tuple(self.generators[o] for o in order),
            tuple(Relation(r.birth, inv[r.f], inv[r.g]) for r in self.relations),
        )

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": [{"birth": r.birth, "f": r.f, "g": r.g} for r in self.relations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Presentation":
        return cls(
            tuple(d["generators"]),
            tuple(Relation(r["birth"], r["f"], r["g"]) for r in d.get("relations", [])),
        )


def _as_tree(tree) -> MergeTree:
    if isinstance(tree, MergeForest):
        return tree.single()
    return tree


def minimal_presentation(tree: MergeTree) -> Presentation:
    """One generator per leaf and one relation fewer than leaves.

    Generators follow the depth-first leaf order of the tree.  At a merge of
    ``m`` branches, ``m - 1`` relations tie the eldest branch's representative
    (smallest birth, then smallest index) to each other representative.
    """
    nt = _as_tree(tree).normalized()
    lv = leaves(nt)
    gen_of = {v: i for i, v in enumerate(lv)}
    gens = tuple(nt.by_id[v].height for v in lv)
    rels: list[tuple[float, int, int, int]] = []

    def rep(v) -> int:
        n = nt.by_id[v]
        if not n.children:
            return gen_of[v]
        reps = [rep(c) for c in n.children]
        elder = min(reps, key=lambda i: (gens[i], i))
        for r in reps:
            if r != elder:
                rels.append((n.height, len(rels), elder, r))
        return elder

    rep(nt.root)
    rels.sort()
    return Presentation(gens, tuple(Relation(h, f, g) for h, _, f, g in rels))


def coequalizer_points(p: Presentation) -> tuple[MergeForest, list[tuple[int, str]]]:
    """Coequalizer plus, per generator, the point it represents at its birth."""
    return sweep(p.generators, [(r.birth, r.f, r.g) for r in p.relations])


def coequalize(p: Presentation) -> MergeForest:
    return coequalizer_points(p)[0]


def add_trivial_pair(p: Presentation, a: float, target: int) -> Presentation:
    """Append a generator born at ``a`` killed at ``a`` by a relation into ``target``."""
    if not 0 <= target < p.k:
        raise PresentationError(f"target generator {target} out of range")
    if a < p.generators[target]:
        raise PresentationError(
            f"trivial pair at {a} cannot map into generator {target} born at {p.generators[target]}"
        )
    new = p.k
    return Presentation(p.generators + (a,), p.relations + (Relation(a, new, target),))


def are_compatible(p: Presentation, q: Presentation) -> bool:
    return p.matrix.same_entries(q.matrix)


def _max_label(p: Presentation) -> float:
    return max(p.generators + tuple(r.birth for r in p.relations))


def pad_concatenate(pM: Presentation, pN: Presentation, t: float) -> tuple[Presentation, Presentation]:
    """Compatible presentations with underlying matrix ``(P_M | P_N)``.

    The shorter presentation is first padded with trivial pairs born at ``t``.
    Each side keeps its own generator labels and relation block and gives the
    other side's block the label ``t``, so ``t`` must be at least every label
    of both inputs (all strands of both trees have met by then).
    """
    need = max(_max_label(pM), _max_label(pN))
    if t < need:
        raise PresentationError(f"concatenation height {t} is below label {need}")
    while pM.k < pN.k:
        pM = add_trivial_pair(pM, t, 0)
    while pN.k < pM.k:
        pN = add_trivial_pair(pN, t, 0)
    rm = pM.relations
    rn = pN.relations
    tM = Presentation(pM.generators, rm + tuple(Relation(t, r.f, r.g) for r in rn))
    tN = Presentation(pN.generators, tuple(Relation(t, r.f, r.g) for r in rm) + rn)
    return tM, tN


def label_distance(pM: Presentation, pN: Presentation, p=1.0) -> float:
    p = parse_p(p)
    if not are_compatible(pM, pN):
        raise IncompatibleError("label distance needs compatible presentations")
    a = pM.generators + tuple(r.birth for r in pM.relations)
    b = pN.generators + tuple(r.birth for r in pN.relations)
    return lp_norm([x - y for x, y in zip(a, b)], p)
