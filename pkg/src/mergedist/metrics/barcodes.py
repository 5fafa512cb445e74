"""Elder-rule barcodes of merge trees and the degree-0 rank invariant."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..trees import MergeTree, evolution_map, leaves, to_persistent_set

__all__ = ["Interval", "Barcode", "elder_barcode", "rank_from_barcode", "rank_from_tree"]


@dataclass(frozen=True, order=True)
class Interval:
    birth: float
    death: float = math.inf

    def __post_init__(self):
        if not self.birth <= self.death:
            raise ValueError(f"interval [{self.birth}, {self.death}) has birth after death")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.death)

    @property
    def midpoint(self) -> float:
        if not self.bounded:
            raise ValueError("midpoint of an unbounded interval is undefined")
        return (self.birth + self.death) / 2

    def contains(self, s: float, t: float) -> bool:
        """Whether [s, t] lies inside the half-open interval."""
        return self.birth <= s and t < self.death


@dataclass(frozen=True)
class Barcode:
    bars: tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "bars", tuple(b if isinstance(b, Interval) else Interval(*b) for b in self.bars)
        )

    def __len__(self):
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def sorted(self) -> "Barcode":
        return Barcode(tuple(sorted(self.bars)))

    def to_dict(self) -> dict:
        return {
            "bars": [
                {"birth": b.birth, "death": b.death if b.bounded else "inf"} for b in self.bars
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Barcode":
        bars = []
        for b in d["bars"]:
            death = b["death"]
            if isinstance(death, str):
                if death.strip().lower() not in ("inf", "+inf", "infinity"):
                    raise ValueError(f"bad death value {death!r}")
                death = math.inf
            bars.append(Interval(float(b["birth"]), float(death)))
        return cls(tuple(bars))


def elder_barcode(tree: MergeTree) -> Barcode:
    """One bar per leaf; at every merge all but the eldest branch die."""
    nt = tree.normalized()
    pos = {v: i for i, v in enumerate(leaves(nt))}
    bars: list[Interval] = []

    def eldest(v):
        n = nt.by_id[v]
        if not n.children:
            return (n.height, pos[v])
        keys = sorted(eldest(c) for c in n.children)
        for k in keys[1:]:
            bars.append(Interval(k[0], n.height))
        return keys[0]

    top = eldest(nt.root)
    bars.append(Interval(top[0], math.inf))
    return Barcode(tuple(sorted(bars)))


def rank_from_barcode(barcode: Barcode, s: float, t: float) -> int:
    return sum(1 for b in barcode if b.contains(s, t))


def rank_from_tree(tree: MergeTree, s: float, t: float) -> int:
    """Size of the image of M(s <= t)."""
    return len(set(evolution_map(to_persistent_set(tree), s, t)))
