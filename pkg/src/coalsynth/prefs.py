"""Preorders over goal formulas and the induced ranking of satisfaction classes.

Formula subsets are int bitmasks (bit ``k`` set means formula ``k``).  A
*class* is the set of undominated satisfied formulas (the MP set).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable


class Cmp(enum.Enum):
    BETTER = "strictly-better"
    WORSE = "strictly-worse"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for k in indices:
        m |= 1 << k
    return m


def members(mask: int) -> list[int]:
    out, k = [], 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


@dataclass(frozen=True)
class PreferenceModel:
    """``geq[a][b]`` means formula ``a`` is at least as preferred as ``b``."""

    m: int
    geq: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        for a in range(self.m):
            if not self.geq[a][a]:
                raise ValueError("preference relation must be reflexive")
            for b in range(self.m):
                for c in range(self.m):
                    if self.geq[a][b] and self.geq[b][c] and not self.geq[a][c]:
                        raise ValueError("preference relation must be transitive")

    def strictly(self, a: int, b: int) -> bool:
        return self.geq[a][b] and not self.geq[b][a]

    def incomparable(self, a: int, b: int) -> bool:
        return not self.geq[a][b] and not self.geq[b][a]

    def edges(self) -> list[tuple[int, int]]:
        """Non-reflexive pairs of the relation, sorted."""
        return [(a, b) for a in range(self.m) for b in range(self.m)
                if a != b and self.geq[a][b]]


def build_preference(m: int, edges: Iterable[tuple[int, int]]) -> PreferenceModel:
    """Reflexive-transitive closure of ``(better, worse)`` pairs over ``m`` formulas."""
    rel = [[a == b for b in range(m)] for a in range(m)]
    for a, b in edges:
        if not (0 <= a < m and 0 <= b < m):
            raise IndexError(f"preference edge ({a}, {b}) out of range for {m} formulas")
        rel[a][b] = True
    for k in range(m):
        for a in range(m):
            if rel[a][k]:
                row_k = rel[k]
                row_a = rel[a]
                for b in range(m):
                    if row_k[b]:
                        row_a[b] = True
    return PreferenceModel(m, tuple(tuple(r) for r in rel))


def mp_set(model: PreferenceModel, satisfied: int) -> int:
    """Satisfied formulas not strictly dominated by another satisfied formula."""
    sat = members(satisfied)
    keep = 0
    for a in sat:
        if not any(model.strictly(b, a) for b in sat):
            keep |= 1 << a
    return keep


def class_geq(model: PreferenceModel, c1: int, c2: int) -> bool:
    """c1 >= c2 iff every member of c2 is dominated by some member of c1."""
    m1 = members(c1)
    return all(any(model.geq[a][b] for a in m1) for b in members(c2))


def compare_classes(model: PreferenceModel, c1: int, c2: int) -> Cmp:
    if c1 == c2:
        return Cmp.EQUIVALENT
    fwd = class_geq(model, c1, c2)
    back = class_geq(model, c2, c1)
    if fwd and back:
        return Cmp.EQUIVALENT
    if fwd:
        return Cmp.BETTER
    if back:
        return Cmp.WORSE
    return Cmp.INCOMPARABLE


@dataclass(frozen=True)
class ClassOrder:
    classes: tuple[int, ...]
    order: tuple[tuple[bool, ...], ...]    # order[x][y]: classes[x] >= classes[y]
    rank: dict
    rank_max: int
    layers: tuple[tuple[int, ...], ...]

    def strictly(self, c1: int, c2: int) -> bool:
        x, y = self.classes.index(c1), self.classes.index(c2)
        return self.order[x][y] and not self.order[y][x]


def all_classes(model: PreferenceModel) -> list[int]:
    """Every MP image of a subset of the formulas, ascending."""
    return sorted({mp_set(model, s) for s in range(1 << model.m)})


def compute_ranks(model: PreferenceModel, classes: Iterable[int]) -> ClassOrder:
    """Peel maximal layers: layer 0 is undominated, layer k+1 is undominated in the rest."""
    cls = tuple(sorted(set(classes)))
    if not cls:
        raise ValueError("compute_ranks needs at least one class")
    n = len(cls)
    order = tuple(tuple(class_geq(model, cls[x], cls[y]) for y in range(n)) for x in range(n))
    remaining = set(range(n))
    rank = {}
    layers = []
    while remaining:
        layer = sorted(x for x in remaining
                       if not any(order[y][x] and not order[x][y] for y in remaining))
        for x in layer:
            rank[cls[x]] = len(layers)
        layers.append(tuple(cls[x] for x in layer))
        remaining -= set(layer)
    return ClassOrder(cls, order, rank, len(layers) - 1, tuple(layers))
