"""Persistent homology of alpha filtrations over the two-element field."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import NoCycleError, NotALoopError
from .geometry import Filtration


@dataclass(frozen=True)
class PersistencePair:
    dimension: int
    birth: float
    death: float
    birth_simplex: int
    death_simplex: Optional[int]

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    @property
    def essential(self) -> bool:
        return self.death_simplex is None


@dataclass(frozen=True)
class PersistenceDiagram:
    """Pairs of one dimension, most persistent first.

    Essential pairs lead; ties are broken by birth and then birth simplex.
    """

    dimension: int
    pairs: Tuple[PersistencePair, ...]

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, k):
        return self.pairs[k]

    def __iter__(self):
        return iter(self.pairs)

    def finite(self) -> Tuple[PersistencePair, ...]:
        return tuple(p for p in self.pairs if not p.essential)

    def as_array(self) -> np.ndarray:
        return np.array([[p.birth, p.death] for p in self.pairs]).reshape(-1, 2)


@dataclass(frozen=True)
class Persistence:
    """Diagrams by dimension plus the full simplex pairing.

    ``pairing`` keeps zero-persistence pairs as well, as
    ``(birth_simplex, death_simplex_or_None)`` in filtration order of birth.
    """

    diagrams: Tuple[PersistenceDiagram, ...]
    pairing: Tuple[Tuple[int, Optional[int]], ...]

    def __getitem__(self, dim) -> PersistenceDiagram:
        return self.diagrams[dim]

    def __iter__(self):
        return iter(self.diagrams)

    def __len__(self):
        return len(self.diagrams)


def _boundary_masks(filtration: Filtration, pos):
    """Boundary column of every simplex as an int bitmask over order positions."""
    lookup = {s: i for i, s in enumerate(filtration.simplices)}
    cols = []
    for s in filtration.simplices:
        mask = 0
        if len(s) > 1:
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1:]
                mask |= 1 << int(pos[lookup[face]])
        cols.append(mask)
    return cols


def _sort_key(p: PersistencePair):
    return (-p.persistence, p.birth, p.birth_simplex)


def reduce_filtration(filtration: Filtration, max_dim: int = 1):
    """Standard column reduction in filtration order.

    Returns ``(pairing, pos)`` where ``pairing`` maps each positive simplex
    index to its death simplex index (or None) and ``pos`` maps simplex index
    to filtration position.
    """
    order = filtration.order
    pos = np.empty(len(order), dtype=int)
    pos[order] = np.arange(len(order))
    cols = _boundary_masks(filtration, pos)
    dims = filtration.dims
    pivot_col = {}   # low position -> position of the column owning it
    reduced = {}
    births = {}
    for j, k in enumerate(order):
        k = int(k)
        if dims[k] > max_dim + 1:
            continue
        col = cols[k]
        while col:
            low = col.bit_length() - 1
            other = pivot_col.get(low)
            if other is None:
                break
            col ^= reduced[other]
        if col:
            low = col.bit_length() - 1
            pivot_col[low] = j
            reduced[j] = col
            births[int(order[low])] = k
        elif dims[k] <= max_dim:
            births.setdefault(k, None)
    pairing = {b: births[b] for b in births}
    return pairing, pos


def compute_persistence(filtration: Filtration, max_dim: int = 1) -> Persistence:
    """H0 .. H``max_dim`` persistence diagrams of an alpha filtration."""
    pairing, pos = reduce_filtration(filtration, max_dim)
    values = filtration.values
    dims = filtration.dims
    per_dim: List[List[PersistencePair]] = [[] for _ in range(max_dim + 1)]
    for b, d in pairing.items():
        dim = int(dims[b])
        if dim > max_dim:
            continue
        birth = float(values[b])
        death = math.inf if d is None else float(values[d])
        if death == birth:
            continue
        per_dim[dim].append(PersistencePair(dim, birth, death, b, d))
    diagrams = tuple(PersistenceDiagram(dim, tuple(sorted(pairs, key=_sort_key)))
                     for dim, pairs in enumerate(per_dim))
    ordered = tuple(sorted(pairing.items(), key=lambda bd: pos[bd[0]]))
    return Persistence(diagrams, ordered)


def betti(diagram: PersistenceDiagram, t: float) -> int:
    """Number of classes alive at time t (birth <= t < death)."""
    return sum(1 for p in diagram.pairs if p.birth <= t < p.death)


def _birth_chain(filtration: Filtration, birth_edge: int) -> List[Tuple[int, int]]:
    """Edges of the cycle created when ``birth_edge`` enters the filtration.

    Replays the edge-column reduction while tracking which columns were
    added (the V matrix), stopping at the birth edge.
    """
    order = filtration.order
    pos = np.empty(len(order), dtype=int)
    pos[order] = np.arange(len(order))
    simplices = filtration.simplices
    pivot_col = {}
    reduced = {}
    chains = {}
    for j, k in enumerate(order):
        k = int(k)
        s = simplices[k]
        if len(s) != 2:
            continue
        col = (1 << int(pos[s[0]])) | (1 << int(pos[s[1]]))
        chain = 1 << j
        while col:
            low = col.bit_length() - 1
            other = pivot_col.get(low)
            if other is None:
                break
            col ^= reduced[other]
            chain ^= chains[other]
        if k == birth_edge:
            if col:
                raise NoCycleError(f"simplex {k} does not create a cycle")
            break
        if col:
            low = col.bit_length() - 1
            pivot_col[low] = j
            reduced[j] = col
            chains[j] = chain
    edges = []
    while chain:
        j = chain.bit_length() - 1
        edges.append(simplices[int(order[j])])
        chain ^= 1 << j
    return edges


def _as_loop(edges) -> Tuple[int, ...]:
    adj = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(len(nb) != 2 for nb in adj.values()):
        raise NotALoopError("cycle chain has a vertex of degree other than 2")
    start = min(adj)
    loop = [start]
    prev, cur = start, min(adj[start])
    while cur != start:
        loop.append(cur)
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)
    if len(loop) != len(adj):
        raise NotALoopError("cycle chain is a union of several loops")
    return tuple(loop)


def representative_cycle(filtration: Filtration, diagram: PersistenceDiagram,
                         pair_index: int = 0) -> Tuple[int, ...]:
    """Vertex loop of the cycle born with a finite H1 pair.

    The loop starts at its lowest point index and continues towards the
    smaller of that vertex's two neighbours; closure back to the start is
    implied.
    """
    if diagram.dimension != 1 or not diagram.finite():
        raise NoCycleError("diagram has no finite H1 pair")
    pair = diagram.pairs[pair_index]
    if pair.essential:
        raise NoCycleError("essential pairs have no finite representative")
    return _as_loop(_birth_chain(filtration, pair.birth_simplex))
