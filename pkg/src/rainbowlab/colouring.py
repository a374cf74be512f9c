"""Proper edge-colourings, rainbow detection, interest/compatible sets,
and an exact backtracking decider for "every proper colouring contains a
rainbow copy".

Colours are dense non-negative ints; equality is their only meaning.
Colourings may be partial; rainbow checks treat uncoloured edges as
wildcards that never clash.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .errors import ParameterError
from .graph import Graph, common_neighbourhood, enumerate_copies

__all__ = [
    "EdgeColouring",
    "ArrowsVerdict",
    "is_proper",
    "find_properness_clash",
    "rainbow_copies",
    "has_rainbow_copy",
    "interest_set",
    "compatible_set",
    "random_proper_colouring",
    "decide_arrows",
    "colouring_to_json",
    "colouring_from_json",
]


class EdgeColouring:
    """Partial edge colouring of a fixed graph.

    Tracks per-vertex colour multiplicities so properness queries and
    conflict checks are O(1) per incident colour, and hands out fresh
    colours monotonically.
    """

    __slots__ = ("graph", "_col", "_at", "next_colour")

    def __init__(self, graph: Graph, colours=None):
        self.graph = graph
        self._col: dict[tuple[int, int], int] = {}
        self._at = [Counter() for _ in range(graph.n)]
        self.next_colour = 0
        if colours:
            items = colours.items() if isinstance(colours, dict) else colours
            for key, c in items:
                u, v = key
                self.assign(u, v, c)

    def _key(self, u: int, v: int) -> tuple[int, int]:
        if not self.graph.has_edge(u, v):
            raise ParameterError(f"({u},{v}) is not an edge of the companion graph")
        return (u, v) if u < v else (v, u)

    def assign(self, u: int, v: int, colour: int) -> None:
        if colour < 0:
            raise ParameterError(f"colour ids must be >= 0, got {colour}")
        key = self._key(u, v)
        old = self._col.get(key)
        if old is not None:
            self._at[u][old] -= 1
            self._at[v][old] -= 1
        self._col[key] = colour
        self._at[u][colour] += 1
        self._at[v][colour] += 1
        if colour >= self.next_colour:
            self.next_colour = colour + 1

    def get(self, u: int, v: int):
        return self._col.get(self._key(u, v))

    def fresh_colour(self) -> int:
        return self.next_colour

    def assign_fresh(self, u: int, v: int) -> int:
        c = self.next_colour
        self.assign(u, v, c)
        return c

    def domain(self) -> list[tuple[int, int]]:
        return sorted(self._col)

    def is_total(self) -> bool:
        return len(self._col) == self.graph.m

    def colours_used(self) -> set[int]:
        return set(self._col.values())

    def colour_set(self, edges) -> set[int]:
        """Colours on the given edges; uncoloured edges contribute nothing."""
        out = set()
        for u, v in edges:
            c = self._col.get((u, v) if u < v else (v, u))
            if c is not None:
                out.add(c)
        return out

    def would_clash(self, u: int, v: int, colour: int) -> bool:
        """Would assigning `colour` to uv break properness?"""
        key = self._key(u, v)
        cu = self._at[u][colour]
        cv = self._at[v][colour]
        if self._col.get(key) == colour:
            cu -= 1
            cv -= 1
        return cu > 0 or cv > 0

    def colours_at(self, v: int) -> set[int]:
        return {c for c, k in self._at[v].items() if k > 0}

    def copy(self) -> "EdgeColouring":
        out = EdgeColouring.__new__(EdgeColouring)
        out.graph = self.graph
        out._col = dict(self._col)
        out._at = [Counter(c) for c in self._at]
        out.next_colour = self.next_colour
        return out

    def __len__(self):
        return len(self._col)

    def __repr__(self):
        return f"EdgeColouring({len(self._col)}/{self.graph.m} edges, {len(self.colours_used())} colours)"


@dataclass
class ArrowsVerdict:
    outcome: str  # "arrows" | "witness" | "unknown"
    witness: EdgeColouring | None
    nodes: int

    @property
    def arrows(self) -> bool:
        return self.outcome == "arrows"


def is_proper(g: Graph, psi: EdgeColouring) -> bool:
    if psi.graph is not g and psi.graph != g:
        raise ParameterError("colouring belongs to a different graph")
    for v in range(g.n):
        if any(k > 1 for k in psi._at[v].values()):
            return False
    return True


def find_properness_clash(g: Graph, psi: EdgeColouring):
    """First properness violation as (vertex, colour, offending edges).

    Returns None when psi is proper; otherwise the offending edges are
    the >= 2 edges at `vertex` that share `colour`.
    """
    if psi.graph is not g and psi.graph != g:
        raise ParameterError("colouring belongs to a different graph")
    for v in range(g.n):
        at = psi._at[v]
        if at and max(at.values()) > 1:
            c = next(c for c, k in at.items() if k > 1)
            edges = tuple(
                (min(v, u), max(v, u))
                for u in g.neighbours(v)
                if psi.get(v, u) == c
            )
            return v, c, edges
    return None


def rainbow_copies(g: Graph, psi: EdgeColouring, h: Graph) -> list[tuple[int, ...]]:
    """Embeddings of h in g whose coloured image edges have pairwise
    distinct colours. Uncoloured edges are wildcards."""
    out = []
    for emb in enumerate_copies(g, h):
        cols = []
        for u, v in h.edges:
            c = psi.get(emb[u], emb[v])
            if c is not None:
                cols.append(c)
        if len(cols) == len(set(cols)):
            out.append(emb)
    return out


def has_rainbow_copy(g: Graph, psi: EdgeColouring, h: Graph) -> bool:
    return bool(rainbow_copies(g, psi, h))


def interest_set(g: Graph, psi: EdgeColouring, k_vertices) -> set[int]:
    """Common neighbours of K whose cross-star colours avoid the colours
    used inside K."""
    ks = sorted(k_vertices)
    inside = psi.colour_set(
        (a, b) for i, a in enumerate(ks) for b in ks[i + 1:] if g.has_edge(a, b)
    )
    pool = common_neighbourhood(g, ks)
    out = set()
    for x in pool:
        cross = psi.colour_set((x, k) for k in ks)
        if not (cross & inside):
            out.add(x)
    return out


def compatible_set(g: Graph, psi: EdgeColouring, k_vertices) -> set[int]:
    """Greedy (ascending vertex id) sub-family of the interest set whose
    cross-star colour sets are pairwise disjoint."""
    ks = sorted(k_vertices)
    chosen: set[int] = set()
    taken: set[int] = set()
    for x in sorted(interest_set(g, psi, ks)):
        cross = psi.colour_set((x, k) for k in ks)
        if not (cross & taken):
            chosen.add(x)
            taken |= cross
    return chosen


def random_proper_colouring(g: Graph, rng, fresh_bias: float) -> EdgeColouring:
    """Random proper colouring: random edge order; each edge goes fresh
    with probability fresh_bias, else takes a uniform non-conflicting
    already-used colour (fresh when none is available)."""
    if not (0.0 <= fresh_bias <= 1.0):
        raise ParameterError(f"fresh_bias must be a probability, got {fresh_bias}")
    psi = EdgeColouring(g)
    order = list(g.edges)
    rng.shuffle(order)
    for u, v in order:
        if fresh_bias < 1.0 and rng.random() >= fresh_bias:
            blocked = psi.colours_at(u) | psi.colours_at(v)
            legal = [c for c in range(psi.next_colour) if c not in blocked]
            if legal:
                psi.assign(u, v, legal[rng.randrange(len(legal))])
                continue
        psi.assign_fresh(u, v)
    return psi


def decide_arrows(g: Graph, h: Graph, node_budget: int = 2_000_000) -> ArrowsVerdict:
    """Does every proper edge-colouring of g contain a rainbow copy of h?

    Exhaustive backtracking over colour assignments.  Completeness rests on
    colour-permutation invariance: a fresh colour is only ever introduced
    as (max used + 1), which enumerates proper colourings up to renaming,
    and the rainbow-free property is renaming-invariant.
    """
    if node_budget <= 0:
        raise ParameterError(f"node budget must be positive, got {node_budget}")
    m = g.m
    copy_sets = sorted({
        frozenset(g.edge_id(emb[u], emb[v]) for u, v in h.edges)
        for emb in enumerate_copies(g, h)
    }, key=sorted)
    copies = [tuple(sorted(cs)) for cs in copy_sets]
    through: list[list[int]] = [[] for _ in range(m)]
    for ci, es in enumerate(copies):
        for e in es:
            through[e].append(ci)
    order = sorted(range(m), key=lambda e: (-len(through[e]), e))
    adj_list = [
        [f for f in range(m) if f != e and set(g.edges[e]) & set(g.edges[f])]
        for e in range(m)
    ]
    col = [-1] * m
    nodes = 0
    h_size = h.m

    def copy_blocks(e: int) -> bool:
        """After colouring e: does some copy become rainbow, or rainbow-forced?"""
        for ci in through[e]:
            es = copies[ci]
            seen = []
            missing = []
            for f in es:
                if col[f] >= 0:
                    seen.append(col[f])
                else:
                    missing.append(f)
            if len(set(seen)) != len(seen):
                continue  # already a repeat inside: never rainbow
            if not missing:
                return True  # fully coloured and rainbow
            if len(missing) == 1 and h_size >= 2:
                f = missing[0]
                # f must repeat a copy colour; conflicts only grow, so if no
                # copy colour is currently legal at f the copy is doomed
                legal = False
                for c in set(seen):
                    if all(col[x] != c for x in adj_list[f]):
                        legal = True
                        break
                if not legal:
                    return True
        return False

    def search(pos: int, max_used: int):
        nonlocal nodes
        if pos == m:
            return True
        e = order[pos]
        for c in range(min(max_used + 2, m)):
            nodes += 1
            if nodes > node_budget:
                return None
            if any(col[f] == c for f in adj_list[e]):
                continue
            col[e] = c
            if not copy_blocks(e):
                r = search(pos + 1, max(max_used, c))
                if r is not False:
                    return r
            col[e] = -1
        return False

    result = search(0, -1)
    if result is None:
        return ArrowsVerdict("unknown", None, nodes)
    if result is False:
        return ArrowsVerdict("arrows", None, nodes)
    witness = EdgeColouring(g)
    for e in range(m):
        u, v = g.edges[e]
        witness.assign(u, v, col[e])
    return ArrowsVerdict("witness", witness, nodes)


# -- serialization ---------------------------------------------------------


def colouring_to_json(psi: EdgeColouring) -> str:
    return json.dumps({"edges": [[u, v, psi.get(u, v)] for u, v in psi.domain()]})


def colouring_from_json(g: Graph, text: str) -> EdgeColouring:
    data = json.loads(text)
    psi = EdgeColouring(g)
    for u, v, c in data["edges"]:
        psi.assign(u, v, c)
    return psi
