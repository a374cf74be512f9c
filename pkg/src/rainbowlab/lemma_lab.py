"""Guaranteed rainbow-clique extractors over coloured join scaffolds.

Each public extractor consumes a properly edge-coloured *scaffold* — a
join of two structured sides — and returns a rainbow clique whose
existence is forced by counting alone.  The procedures are fully
constructive: every step either picks an object that provably exists
(pigeonhole over distinct colours at a shared vertex, a colour budget
smaller than a candidate list, ...) or raises CounterexampleFound
carrying the whole instance.  A genuine CounterexampleFound on a valid
input would falsify the combinatorial statement the extractor
implements, so the trial harness archives it verbatim.

Scaffolds and their guarantees
------------------------------
* ``rainbow_k4_scaffold``  — the 3-leaf star joined to the 4-leaf star.
  The four right-star colours are distinct, the left side uses at most
  three, so a right edge with an unused colour exists and one of the
  three left edges completes it to a rainbow K4.
* ``rainbow_k5_scaffold``  — a triangle joined to a 4-leaf star.  When
  everything except the star edges is rainbow, one of the four star
  edges avoids the three triangle colours and yields a rainbow K5.
* ``triangle_pair_instance`` — the 7-vertex double-triangle cherry next
  to a 10-triangle fan, vertex disjoint.  Any proper colouring admits a
  fan triangle and a cherry triangle with disjoint colour sets.
* ``rainbow_k6_scaffold``  — 31 cherries joined to a 10-triangle fan.
  Votes from the per-cherry triangle pairs pigeonhole onto one fan
  triangle; a rainbow cross then pins a rainbow K6.
* ``spoked_fan_instance``  — a 25-spoke star whose every spoke edge
  carries 49 pendant triangles.  Deleting any 24 matchings leaves a
  triangle intact.
* ``rainbow_k7_scaffold``  — four triangle-join blocks next to the
  spoked fan.  Pruning the at most 24 colours of the blocks' rainbow
  K4s removes at most 24 matchings, so a surviving fan triangle plus a
  clean cross block forms a rainbow K7.

Precondition violations are reported eagerly as StructureUnsupported
with a structured PreconditionFailure payload instead of proceeding on
bad evidence.  Symmetric "pick either side" arguments are enumerated as
explicit candidate lists, in a fixed deterministic order.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .colouring import (
    EdgeColouring,
    colouring_to_json,
    find_properness_clash,
    random_proper_colouring,
)
from .errors import CounterexampleFound, ParameterError, StructureUnsupported
from .graph import (
    Graph,
    clique,
    disjoint_union,
    graph_to_json,
    hat_k,
    join,
    k_delta,
    r7,
    star,
    t_graph,
)

__all__ = [
    "PreconditionFailure",
    "DoubleTriangleCherry",
    "TriangleFan",
    "SpokedTriangleFan",
    "JoinedTriangleBlock",
    "StarJoinScaffold",
    "TriangleStarScaffold",
    "TrianglePairInstance",
    "RainbowK6Scaffold",
    "SpokedFanInstance",
    "RainbowK7Scaffold",
    "rainbow_k4_scaffold",
    "rainbow_k5_scaffold",
    "triangle_pair_instance",
    "rainbow_k6_scaffold",
    "spoked_fan_instance",
    "rainbow_k7_scaffold",
    "extract_rainbow_k4",
    "extract_rainbow_k5",
    "disjoint_colour_triangles",
    "extract_rainbow_k6",
    "surviving_triangle",
    "extract_rainbow_k7",
    "rainbow_k4_in_block",
    "sample_rainbow_k4_colouring",
    "sample_rainbow_k5_colouring",
    "sample_triangle_pair_colouring",
    "sample_rainbow_k6_colouring",
    "sample_fan_matchings",
    "sample_rainbow_k7_colouring",
    "LemmaTrialReport",
    "LEMMA_NAMES",
    "certify_lemma",
]

# Scaffold dimensions.  Each value is the smallest that closes the
# counting argument used by the corresponding extractor.
FAN_SIZE = 10  # 6 colours at the cherry hub block <= 6 fan triangles, leaving >= 4
CHERRY_COPIES = 31  # 3 * FAN_SIZE + 1 forces four cherries onto one fan triangle
BLOCK_COUNT = 4  # three triangle colours can pollute at most 3 cross blocks
SPOKES = 25  # one more than the 24 prunable colour classes
TRIANGLES_PER_SPOKE = 49  # one more than 2 * 24: a matching kills <= 2 per spoke

_CROSS_PALETTE_BASE = 10**7  # cross colours live far above any side palette


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


# -- structured diagnostics --------------------------------------------------


@dataclass(frozen=True)
class PreconditionFailure:
    """Machine-readable report of a violated extractor precondition."""

    check: str
    detail: str
    witness: tuple = ()


def _fail_precondition(check: str, detail: str, witness: tuple = ()):
    raise StructureUnsupported(
        f"precondition '{check}' violated: {detail}",
        offending=PreconditionFailure(check, detail, witness),
    )


def _counterexample(message: str, graph: Graph, psi: EdgeColouring | None, **extra):
    payload = {"graph": graph_to_json(graph), "detail": extra}
    if psi is not None:
        payload["colouring"] = colouring_to_json(psi)
    raise CounterexampleFound(message, payload)


# -- role descriptors ---------------------------------------------------------


@dataclass(frozen=True)
class DoubleTriangleCherry:
    """The 7-vertex gadget: a path left-hub-right whose two path edges
    each carry two pendant triangle tips."""

    left: int
    hub: int
    right: int
    left_tips: tuple[int, int]
    right_tips: tuple[int, int]

    @classmethod
    def at_offset(cls, off: int) -> "DoubleTriangleCherry":
        return cls(off, off + 1, off + 2, (off + 3, off + 4), (off + 5, off + 6))

    def vertices(self) -> tuple[int, ...]:
        return (self.left, self.hub, self.right) + self.left_tips + self.right_tips

    def edges(self) -> tuple[tuple[int, int], ...]:
        out = [_norm(self.left, self.hub), _norm(self.hub, self.right)]
        for w in self.left_tips:
            out += [_norm(self.left, w), _norm(self.hub, w)]
        for w in self.right_tips:
            out += [_norm(self.hub, w), _norm(self.right, w)]
        return tuple(out)


@dataclass(frozen=True)
class TriangleFan:
    """Triangles glued at a single hub: hub + one rim pair per triangle."""

    hub: int
    rim: tuple[tuple[int, int], ...]

    @classmethod
    def at_offset(cls, off: int, k: int) -> "TriangleFan":
        return cls(off, tuple((off + 2 * i - 1, off + 2 * i) for i in range(1, k + 1)))

    def triangle(self, i: int) -> tuple[int, int, int]:
        a, b = self.rim[i]
        return (self.hub, a, b)

    def vertices(self) -> tuple[int, ...]:
        return (self.hub,) + tuple(v for pair in self.rim for v in pair)

    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for a, b in self.rim:
            out += [_norm(self.hub, a), _norm(self.hub, b), _norm(a, b)]
        return tuple(out)


@dataclass(frozen=True)
class SpokedTriangleFan:
    """A star skeleton (centre + spokes) whose every spoke edge carries
    pendant triangles through private apex vertices."""

    centre: int
    spokes: tuple[int, ...]
    apexes: tuple[tuple[int, ...], ...]

    @classmethod
    def at_offset(cls, off: int, s: int, t: int) -> "SpokedTriangleFan":
        spokes = tuple(off + i for i in range(1, s + 1))
        apexes = tuple(
            tuple(off + s + (i - 1) * t + j for j in range(1, t + 1))
            for i in range(1, s + 1)
        )
        return cls(off, spokes, apexes)

    def skeleton_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(_norm(self.centre, s) for s in self.spokes)

    def triangle(self, i: int, j: int) -> tuple[int, int, int]:
        return (self.centre, self.spokes[i], self.apexes[i][j])

    def vertices(self) -> tuple[int, ...]:
        return (self.centre,) + self.spokes + tuple(p for row in self.apexes for p in row)

    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for i, s in enumerate(self.spokes):
            out.append(_norm(self.centre, s))
            for p in self.apexes[i]:
                out += [_norm(self.centre, p), _norm(s, p)]
        return tuple(out)


@dataclass(frozen=True)
class JoinedTriangleBlock:
    """A triangle joined to four independent vertices (7 vertices, 15 edges)."""

    triangle: tuple[int, int, int]
    free: tuple[int, int, int, int]

    @classmethod
    def at_offset(cls, off: int) -> "JoinedTriangleBlock":
        return cls((off, off + 1, off + 2), (off + 3, off + 4, off + 5, off + 6))

    def vertices(self) -> tuple[int, ...]:
        return self.triangle + self.free

    def edges(self) -> tuple[tuple[int, int], ...]:
        x1, x2, x3 = self.triangle
        out = [_norm(x1, x2), _norm(x1, x3), _norm(x2, x3)]
        for z in self.free:
            out += [_norm(x1, z), _norm(x2, z), _norm(x3, z)]
        return tuple(out)


# -- scaffolds ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StarJoinScaffold:
    """Two stars, every left vertex adjacent to every right vertex."""

    graph: Graph
    left_centre: int
    left_leaves: tuple[int, ...]
    right_centre: int
    right_leaves: tuple[int, ...]

    def left_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(_norm(self.left_centre, x) for x in self.left_leaves)

    def right_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(_norm(self.right_centre, z) for z in self.right_leaves)


@dataclass(frozen=True, eq=False)
class TriangleStarScaffold:
    """A triangle joined to a star; the star edges are the only edges
    allowed to repeat colours of the rest (the rainbow core)."""

    graph: Graph
    triangle: tuple[int, int, int]
    star_centre: int
    star_leaves: tuple[int, ...]
    core_keys: tuple[tuple[int, int], ...]

    def star_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(_norm(self.star_centre, z) for z in self.star_leaves)


@dataclass(frozen=True, eq=False)
class TrianglePairInstance:
    """Vertex-disjoint union of one cherry and one triangle fan."""

    graph: Graph
    cherry: DoubleTriangleCherry
    fan: TriangleFan


@dataclass(frozen=True, eq=False)
class RainbowK6Scaffold:
    graph: Graph
    cherries: tuple[DoubleTriangleCherry, ...]
    fan: TriangleFan
    left_keys: tuple[tuple[int, int], ...]
    right_keys: tuple[tuple[int, int], ...]
    cross_keys: tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class SpokedFanInstance:
    graph: Graph
    roles: SpokedTriangleFan


@dataclass(frozen=True, eq=False)
class RainbowK7Scaffold:
    graph: Graph
    blocks: tuple[JoinedTriangleBlock, ...]
    fan: SpokedTriangleFan
    left_keys: tuple[tuple[int, int], ...]
    right_keys: tuple[tuple[int, int], ...]
    cross_keys: tuple[tuple[int, int], ...]


def _cross_keys(left_vertices, right_vertices) -> tuple[tuple[int, int], ...]:
    return tuple(_norm(u, w) for u in left_vertices for w in right_vertices)


@lru_cache(maxsize=None)
def rainbow_k4_scaffold() -> StarJoinScaffold:
    g = join(star(3), star(4))
    return StarJoinScaffold(g, 0, (1, 2, 3), 4, (5, 6, 7, 8))


@lru_cache(maxsize=None)
def rainbow_k5_scaffold() -> TriangleStarScaffold:
    g = join(clique(3), star(4))
    triangle = (0, 1, 2)
    centre, leaves = 3, (4, 5, 6, 7)
    core = [_norm(0, 1), _norm(0, 2), _norm(1, 2)]
    core += [_norm(x, y) for x in triangle for y in (centre,) + leaves]
    return TriangleStarScaffold(g, triangle, centre, leaves, tuple(core))


@lru_cache(maxsize=None)
def triangle_pair_instance() -> TrianglePairInstance:
    g = disjoint_union([r7(), t_graph(FAN_SIZE)])
    return TrianglePairInstance(
        g, DoubleTriangleCherry.at_offset(0), TriangleFan.at_offset(7, FAN_SIZE)
    )


@lru_cache(maxsize=None)
def rainbow_k6_scaffold() -> RainbowK6Scaffold:
    left = disjoint_union([r7()] * CHERRY_COPIES)
    g = join(left, t_graph(FAN_SIZE))
    cherries = tuple(DoubleTriangleCherry.at_offset(7 * c) for c in range(CHERRY_COPIES))
    fan = TriangleFan.at_offset(7 * CHERRY_COPIES, FAN_SIZE)
    left_keys = tuple(k for ch in cherries for k in ch.edges())
    return RainbowK6Scaffold(
        g,
        cherries,
        fan,
        left_keys,
        fan.edges(),
        _cross_keys(range(left.n), fan.vertices()),
    )


@lru_cache(maxsize=None)
def spoked_fan_instance() -> SpokedFanInstance:
    g = k_delta(SPOKES, TRIANGLES_PER_SPOKE)
    return SpokedFanInstance(g, SpokedTriangleFan.at_offset(0, SPOKES, TRIANGLES_PER_SPOKE))


@lru_cache(maxsize=None)
def rainbow_k7_scaffold() -> RainbowK7Scaffold:
    left = disjoint_union([hat_k(3, 4)] * BLOCK_COUNT)
    right = k_delta(SPOKES, TRIANGLES_PER_SPOKE)
    g = join(left, right)
    blocks = tuple(JoinedTriangleBlock.at_offset(7 * b) for b in range(BLOCK_COUNT))
    fan = SpokedTriangleFan.at_offset(left.n, SPOKES, TRIANGLES_PER_SPOKE)
    left_keys = tuple(k for b in blocks for k in b.edges())
    return RainbowK7Scaffold(
        g,
        blocks,
        fan,
        left_keys,
        fan.edges(),
        _cross_keys(range(left.n), fan.vertices()),
    )


# -- eager precondition checks ------------------------------------------------


def _require_colouring_of(g: Graph, psi: EdgeColouring):
    if psi.graph is not g and psi.graph != g:
        raise ParameterError("colouring belongs to a different graph than the scaffold")


def _check_total_proper(g: Graph, psi: EdgeColouring):
    _require_colouring_of(g, psi)
    if not psi.is_total():
        _fail_precondition(
            "total-colouring",
            f"{g.m - len(psi)} of {g.m} edges are uncoloured",
        )
    clash = find_properness_clash(g, psi)
    if clash is not None:
        v, c, edges = clash
        _fail_precondition(
            "proper-colouring",
            f"colour {c} repeats on edges at vertex {v}",
            edges,
        )


def _check_cross_rainbow(psi: EdgeColouring, cross_keys) -> set[int]:
    col = psi._col
    cols = [col[k] for k in cross_keys]
    cset = set(cols)
    if len(cset) != len(cols):
        seen: dict[int, tuple[int, int]] = {}
        for k, c in zip(cross_keys, cols):
            if c in seen:
                _fail_precondition(
                    "cross-rainbow",
                    f"cross edges {seen[c]} and {k} share colour {c}",
                    (seen[c], k, c),
                )
            seen[c] = k
    return cset


def _check_cross_avoids_side(psi: EdgeColouring, cross_colours: set[int], side_keys):
    col = psi._col
    side_cols = {col[k] for k in side_keys}
    leaked = side_cols & cross_colours
    if leaked:
        c = min(leaked)
        edges = [k for k in side_keys if col[k] == c]
        _fail_precondition(
            "cross-avoids-side",
            f"colour {c} appears both on a cross edge and on side edges {edges}",
            (c, tuple(edges)),
        )


def _validated_rainbow_clique(g: Graph, psi: EdgeColouring, vs, what: str):
    """Assert-on-return gate: vs must induce a clique with pairwise
    distinct edge colours.  Returns the sorted vertex tuple."""
    vs = tuple(sorted(vs))
    cols = []
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if not g.has_edge(u, v):
                _counterexample(
                    f"{what}: output is not a clique, missing edge ({u},{v})",
                    g,
                    psi,
                    vertices=vs,
                )
            cols.append(psi.get(u, v))
    if len(set(cols)) != len(cols):
        _counterexample(
            f"{what}: output clique is not rainbow",
            g,
            psi,
            vertices=vs,
            colours=cols,
        )
    return vs


# -- rainbow K4 from the star join -------------------------------------------


def extract_rainbow_k4(scaffold: StarJoinScaffold, psi: EdgeColouring) -> tuple[int, ...]:
    """Rainbow K4 inside the star join, given any proper colouring.

    The right-star edges show four distinct colours while the left star
    uses at most three, so a right edge e with a colour unused on the
    left exists.  Among the three candidate cliques (left edge + e) at
    most two can clash, because the clashes pin distinct colours at the
    two ends of e.
    """
    g = scaffold.graph
    _check_total_proper(g, psi)
    col = psi._col
    left_cols = {col[k] for k in scaffold.left_edges()}
    fresh_edge = None
    for z in scaffold.right_leaves:
        if col[_norm(scaffold.right_centre, z)] not in left_cols:
            fresh_edge = (scaffold.right_centre, z)
            break
    if fresh_edge is None:
        _counterexample(
            "every right-star colour reappears on the smaller left star",
            g,
            psi,
        )
    y1, y2 = fresh_edge
    for x in scaffold.left_leaves:
        quad = (scaffold.left_centre, x, y1, y2)
        cols = [col[_norm(u, v)] for i, u in enumerate(quad) for v in quad[i + 1 :]]
        if len(set(cols)) == 6:
            return _validated_rainbow_clique(g, psi, quad, "rainbow-k4")
    _counterexample(
        "no left edge completes the colour-fresh right edge to a rainbow clique",
        g,
        psi,
        fresh_edge=fresh_edge,
    )


# -- rainbow K5 from the triangle-star join ----------------------------------


def extract_rainbow_k5(scaffold: TriangleStarScaffold, psi: EdgeColouring) -> tuple[int, ...]:
    """Rainbow K5 when everything except the star edges is rainbow.

    The four star-edge colours are distinct (they share the star
    centre), so one of them avoids the three triangle colours; that
    leaf, the star centre and the triangle induce a rainbow K5.
    """
    g = scaffold.graph
    _check_total_proper(g, psi)
    col = psi._col
    core_cols = [col[k] for k in scaffold.core_keys]
    if len(set(core_cols)) != len(core_cols):
        seen: dict[int, tuple[int, int]] = {}
        for k, c in zip(scaffold.core_keys, core_cols):
            if c in seen:
                _fail_precondition(
                    "rainbow-core",
                    f"core edges {seen[c]} and {k} share colour {c}",
                    (seen[c], k, c),
                )
            seen[c] = k
    x1, x2, x3 = scaffold.triangle
    tri_cols = {col[_norm(x1, x2)], col[_norm(x1, x3)], col[_norm(x2, x3)]}
    for z in scaffold.star_leaves:
        if col[_norm(scaffold.star_centre, z)] not in tri_cols:
            vs = scaffold.triangle + (scaffold.star_centre, z)
            return _validated_rainbow_clique(g, psi, vs, "rainbow-k5")
    _counterexample(
        "all four distinct star colours land inside the three triangle colours",
        g,
        psi,
    )


# -- colour-disjoint triangle pair (cherry vs fan) ----------------------------


def _triangle_pair_core(psi: EdgeColouring, cherry: DoubleTriangleCherry, fan: TriangleFan):
    """Fan-triangle index and cherry triangle with disjoint colour sets.

    Requires psi to be proper on the cherry and fan edges (they may sit
    inside a larger graph).  Case split:

    * At most six fan triangles have a hub-side colour among the six
      cherry-hub colours, so at least four survive; their base colours
      are inspected.
    * If two surviving bases share a colour g, then g misses one of the
      two cherry-hub colour triples entirely; on that side one of the
      two pendant triangles avoids g, and of the two fan triangles at
      most one sees that pendant colour on its hub edges.
    * If all four bases differ, one of the candidate cherry triangles
      has at most one of its two hub colours among the bases (four
      distinct bases cannot dominate all candidate pairs), and at most
      two more fan triangles are polluted by its pendant colour.
    """
    g = psi.graph
    col = psi._col

    u1, u2, u3 = cherry.left, cherry.hub, cherry.right
    w1, w2 = cherry.left_tips
    w3, w4 = cherry.right_tips

    h_left = col[_norm(u1, u2)]
    h_l1 = col[_norm(u2, w1)]
    h_l2 = col[_norm(u2, w2)]
    h_r1 = col[_norm(u2, w3)]
    h_r2 = col[_norm(u2, w4)]
    h_right = col[_norm(u2, u3)]
    hub_cols = {h_left, h_l1, h_l2, h_r1, h_r2, h_right}
    if len(hub_cols) != 6:
        _counterexample("cherry hub colours not distinct under a proper colouring", g, psi)

    x = fan.hub
    spoke = [(col[_norm(x, a)], col[_norm(x, b)]) for a, b in fan.rim]
    surviving = [
        i for i, (ca, cb) in enumerate(spoke) if ca not in hub_cols and cb not in hub_cols
    ]
    if len(surviving) < 4:
        _counterexample(
            "fewer than four fan triangles avoid the six cherry-hub colours",
            g,
            psi,
            surviving=tuple(surviving),
        )
    s4 = surviving[:4]
    base = {i: col[_norm(*fan.rim[i])] for i in s4}

    dup = None
    for ii in range(4):
        for jj in range(ii + 1, 4):
            if base[s4[ii]] == base[s4[jj]]:
                dup = (s4[ii], s4[jj])
                break
        if dup:
            break

    if dup is not None:
        i, j = dup
        shared = base[i]
        if shared not in (h_left, h_l1, h_l2):
            options = [
                ((u1, u2, w1), col[_norm(u1, w1)]),
                ((u1, u2, w2), col[_norm(u1, w2)]),
            ]
        else:
            options = [
                ((u2, u3, w3), col[_norm(u3, w3)]),
                ((u2, u3, w4), col[_norm(u3, w4)]),
            ]
        tri2, pendant = options[0] if shared != options[0][1] else options[1]
        for k in (i, j):
            if pendant not in spoke[k]:
                return k, tri2
        _counterexample(
            "pendant colour polluted both base-sharing fan triangles",
            g,
            psi,
            pendant=pendant,
            triangles=dup,
        )

    candidates = [
        ((u1, u2, w1), (h_left, h_l1), col[_norm(u1, w1)]),
        ((u1, u2, w2), (h_left, h_l2), col[_norm(u1, w2)]),
        ((u2, u3, w3), (h_right, h_r1), col[_norm(u3, w3)]),
        ((u2, u3, w4), (h_right, h_r2), col[_norm(u3, w4)]),
    ]
    for tri2, pair, pendant in candidates:
        if sum(base[k] in pair for k in s4) > 1:
            continue
        for k in s4:
            if base[k] in pair or base[k] == pendant or pendant in spoke[k]:
                continue
            return k, tri2
    _counterexample(
        "four distinct base colours blocked every cherry-triangle candidate",
        g,
        psi,
        bases=tuple(base[k] for k in s4),
    )


def _triangle_colours(psi: EdgeColouring, tri) -> set[int]:
    a, b, c = tri
    col = psi._col
    return {col[_norm(a, b)], col[_norm(a, c)], col[_norm(b, c)]}


def disjoint_colour_triangles(
    instance: TrianglePairInstance, psi: EdgeColouring
) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """A fan triangle and a cherry triangle with disjoint colour sets,
    for any proper colouring of the disjoint union."""
    g = instance.graph
    _check_total_proper(g, psi)
    k, tri2 = _triangle_pair_core(psi, instance.cherry, instance.fan)
    q1 = tuple(sorted(instance.fan.triangle(k)))
    q2 = tuple(sorted(tri2))
    if _triangle_colours(psi, q1) & _triangle_colours(psi, q2):
        _counterexample(
            "returned triangles share a colour",
            g,
            psi,
            fan_triangle=q1,
            cherry_triangle=q2,
        )
    return q1, q2


# -- rainbow K6 from 31 cherries joined to the fan ----------------------------


def extract_rainbow_k6(scaffold: RainbowK6Scaffold, psi: EdgeColouring) -> tuple[int, ...]:
    """Rainbow K6 when the cross is rainbow and avoids the cherry colours.

    Each cherry votes for a fan triangle via the colour-disjoint pair;
    31 votes on 10 triangles put four vertex-disjoint cherry triangles
    on one fan triangle Q.  The rainbow cross carries each of Q's three
    colours at most once, so one of the four cross blocks is clean.
    """
    g = scaffold.graph
    _check_total_proper(g, psi)
    cross_cols = _check_cross_rainbow(psi, scaffold.cross_keys)
    _check_cross_avoids_side(psi, cross_cols, scaffold.left_keys)

    votes: dict[int, list[tuple[int, int, int]]] = {}
    for cherry in scaffold.cherries:
        k, tri2 = _triangle_pair_core(psi, cherry, scaffold.fan)
        votes.setdefault(k, []).append(tri2)
        if len(votes[k]) == 4:
            chosen_k, cherry_tris = k, votes[k]
            break
    else:
        _counterexample(
            "31 cherry votes failed to give any fan triangle four supporters",
            g,
            psi,
            votes={k: len(v) for k, v in votes.items()},
        )
    q = scaffold.fan.triangle(chosen_k)
    q_cols = _triangle_colours(psi, q)
    col = psi._col
    for tri2 in cherry_tris:
        cross_block = {col[_norm(u, w)] for u in tri2 for w in q}
        if not (cross_block & q_cols):
            return _validated_rainbow_clique(g, psi, tri2 + q, "rainbow-k6")
    _counterexample(
        "all four disjoint cherry triangles clash with the common fan triangle",
        g,
        psi,
        fan_triangle=tuple(sorted(q)),
    )


# -- surviving triangle of the spoked fan -------------------------------------


def _surviving_triangle_core(
    g: Graph, psi, fan: SpokedTriangleFan, removed: set, context: str
):
    for i, s in enumerate(fan.spokes):
        if _norm(fan.centre, s) in removed:
            continue
        for p in fan.apexes[i]:
            if _norm(fan.centre, p) not in removed and _norm(s, p) not in removed:
                return (fan.centre, s, p)
        _counterexample(
            f"{context}: surviving skeleton edge lost all its pendant triangles",
            g,
            psi,
            spoke=s,
            removed_count=len(removed),
        )
    _counterexample(
        f"{context}: every skeleton edge was removed by at most {SPOKES - 1} matchings",
        g,
        psi,
        removed_count=len(removed),
    )


def surviving_triangle(instance: SpokedFanInstance, matchings) -> tuple[int, int, int]:
    """A triangle of the spoked fan untouched by the given matchings.

    Accepts at most one matching fewer than there are spokes; each one
    removes at most one skeleton edge and at most two pendant triangles
    per spoke, which the spoke/triangle counts outlast.
    """
    g = instance.graph
    fan = instance.roles
    matchings = [tuple(_norm(u, v) for u, v in m) for m in matchings]
    if len(matchings) > SPOKES - 1:
        raise ParameterError(
            f"at most {SPOKES - 1} matchings supported, got {len(matchings)}"
        )
    removed: set[tuple[int, int]] = set()
    for idx, m in enumerate(matchings):
        used: set[int] = set()
        for u, v in m:
            if not g.has_edge(u, v):
                raise ParameterError(f"matching {idx} contains a non-edge ({u},{v})")
            if u in used or v in used:
                raise ParameterError(
                    f"input {idx} is not a matching: vertex reuse at ({u},{v})"
                )
            used.update((u, v))
        removed.update(m)
    tri = _surviving_triangle_core(g, None, fan, removed, "surviving-triangle")
    for e in ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])):
        if _norm(*e) in removed or not g.has_edge(*e):
            _counterexample("returned triangle is not intact", g, None, triangle=tri)
    return tri


# -- rainbow K7 from four blocks joined to the spoked fan ---------------------


def rainbow_k4_in_block(psi: EdgeColouring, block: JoinedTriangleBlock) -> tuple[int, ...]:
    """Rainbow K4 inside one triangle-join block under any proper colouring.

    For each free vertex the only possible clashes pair a cross edge
    with the opposite triangle edge; each of the three clash patterns
    rules out at most one of the four free vertices.
    """
    col = psi._col
    x1, x2, x3 = block.triangle
    t12 = col[_norm(x1, x2)]
    t13 = col[_norm(x1, x3)]
    t23 = col[_norm(x2, x3)]
    for z in block.free:
        if (
            col[_norm(x1, z)] != t23
            and col[_norm(x2, z)] != t13
            and col[_norm(x3, z)] != t12
        ):
            return (x1, x2, x3, z)
    _counterexample(
        "all four free vertices clash with the opposite triangle edges",
        psi.graph,
        psi,
        block=block.vertices(),
    )


def extract_rainbow_k7(scaffold: RainbowK7Scaffold, psi: EdgeColouring) -> tuple[int, ...]:
    """Rainbow K7 when the cross is rainbow and avoids the block colours.

    Each block yields a rainbow K4; pruning every fan edge coloured like
    one of those (at most 24) K4 edges deletes at most 24 matchings, so
    a fan triangle survives.  Its three colours touch at most three
    cross edges, leaving one block's cross clean.
    """
    g = scaffold.graph
    _check_total_proper(g, psi)
    cross_cols = _check_cross_rainbow(psi, scaffold.cross_keys)
    _check_cross_avoids_side(psi, cross_cols, scaffold.left_keys)
    col = psi._col

    quads = []
    bad_cols: set[int] = set()
    for block in scaffold.blocks:
        quad = rainbow_k4_in_block(psi, block)
        quads.append(quad)
        bad_cols |= {
            col[_norm(u, v)] for i, u in enumerate(quad) for v in quad[i + 1 :]
        }
    if len(bad_cols) > SPOKES - 1:
        _counterexample(
            "four rainbow K4s produced more prunable colours than edges",
            g,
            psi,
            colours=len(bad_cols),
        )

    removed = {k for k in scaffold.right_keys if col[k] in bad_cols}
    tri = _surviving_triangle_core(g, psi, scaffold.fan, removed, "rainbow-k7")
    tri_cols = _triangle_colours(psi, tri)

    for quad in quads:
        cross_block = {col[_norm(u, w)] for u in quad for w in tri}
        if not (cross_block & tri_cols):
            return _validated_rainbow_clique(g, psi, quad + tri, "rainbow-k7")
    _counterexample(
        "all four block cliques clash with the surviving fan triangle",
        g,
        psi,
        triangle=tri,
    )


# -- trial samplers -----------------------------------------------------------


def sample_rainbow_k4_colouring(scaffold: StarJoinScaffold, rng: random.Random) -> EdgeColouring:
    return random_proper_colouring(scaffold.graph, rng, rng.random())


def sample_rainbow_k5_colouring(
    scaffold: TriangleStarScaffold, rng: random.Random
) -> EdgeColouring:
    """Rainbow core; star edges reuse core colours whenever legal."""
    psi = EdgeColouring(scaffold.graph)
    for k in scaffold.core_keys:
        psi.assign_fresh(*k)
    core_count = psi.next_colour
    for z in scaffold.star_leaves:
        blocked = psi.colours_at(scaffold.star_centre) | psi.colours_at(z)
        pool = [c for c in range(core_count) if c not in blocked]
        if pool and rng.random() < 0.85:
            psi.assign(scaffold.star_centre, z, rng.choice(pool))
        else:
            psi.assign_fresh(scaffold.star_centre, z)
    return psi


def sample_triangle_pair_colouring(
    instance: TrianglePairInstance, rng: random.Random
) -> EdgeColouring:
    bias = rng.choice((0.0, 0.0, 0.05, 0.2, 0.5))
    return random_proper_colouring(instance.graph, rng, bias)


def _greedy_pool_colouring(psi: EdgeColouring, edge_keys, pool, reuse_p, rng):
    """Colour edges properly, drawing from a shared small pool with
    probability reuse_p (when legal) and fresh ids otherwise.

    Pool ids sit below every other palette in use, so only pool colours
    placed by this pass can conflict; fresh ids never can.
    """
    used_at: dict[int, set[int]] = {}
    for u, v in edge_keys:
        if rng.random() < reuse_p:
            bu = used_at.setdefault(u, set())
            bv = used_at.setdefault(v, set())
            legal = [c for c in pool if c not in bu and c not in bv]
            if legal:
                c = rng.choice(legal)
                psi.assign(u, v, c)
                bu.add(c)
                bv.add(c)
                continue
        psi.assign_fresh(u, v)


@lru_cache(maxsize=None)
def _k6_cross_template() -> EdgeColouring:
    sc = rainbow_k6_scaffold()
    psi = EdgeColouring(sc.graph)
    for i, k in enumerate(sc.cross_keys):
        psi.assign(*k, _CROSS_PALETTE_BASE + i)
    return psi


def sample_rainbow_k6_colouring(
    scaffold: RainbowK6Scaffold, rng: random.Random
) -> EdgeColouring:
    """Unique cross colours; cherry and fan edges share a small pool so
    the pair extraction sees genuine colour collisions."""
    if scaffold is not rainbow_k6_scaffold():
        raise ParameterError("sampler supports the canonical scaffold only")
    psi = _k6_cross_template().copy()
    pool = tuple(range(rng.randrange(8, 32)))
    reuse = rng.choice((0.6, 0.9, 1.0))
    for cherry in scaffold.cherries:
        _greedy_pool_colouring(psi, cherry.edges(), pool, reuse, rng)
    _greedy_pool_colouring(psi, scaffold.right_keys, pool, reuse, rng)
    return psi


def sample_fan_matchings(instance: SpokedFanInstance, rng: random.Random) -> list:
    """Random batches of matchings biased toward the skeleton and a few
    hot spokes, the edges a matching must hit to threaten triangles."""
    g = instance.graph
    fan = instance.roles
    all_edges = g.edges
    count = SPOKES - 1 if rng.random() < 0.6 else rng.randrange(0, SPOKES)
    hot_spokes = [rng.randrange(SPOKES) for _ in range(3)]
    matchings = []
    for _ in range(count):
        used: set[int] = set()
        m: list[tuple[int, int]] = []

        def try_add(u, v):
            if u not in used and v not in used:
                m.append(_norm(u, v))
                used.update((u, v))

        if rng.random() < 0.7:
            i = rng.choice(hot_spokes) if rng.random() < 0.5 else rng.randrange(SPOKES)
            try_add(fan.centre, fan.spokes[i])
        if rng.random() < 0.7:
            i = rng.choice(hot_spokes)
            try_add(fan.spokes[i], fan.apexes[i][rng.randrange(TRIANGLES_PER_SPOKE)])
        target = rng.choice((1, 2, 3, 5, 8, 13, 40))
        for _ in range(3 * target):
            if len(m) >= target:
                break
            try_add(*all_edges[rng.randrange(len(all_edges))])
        matchings.append(m)
    return matchings


@lru_cache(maxsize=None)
def _k7_template() -> EdgeColouring:
    """Cross edges on the unique high palette, fan edges pre-coloured
    with unique ids; trials overwrite a sparse subset of fan edges."""
    sc = rainbow_k7_scaffold()
    psi = EdgeColouring(sc.graph)
    for i, k in enumerate(sc.cross_keys):
        psi.assign(*k, _CROSS_PALETTE_BASE + i)
    for k in sc.right_keys:
        psi.assign_fresh(*k)
    return psi


def sample_rainbow_k7_colouring(
    scaffold: RainbowK7Scaffold, rng: random.Random
) -> EdgeColouring:
    """Unique cross colours; block edges use a small pool which is also
    sprinkled over the fan so colour pruning genuinely happens."""
    if scaffold is not rainbow_k7_scaffold():
        raise ParameterError("sampler supports the canonical scaffold only")
    psi = _k7_template().copy()
    pool = tuple(range(rng.randrange(8, 20)))
    for block in scaffold.blocks:
        _greedy_pool_colouring(psi, block.edges(), pool, 0.95, rng)

    fan = scaffold.fan
    assign = psi.assign
    rand = rng.random
    centre = fan.centre
    centre_pool_used: set[int] = set()

    def pool_pick(blocked_a, blocked_b):
        legal = [c for c in pool if c not in blocked_a and c not in blocked_b]
        return rng.choice(legal) if legal else None

    for i, s in enumerate(fan.spokes):
        spoke_used: set[int] = set()
        if rand() < 0.2:
            c_skel = pool_pick(centre_pool_used, spoke_used)
            if c_skel is not None:
                assign(centre, s, c_skel)
                centre_pool_used.add(c_skel)
                spoke_used.add(c_skel)
        for p in fan.apexes[i]:
            c_mid = None
            if rand() < 0.15:
                c_mid = pool_pick(centre_pool_used, ())
                if c_mid is not None:
                    assign(centre, p, c_mid)
                    centre_pool_used.add(c_mid)
            if c_mid is None:
                c_mid = psi.get(centre, p)
            if rand() < 0.4:
                c_rim = pool_pick(spoke_used, (c_mid,))
                if c_rim is not None:
                    assign(s, p, c_rim)
                    spoke_used.add(c_rim)
    return psi


# -- falsification harness ----------------------------------------------------


@dataclass
class LemmaTrialReport:
    lemma: str
    trials: int
    failures: int
    seed: int
    elapsed_ms: float
    archive: str | None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json_dict(self, include_timing: bool = True) -> dict:
        out = {
            "lemma": self.lemma,
            "trials": self.trials,
            "failures": self.failures,
            "seed": self.seed,
            "passed": self.passed,
            "archive": self.archive,
        }
        if include_timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def _run_k4(inst, psi):
    return extract_rainbow_k4(inst, psi)


def _run_k5(inst, psi):
    return extract_rainbow_k5(inst, psi)


def _run_pair(inst, psi):
    return disjoint_colour_triangles(inst, psi)


def _run_k6(inst, psi):
    return extract_rainbow_k6(inst, psi)


def _run_surviving(inst, matchings):
    return surviving_triangle(inst, matchings)


def _run_k7(inst, psi):
    return extract_rainbow_k7(inst, psi)


_LEMMAS = {
    "extract-rainbow-k4": (rainbow_k4_scaffold, sample_rainbow_k4_colouring, _run_k4),
    "extract-rainbow-k5": (rainbow_k5_scaffold, sample_rainbow_k5_colouring, _run_k5),
    "disjoint-colour-triangles": (
        triangle_pair_instance,
        sample_triangle_pair_colouring,
        _run_pair,
    ),
    "extract-rainbow-k6": (rainbow_k6_scaffold, sample_rainbow_k6_colouring, _run_k6),
    "surviving-triangle": (spoked_fan_instance, sample_fan_matchings, _run_surviving),
    "extract-rainbow-k7": (rainbow_k7_scaffold, sample_rainbow_k7_colouring, _run_k7),
}

LEMMA_NAMES = tuple(_LEMMAS)


def _archive_counterexample(archive_dir, lemma, seed, trial, exc) -> str | None:
    if archive_dir is None:
        return None
    path = Path(archive_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / f"{lemma}-seed{seed}-trial{trial}.json"
    record = {
        "lemma": lemma,
        "seed": seed,
        "trial": trial,
        "message": str(exc),
        "payload": exc.payload,
    }
    target.write_text(json.dumps(record, indent=2, sort_keys=True))
    return str(target)


def certify_lemma(
    name: str, trials: int, seed: int, archive_dir=None
) -> LemmaTrialReport:
    """Run `trials` randomized falsification attempts against one lemma.

    Stops at the first counterexample, archiving it when a directory is
    given.  Sampler inputs are derived from (name, seed, trial) so runs
    are reproducible and trial-order independent.
    """
    if name not in _LEMMAS:
        raise ParameterError(
            f"unknown lemma {name!r}; choose one of {', '.join(LEMMA_NAMES)}"
        )
    if trials <= 0:
        raise ParameterError(f"trials must be positive, got {trials}")
    build, sample, run = _LEMMAS[name]
    inst = build()
    failures = 0
    archive = None
    start = time.perf_counter()
    for trial in range(trials):
        rng = random.Random(f"{name}:{seed}:{trial}")
        args = sample(inst, rng)
        try:
            run(inst, args)
        except CounterexampleFound as exc:
            failures += 1
            archive = _archive_counterexample(archive_dir, name, seed, trial, exc)
            break
    elapsed = (time.perf_counter() - start) * 1000.0
    return LemmaTrialReport(name, trials, failures, seed, elapsed, archive)
