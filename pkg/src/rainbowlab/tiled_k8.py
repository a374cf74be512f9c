"""Rainbow-K8-avoiding machinery built on K4-tiled decompositions.

A graph is K4-tiled when every edge lies in a K4 and the K4 copies form a
single edge-overlap component.  Such graphs are graded by

    phi(H) = 8 - 5 v(H) + 2 e(H),

which is 2*gamma + beta for any stretched generating sequence (gamma counts
edges added between existing vertices, beta the vertex-steps).  The grading
caps the damage a proper colouring must tolerate: phi <= 2 admits a
colouring with no rainbow K4 at all, phi <= 5 one whose rainbow K4s all
share a triangle, phi <= 7 one whose rainbow K4s all meet a fixed matching
of size at most three.  Components with phi >= 3 assemble into vertex-tree
collections whose certificate edges are recoloured with one global red, so
that every rainbow K4 of the whole graph carries red; a rainbow K8 in the
perturbed graph would need two vertex-disjoint rainbow K4s (or a rainbow K5
on one side, which the red matching also rules out) and hence cannot exist.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .colouring import EdgeColouring, is_proper
from .errors import OutOfRegime, ParameterError, SearchExhausted, StructureUnsupported
from .graph import Graph, bits
from .model import PerturbedInstance

__all__ = [
    "GenStep",
    "GeneratingSequence",
    "CoverCertificate",
    "PartialColouringState",
    "RED",
    "k4_components",
    "is_k4_tiled",
    "phi",
    "find_stretched_sequence",
    "random_tiled_graph",
    "partial_colouring",
    "cover_certificate",
    "colour_tiled",
    "colour_component_tree",
    "avoid_k8",
    "avoid_k8_perturbed",
    "find_rainbow_k8",
]

RED = 0

_SEQUENCE_BUDGET = 400_000
_VERTEX_CAP = 14


def _k(u, v):
    return (u, v) if u < v else (v, u)


def _pairs(vs):
    return [_k(a, b) for a, b in combinations(sorted(vs), 2)]


# -- types ---------------------------------------------------------------


@dataclass(frozen=True)
class GenStep:
    """One growth step; after it the four `quad` vertices induce a new K4.

    standard: two new vertices joined to an existing edge (5 new edges);
    vertex: one new vertex joined to an existing triple spanning >= 1 edge,
    plus that triple's missing pairs; edge: 1..5 new edges completing a K4
    on four existing vertices.
    """

    kind: str                 # "standard" | "vertex" | "edge"
    new_vertices: tuple       # standard (x, y); vertex (x,); edge ()
    anchor: tuple             # standard (z, w); vertex (y, z, w); edge 4 vertices
    added_edges: tuple        # normalized, sorted
    missing_edges: tuple = () # added edges joining two pre-existing vertices

    @property
    def quad(self) -> tuple:
        return tuple(sorted(set(self.new_vertices) | set(self.anchor)))


@dataclass(frozen=True)
class GeneratingSequence:
    """Nested growth from a K4 (or K5) base reaching a K4-tiled graph."""

    base_vertices: tuple
    steps: tuple

    @property
    def base_kind(self) -> str:
        return "K5" if len(self.base_vertices) == 5 else "K4"

    @property
    def alpha(self) -> int:
        return sum(1 for s in self.steps if s.kind == "standard")

    @property
    def beta(self) -> int:
        return sum(1 for s in self.steps if s.kind == "vertex")

    @property
    def gamma(self) -> int:
        total = 0
        for s in self.steps:
            if s.kind == "vertex":
                total += len(s.missing_edges)
            elif s.kind == "edge":
                total += len(s.added_edges)
        return total

    @property
    def length(self) -> int:
        return len(self.steps)

    def phi_value(self) -> int:
        base = 3 if self.base_kind == "K5" else 0
        return base + 2 * self.gamma + self.beta

    def all_edges(self) -> list:
        out = list(_pairs(self.base_vertices))
        for s in self.steps:
            out.extend(s.added_edges)
        return sorted(set(out))

    def graph(self) -> Graph:
        edges = self.all_edges()
        n = 1 + max(max(e) for e in edges)
        return Graph(n, edges)


@dataclass(frozen=True)
class CoverCertificate:
    """How the rainbow K4s of a colouring are covered.

    kind "no-rainbow": there are none; "triangle": all contain `triangle`;
    "matching": all contain an edge of `matching` (<= 3 edges).
    """

    kind: str
    triangle: tuple | None = None
    matching: tuple | None = None

    RANK = {"no-rainbow": 0, "triangle": 1, "matching": 2}

    @property
    def rank(self) -> int:
        return self.RANK[self.kind]


@dataclass
class PartialColouringState:
    """Result of replaying the growth sequence's partial colouring."""

    colouring: EdgeColouring
    saturation: dict          # triangle -> number of saturating colours (final)
    problematic: list         # triangles whose extension step coloured nothing
    vertex_steps: dict        # triangle -> number of vertex-steps attached to it
    saturation_bound_ok: bool = True


# -- decomposition -------------------------------------------------------


def k4_components(g: Graph):
    """Maximal K4-tiled subgraphs and the edges lying in no K4.

    Returns ([(subgraph, back_map), ...], leftover_edges); two K4 copies
    belong to the same component iff they are linked by a chain of copies
    sharing edges, so components are pairwise edge-disjoint.
    """
    quads = g.cliques(4)
    parent = list(range(len(quads)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    owner: dict = {}
    for i, q in enumerate(quads):
        for e in _pairs(q):
            if e in owner:
                union(owner[e], i)
            else:
                owner[e] = i
    groups: dict = {}
    for i in range(len(quads)):
        groups.setdefault(find(i), []).append(i)

    comps = []
    covered = set()
    for root in sorted(groups, key=lambda r: quads[groups[r][0]]):
        edges = set()
        for i in groups[root]:
            edges.update(_pairs(quads[i]))
        covered.update(edges)
        vs = sorted({v for e in edges for v in e})
        sub, back = g.subgraph(vs)
        pos = {v: i for i, v in enumerate(back)}
        comp_edges = sorted((pos[u], pos[v]) for u, v in edges)
        comps.append((Graph(sub.n, comp_edges), back))
    leftover = tuple(e for e in g.edges if e not in covered)
    return comps, leftover


def is_k4_tiled(g: Graph) -> bool:
    """Every edge in a K4, and all K4 copies in one edge-overlap component."""
    if g.m == 0:
        return False
    comps, leftover = k4_components(g)
    if leftover or len(comps) != 1:
        return False
    sub, back = comps[0]
    return sub.m == g.m and sub.n == len([v for v in range(g.n) if g.adj[v]])


def phi(h: Graph) -> int:
    """8 - 5 v + 2 e; equals 2*gamma + beta for stretched sequences."""
    v = sum(1 for u in range(h.n) if h.adj[u]) if h.m else h.n
    return 8 - 5 * v + 2 * h.m


# -- stretched sequence search --------------------------------------------


class _QuadTable:
    """Per-graph tables making step enumeration a single pass over K4 copies.

    Every growth step completes one K4 copy of h whose vertices are partly
    present: two present vertices spanning a current edge give a standard
    step, three a vertex-step, four an edge-step.  For each copy we store its
    vertex bitmask and the bitmask of its six edge ids; a copy is applicable
    from `mask` iff it has both a current edge and a missing edge.
    """

    def __init__(self, h: Graph):
        self.h = h
        self.quads = h.cliques(4)
        self.vmask = []
        self.emask = []
        for q in self.quads:
            vm = 0
            for x in q:
                vm |= 1 << x
            em = 0
            for e in _pairs(q):
                em |= 1 << h.edge_id(*e)
            self.vmask.append(vm)
            self.emask.append(em)
        self.edge_vmask = [(1 << u) | (1 << v) for u, v in h.edges]

    def vertex_mask_of(self, mask: int) -> int:
        vm = 0
        for i in bits(mask):
            vm |= self.edge_vmask[i]
        return vm

    def candidates(self, mask: int, vset: int):
        """(kind_rank, quad_index, new_mask) triples with kind_rank 0 for
        standard, 1 for vertex-steps, 2 for edge-steps; standard steps first,
        then vertex-steps, then edge-steps, each in quad order.  Any copy
        with a current edge has >= 2 present vertices, so the present-vertex
        count alone classifies the step."""
        std, vx, ed = [], [], []
        for qi in range(len(self.quads)):
            em = self.emask[qi]
            if not (em & mask) or not (em & ~mask):
                continue
            cnt = (self.vmask[qi] & vset).bit_count()
            if cnt == 2:
                std.append((0, qi, mask | em))
            elif cnt == 3:
                vx.append((1, qi, mask | em))
            else:
                ed.append((2, qi, mask | em))
        return std + vx + ed

    def materialize(self, mask: int, vset: int, qi: int) -> GenStep:
        q = self.quads[qi]
        added_ids = self.emask[qi] & ~mask
        added = tuple(sorted(self.h.edges[i] for i in bits(added_ids)))
        inside = tuple(x for x in q if (vset >> x) & 1)
        outside = tuple(x for x in q if not (vset >> x) & 1)
        if len(outside) == 2:
            return GenStep("standard", outside, inside, added)
        if len(outside) == 1:
            x = outside[0]
            missing = tuple(e for e in added if x not in e)
            return GenStep("vertex", outside, inside, added, missing)
        return GenStep("edge", (), q, added, added)


def find_stretched_sequence(h: Graph, node_budget: int = _SEQUENCE_BUDGET) -> GeneratingSequence:
    """A generating sequence for h minimising gamma, then maximising length.

    Base is a K5 copy when h contains one, else a K4 copy; all base copies
    compete.  Since v and e are fixed, gamma = e - 3v + const + alpha, so the
    search minimises the number of standard steps, then maximises steps.
    """
    if sum(1 for u in range(h.n) if h.adj[u]) > _VERTEX_CAP:
        raise ParameterError(f"stretched-sequence search capped at {_VERTEX_CAP} vertices")
    if not is_k4_tiled(h):
        raise ParameterError("graph is not K4-tiled")
    k5s = h.cliques(5)
    bases = k5s if k5s else h.cliques(4)
    tab = _QuadTable(h)
    full = (1 << h.m) - 1
    memo: dict = {}
    nodes = 0

    def rec(mask: int, vset: int):
        nonlocal nodes
        if mask == full:
            return (0, 0, -1, 0)
        got = memo.get(mask)
        if got is not None:
            return got
        nodes += 1
        if nodes > node_budget:
            raise SearchExhausted(
                f"stretched-sequence search budget exhausted on a graph with "
                f"{h.n} vertices, {h.m} edges")
        best = None
        for rank, qi, nm in tab.candidates(mask, vset):
            sub = rec(nm, vset | tab.vmask[qi])
            if sub is None:
                continue
            val = (sub[0] + (1 if rank == 0 else 0), sub[1] - 1)
            if best is None or val < (best[0], best[1]):
                best = (val[0], val[1], qi, nm)
        memo[mask] = best
        return best

    best_overall = None
    for base in bases:
        mask = 0
        for e in _pairs(base):
            mask |= 1 << h.edge_id(*e)
        res = rec(mask, tab.vertex_mask_of(mask))
        if res is None:
            continue
        key = (res[0], res[1], base)
        if best_overall is None or key < best_overall[0]:
            best_overall = (key, base, mask)
    if best_overall is None:
        raise SearchExhausted("no generating sequence found (graph not reachable from any base)")

    _, base, mask = best_overall
    vset = tab.vertex_mask_of(mask)
    steps = []
    while mask != full:
        _, _, qi, nm = memo[mask]
        steps.append(tab.materialize(mask, vset, qi))
        vset |= tab.vmask[qi]
        mask = nm
    return GeneratingSequence(tuple(base), tuple(steps))


def random_tiled_graph(rng: random.Random, max_vertices: int = 12,
                       steps: int = 6) -> Graph:
    """A random K4-tiled graph built by applying random growth steps to K4.

    Every step's new K4 shares an edge with the current graph, so the result
    is K4-tiled by construction.
    """
    edges = set(_pairs(range(4)))
    n = 4
    for _ in range(steps):
        kinds = ["vertex", "edge"]
        if n + 2 <= max_vertices:
            kinds.append("standard")
        if n + 1 > max_vertices:
            kinds.remove("vertex")
        kind = rng.choice(kinds)
        if kind == "standard":
            z, w = rng.choice(sorted(edges))
            x, y = n, n + 1
            edges.update(_k(a, b) for a, b in
                         ((x, y), (x, z), (x, w), (y, z), (y, w)))
            n += 2
        elif kind == "vertex":
            while True:
                y, z, w = rng.sample(range(n), 3)
                if _k(y, z) in edges or _k(y, w) in edges or _k(z, w) in edges:
                    break
            x = n
            edges.update((_k(x, y), _k(x, z), _k(x, w),
                          _k(y, z), _k(y, w), _k(z, w)))
            n += 1
        else:
            for _attempt in range(30):
                quad = rng.sample(range(n), 4)
                present = sum(1 for e in _pairs(quad) if e in edges)
                if 1 <= present <= 5:
                    edges.update(_pairs(quad))
                    break
    return Graph(n, sorted(edges))


# -- partial colouring -----------------------------------------------------


def _k4_matchings(vs):
    a, b, c, d = sorted(vs)
    return (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c)))


def partial_colouring(seq: GeneratingSequence, *, avoid=frozenset(),
                      suppress=frozenset(),
                      pair_first_edge_step: bool = False) -> PartialColouringState:
    """Replay the sequence, colouring so each new K4 repeats a colour.

    Base K4: one matching of size two shares a colour (K5 base: the cyclic
    one-factorisation, five colours of two edges each).  Standard steps pair
    two opposite new edges under a new colour.  Vertex-steps reuse a triangle
    colour on the opposite new edge when proper, else pair an uncoloured
    triangle edge (possibly the just-added missing edge) with the opposite
    new edge under a new colour, else mark the triangle problematic.  Edges
    named in `avoid` are kept uncoloured when a choice exists; steps in
    `suppress` colour nothing; with `pair_first_edge_step` the first
    1-edge-step pairs its new edge with the opposite (avoided) one.
    """
    g = seq.graph()
    psi = EdgeColouring(g)
    problematic: list = []
    vertex_steps: Counter = Counter()
    sat_ok = True

    avoid = {(_k(*e)) for e in avoid}
    target_idx = None
    if pair_first_edge_step:
        for i, st in enumerate(seq.steps):
            if st.kind == "edge" and len(st.added_edges) == 1:
                target_idx = i
                xy = st.added_edges[0]
                zw = _k(*(set(st.quad) - set(xy)))
                avoid = avoid | {zw}
                break

    current: set = set(_pairs(seq.base_vertices))

    def saturating(tri) -> set:
        cols = set()
        for a, b in _pairs(tri):
            if (a, b) not in current:
                continue
            col = psi.get(a, b)
            if col is None:
                continue
            third = next(v for v in tri if v not in (a, b))
            if col in psi.colours_at(third):
                cols.add(col)
        return cols

    def check_saturation():
        nonlocal sat_ok
        cg = Graph(g.n, sorted(current))
        for tri in cg.triangles():
            if len(saturating(tri)) > vertex_steps[tri] + 1:
                sat_ok = False

    base = tuple(sorted(seq.base_vertices))
    if seq.base_kind == "K4":
        pair = next((m for m in _k4_matchings(base)
                     if not (set(m) & avoid)), _k4_matchings(base)[0])
        colour = psi.fresh_colour()
        for a, b in pair:
            psi.assign(a, b, colour)
    else:
        for i in range(5):
            colour = psi.fresh_colour()
            psi.assign(base[(i + 1) % 5], base[(i + 4) % 5], colour)
            psi.assign(base[(i + 2) % 5], base[(i + 3) % 5], colour)
    check_saturation()

    for idx, st in enumerate(seq.steps):
        current.update(st.added_edges)
        if st.kind == "vertex":
            tri = tuple(sorted(st.anchor))
            vertex_steps[tri] += 1
        if idx in suppress:
            if st.kind == "vertex":
                problematic.append(tuple(sorted(st.anchor)))
            check_saturation()
            continue

        if st.kind == "standard":
            x, y = st.new_vertices
            z, w = st.anchor
            options = (( _k(x, z), _k(y, w)), (_k(x, w), _k(y, z)))
            pair = next((p for p in options if not (set(p) & avoid)), options[0])
            colour = psi.fresh_colour()
            for a, b in pair:
                psi.assign(a, b, colour)
        elif st.kind == "vertex":
            x = st.new_vertices[0]
            tri_pairs = sorted(_pairs(st.anchor))
            third_of = {e: next(v for v in st.anchor if v not in e) for e in tri_pairs}
            done = False
            for e in tri_pairs:  # reuse an existing triangle colour
                col = psi.get(*e)
                if col is None or _k(x, third_of[e]) in avoid:
                    continue
                if not psi.would_clash(x, third_of[e], col):
                    psi.assign(x, third_of[e], col)
                    done = True
                    break
            if not done:
                for e in tri_pairs:  # pair an uncoloured triangle edge
                    if (psi.get(*e) is None and e not in avoid
                            and _k(x, third_of[e]) not in avoid):
                        colour = psi.fresh_colour()
                        psi.assign(*e, colour)
                        psi.assign(x, third_of[e], colour)
                        done = True
                        break
            if not done:
                problematic.append(tuple(sorted(st.anchor)))
        else:  # edge step: colour nothing, except the designated pairing
            if idx == target_idx:
                xy = st.added_edges[0]
                zw = _k(*(set(st.quad) - set(xy)))
                if psi.get(*zw) is None:
                    colour = psi.fresh_colour()
                    psi.assign(*xy, colour)
                    psi.assign(*zw, colour)
        check_saturation()

    saturation = {tri: len(saturating(tri)) for tri in g.triangles()}
    return PartialColouringState(psi, saturation, problematic,
                                 dict(vertex_steps), sat_ok)


# -- certificates -----------------------------------------------------------


def _rainbow_quads(h: Graph, psi: EdgeColouring):
    out = []
    for quad in h.cliques(4):
        cols = {psi.get(*e) for e in _pairs(quad)}
        if None not in cols and len(cols) == 6:
            out.append(quad)
    return out


def cover_certificate(h: Graph, psi: EdgeColouring) -> CoverCertificate | None:
    """Smallest-kind certificate covering all rainbow K4s of psi, or None."""
    rain = _rainbow_quads(h, psi)
    if not rain:
        return CoverCertificate("no-rainbow")
    first = set(rain[0])
    for tri in combinations(sorted(first), 3):
        if all(set(tri) <= set(q) for q in rain):
            return CoverCertificate("triangle", triangle=tri)
    cand = sorted({e for q in rain for e in _pairs(q)})
    for size in (1, 2, 3):
        for m in combinations(cand, size):
            vs = [v for e in m for v in e]
            if len(vs) != len(set(vs)):
                continue
            if all(any(set(e) <= set(q) for e in m) for q in rain):
                return CoverCertificate("matching", matching=m)
    return None


def _certificate_allowed(cert: CoverCertificate | None, f: int) -> bool:
    if cert is None:
        return False
    if f <= 2:
        return cert.rank == 0
    if f <= 5:
        return cert.rank <= 1
    return cert.rank <= 2


def _colour_variants(seq: GeneratingSequence):
    """Replay configurations to try, mirroring the case analysis over gamma."""
    yield {}
    multi = frozenset(i for i, st in enumerate(seq.steps)
                      if st.kind == "vertex" and len(st.missing_edges) >= 2)
    if multi:
        yield {"suppress": multi}
    first_1edge = next((i for i, st in enumerate(seq.steps)
                        if st.kind == "edge" and len(st.added_edges) == 1), None)
    if first_1edge is not None:
        yield {"pair_first_edge_step": True}
        st = seq.steps[first_1edge]
        zw = set(st.quad) - set(st.added_edges[0])
        counts: Counter = Counter()
        for i, s in enumerate(seq.steps[:first_1edge]):
            if s.kind == "vertex":
                counts[tuple(sorted(s.anchor))] += 1
        tris = {t for t, c in counts.items() if c >= 2 and zw <= set(t)}
        if tris:
            sup = frozenset(i for i, s in enumerate(seq.steps[:first_1edge])
                            if s.kind == "vertex" and tuple(sorted(s.anchor)) in tris)
            yield {"pair_first_edge_step": True, "suppress": sup}
            if multi:
                yield {"pair_first_edge_step": True, "suppress": sup | multi}


def colour_tiled(h: Graph, node_budget: int = _SEQUENCE_BUDGET):
    """Proper colouring of a K4-tiled graph plus a phi-class certificate.

    phi <= 2 yields no-rainbow, phi in [3,5] a shared triangle, phi in [6,7]
    a matching of <= 3 edges meeting every rainbow K4 (stronger kinds always
    accepted).  Replay variants are tried in order and the first whose
    a-posteriori certificate fits the class is returned.
    """
    f = phi(h)
    if f > 7:
        raise OutOfRegime(f"phi = {f} > 7", offending=h)
    seq = find_stretched_sequence(h, node_budget)
    for cfg in _colour_variants(seq):
        state = partial_colouring(seq, **cfg)
        psi = state.colouring
        for u, v in h.edges:
            if psi.get(u, v) is None:
                psi.assign_fresh(u, v)
        cert = cover_certificate(h, psi)
        if _certificate_allowed(cert, f):
            return psi, cert
    raise SearchExhausted(
        f"no replay variant achieved the phi = {f} certificate class")


# -- assembly ---------------------------------------------------------------


def _lift(edge, back):
    return _k(back[edge[0]], back[edge[1]])


def colour_component_tree(c: Graph, parts) -> EdgeColouring:
    """Colour a connected union of K4-components, phi >= 3 each, so every
    rainbow K4 carries the shared colour RED.

    parts: [(subgraph, back_map-into-c), ...].  Components must pairwise
    share at most one vertex and meet in a tree; the part maximising phi is
    the root (certificate edges recoloured red), every other part needs
    phi in [3,5] and contributes one red edge of its certificate triangle
    avoiding the vertex shared with its parent.
    """
    k = len(parts)
    share: dict = {}
    for i, j in combinations(range(k), 2):
        common = set(parts[i][1]) & set(parts[j][1])
        if len(common) > 1:
            raise StructureUnsupported(
                "two K4-components share more than one vertex",
                offending=tuple(sorted(common)))
        if common:
            share[(i, j)] = common.pop()
    if len(share) != k - 1:
        raise StructureUnsupported(
            "component meet graph is not a tree", offending=tuple(share))

    phis = [phi(sub) for sub, _ in parts]
    root = max(range(k), key=lambda i: (phis[i], -i))
    for i in range(k):
        lo, hi = (3, 7) if i == root else (3, 5)
        if not lo <= phis[i] <= hi:
            raise StructureUnsupported(
                f"component phi = {phis[i]} outside [{lo}, {hi}] for its role",
                offending=parts[i][0])

    # orient the tree away from the root; mark each part's parent-shared vertex
    adj: dict = {i: [] for i in range(k)}
    for (i, j), v in share.items():
        adj[i].append((j, v))
        adj[j].append((i, v))
    parent_vertex = {root: None}
    order = [root]
    queue = [root]
    while queue:
        i = queue.pop(0)
        for j, v in adj[i]:
            if j not in parent_vertex:
                parent_vertex[j] = v
                order.append(j)
                queue.append(j)
    if len(order) != k:
        raise StructureUnsupported("component meet graph is not connected",
                                   offending=tuple(order))

    psi = EdgeColouring(c)
    next_colour = 1
    red_edges = []
    for i in order:
        sub, back = parts[i]
        local_psi, cert = colour_tiled(sub)
        remap: dict = {}
        for u, v in sub.edges:
            col = local_psi.get(u, v)
            if col not in remap:
                remap[col] = next_colour
                next_colour += 1
            psi.assign(*_lift((u, v), back), remap[col])
        if i == root:
            if cert.kind == "triangle":
                red_edges.append(_lift(_pairs(cert.triangle)[0], back))
            elif cert.kind == "matching":
                red_edges.extend(_lift(e, back) for e in cert.matching)
        else:
            if cert.kind == "no-rainbow":
                continue
            tri_global = sorted(back[v] for v in cert.triangle)
            ends = [v for v in tri_global if v != parent_vertex[i]][:2]
            red_edges.append(_k(*ends))

    seen = set()
    for a, b in red_edges:
        if a in seen or b in seen:
            raise StructureUnsupported("red certificate edges do not form a matching",
                                       offending=tuple(red_edges))
        seen.update((a, b))
        psi.assign(a, b, RED)
    if not is_proper(c, psi):
        raise RuntimeError("internal: tree assembly produced an improper colouring")
    return psi


def avoid_k8(r: Graph) -> EdgeColouring:
    """Proper colouring of r where every rainbow K4 carries RED.

    K4-components with phi <= 2 get rainbow-free colourings on private
    palettes; those with phi >= 3 are grouped by shared vertices into tree
    assemblies coloured by colour_component_tree (one global red); edges in
    no K4 get fresh unique colours.
    """
    parts, leftover = k4_components(r)
    for sub, back in parts:
        if phi(sub) > 7:
            raise OutOfRegime(f"K4-component with phi = {phi(sub)} > 7",
                              offending=(sub, back))
        if sub.n > _VERTEX_CAP:
            raise OutOfRegime(
                f"K4-component with {sub.n} > {_VERTEX_CAP} vertices",
                offending=(sub, back))

    high = [i for i in range(len(parts)) if phi(parts[i][0]) >= 3]
    for a, b in combinations(high, 2):
        common = set(parts[a][1]) & set(parts[b][1])
        if len(common) > 1:
            raise StructureUnsupported(
                "two phi >= 3 components share more than one vertex",
                offending=tuple(sorted(common)))

    # group phi >= 3 components meeting at vertices
    group_of = {i: i for i in high}

    def find(i):
        while group_of[i] != i:
            group_of[i] = group_of[group_of[i]]
            i = group_of[i]
        return i

    for a, b in combinations(high, 2):
        if set(parts[a][1]) & set(parts[b][1]):
            group_of[find(b)] = find(a)
    groups: dict = {}
    for i in high:
        groups.setdefault(find(i), []).append(i)

    psi = EdgeColouring(r)
    next_colour = 1

    def remap_into(edge_cols, preserve_red: bool):
        nonlocal next_colour
        remap: dict = {}
        for (u, v), col in edge_cols:
            if preserve_red and col == RED:
                psi.assign(u, v, RED)
                continue
            if col not in remap:
                remap[col] = next_colour
                next_colour += 1
            psi.assign(u, v, remap[col])

    for i in range(len(parts)):
        if i in group_of:
            continue
        sub, back = parts[i]
        local_psi, cert = colour_tiled(sub)
        remap_into((( _lift((u, v), back), local_psi.get(u, v))
                    for u, v in sub.edges), preserve_red=False)

    for members in (groups[g] for g in sorted(groups)):
        union_edges = sorted({e for i in members
                              for e in (_lift(ed, parts[i][1]) for ed in parts[i][0].edges)})
        c = Graph(r.n, union_edges)
        tree_psi = colour_component_tree(c, [parts[i] for i in members])
        remap_into(((e, tree_psi.get(*e)) for e in union_edges), preserve_red=True)

    for u, v in leftover:
        psi.assign(u, v, next_colour)
        next_colour += 1
    return psi


def avoid_k8_perturbed(instance: PerturbedInstance) -> EdgeColouring:
    """Proper colouring of the perturbed graph with no rainbow K8.

    The random halves are coloured by avoid_k8 (vertex-disjoint, so one
    global red stays a matching); seed edges get fresh unique colours.  A
    rainbow K8 needs four vertices on some side; a rainbow side-K5 is ruled
    out because its five rainbow K4s would need two red matching edges, and
    a 4+4 split repeats red across the two side-K4s.
    """
    off = instance.u_size
    inside = list(instance.left.edges) + [
        (u + off, v + off) for u, v in instance.right.edges]
    rg = Graph(instance.n, sorted(inside))
    base = avoid_k8(rg)
    g = instance.graph()
    psi = EdgeColouring(g)
    for u, v in rg.edges:
        psi.assign(u, v, base.get(u, v))
    for u, v in g.edges:
        if psi.get(u, v) is None:
            psi.assign_fresh(u, v)
    return psi


def find_rainbow_k8(instance: PerturbedInstance, psi: EdgeColouring):
    """An 8-vertex set inducing a rainbow K8 in the perturbed graph, or None.

    Only 4+4 splits can occur when neither random half contains K5, and any
    K8 needs a K4 inside each part, so scanning pairs of per-side rainbow
    K4s is exhaustive.
    """
    off = instance.u_size

    def side_rainbow(part, shift):
        out = []
        for quad in part.cliques(4):
            lifted = tuple(v + shift for v in quad)
            cols = {psi.get(*e) for e in _pairs(lifted)}
            if None not in cols and len(cols) == 6:
                out.append(lifted)
        return out

    left = side_rainbow(instance.left, 0)
    right = side_rainbow(instance.right, off)
    for qa in left:
        for qb in right:
            cols = [psi.get(*e) for e in _pairs(qa)]
            cols += [psi.get(*e) for e in _pairs(qb)]
            cols += [psi.get(a, b) for a in qa for b in qb]
            if len(set(cols)) == 28:
                return tuple(sorted(qa + qb))
    return None
