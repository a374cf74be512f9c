"""Rainbow-K6-avoiding colouring of a perturbed bipartite seed.

The random perturbation must be K4-free.  Then every K6 in the union
splits as a triangle inside each part plus nine seed edges, so it is
enough to protect triangle pairs.  Per connected component of the union
of triangles we find matchings M0..M3 with

  (1) each Mi a matching, pairwise edge-disjoint, M0 vertex-disjoint
      from M1, M2, M3;
  (2) every triangle contains an M0 edge, or edges of at least two of
      M1, M2, M3.

M0 and M1 go red, M2 blue, M3 green; every opposite-part (M0 edge, M2
edge) pair gets its seed 4-cycle coloured with two pair-private colours
on opposite edges; everything else is freshly distinct.  A triangle pair
then always repeats a colour: red/red if both triangles are M0- or
M1-hit, a pair-private colour if one is M0-hit and the other leans on
M2, and two-of-three from {red, blue, green} otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .colouring import EdgeColouring
from .errors import ParameterError, SearchExhausted, StructureUnsupported
from .graph import Graph, components
from .model import PerturbedInstance

__all__ = [
    "MatchingQuadruple",
    "triangle_union",
    "find_matchings",
    "avoid_k6",
    "RED",
    "BLUE",
    "GREEN",
]

RED, BLUE, GREEN = 0, 1, 2

_DIRECT_SOLVER_CAP = 30
_HIT_BUDGET = 10**6
_CSP_BUDGET = 10**7
# The 2-of-3 stages are shortcuts: the full four-label search always runs
# afterwards, so they get a small budget and fail fast when unpromising.
# (Constrained-first nodes are costly, so budgets count fewer, heavier nodes.)
_QUICK_BUDGET = 2000


@dataclass(frozen=True)
class MatchingQuadruple:
    m0: frozenset
    m1: frozenset
    m2: frozenset
    m3: frozenset

    def all_edges(self):
        return self.m0 | self.m1 | self.m2 | self.m3


def _k(u, v):
    return (u, v) if u < v else (v, u)


def _tri_edges(t):
    a, b, c = t
    return ((a, b), (a, c), (b, c))


def triangle_union(g: Graph) -> Graph:
    """Subgraph of all edges that lie in some triangle (same vertex set)."""
    keep = set()
    for t in g.triangles():
        keep.update(_tri_edges(t))
    return Graph(g.n, sorted(keep))


def verify_quadruple(triangles, q: MatchingQuadruple) -> bool:
    ms = [q.m0, q.m1, q.m2, q.m3]
    for m in ms:
        vs = [v for e in m for v in e]
        if len(vs) != len(set(vs)):
            return False
    for a, b in combinations(range(4), 2):
        if ms[a] & ms[b]:
            return False
    v0 = {v for e in q.m0 for v in e}
    for m in ms[1:]:
        if any(v in v0 for e in m for v in e):
            return False
    for t in triangles:
        es = set(_tri_edges(t))
        if es & q.m0:
            continue
        hit = sum(1 for m in ms[1:] if es & m)
        if hit < 2:
            return False
    return True


# -- searches ----------------------------------------------------------------


def _hitting_matching(triangles, budget: int):
    """A matching containing an edge of every triangle, or None
    (no such matching, or budget ran out)."""
    tris = sorted(triangles)
    used: set[int] = set()
    chosen: list[tuple[int, int]] = []
    nodes = 0

    def hit(t) -> bool:
        a, b, c = t
        return any(u in (a, b, c) and v in (a, b, c) for u, v in chosen)

    class _Budget(Exception):
        pass

    def rec(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        while i < len(tris) and hit(tris[i]):
            i += 1
        if i == len(tris):
            return True
        for u, v in _tri_edges(tris[i]):
            if u not in used and v not in used:
                used.update((u, v))
                chosen.append((u, v))
                if rec(i + 1):
                    return True
                chosen.pop()
                used.difference_update((u, v))
        return False

    try:
        if rec(0):
            return list(chosen)
    except _Budget:
        pass
    return None


_PAIR_LABELS = ((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2))


def _label_search(triangles, allow_m0: bool, budget: int):
    """Backtracking over edge labels M0..M3 (M1..M3 only when allow_m0 is
    false), always branching on the unsatisfied triangle with the fewest
    legal moves.  Returns a MatchingQuadruple, or None (proven none /
    budget), plus a flag telling whether the budget ran out."""
    from collections import Counter

    tri_edges = [_tri_edges(t) for t in sorted(triangles)]
    label: dict[tuple[int, int], int] = {}
    vert: list[Counter] = [Counter(), Counter(), Counter(), Counter()]
    size = [0, 0, 0, 0]
    nodes = 0
    out_of_budget = False

    def placeable(e, lab) -> bool:
        if e in label:
            return False
        # Labels 1..3 are interchangeable, so introduce them in order:
        # label k+1 may appear only while label k is in use.
        if lab > 1 and size[lab - 1] == 0:
            return False
        u, v = e
        if vert[lab][u] or vert[lab][v]:
            return False
        if lab == 0:
            return not any(vert[i][u] or vert[i][v] for i in (1, 2, 3))
        return not (vert[0][u] or vert[0][v])

    def put(e, lab):
        label[e] = lab
        size[lab] += 1
        vert[lab][e[0]] += 1
        vert[lab][e[1]] += 1

    def take(e, lab):
        del label[e]
        size[lab] -= 1
        vert[lab][e[0]] -= 1
        vert[lab][e[1]] -= 1

    def satisfied(es) -> bool:
        labs = {label.get(e) for e in es}
        labs.discard(None)
        return 0 in labs or len(labs & {1, 2, 3}) >= 2

    def moves_for(es):
        """Each move is a tuple of (edge, label) placements that satisfies
        the triangle; single additions before pairs before M0."""
        present = {label.get(e) for e in es}
        present.discard(None)
        out = []
        if present & {1, 2, 3}:
            want = sorted({1, 2, 3} - present)
            for e in es:
                for lab in want:
                    if placeable(e, lab):
                        out.append(((e, lab),))
        else:
            for e, f in combinations(es, 2):
                for l1, l2 in _PAIR_LABELS:
                    if placeable(e, l1):
                        put(e, l1)
                        ok = placeable(f, l2)
                        take(e, l1)
                        if ok:
                            out.append(((e, l1), (f, l2)))
        if allow_m0:
            for e in es:
                if placeable(e, 0):
                    out.append(((e, 0),))
        return out

    def rec() -> bool:
        nonlocal nodes, out_of_budget
        nodes += 1
        if nodes > budget:
            out_of_budget = True
            return False
        best = None
        for es in tri_edges:
            if satisfied(es):
                continue
            mv = moves_for(es)
            if best is None or len(mv) < len(best):
                best = mv
                if len(mv) <= 1:
                    break
        if best is None:
            return True
        for mv in best:
            for e, lab in mv:
                put(e, lab)
            if rec():
                return True
            for e, lab in reversed(mv):
                take(e, lab)
            if out_of_budget:
                return False
        return False

    if rec():
        ms = [frozenset(e for e, l in label.items() if l == lab) for lab in range(4)]
        return MatchingQuadruple(*ms), False
    return None, out_of_budget


# -- growth reconstruction -----------------------------------------------


def _growth_tail_split(comp: Graph):
    """Rebuild the component by gluing triangles, lex-least eligible first,
    and return (edges of the starting prefix, pendant edges of the pure
    one-shared-vertex tail).

    A tail step glues a triangle at a single vertex, so its two new
    vertices see nothing else: the only triangles not visible inside the
    prefix are the tail triangles themselves, each hit by its outer edge.
    """
    tris = sorted(comp.triangles())
    if not tris:
        return set(comp.edges), []
    start = tris[0]
    vs = set(start)
    es = set(_tri_edges(start))
    steps = []
    pending = [t for t in tris[1:]]
    while True:
        cand = None
        for t in pending:
            t_es = set(_tri_edges(t))
            if t_es <= es:
                continue
            if set(t) & vs:
                cand = t
                break
        if cand is None:
            break
        t_es = set(_tri_edges(cand))
        shared = len(set(cand) & vs)
        new_vs = set(cand) - vs
        steps.append((cand, shared, sorted(new_vs)))
        vs |= set(cand)
        es |= t_es
        pending.remove(cand)
    if es != set(comp.edges):
        raise ParameterError("component is not a connected union of triangles")
    k = len(steps)
    while k > 0 and steps[k - 1][1] == 1:
        k -= 1
    prefix_edges = set(_tri_edges(start))
    for t, _, _ in steps[:k]:
        prefix_edges |= set(_tri_edges(t))
    tail_pendants = [_k(*nv) for _, _, nv in steps[k:]]
    return prefix_edges, tail_pendants


def find_matchings(component: Graph) -> MatchingQuadruple:
    """Matchings M0..M3 covering every triangle of the component as in the
    two conditions above.

    Tactic ladder: a single hitting matching; otherwise split off the
    pendant-triangle tail of a growth sequence (outer tail edges join M0)
    and cover the remaining prefix by a hitting matching or a 2-of-3
    labelling; otherwise a full bounded search over all four labels.
    """
    comps = [c for c, _ in components(component) if c.n > 1]
    if component.m == 0 or len(comps) != 1 or comps[0].m != component.m:
        raise ParameterError("expected a single connected component with edges")
    tris = component.triangles()
    tri_es = {e for t in tris for e in _tri_edges(t)}
    if tri_es != set(component.edges):
        raise ParameterError("every edge must lie in a triangle")

    def done(q: MatchingQuadruple) -> MatchingQuadruple:
        if not verify_quadruple(tris, q):
            raise RuntimeError("internal: candidate quadruple failed verification")
        return q

    hit = _hitting_matching(tris, _HIT_BUDGET)
    if hit is not None:
        return done(MatchingQuadruple(frozenset(hit), frozenset(), frozenset(), frozenset()))

    if component.n <= _DIRECT_SOLVER_CAP:
        prefix_edges, tail = _growth_tail_split(component)
        if tail:
            prefix = Graph(component.n, sorted(prefix_edges))
            p_tris = prefix.triangles()
            p_hit = _hitting_matching(p_tris, _HIT_BUDGET)
            if p_hit is not None:
                return done(MatchingQuadruple(
                    frozenset(p_hit) | frozenset(tail),
                    frozenset(), frozenset(), frozenset()))
            q, _ = _label_search(p_tris, allow_m0=False, budget=_QUICK_BUDGET)
            if q is not None:
                return done(MatchingQuadruple(
                    frozenset(tail) | q.m0, q.m1, q.m2, q.m3))
        else:
            q, _ = _label_search(tris, allow_m0=False, budget=_QUICK_BUDGET)
            if q is not None:
                return done(q)

    q, out_of_budget = _label_search(tris, allow_m0=True, budget=_CSP_BUDGET)
    if q is not None:
        return done(q)
    if out_of_budget:
        raise SearchExhausted(
            f"matching-quadruple search budget exhausted on a component with "
            f"{component.n} vertices, {component.m} edges")
    raise SearchExhausted(
        f"no valid matching quadruple exists for a component with "
        f"{component.n} vertices, {component.m} edges")


# -- the avoider -------------------------------------------------------------


def _part_matchings(part: Graph, offset: int) -> MatchingQuadruple:
    tu = triangle_union(part)
    m = [set(), set(), set(), set()]
    for sub, back in components(tu):
        if sub.m == 0:
            continue
        q = find_matchings(sub)
        for i, edges in enumerate((q.m0, q.m1, q.m2, q.m3)):
            for u, v in edges:
                m[i].add(_k(back[u] + offset, back[v] + offset))
    return MatchingQuadruple(*(frozenset(x) for x in m))


def avoid_k6(instance: PerturbedInstance) -> EdgeColouring:
    """Total proper colouring of the instance with no rainbow K6.

    Requires the perturbation to be K4-free (else StructureUnsupported);
    may raise SearchExhausted through find_matchings.
    """
    for side, part in (("left", instance.left), ("right", instance.right)):
        k4 = part.cliques(4)
        if k4:
            raise StructureUnsupported(
                f"random edges inside the {side} part contain a K4",
                offending=k4[0])
    off = instance.u_size
    qa = _part_matchings(instance.left, 0)
    qb = _part_matchings(instance.right, off)

    g = instance.graph()
    psi = EdgeColouring(g)
    for e in qa.m0 | qa.m1 | qb.m0 | qb.m1:
        psi.assign(*e, RED)
    for e in qa.m2 | qb.m2:
        psi.assign(*e, BLUE)
    for e in qa.m3 | qb.m3:
        psi.assign(*e, GREEN)

    next_colour = 3
    for m0_edges, m2_edges in ((qa.m0, qb.m2), (qb.m0, qa.m2)):
        for x, y in sorted(m0_edges):
            for z, w in sorted(m2_edges):
                c1, c2 = next_colour, next_colour + 1
                next_colour += 2
                psi.assign(x, z, c1)
                psi.assign(y, w, c1)
                psi.assign(x, w, c2)
                psi.assign(y, z, c2)

    for u, v in g.edges:
        if psi.get(u, v) is None:
            psi.assign(u, v, next_colour)
            next_colour += 1
    return psi


def k6_triangle_pairs(instance: PerturbedInstance):
    """All K6 copies of the union as (A-triangle, B-triangle) pairs; with a
    K4-free perturbation these are the only K6s."""
    off = instance.u_size
    left_tris = [t for t in instance.left.triangles()]
    right_tris = [(a + off, b + off, c + off) for a, b, c in instance.right.triangles()]
    return [(ta, tb) for ta in left_tris for tb in right_tris]
