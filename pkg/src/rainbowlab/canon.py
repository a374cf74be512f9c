"""Canonical forms, isomorphism tests and automorphism group orders.

Colour refinement plus individualisation, with two standard prunings on
the canonical search: children of a node are skipped when a discovered
automorphism maps them into an already-explored sibling, and a leaf whose
certificate ties the incumbent triggers a backjump to the deepest node
shared with the incumbent's branch.  That keeps highly symmetric inputs
(cliques and the like) polynomial in practice at these sizes.
"""

from __future__ import annotations

from .errors import ParameterError
from .graph import Graph, bits

__all__ = ["canonical_form", "aut_order", "is_isomorphic"]

_CANON_CAP = 14
_AUT_CAP = 48


def _refine(adj, colours):
    """One-dimensional colour refinement to a stable partition.

    Colour ids are normalised by sorting signatures, so the result only
    depends on the isomorphism type of (graph, colouring).
    """
    n = len(adj)
    colours = list(colours)
    while True:
        sig = []
        for v in range(n):
            neigh = sorted(colours[u] for u in bits(adj[v]))
            sig.append((colours[v], tuple(neigh)))
        ranking = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranking[s] for s in sig]
        if new == colours:
            return new
        colours = new


def _cells(colours):
    out: dict[int, list[int]] = {}
    for v, c in enumerate(colours):
        out.setdefault(c, []).append(v)
    return out


def canonical_form(g: Graph) -> tuple:
    """Canonical key: equal for two graphs iff they are isomorphic.

    Returns (n, sorted relabelled edge tuple) under the canonical labelling.
    """
    n = g.n
    if n > _CANON_CAP:
        raise ParameterError(f"canonical_form capped at {_CANON_CAP} vertices, got {n}")
    if n == 0:
        return (0, ())

    adj = g.adj
    auts: list[tuple[int, ...]] = []
    state = {"cert": None, "path": None}

    def leaf(colours, path):
        lab = colours  # discrete partition: colour id is the label
        cert = tuple(sorted(
            (lab[u], lab[v]) if lab[u] < lab[v] else (lab[v], lab[u])
            for u, v in g.edges
        ))
        if state["cert"] is None or cert < state["cert"]:
            state["cert"] = cert
            state["lab"] = lab[:]
            state["path"] = list(path)
            return len(path)
        if cert == state["cert"]:
            inv_best = [0] * n
            for v, l in enumerate(state["lab"]):
                inv_best[l] = v
            a = tuple(inv_best[lab[v]] for v in range(n))
            if any(a[i] != i for i in range(n)):
                auts.append(a)
                k = 0
                best_path = state["path"]
                while k < len(path) and k < len(best_path) and path[k] == best_path[k]:
                    k += 1
                return k  # backjump to the divergence point with the incumbent
        return len(path)

    def orbit_hits_explored(v, explored, path):
        gens = [a for a in auts if all(a[p] == p for p in path)]
        if not gens:
            return False
        orbit = {v}
        frontier = [v]
        while frontier:
            x = frontier.pop()
            for a in gens:
                y = a[x]
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        return any(u in orbit for u in explored)

    def rec(colours, path) -> int:
        cells = _cells(colours)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            return leaf(colours, path)
        depth = len(path)
        explored: list[int] = []
        for v in target:
            if orbit_hits_explored(v, explored, path):
                continue
            explored.append(v)
            child = colours[:]
            child[v] = len(colours)  # fresh maximal colour, normalised by _refine
            r = rec(_refine(adj, child), path + [v])
            if r < depth:
                return r
        return depth

    rec(_refine(adj, [0] * n), [])
    return (n, state["cert"])


def _union_adj(g: Graph):
    """Adjacency of the disjoint union g + g (copy two shifted by n)."""
    n = g.n
    out = []
    for v in range(g.n):
        out.append(g.adj[v])
    for v in range(g.n):
        out.append(g.adj[v] << n)
    return out


def _colour_iso_exists(g: Graph, src_colours, dst_colours) -> bool:
    """Is there a colour-respecting automorphism of g mapping the colouring
    src to the colouring dst?  Joint refinement on the disjoint union keeps
    the colour ids of the two copies comparable."""
    n = g.n
    adj2 = _union_adj(g)
    # tag copies apart only through their colourings, offset so that equal
    # src/dst colours meet in the same class
    base = [2 * c for c in src_colours] + [2 * c for c in dst_colours]
    colours = _refine(adj2, base)

    def split(colours):
        cells = _cells(colours)
        for c in sorted(cells):
            cell = cells[c]
            left = [v for v in cell if v < n]
            right = [v for v in cell if v >= n]
            if len(left) != len(right):
                return None  # colour histograms differ: no iso
            if len(left) > 1:
                return c, left, right
        return "discrete"

    def rec(colours) -> bool:
        res = split(colours)
        if res is None:
            return False
        if res == "discrete":
            # discrete matched partition: read the bijection and check edges
            cells = _cells(colours)
            mapping = {}
            for cell in cells.values():
                u = min(cell)
                w = max(cell)
                mapping[u] = w - n
            for u, v in g.edges:
                a, b = mapping[u], mapping[v]
                if not (g.adj[a] >> b) & 1:
                    return False
            return True
        _, left, right = res
        u = left[0]
        for w in right:
            child = colours[:]
            fresh = len(child)
            child[u] = fresh
            child[w] = fresh
            if rec(_refine(adj2, child)):
                return True
        return False

    return rec(colours)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.m != h.m:
        return False
    if g.n == 0:
        return True
    if g.n > _AUT_CAP:
        raise ParameterError(f"is_isomorphic capped at {_AUT_CAP} vertices")
    if sorted(g.degree(v) for v in range(g.n)) != sorted(h.degree(v) for v in range(h.n)):
        return False
    u = _disjoint(g, h)
    src = [0] * g.n
    dst = [0] * g.n
    return _colour_iso_exists_pair(u, g.n, src, dst)


def _disjoint(g: Graph, h: Graph):
    out = list(g.adj) + [a << g.n for a in h.adj]
    return out


def _colour_iso_exists_pair(adj2, n, src_colours, dst_colours) -> bool:
    """As _colour_iso_exists but over a prebuilt union adjacency (the two
    halves may come from different graphs)."""
    base = [2 * c for c in src_colours] + [2 * c for c in dst_colours]
    colours = _refine(adj2, base)

    def split(colours):
        cells = _cells(colours)
        for c in sorted(cells):
            cell = cells[c]
            left = [v for v in cell if v < n]
            right = [v for v in cell if v >= n]
            if len(left) != len(right):
                return None
            if len(left) > 1:
                return c, left, right
        return "discrete"

    def rec(colours) -> bool:
        res = split(colours)
        if res is None:
            return False
        if res == "discrete":
            cells = _cells(colours)
            mapping = {}
            for cell in cells.values():
                u = min(cell)
                w = max(cell)
                mapping[u] = w - n
            for u in range(n):
                au = adj2[u]
                for v in bits(au):
                    if v <= u or v >= n:
                        continue
                    a, b = mapping[u], mapping[v]
                    if not (adj2[n + a] >> (n + b)) & 1:
                        return False
            return True
        _, left, right = res
        u = left[0]
        for w in right:
            child = colours[:]
            fresh = len(child)
            child[u] = fresh
            child[w] = fresh
            if rec(_refine(adj2, child)):
                return True
        return False

    return rec(colours)


def aut_order(g: Graph) -> int:
    """|Aut(g)| via an orbit-stabiliser chain.

    At each level the first non-singleton cell of the refined partition is
    taken, the orbit of its least vertex under the current point stabiliser
    is counted by individual existence searches, and the vertex is pinned.
    The product of orbit sizes over the chain is the group order.
    """
    n = g.n
    if n > _AUT_CAP:
        raise ParameterError(f"aut_order capped at {_AUT_CAP} vertices, got {n}")
    if n <= 1:
        return 1

    order = 1
    pinned: list[int] = []
    while True:
        base = [0] * n
        for i, v in enumerate(pinned):
            base[v] = i + 1
        colours = _refine(g.adj, base)
        cells = _cells(colours)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            return order
        v0 = target[0]
        orbit = 1
        for w in target[1:]:
            src = base[:]
            dst = base[:]
            tag = n + 1
            src[v0] = tag
            dst[w] = tag
            if _colour_iso_exists(g, src, dst):
                orbit += 1
        order *= orbit
        pinned.append(v0)
