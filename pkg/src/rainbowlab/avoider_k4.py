"""Rainbow-K4-avoiding proper colouring of a perturbed bipartite seed.

Works whenever every component of the random perturbation inside each
part is one of K1, K2, P3, K13 (the 3-leaf star) or P4.  Inside edges
reuse the shared colours 1,2,3; every pair of opposite-part components
gets a private palette for its complete bipartite cross block, filled
from a fixed table that leaves no K4 rainbow.

Any K4 in such an instance has two vertices in each part (the component
kinds are triangle-free), so its inside edges live in one component per
part and its four cross edges inside a single pair block; the tables are
checked exhaustively for all kind pairs in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .colouring import EdgeColouring
from .errors import ParameterError, StructureUnsupported
from .graph import Graph, components
from .model import PerturbedInstance

__all__ = [
    "Component",
    "classify_components",
    "colour_inside",
    "cross_table",
    "avoid_k4",
    "INSIDE_COLOURS",
]

INSIDE_COLOURS = (1, 2, 3)

PATH_KINDS = {"K2", "P3", "P4"}


@dataclass(frozen=True)
class Component:
    """kind in {K1,K2,P3,K13,P4}; vertices ordered by role:
    K13 lists the centre first, paths are in path order (smaller end first),
    P3's middle vertex sits at index 1."""

    kind: str
    vertices: tuple[int, ...]


def _classify_one(sub: Graph, back: list[int]) -> Component:
    n, m = sub.n, sub.m
    if n == 1:
        return Component("K1", (back[0],))
    if n == 2 and m == 1:
        return Component("K2", tuple(sorted(back)))
    if n == 3 and m == 2:
        mid = next(v for v in range(3) if sub.degree(v) == 2)
        ends = sorted(v for v in range(3) if v != mid)
        return Component("P3", (back[ends[0]], back[mid], back[ends[1]]))
    if n == 4 and m == 3:
        degs = sorted(sub.degree(v) for v in range(4))
        if degs == [1, 1, 1, 3]:
            centre = next(v for v in range(4) if sub.degree(v) == 3)
            leaves = sorted(back[v] for v in range(4) if v != centre)
            return Component("K13", (back[centre], *leaves))
        if degs == [1, 1, 2, 2]:
            ends = sorted((v for v in range(4) if sub.degree(v) == 1),
                          key=lambda v: back[v])
            order = [ends[0]]
            while len(order) < 4:
                nxt = next(u for u in sub.neighbours(order[-1]) if u not in order)
                order.append(nxt)
            return Component("P4", tuple(back[v] for v in order))
    raise StructureUnsupported(
        f"component on {n} vertices with {m} edges is outside the supported kinds",
        offending=tuple(sorted(back)),
    )


def classify_components(random_edges: Graph) -> list[Component]:
    return [_classify_one(sub, back) for sub, back in components(random_edges)]


def colour_inside(c: Component) -> dict[tuple[int, int], int]:
    """Edge colours within one component: consecutive 1,2,3 in role order,
    so a P4's middle edge always gets colour 2."""
    vs = c.vertices
    if c.kind == "K1":
        return {}
    if c.kind == "K2":
        return {_k(vs[0], vs[1]): 1}
    if c.kind == "P3":
        return {_k(vs[0], vs[1]): 1, _k(vs[1], vs[2]): 2}
    if c.kind == "K13":
        return {_k(vs[0], vs[i]): i for i in (1, 2, 3)}
    if c.kind == "P4":
        return {_k(vs[i], vs[i + 1]): i + 1 for i in range(3)}
    raise StructureUnsupported(f"unknown component kind {c.kind}")


def _k(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


# role index 0..3 stands for the four colours shared inside one pair block;
# missing cells take a private fresh colour each
_T_K13_K13 = {
    ("x1", "x2"): 0, ("y", "y"): 0, ("x2", "x3"): 0, ("x3", "x1"): 0,
    ("y", "x2"): 1, ("x3", "y"): 1,
    ("x1", "y"): 2, ("y", "x3"): 2,
    ("x2", "y"): 3, ("y", "x1"): 3,
}
_T_K13_P4 = {
    ("y", "x1"): 0, ("x2", "x2"): 0,
    ("y", "x4"): 1, ("x2", "x3"): 1,
    ("x1", "x3"): 2, ("y", "x2"): 2, ("x3", "x1"): 2,
    ("x1", "x4"): 3, ("y", "x3"): 3, ("x3", "x2"): 3,
}
_T_P4_P4 = {
    ("x1", "x3"): 0, ("x2", "x4"): 0, ("x3", "x1"): 0, ("x4", "x2"): 0,
    ("x1", "x2"): 1, ("x2", "x3"): 1, ("x3", "x4"): 1,
    ("x2", "x1"): 2, ("x3", "x2"): 2, ("x4", "x3"): 2,
}

_K13_LABELS = ("y", "x1", "x2", "x3")
_P4_LABELS = ("x1", "x2", "x3", "x4")


def _host(c: Component, other_kind: str) -> tuple[str, dict[int, str]]:
    """Host pattern (K13 or P4) and the label of each component vertex in it."""
    vs = c.vertices
    if c.kind == "K13":
        return "K13", dict(zip(vs, _K13_LABELS))
    if c.kind == "P4":
        return "P4", dict(zip(vs, _P4_LABELS))
    if c.kind == "P3":
        return "P4", dict(zip(vs, _P4_LABELS[:3]))
    if c.kind == "K2":
        if other_kind in PATH_KINDS:
            return "P4", dict(zip(vs, _P4_LABELS[:2]))
        return "K13", dict(zip(vs, _K13_LABELS[:2]))
    if c.kind == "K1":
        return "K13", {vs[0]: "y"}
    raise StructureUnsupported(f"unknown component kind {c.kind}")


def _table_for(host_l: str, host_r: str):
    """Role table plus a flag for swapped lookup order."""
    if (host_l, host_r) == ("K13", "K13"):
        return _T_K13_K13, False
    if (host_l, host_r) == ("K13", "P4"):
        return _T_K13_P4, False
    if (host_l, host_r) == ("P4", "K13"):
        return _T_K13_P4, True
    return _T_P4_P4, False


def cross_palette_size(left: Component, right: Component) -> int:
    """4 role colours plus one fresh colour per untabled cell."""
    host_l, lab_l = _host(left, right.kind)
    host_r, lab_r = _host(right, left.kind)
    table, swap = _table_for(host_l, host_r)
    fresh = 0
    for u in left.vertices:
        for w in right.vertices:
            key = (lab_r[w], lab_l[u]) if swap else (lab_l[u], lab_r[w])
            if key not in table:
                fresh += 1
    return 4 + fresh


def cross_table(left: Component, right: Component, palette) -> dict[tuple[int, int], int]:
    """Colours for all cross edges between the two components.

    palette[0..3] are the shared role colours of this block; the rest of
    the palette feeds the untabled cells one fresh colour each.
    """
    palette = list(palette)
    need = cross_palette_size(left, right)
    if len(palette) < need:
        raise ParameterError(f"palette of size {len(palette)} is too small, need {need}")
    host_l, lab_l = _host(left, right.kind)
    host_r, lab_r = _host(right, left.kind)
    table, swap = _table_for(host_l, host_r)
    out: dict[tuple[int, int], int] = {}
    nxt = 4
    for u in left.vertices:
        for w in right.vertices:
            key = (lab_r[w], lab_l[u]) if swap else (lab_l[u], lab_r[w])
            role = table.get(key)
            if role is None:
                out[_k(u, w)] = palette[nxt]
                nxt += 1
            else:
                out[_k(u, w)] = palette[role]
    return out


def avoid_k4(instance: PerturbedInstance) -> EdgeColouring:
    """Total proper colouring of the instance with no rainbow K4.

    Raises StructureUnsupported when some perturbation component falls
    outside the five supported kinds (the construction's regime).
    """
    g = instance.graph()
    off = instance.u_size
    left = [
        Component(c.kind, tuple(v for v in c.vertices))
        for c in classify_components(instance.left)
    ]
    right = [
        Component(c.kind, tuple(v + off for v in c.vertices))
        for c in classify_components(instance.right)
    ]
    psi = EdgeColouring(g)
    for comp in left + right:
        for (u, v), colour in colour_inside(comp).items():
            psi.assign(u, v, colour)
    next_free = 4
    for a in left:
        for b in right:
            size = cross_palette_size(a, b)
            palette = range(next_free, next_free + size)
            next_free += size
            for (u, w), colour in cross_table(a, b, palette).items():
                psi.assign(u, w, colour)
    return psi
