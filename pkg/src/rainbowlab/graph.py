"""Undirected simple graphs with bitset adjacency, named constructors,
subgraph enumeration and exact density functionals.

Vertex ids are dense integers 0..n-1.  Adjacency is one Python int per
vertex used as a bitset, so neighbourhood intersections are single `&`
operations and popcounts come from int.bit_count().

Fixed labelling of the named constructions (tests and colouring tables
rely on these):

  Clique(r)               0..r-1
  CompleteBipartite(a,b)  first part 0..a-1, second part a..a+b-1
  Path(k)                 path 0-1-...-(k-1), k vertices
  Star(k)                 centre 0, leaves 1..k
  Join(L, R)              L keeps its ids, R shifted by v(L); all cross edges added
  HatK(a, b)              Join(Clique(a), b isolated vertices)
  R7                      u1,u2,u3 -> 0,1,2 and w1,w2,w3,w4 -> 3,4,5,6
  T(k)                    hub 0; i-th triangle (1-based) on {0, 2i-1, 2i}
  KDelta(s, t)            centre 0, spoke leaves 1..s, pendant j of spoke i
                          at index s + (i-1)*t + j (1-based i, j); each pendant
                          is adjacent to the centre and to its spoke leaf
  DisjointUnion(list)     blocks shifted left-to-right
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import ParameterError

__all__ = [
    "Graph",
    "DensityReport",
    "construct",
    "parse_graph_spec",
    "clique",
    "complete_bipartite",
    "path_graph",
    "star",
    "join",
    "hat_k",
    "r7",
    "t_graph",
    "k_delta",
    "disjoint_union",
    "empty_graph",
    "enumerate_copies",
    "count_copies",
    "common_neighbourhood",
    "densities",
    "components",
    "bits",
    "graph_to_json",
    "graph_from_json",
    "parse_edge_list",
    "format_edge_list",
]


def bits(mask: int):
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Immutable undirected simple graph."""

    __slots__ = ("n", "adj", "edges", "_edge_index")

    def __init__(self, n: int, edges):
        if n < 0:
            raise ParameterError(f"vertex count must be >= 0, got {n}")
        adj = [0] * n
        norm = []
        seen = set()
        for u, v in edges:
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u},{v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                continue
            seen.add((u, v))
            norm.append((u, v))
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        norm.sort()
        self.n = n
        self.adj = tuple(adj)
        self.edges = tuple(norm)
        self._edge_index = {e: i for i, e in enumerate(norm)}

    # -- basic queries ----------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and 0 <= u < self.n and 0 <= v < self.n and bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbours(self, v: int):
        return bits(self.adj[v])

    def edge_id(self, u: int, v: int) -> int:
        return self._edge_index[(u, v) if u < v else (v, u)]

    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    # -- derived graphs ---------------------------------------------------

    def subgraph(self, vertices) -> tuple["Graph", list[int]]:
        """Induced subgraph. Returns (graph, back_map) with back_map[i] the
        original id of new vertex i; vertices are relabelled in sorted order."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        sub_edges = [
            (pos[u], pos[v])
            for u, v in combinations(vs, 2)
            if self.has_edge(u, v)
        ]
        return Graph(len(vs), sub_edges), vs

    def induced_mask_edge_count(self, mask: int) -> int:
        total = 0
        for v in bits(mask):
            total += (self.adj[v] & mask).bit_count()
        return total // 2

    def with_edges(self, extra) -> "Graph":
        return Graph(self.n, list(self.edges) + list(extra))

    def triangles(self) -> list[tuple[int, int, int]]:
        """All triangles as sorted vertex triples."""
        out = []
        for u, v in self.edges:
            common = self.adj[u] & self.adj[v]
            common >>= v + 1  # only count w > v > u once
            w = v + 1
            while common:
                low = common & -common
                out.append((u, v, w + low.bit_length() - 1))
                common ^= low
        # (u,v) with u<v and w>v covers each triangle exactly once via its
        # lowest edge
        return out

    def cliques(self, r: int) -> list[tuple[int, ...]]:
        """All r-cliques as sorted vertex tuples."""
        if r < 1:
            raise ParameterError("clique order must be >= 1")
        if r == 1:
            return [(v,) for v in range(self.n)]
        if r == 2:
            return list(self.edges)
        out = []

        def grow(cur: tuple[int, ...], cand: int):
            if len(cur) == r:
                out.append(cur)
                return
            for v in bits(cand):
                grow(cur + (v,), cand & self.adj[v] & ~((1 << (v + 1)) - 1))

        full = self.vertex_mask()
        for v in range(self.n):
            grow((v,), self.adj[v] & full & ~((1 << (v + 1)) - 1))
        return out


@dataclass(frozen=True)
class DensityReport:
    m1: Fraction
    m2: Fraction | None
    m_bip2: Fraction | None


# -- constructors ----------------------------------------------------------


def empty_graph(n: int) -> Graph:
    return Graph(n, [])


def clique(r: int) -> Graph:
    if r < 1:
        raise ParameterError(f"Clique order must be >= 1, got {r}")
    return Graph(r, list(combinations(range(r), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 0 or b < 0:
        raise ParameterError("CompleteBipartite parts must be >= 0")
    return Graph(a + b, [(u, a + w) for u in range(a) for w in range(b)])


def path_graph(k: int) -> Graph:
    if k < 1:
        raise ParameterError(f"Path needs >= 1 vertex, got {k}")
    return Graph(k, [(i, i + 1) for i in range(k - 1)])


def star(k: int) -> Graph:
    if k < 0:
        raise ParameterError("Star leaf count must be >= 0")
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def join(left: Graph, right: Graph) -> Graph:
    off = left.n
    edges = list(left.edges)
    edges += [(u + off, v + off) for u, v in right.edges]
    edges += [(u, w + off) for u in range(left.n) for w in range(right.n)]
    return Graph(left.n + right.n, edges)


def hat_k(a: int, b: int) -> Graph:
    """Complete graph on a vertices joined to b isolated vertices."""
    return join(clique(a), empty_graph(b))


R7_EDGE_LABELS = (
    ("u1", "u2"), ("u2", "u3"),
    ("u1", "w1"), ("u1", "w2"), ("u2", "w1"), ("u2", "w2"),
    ("u2", "w3"), ("u2", "w4"), ("u3", "w3"), ("u3", "w4"),
)
R7_VERTEX = {"u1": 0, "u2": 1, "u3": 2, "w1": 3, "w2": 4, "w3": 5, "w4": 6}


def r7() -> Graph:
    """Two triangle pairs hanging off a 3-vertex path: 7 vertices, 10 edges."""
    return Graph(7, [(R7_VERTEX[a], R7_VERTEX[b]) for a, b in R7_EDGE_LABELS])


def t_graph(k: int) -> Graph:
    """k vertex-disjoint triangles glued at a single hub vertex."""
    if k < 1:
        raise ParameterError(f"T(k) needs k >= 1, got {k}")
    edges = []
    for i in range(1, k + 1):
        a, b = 2 * i - 1, 2 * i
        edges += [(0, a), (0, b), (a, b)]
    return Graph(2 * k + 1, edges)


def k_delta(s: int, t: int) -> Graph:
    """Star with s spokes, each spoke edge carrying t pendant triangles."""
    if s < 1 or t < 0:
        raise ParameterError(f"KDelta needs s >= 1, t >= 0, got ({s},{t})")
    edges = [(0, i) for i in range(1, s + 1)]
    for i in range(1, s + 1):
        for j in range(1, t + 1):
            p = s + (i - 1) * t + j
            edges += [(0, p), (i, p)]
    return Graph(1 + s + s * t, edges)


def disjoint_union(parts) -> Graph:
    parts = list(parts)
    off = 0
    edges = []
    for g in parts:
        edges += [(u + off, v + off) for u, v in g.edges]
        off += g.n
    return Graph(off, edges)


_ATOM = re.compile(r"^([a-z_]+)\s*(?:\(\s*(.*)\s*\))?$", re.IGNORECASE)


def parse_graph_spec(spec: str) -> Graph:
    """Parse a named-graph spec string.

    Accepted forms (case-insensitive): Clique(r), CompleteBipartite(a,b),
    Path(k), Star(k), Join(A,B), HatK(a,b), R7, T(k), KDelta(s,t),
    DisjointUnion(A,B,...), plus the shorthands K<r> (clique), P<k> (path),
    and hatk<a><b> with single-digit arguments (e.g. hatk34).
    """
    s = spec.strip()
    short = s.lower()
    m = re.fullmatch(r"k(\d+)", short)
    if m:
        return clique(int(m.group(1)))
    m = re.fullmatch(r"p(\d+)", short)
    if m:
        return path_graph(int(m.group(1)))
    m = re.fullmatch(r"hatk(\d)(\d)", short)
    if m:
        return hat_k(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"t(\d+)", short)
    if m:
        return t_graph(int(m.group(1)))
    if short == "r7":
        return r7()
    m = _ATOM.match(s)
    if not m:
        raise ParameterError(f"cannot parse graph spec {spec!r}")
    name = m.group(1).lower()
    arg_src = m.group(2)

    def split_args(text: str) -> list[str]:
        parts, depth, cur = [], 0, []
        for ch in text:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "," and depth == 0:
                parts.append("".join(cur).strip())
                cur = []
            else:
                cur.append(ch)
        if cur:
            parts.append("".join(cur).strip())
        return [p for p in parts if p]

    args = split_args(arg_src) if arg_src else []

    def ints(k: int) -> list[int]:
        if len(args) != k:
            raise ParameterError(f"{name} expects {k} integer argument(s), got {args}")
        try:
            return [int(a) for a in args]
        except ValueError as exc:
            raise ParameterError(f"{name} expects integers, got {args}") from exc

    if name in ("clique", "k"):
        return clique(*ints(1))
    if name in ("completebipartite", "complete_bipartite", "kb"):
        return complete_bipartite(*ints(2))
    if name in ("path", "p"):
        return path_graph(*ints(1))
    if name == "star":
        return star(*ints(1))
    if name == "join":
        if len(args) != 2:
            raise ParameterError(f"Join expects 2 sub-specs, got {args}")
        return join(parse_graph_spec(args[0]), parse_graph_spec(args[1]))
    if name in ("hatk", "hat_k"):
        return hat_k(*ints(2))
    if name == "r7":
        return r7()
    if name == "t":
        return t_graph(*ints(1))
    if name in ("kdelta", "k_delta"):
        return k_delta(*ints(2))
    if name in ("disjointunion", "disjoint_union"):
        if not args:
            raise ParameterError("DisjointUnion expects >= 1 sub-spec")
        return disjoint_union(parse_graph_spec(a) for a in args)
    if name == "empty":
        return empty_graph(*ints(1))
    raise ParameterError(f"unknown graph spec {spec!r}")


def construct(spec) -> Graph:
    """Build a named graph from a spec string (or pass a Graph through)."""
    if isinstance(spec, Graph):
        return spec
    if isinstance(spec, str):
        return parse_graph_spec(spec)
    raise ParameterError(f"unsupported graph spec {spec!r}")


# -- enumeration -----------------------------------------------------------


def _connected_order(h: Graph) -> list[int]:
    """Vertex order where each vertex after the first has an earlier
    neighbour whenever one exists; starts from a max-degree vertex."""
    if h.n == 0:
        return []
    order = [max(range(h.n), key=lambda v: (h.degree(v), -v))]
    placed = {order[0]}
    while len(order) < h.n:
        cand = [v for v in range(h.n) if v not in placed]
        attached = [v for v in cand if any(h.has_edge(v, u) for u in placed)]
        pool = attached or cand
        nxt = max(pool, key=lambda v: (sum(h.has_edge(v, u) for u in placed), h.degree(v), -v))
        order.append(nxt)
        placed.add(nxt)
    return order


def enumerate_copies(g: Graph, h: Graph) -> list[tuple[int, ...]]:
    """All copies of h in g (as subgraphs), one embedding per copy.

    An embedding is a vertex tuple (image of h-vertex 0, 1, ...).  Copies
    are deduplicated: two embeddings that induce the same image subgraph
    (same vertex set and same image edge set) count once.  Non-edges of h
    are NOT required to be non-edges of g.
    """
    if h.n > g.n or h.m > g.m and h.m > 0:
        return []
    if h.n == 0:
        return [()]
    if h.m == 0:
        return [t for t in combinations(range(g.n), h.n)]
    # fast paths for the two hot patterns
    if h.n == 3 and h.m == 3:
        return [t for t in g.triangles()]
    if h.n == 4 and h.m == 6:
        return g.cliques(4)

    comps = components(h)
    if len(comps) > 1:
        return _enumerate_disconnected(g, comps)

    order = _connected_order(h)
    pos_in_order = {v: i for i, v in enumerate(order)}
    # for each vertex in order, its h-neighbours that appear earlier
    earlier = [
        [u for u in bits(h.adj[v]) if pos_in_order[u] < i]
        for i, v in enumerate(order)
    ]
    full = g.vertex_mask()
    found: dict[tuple, tuple[int, ...]] = {}
    image = [0] * h.n

    def key_of() -> tuple:
        vs = frozenset(image)
        es = frozenset(
            (image[u], image[v]) if image[u] < image[v] else (image[v], image[u])
            for u, v in h.edges
        )
        return (vs, es)

    def place(i: int, used: int):
        if i == h.n:
            found.setdefault(key_of(), tuple(image))
            return
        hv = order[i]
        cand = full & ~used
        for u in earlier[i]:
            cand &= g.adj[image[u]]
        for gv in bits(cand):
            image[hv] = gv
            place(i + 1, used | (1 << gv))

    place(0, 0)
    return sorted(found.values())


def _enumerate_disconnected(g: Graph, comps) -> list[tuple[int, ...]]:
    per_comp = [(back, enumerate_copies(g, sub)) for sub, back in comps]
    h_edges = []
    for sub, back in comps:
        h_edges += [(back[u], back[v]) for u, v in sub.edges]
    total_n = sum(len(back) for back, _ in per_comp)
    found: dict[tuple, tuple[int, ...]] = {}
    image = [0] * total_n

    def copy_key() -> tuple:
        es = frozenset(
            (image[u], image[v]) if image[u] < image[v] else (image[v], image[u])
            for u, v in h_edges
        )
        return (frozenset(image), es)

    def place(ci: int, used: frozenset):
        if ci == len(per_comp):
            found.setdefault(copy_key(), tuple(image))
            return
        back, embeds = per_comp[ci]
        for emb in embeds:
            if any(v in used for v in emb):
                continue
            for local, orig in enumerate(back):
                image[orig] = emb[local]
            place(ci + 1, used | frozenset(emb))

    place(0, frozenset())
    return sorted(found.values())


def count_copies(g: Graph, h: Graph) -> int:
    return len(enumerate_copies(g, h))


def common_neighbourhood(g: Graph, xs) -> set[int]:
    """Vertices adjacent to every member of xs, excluding xs itself."""
    xs = list(xs)
    if not xs:
        return set(range(g.n))
    mask = g.vertex_mask()
    for x in xs:
        mask &= g.adj[x]
    for x in xs:
        mask &= ~(1 << x)
    return set(bits(mask))


def components(g: Graph) -> list[tuple[Graph, list[int]]]:
    """Connected components with back-maps to original vertex ids."""
    seen = 0
    out = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = 1 << v
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= g.adj[u]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        out.append(g.subgraph(bits(comp)))
    return out


# -- densities -------------------------------------------------------------

_DENSITY_CAP = 20


def _edge_counts_all_subsets(g: Graph) -> list[int]:
    """e[mask] = induced edge count, for every vertex subset mask."""
    n = g.n
    e = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        e[mask] = e[rest] + (g.adj[v] & rest).bit_count()
    return e


def densities(h: Graph, want_bip2: bool = True) -> DensityReport:
    """Exact density functionals.

    m1   = max e(J)/v(J) over non-empty subgraphs J,
    m2   = max (e(J)-1)/(v(J)-2) over subgraphs with e(J) >= 2 (None if e(h) < 2),
    m_bip2 = min over vertex bipartitions of max(m1 on each side)
             (None when v > 16 or want_bip2 is false).

    Subgraph maxima are attained on induced subgraphs, so the scans range
    over vertex subsets only.
    """
    if h.n == 0:
        raise ParameterError("densities of the empty graph are undefined")
    if h.n > _DENSITY_CAP:
        raise ParameterError(f"density scan capped at {_DENSITY_CAP} vertices, got {h.n}")
    e = _edge_counts_all_subsets(h)
    m1 = Fraction(0)
    m2: Fraction | None = None
    for mask in range(1, 1 << h.n):
        v = mask.bit_count()
        ecnt = e[mask]
        m1 = max(m1, Fraction(ecnt, v))
        if v >= 3 and ecnt >= 2:
            cand = Fraction(ecnt - 1, v - 2)
            m2 = cand if m2 is None else max(m2, cand)
    m_bip2: Fraction | None = None
    if want_bip2 and h.n <= 16:
        # m1max[S] = max density over non-empty subsets of S
        m1max: list[Fraction | None] = [None] * (1 << h.n)
        for mask in range(1, 1 << h.n):
            best = Fraction(e[mask], mask.bit_count())
            sub = mask
            for v in bits(mask):
                prev = m1max[mask ^ (1 << v)]
                if prev is not None and prev > best:
                    best = prev
            m1max[mask] = best
        full = h.vertex_mask()
        for mask in range((1 << h.n) // 2 + 1):
            left = m1max[mask] if mask else Fraction(0)
            right = m1max[full ^ mask] if full ^ mask else Fraction(0)
            cand = max(left, right)
            if m_bip2 is None or cand < m_bip2:
                m_bip2 = cand
    return DensityReport(m1=m1, m2=m2, m_bip2=m_bip2)


# -- serialization ---------------------------------------------------------


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    tokens = text.split()
    if len(tokens) < 2:
        raise ParameterError("edge list must start with 'n m'")
    n, m = int(tokens[0]), int(tokens[1])
    nums = tokens[2:]
    if len(nums) != 2 * m:
        raise ParameterError(f"expected {2*m} endpoint numbers, got {len(nums)}")
    edges = [(int(nums[2 * i]), int(nums[2 * i + 1])) for i in range(m)]
    for u, v in edges:
        if not u < v:
            raise ParameterError(f"edge list requires u < v, got ({u},{v})")
    return Graph(n, edges)


def graph_to_json(g: Graph) -> str:
    return json.dumps({"n": g.n, "edges": [[u, v] for u, v in g.edges]})


def graph_from_json(text: str) -> Graph:
    data = json.loads(text)
    return Graph(int(data["n"]), [tuple(e) for e in data["edges"]])
