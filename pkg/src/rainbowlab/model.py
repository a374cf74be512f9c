"""Random models: G(n,p) and the dense-seed-plus-perturbation instances.

The seed is the complete bipartite graph on parts of size floor(n/2) and
ceil(n/2); the perturbation is G(n,p) on the same vertex set.  Random
edges across the parts coincide with seed edges, so an instance keeps
only the random edges that fall inside a part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .graph import Graph

__all__ = ["PerturbedInstance", "sample_gnp", "sample_perturbed", "rng_for_trial"]


def rng_for_trial(master_seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial stream; reduction order never matters."""
    return np.random.default_rng([master_seed, trial])


# Above this many vertex pairs, rejection over all pairs is replaced by
# geometric gap skipping (memory stays proportional to the edge count).
_DENSE_PAIR_CAP = 4_000_000


def sample_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"p must be a probability, got {p}")
    pairs = n * (n - 1) // 2
    if pairs == 0 or p == 0.0:
        return Graph(n, [])
    if pairs <= _DENSE_PAIR_CAP:
        hits = rng.random(pairs) < p
        us, vs = np.triu_indices(n, k=1)
        edges = list(zip(us[hits].tolist(), vs[hits].tolist()))
        return Graph(n, edges)
    return Graph(n, _sparse_gnp_edges(n, pairs, p, rng))


def _sparse_gnp_edges(n: int, pairs: int, p: float, rng: np.random.Generator):
    """Skip between hits with geometric gaps, then decode pair indices."""
    chunks = []
    pos = -1
    batch = max(16, int(pairs * p * 1.2))
    while True:
        gaps = rng.geometric(p, batch)
        cumulative = np.cumsum(gaps) + pos
        chunks.append(cumulative[cumulative < pairs])
        if cumulative[-1] >= pairs:
            break
        pos = int(cumulative[-1])
    t = np.concatenate(chunks)
    if t.size == 0:
        return []
    # Pairs (u, v), u < v, are ranked lexicographically; the first index
    # with left endpoint u is C(u) = u*(2n - u - 1)/2.  Invert with a
    # float estimate, then correct the rounding.
    top = 2 * n - 1
    u = ((top - np.sqrt(top * top - 8.0 * t)) / 2).astype(np.int64)
    for _ in range(2):
        u = np.where(u * (top - u) // 2 > t, u - 1, u)
        u = np.where((u + 1) * (top - u - 1) // 2 <= t, u + 1, u)
    v = t - u * (top - u) // 2 + u + 1
    return list(zip(u.tolist(), v.tolist()))


@dataclass
class PerturbedInstance:
    """Complete bipartite seed on a ⌊n/2⌋ + ⌈n/2⌉ split, plus random edges
    inside each part (in part-local vertex ids)."""

    n: int
    p: float
    left: Graph
    right: Graph
    _graph: Graph | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        u = self.n // 2
        if self.left.n != u or self.right.n != self.n - u:
            raise ParameterError(
                f"part sizes {self.left.n}+{self.right.n} do not match n={self.n}"
            )

    @property
    def u_size(self) -> int:
        return self.left.n

    @property
    def w_size(self) -> int:
        return self.right.n

    def left_to_global(self, i: int) -> int:
        return i

    def right_to_global(self, j: int) -> int:
        return self.left.n + j

    def left_vertices(self) -> range:
        return range(self.left.n)

    def right_vertices(self) -> range:
        return range(self.left.n, self.n)

    def seed_edges(self):
        u = self.left.n
        for a in range(u):
            for b in range(u, self.n):
                yield (a, b)

    def graph(self) -> Graph:
        if self._graph is None:
            u = self.left.n
            edges = list(self.seed_edges())
            edges += list(self.left.edges)
            edges += [(a + u, b + u) for a, b in self.right.edges]
            self._graph = Graph(self.n, edges)
        return self._graph


def sample_perturbed(n: int, p: float, rng: np.random.Generator) -> PerturbedInstance:
    """Sample G(n,p) on the full vertex set and keep the part-internal edges
    (cross edges are already in the seed)."""
    if n < 2:
        raise ParameterError(f"perturbed model needs n >= 2, got {n}")
    full = sample_gnp(n, p, rng)
    u = n // 2
    left_edges = [(a, b) for a, b in full.edges if b < u]
    right_edges = [(a - u, b - u) for a, b in full.edges if a >= u]
    return PerturbedInstance(
        n=n, p=p, left=Graph(u, left_edges), right=Graph(n - u, right_edges)
    )
