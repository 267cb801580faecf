"""
Simple undirected graphs on dense 0-based vertex ids.

Edges are stored once as (u, v) with u < v in lexicographic order; adjacency
is a symmetric scipy CSR 0/1 matrix. Vertex subsets are numpy boolean masks.
Both types are immutable after construction.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import InputError, NumericalError
from .logger import get_logger
from .union_find import DisjointSet

logger = get_logger("graph")


@dataclass(frozen=True)
class VertexSet:
    """Subset of {0..n-1} stored as a boolean mask."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool).copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def of(cls, n: int, members: Iterable[int] = ()) -> "VertexSet":
        ids = np.fromiter((int(v) for v in members), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= n):
            raise InputError(f"vertex ids must lie in [0, {n - 1}]")
        mask = np.zeros(n, dtype=bool)
        mask[ids] = True
        return cls(mask)

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(np.zeros(n, dtype=bool))

    @property
    def n(self) -> int:
        return int(self.mask.size)

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def complement(self) -> "VertexSet":
        return VertexSet(~self.mask)

    def intersection(self, other: "VertexSet") -> "VertexSet":
        self._check_universe(other)
        return VertexSet(self.mask & other.mask)

    def union(self, other: "VertexSet") -> "VertexSet":
        self._check_universe(other)
        return VertexSet(self.mask | other.mask)

    def issubset(self, other: "VertexSet") -> bool:
        self._check_universe(other)
        return bool(np.all(~self.mask | other.mask))

    def _check_universe(self, other: "VertexSet") -> None:
        if other.n != self.n:
            raise InputError(f"vertex sets over different universes ({self.n} vs {other.n})")

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool(self.mask[v])

    def __iter__(self):
        return iter(int(v) for v in self.members)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VertexSet) and np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash(self.mask.tobytes())

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, members={self.members.tolist()})"


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph. Build with Graph.from_edges."""

    n: int
    edges: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] | np.ndarray) -> "Graph":
        if n < 0:
            raise InputError(f"vertex count must be non-negative, got {n}")
        arr = np.array(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise InputError(f"edge endpoint out of range [0, {n - 1}]")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise InputError("self-loops are not allowed")
            arr = np.sort(arr, axis=1)
            arr = np.unique(arr, axis=0)
        arr.setflags(write=False)
        return cls(n=int(n), edges=arr)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_edges(n, np.zeros((0, 2), dtype=np.int64))

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def adjacency(self) -> sp.csr_array:
        """Symmetric 0/1 adjacency matrix A_G."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(rows.size, dtype=np.float64)
        adj = sp.csr_array((data, (rows, cols)), shape=(self.n, self.n))
        adj.sort_indices()
        return adj

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.degrees[v])

    def neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        adj = self.adjacency
        return adj.indices[adj.indptr[v]:adj.indptr[v + 1]]

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def laplacian(self) -> sp.csr_array:
        return sp.diags_array(self.degrees.astype(np.float64)).tocsr() - self.adjacency

    @cached_property
    def _components(self) -> Tuple[int, np.ndarray]:
        return connected_components(self.adjacency, directed=False)

    def components(self) -> np.ndarray:
        """Component label per vertex."""
        return self._components[1]

    @property
    def component_count(self) -> int:
        return int(self._components[0])

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InputError(f"vertex {v} out of range [0, {self.n - 1}]")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))


def _as_set(G: Graph, X) -> VertexSet:
    if isinstance(X, VertexSet):
        if X.n != G.n:
            raise InputError(f"vertex set universe {X.n} does not match graph order {G.n}")
        return X
    return VertexSet.of(G.n, X)


def pair_count(G: Graph, X, Y) -> int:
    """e(X, Y): ordered-pair count of adjacency entries with x in X, y in Y."""
    X, Y = _as_set(G, X), _as_set(G, Y)
    if not len(X) or not len(Y):
        return 0
    x = X.mask.astype(np.float64)
    y = Y.mask.astype(np.float64)
    return int(round(float(x @ (G.adjacency @ y))))


def is_connected(G: Graph) -> bool:
    if G.n < 1:
        raise InputError("connectivity is undefined for the empty vertex set")
    return G.component_count == 1


@dataclass(frozen=True)
class InducedSubgraph:
    graph: Graph
    index_map: np.ndarray  # local id -> id in the parent graph


def induced_subgraph(G: Graph, W) -> InducedSubgraph:
    W = _as_set(G, W)
    if not len(W):
        raise InputError("induced subgraph needs a nonempty vertex set")
    index_map = W.members
    local = np.full(G.n, -1, dtype=np.int64)
    local[index_map] = np.arange(index_map.size)
    keep = W.mask[G.edges[:, 0]] & W.mask[G.edges[:, 1]]
    sub_edges = local[G.edges[keep]]
    return InducedSubgraph(Graph.from_edges(index_map.size, sub_edges), index_map)


@dataclass(frozen=True)
class DegreeProfile:
    min_degree: int
    max_degree: int
    outside_neighbors: np.ndarray  # |N(v) ∩ W^c| for every v of G


def degree_profile(G: Graph, W) -> DegreeProfile:
    """Degree statistics of G[W] and per-vertex neighbour counts into B = W^c."""
    W = _as_set(G, W)
    B = W.complement()
    outside = (G.adjacency @ B.mask.astype(np.float64)).round().astype(np.int64)
    if len(W):
        inside = (G.adjacency @ W.mask.astype(np.float64)).round().astype(np.int64)[W.mask]
        lo, hi = int(inside.min()), int(inside.max())
    else:
        lo = hi = 0
    return DegreeProfile(lo, hi, outside)


# Generators ---------------------------------------------------------------

def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError(f"cycle needs n >= 3, got {n}")
    idx = np.arange(n)
    return Graph.from_edges(n, np.stack([idx, (idx + 1) % n], axis=1))


def path_graph(n: int) -> Graph:
    if n < 1:
        raise InputError(f"path needs n >= 1, got {n}")
    idx = np.arange(n - 1)
    return Graph.from_edges(n, np.stack([idx, idx + 1], axis=1))


def star_graph(n: int) -> Graph:
    """Star on n vertices with centre 0."""
    if n < 1:
        raise InputError(f"star needs n >= 1, got {n}")
    leaves = np.arange(1, n)
    return Graph.from_edges(n, np.stack([np.zeros_like(leaves), leaves], axis=1))


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise InputError(f"complete graph needs n >= 1, got {n}")
    u, v = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.stack([u, v], axis=1))


def circulant_graph(n: int, offsets: Sequence[int]) -> Graph:
    if n < 1:
        raise InputError(f"circulant needs n >= 1, got {n}")
    offsets = sorted({int(s) % n for s in offsets} - {0})
    if not offsets:
        raise InputError("circulant needs at least one nonzero offset mod n")
    idx = np.arange(n)
    edges = np.concatenate([np.stack([idx, (idx + s) % n], axis=1) for s in offsets])
    return Graph.from_edges(n, edges)


def random_tree(n: int, seed: int) -> Graph:
    """Uniform labelled tree decoded from a random Prüfer sequence."""
    if n < 1:
        raise InputError(f"tree needs n >= 1, got {n}")
    if n == 1:
        return Graph.empty(1)
    if n == 2:
        return Graph.from_edges(2, [(0, 1)])
    rng = np.random.Generator(np.random.Philox(seed))
    prufer = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=np.int64)
    np.add.at(degree, prufer, 1)
    edges = []
    for node in prufer:
        leaf = int(np.flatnonzero(degree == 1)[0])
        edges.append((leaf, int(node)))
        degree[leaf] -= 1
        degree[node] -= 1
    u, v = np.flatnonzero(degree == 1)
    edges.append((int(u), int(v)))
    return Graph.from_edges(n, edges)


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    """Binomial random graph G(n, p)."""
    if n < 1 or not 0.0 <= p <= 1.0:
        raise InputError(f"G(n, p) needs n >= 1 and p in [0, 1], got n={n}, p={p}")
    rng = np.random.Generator(np.random.Philox(seed))
    u, v = np.triu_indices(n, k=1)
    keep = rng.random(u.size) < p
    return Graph.from_edges(n, np.stack([u[keep], v[keep]], axis=1))


def random_regular_graph(n: int, k: int, seed: int, max_restarts: int = 1000) -> Graph:
    """Random k-regular graph by stub pairing, re-pairing only the stubs left over.

    Restarts from scratch when the leftover stubs admit no valid pair.
    """
    if n < 1 or not 0 <= k < n or (n * k) % 2:
        raise InputError(f"a {k}-regular graph on {n} vertices does not exist")
    rng = np.random.Generator(np.random.Philox(seed))
    if k == 0:
        return Graph.empty(n)

    for _ in range(max_restarts):
        edges: set[Tuple[int, int]] = set()
        stubs = np.repeat(np.arange(n), k)
        while stubs.size:
            rng.shuffle(stubs)
            leftover = []
            for u, v in stubs.reshape(-1, 2).tolist():
                pair = (min(u, v), max(u, v))
                if u != v and pair not in edges:
                    edges.add(pair)
                else:
                    leftover.extend((u, v))
            stubs = np.asarray(leftover, dtype=np.int64)
            nodes = np.unique(stubs)
            if stubs.size and not any(
                    (int(a), int(b)) not in edges for i, a in enumerate(nodes) for b in nodes[i + 1:]):
                break
        else:
            return Graph.from_edges(n, sorted(edges))
    raise NumericalError(f"no {k}-regular graph on {n} vertices after {max_restarts} restarts")


GENERATORS = {
    "cycle": cycle_graph,
    "path": path_graph,
    "star": star_graph,
    "complete": complete_graph,
    "circulant": circulant_graph,
    "tree": random_tree,
    "gnp": gnp_graph,
    "regular": random_regular_graph,
}


def generate(kind: str, n: int, *params, **kwargs) -> Graph:
    try:
        factory = GENERATORS[kind]
    except KeyError:
        raise InputError(f"unknown graph kind '{kind}', expected one of {sorted(GENERATORS)}") from None
    return factory(n, *params, **kwargs)


def union_find_connected(n: int, edges: Optional[np.ndarray]) -> bool:
    """Connectivity through the disjoint-set structure; oracle for is_connected."""
    ds = DisjointSet(n)
    for u, v in (edges if edges is not None else ()):
        ds.union(int(u), int(v))
    return ds.components == 1
