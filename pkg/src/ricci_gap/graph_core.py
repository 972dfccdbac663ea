"""Finite simple graphs, BFS metric, rooted balls and canonical codes.

Vertices are dense indices ``0..n-1`` and adjacency lists are sorted, so
every traversal below is deterministic.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InputError, InvariantError

INF = math.inf


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph stored as sorted adjacency tuples."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n != len(self.adjacency):
            raise InputError(f"vertex_count {self.n} != {len(self.adjacency)} adjacency lists")
        for x, nbrs in enumerate(self.adjacency):
            prev = -1
            for y in nbrs:
                if y <= prev:
                    raise InputError(f"adjacency of {x} is not strictly increasing")
                if y == x:
                    raise InputError(f"self-loop at vertex {x}")
                if not 0 <= y < self.n:
                    raise InputError(f"neighbor {y} of {x} out of range")
                prev = y
        for x, nbrs in enumerate(self.adjacency):
            for y in nbrs:
                if not _contains(self.adjacency[y], x):
                    raise InputError(f"asymmetric adjacency: {x}->{y} without {y}->{x}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        if n < 0:
            raise InputError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise InputError(f"duplicate edge ({u},{v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @cached_property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def degree(self, x: int) -> int:
        return len(self.adjacency[x])

    def has_edge(self, x: int, y: int) -> bool:
        return y in self.neighbor_sets[x]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if v > u:
                    yield u, v

    def check_vertex(self, x: int) -> None:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n:
            raise InputError(f"vertex index {x!r} out of range [0, {self.n})")

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """0/1 adjacency matrix in CSR form."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter((y for a in self.adjacency for y in a), dtype=np.int64, count=int(indptr[-1]))
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [[u, v] for u, v in self.edges()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        try:
            n = int(data["n"])
            edges = data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"graph JSON needs integer 'n' and list 'edges': {exc}") from None
        prev = None
        for e in edges:
            if len(e) != 2 or not e[0] < e[1]:
                raise InputError(f"graph JSON edge {e} must be a pair [u, v] with u < v")
            if prev is not None and tuple(e) <= prev:
                raise InputError("graph JSON edges must be sorted lexicographically without repeats")
            prev = tuple(e)
        return cls.from_edges(n, edges)


def _contains(sorted_tuple: tuple[int, ...], x: int) -> bool:
    lo, hi = 0, len(sorted_tuple)
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_tuple[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < len(sorted_tuple) and sorted_tuple[lo] == x


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines; names are mapped to indices in sorted name order.

    Names that are all integers sort numerically, otherwise as strings.
    Blank lines and ``#`` comments are skipped.
    """
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"edge list line {lineno}: expected 'u v', got {line!r}")
        pairs.append((parts[0], parts[1]))
    names = {a for p in pairs for a in p}
    try:
        ordered = sorted(names, key=int)
    except ValueError:
        ordered = sorted(names)
    index = {name: i for i, name in enumerate(ordered)}
    return Graph.from_edges(len(ordered), [(index[a], index[b]) for a, b in pairs])


def load_graph(path: str | Path) -> Graph:
    """Read a graph from Graph JSON or an edge-list text file."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
        return Graph.from_dict(data)
    return parse_edge_list(text)


# -- metric ----------------------------------------------------------------


def bfs_layers(g: Graph, source: int, max_depth: float = INF) -> dict[int, int]:
    """Distances from ``source`` to every vertex within ``max_depth``, in discovery order."""
    dist = {source: 0}
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= max_depth:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def graph_distance(g: Graph, x: int, y: int) -> int | float:
    """Shortest-path length, or ``math.inf`` across components."""
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        return 0
    # bidirectional would be faster; balls here are small
    dist = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in dist:
                if v == y:
                    return dist[u] + 1
                dist[v] = dist[u] + 1
                queue.append(v)
    return INF


def connected_components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = list(bfs_layers(g, s))
        for v in comp:
            seen[v] = True
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(bfs_layers(g, 0)) == g.n


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Dense BFS distance matrix (``-1`` marks different components)."""
    from scipy.sparse.csgraph import shortest_path

    d = shortest_path(g.csr, method="D", unweighted=True, directed=False)
    out = np.where(np.isinf(d), -1, d).astype(np.int32)
    return out


# -- rooted balls ----------------------------------------------------------


@dataclass(frozen=True)
class RootedBall:
    """Induced ball around a root; vertices re-indexed in BFS discovery order (root = 0)."""

    subgraph: Graph
    radius: int
    layer_of: tuple[int, ...]
    original: tuple[int, ...] = field(default=(), compare=False)

    @property
    def root(self) -> int:
        return 0


def ball(g: Graph, o: int, t: int) -> RootedBall:
    g.check_vertex(o)
    if t < 0:
        raise InputError(f"ball radius must be >= 0, got {t}")
    dist = bfs_layers(g, o, t)
    order = list(dist)
    index = {v: i for i, v in enumerate(order)}
    adj = []
    for v in order:
        adj.append(tuple(sorted(index[w] for w in g.adjacency[v] if w in index)))
    sub = Graph(len(order), tuple(adj))
    return RootedBall(sub, t, tuple(dist[v] for v in order), tuple(order))


# -- canonical codes -------------------------------------------------------


@dataclass(frozen=True, order=True)
class CanonicalCode:
    """Opaque byte string, equal for two balls iff they are root-preserving isomorphic."""

    data: bytes

    def hex(self) -> str:
        return self.data.hex()


def refine_partition(adjacency: Sequence[Sequence[int]], cells: list[list[int]]) -> list[list[int]]:
    """Iterated colour refinement of an ordered partition into an equitable one.

    Each cell is split by the sorted multiset of neighbour colours and the
    pieces are ordered by that signature, so the result depends only on the
    isomorphism type of (graph, ordered input partition).
    """
    n = sum(len(c) for c in cells)
    color = [0] * n
    cells = [list(c) for c in cells]
    while True:
        for ci, cell in enumerate(cells):
            for v in cell:
                color[v] = ci
        new_cells: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            groups: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                sig = tuple(sorted(color[w] for w in adjacency[v]))
                groups.setdefault(sig, []).append(v)
            for sig in sorted(groups):
                new_cells.append(groups[sig])
        if len(new_cells) == len(cells):
            return new_cells
        cells = new_cells


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _canonical_form(adjacency: Sequence[Sequence[int]], initial: list[list[int]]) -> tuple[tuple[int, int], ...]:
    """Lexicographically minimal sorted edge list over all refined orderings.

    Individualisation-refinement search; children of a node that are
    equivalent under already discovered automorphisms fixing the node's
    individualised prefix are pruned.
    """
    n = sum(len(c) for c in initial)
    edges = [(u, v) for u in range(n) for v in adjacency[u] if u < v]
    best: list = [None, None]  # certificate, labeling
    automorphisms: list[list[int]] = []

    def certificate(cells):
        pos = [0] * n
        for i, cell in enumerate(cells):
            pos[cell[0]] = i
        cert = tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in edges))
        return cert, pos

    def search(cells, prefix):
        cells = refine_partition(adjacency, cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            cert, pos = certificate(cells)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, pos
            elif cert == best[0]:
                inv = [0] * n
                for v, p in enumerate(best[1]):
                    inv[p] = v
                automorphisms.append([inv[pos[v]] for v in range(n)])
            return
        explored: list[int] = []
        for v in cells[target]:
            if explored:
                uf = _UnionFind(n)
                for gamma in automorphisms:
                    if all(gamma[p] == p for p in prefix):
                        for a in range(n):
                            uf.union(a, gamma[a])
                rv = uf.find(v)
                if any(uf.find(u) == rv for u in explored):
                    continue
            explored.append(v)
            rest = [w for w in cells[target] if w != v]
            child = cells[:target] + [[v], rest] + cells[target + 1:]
            search(child, prefix + [v])

    search(initial, [])
    return best[0]


def canonical_code(b: RootedBall) -> CanonicalCode:
    g = b.subgraph
    if len(b.layer_of) != g.n or (g.n and b.layer_of[0] != 0):
        raise InputError("malformed rooted ball")
    keyed: dict[tuple[int, int], list[int]] = {}
    for v in range(g.n):
        keyed.setdefault((b.layer_of[v], g.degree(v)), []).append(v)
    initial = [keyed[k] for k in sorted(keyed)]
    if g.n and initial[0] != [0]:
        raise InvariantError("root must be the unique layer-0 vertex")
    cert = _canonical_form(g.adjacency, initial)
    text = f"{g.n}|" + ";".join(f"{a},{c}" for a, c in cert)
    return CanonicalCode(text.encode("ascii"))


def rooted_code(g: Graph, o: int, t: int) -> CanonicalCode:
    return canonical_code(ball(g, o, t))


# -- degree statistics -----------------------------------------------------


def sparsity_functional(g: Graph) -> float:
    """Average of ``deg(x) * log deg(x)`` over vertices (natural log)."""
    if g.n == 0:
        raise InputError("sparsity functional undefined on the empty graph")
    return math.fsum(d * math.log(d) for d in g.degrees if d > 1) / g.n


def degree_stats(g: Graph) -> dict:
    degs = g.degrees
    if not degs:
        raise InputError("empty graph")
    return {
        "n": g.n,
        "edges": g.edge_count,
        "min_degree": min(degs),
        "max_degree": max(degs),
        "mean_degree": 2 * g.edge_count / g.n,
        "sparsity": sparsity_functional(g),
    }
