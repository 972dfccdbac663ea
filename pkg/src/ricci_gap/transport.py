"""Exact Wasserstein-1 transport between finitely supported vertex distributions.

Masses are rationals. They are scaled to integers by the lcm of their
denominators, and the resulting transportation problem is solved exactly by
successive shortest augmenting paths with node potentials.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InputError, InvariantError, MetricInfiniteError, PreconditionError
from .graph_core import Graph, bfs_layers

DistanceFn = Callable[[int, int], int]


@dataclass(frozen=True)
class VertexDistribution:
    """Probability distribution on vertices with exact rational masses.

    ``support`` lists ``(vertex, mass)`` pairs in increasing vertex order.
    """

    support: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        seen = set()
        total = Fraction(0)
        for v, m in self.support:
            if v in seen:
                raise InputError(f"vertex {v} appears twice in distribution support")
            if not isinstance(m, (Fraction, int)) or m <= 0:
                raise InputError(f"mass at {v} must be a positive rational, got {m!r}")
            seen.add(v)
            total += m
        if total != 1:
            raise InputError(f"distribution masses sum to {total}, not 1")

    @classmethod
    def from_mapping(cls, masses: Mapping[int, Fraction | int]) -> "VertexDistribution":
        return cls(tuple((int(v), Fraction(m)) for v, m in sorted(masses.items()) if m != 0))

    @classmethod
    def dirac(cls, v: int) -> "VertexDistribution":
        return cls(((v, Fraction(1)),))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.support)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.support)


@dataclass(frozen=True)
class TransportPlan:
    entries: tuple[tuple[int, int, Fraction], ...]
    cost: Fraction
    gamma_mass: Fraction | None = None

    def marginals(self) -> tuple[dict[int, Fraction], dict[int, Fraction]]:
        rows: dict[int, Fraction] = {}
        cols: dict[int, Fraction] = {}
        for u, v, m in self.entries:
            rows[u] = rows.get(u, Fraction(0)) + m
            cols[v] = cols.get(v, Fraction(0)) + m
        return rows, cols


def lazy_kernel_row(g: Graph, x: int, alpha: Fraction = Fraction(1, 2)) -> VertexDistribution:
    """Row ``x`` of the alpha-idle lazy walk: mass ``alpha`` at x, ``(1-alpha)/deg`` per neighbour.

    ``alpha = 1/2`` is the standard lazy simple random walk.
    """
    g.check_vertex(x)
    deg = g.degree(x)
    if deg == 0:
        raise InputError(f"vertex {x} is isolated; its transition row is undefined")
    alpha = Fraction(alpha)
    step = (1 - alpha) / deg
    masses = {y: step for y in g.adjacency[x]}
    if alpha:
        masses[x] = alpha
    return VertexDistribution.from_mapping(masses)


# -- integer min-cost transportation --------------------------------------


def min_cost_transport(supply: Sequence[int], demand: Sequence[int], cost: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integral optimal flow for a balanced transportation problem.

    Successive shortest paths from a super-source to a super-sink; Dijkstra
    runs on reduced costs, so negative arc costs are allowed as long as the
    initial potentials (computed directly below) are exact shortest distances.
    """
    m, n = len(supply), len(demand)
    if sum(supply) != sum(demand):
        raise InvariantError("unbalanced transportation problem")
    # node ids: 0 = S, 1..m sources, m+1..m+n sinks, m+n+1 = T
    N = m + n + 2
    S, T = 0, m + n + 1
    rem_s = list(supply)
    rem_t = list(demand)
    flow = [[0] * n for _ in range(m)]
    pot = [0] * N
    for j in range(n):
        pot[m + 1 + j] = min(cost[i][j] for i in range(m))
    pot[T] = min(pot[m + 1 + j] for j in range(n))
    remaining = sum(supply)
    INF = math.inf
    while remaining > 0:
        dist = [INF] * N
        parent = [-1] * N
        done = [False] * N
        dist[S] = 0
        while True:
            u, du = -1, INF
            for k in range(N):
                if not done[k] and dist[k] < du:
                    u, du = k, dist[k]
            if u < 0:
                break
            done[u] = True
            pu = pot[u]
            if u == S:
                for i in range(m):
                    if rem_s[i] > 0:
                        nd = du + pu - pot[1 + i]
                        if nd < dist[1 + i]:
                            dist[1 + i], parent[1 + i] = nd, u
            elif u <= m:
                i = u - 1
                row = cost[i]
                for j in range(n):
                    v = m + 1 + j
                    nd = du + row[j] + pu - pot[v]
                    if nd < dist[v]:
                        dist[v], parent[v] = nd, u
            elif u < T:
                j = u - m - 1
                for i in range(m):
                    if flow[i][j] > 0:
                        v = 1 + i
                        nd = du - cost[i][j] + pu - pot[v]
                        if nd < dist[v]:
                            dist[v], parent[v] = nd, u
                if rem_t[j] > 0:
                    nd = du + pu - pot[T]
                    if nd < dist[T]:
                        dist[T], parent[T] = nd, u
        if dist[T] == INF:
            raise InvariantError("no augmenting path while supply remains")
        reach = max(d for d in dist if d < INF)
        for k in range(N):
            pot[k] += dist[k] if dist[k] < INF else reach
        # walk the path back from T, collecting the bottleneck
        path = []
        v = T
        while v != S:
            path.append((parent[v], v))
            v = parent[v]
        path.reverse()
        amount = remaining
        for u, v in path:
            if u == S:
                amount = min(amount, rem_s[v - 1])
            elif v == T:
                amount = min(amount, rem_t[u - m - 1])
            elif u > m:  # backward arc sink -> source
                amount = min(amount, flow[v - 1][u - m - 1])
        for u, v in path:
            if u == S:
                rem_s[v - 1] -= amount
            elif v == T:
                rem_t[u - m - 1] -= amount
            elif u <= m:
                flow[u - 1][v - m - 1] += amount
            else:
                flow[v - 1][u - m - 1] -= amount
        remaining -= amount
    return flow


# -- distances between supports -------------------------------------------


def _support_distances(g: Graph, us: Sequence[int], vs: Sequence[int], distance: DistanceFn | None) -> list[list[int]]:
    if distance is not None:
        table = [[distance(u, v) for v in vs] for u in us]
    else:
        targets = set(vs)
        table = []
        for u in us:
            layers = _bfs_until(g, u, targets)
            table.append([layers.get(v, -1) for v in vs])
    for row in table:
        if any(d is None or d < 0 or d == math.inf for d in row):
            raise MetricInfiniteError("distribution supports lie in different connected components")
    return [[int(d) for d in row] for row in table]


def _bfs_until(g: Graph, source: int, targets: set[int]) -> dict[int, int]:
    from collections import deque

    dist = {source: 0}
    missing = len(targets - {source})
    queue = deque([source])
    while queue and missing:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                if w in targets:
                    missing -= 1
                queue.append(w)
    return dist


def _scale(mu: VertexDistribution, nu: VertexDistribution) -> tuple[int, list[int], list[int]]:
    L = 1
    for _, m in mu.support + nu.support:
        L = math.lcm(L, m.denominator)
    a = [int(m * L) for _, m in mu.support]
    b = [int(m * L) for _, m in nu.support]
    return L, a, b


def _solve(g, mu, nu, distance, good_threshold=None):
    us, vs = mu.vertices, nu.vertices
    dist = _support_distances(g, us, vs, distance)
    L, a, b = _scale(mu, nu)
    if good_threshold is None:
        cost = dist
    else:
        # cost * M - [d < threshold] with M > total mass: minimising it is
        # exactly lexicographic (min transport cost, then max good mass).
        M = 1 + L
        cost = [[d * M - (1 if d < good_threshold else 0) for d in row] for row in dist]
    flow = min_cost_transport(a, b, cost)
    entries = []
    total = 0
    good = 0
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            f = flow[i][j]
            if f:
                entries.append((u, v, Fraction(f, L)))
                total += f * dist[i][j]
                if good_threshold is not None and dist[i][j] < good_threshold:
                    good += f
    gamma = Fraction(good, L) if good_threshold is not None else None
    return TransportPlan(tuple(entries), Fraction(total, L), gamma)


def optimal_coupling(g: Graph, mu: VertexDistribution, nu: VertexDistribution,
                     distance: DistanceFn | None = None) -> TransportPlan:
    return _solve(g, mu, nu, distance)


def wasserstein1(g: Graph, mu: VertexDistribution, nu: VertexDistribution,
                 distance: DistanceFn | None = None) -> Fraction:
    """Exact W1 distance under the graph metric.

    ``distance`` may supply precomputed graph distances; by default each
    support vertex of ``mu`` runs a BFS that stops once ``nu``'s support is found.
    """
    return _solve(g, mu, nu, distance).cost


def good_optimal_coupling(g: Graph, x: int, y: int, distance: DistanceFn | None = None) -> TransportPlan:
    """Cost-optimal coupling of the lazy rows at x and y that maximises mass
    on the good set ``{(u, v): d(u, v) < d(x, y)}``."""
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        raise PreconditionError("good_optimal_coupling needs x != y")
    mu, nu = lazy_kernel_row(g, x), lazy_kernel_row(g, y)
    if distance is not None:
        dxy = distance(x, y)
    else:
        dxy = _bfs_until(g, x, {y}).get(y)
    if dxy is None or dxy < 0 or dxy == math.inf:
        raise MetricInfiniteError(f"vertices {x} and {y} lie in different components")
    return _solve(g, mu, nu, distance, good_threshold=dxy)


def edge_distance(g: Graph) -> DistanceFn:
    """Distance oracle valid for supports of the lazy rows at the ends of an edge.

    Such vertices are at distance at most 3, so adjacency and common
    neighbours decide everything without a BFS.
    """
    nbr = g.neighbor_sets

    def d(u: int, v: int) -> int:
        if u == v:
            return 0
        if v in nbr[u]:
            return 1
        if not nbr[u].isdisjoint(nbr[v]):
            return 2
        return 3

    return d
