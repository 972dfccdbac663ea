"""Local profiles of finite graphs: depth-t ball censuses, profile distances,
and exact checks of the mass-transport and stationarity identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Sequence

from .errors import CapabilityError, InputError
from .graph_core import CanonicalCode, Graph, RootedBall, ball, bfs_layers, canonical_code, is_connected

MAX_BALL_VERTICES = 4000
MTP_TOL = 1e-12


@dataclass(frozen=True)
class BallCensus:
    depth: int
    classes: dict[CanonicalCode, Fraction]
    representative: dict[CanonicalCode, RootedBall]

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "classes": {c.hex(): f"{f.numerator}/{f.denominator}" for c, f in sorted(self.classes.items())},
        }


def ball_census(g: Graph, t: int, max_ball: int = MAX_BALL_VERTICES) -> BallCensus:
    if g.n == 0:
        raise InputError("census of the empty graph")
    if t < 0:
        raise InputError("depth must be >= 0")
    counts: dict[CanonicalCode, int] = {}
    reps: dict[CanonicalCode, RootedBall] = {}
    for x in range(g.n):
        b = ball(g, x, t)
        if b.subgraph.n > max_ball:
            raise CapabilityError(f"ball of radius {t} at {x} has {b.subgraph.n} vertices (limit {max_ball})")
        code = canonical_code(b)
        counts[code] = counts.get(code, 0) + 1
        reps.setdefault(code, b)
    classes = {c: Fraction(k, g.n) for c, k in sorted(counts.items())}
    return BallCensus(t, classes, {c: reps[c] for c in classes})


def total_variation(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(p.get(k, 0) - q.get(k, 0)) for k in keys), Fraction(0)) / 2


@dataclass(frozen=True)
class ProfileDistance:
    per_depth_tv: tuple[tuple[int, Fraction], ...]
    aggregate: Fraction


def profile_distance(g: Graph, h: Graph, t_max: int) -> ProfileDistance:
    """Total variation between depth-t censuses for t = 0..t_max, aggregated with weights 2^-t."""
    if g.n == 0 or h.n == 0:
        raise InputError("profile distance needs nonempty graphs")
    rows = []
    for t in range(t_max + 1):
        rows.append((t, total_variation(ball_census(g, t).classes, ball_census(h, t).classes)))
    agg = sum((tv / 2**t for t, tv in rows), Fraction(0))
    return ProfileDistance(tuple(rows), agg)


def census_sparsity(census: BallCensus) -> float:
    """Average ``deg log deg`` of the root, read off the census classes."""
    terms = []
    for code, freq in census.classes.items():
        d = census.representative[code].subgraph.degree(0)
        if d > 1:
            terms.append(float(freq) * d * math.log(d))
    return math.fsum(terms)


# -- mass transport --------------------------------------------------------


@dataclass(frozen=True)
class PairBall:
    """Induced subgraph on B_r(o) u B_r(x) with both roots marked."""

    graph: Graph
    o: int
    x: int
    radius: int
    distance: int


def _pair_ball(g: Graph, o: int, x: int, radius: int, layers_o: dict, layers_x: dict) -> PairBall:
    order = list(layers_o) + [v for v in layers_x if v not in layers_o]
    index = {v: i for i, v in enumerate(order)}
    adj = tuple(tuple(sorted(index[w] for w in g.adjacency[v] if w in index)) for v in order)
    return PairBall(Graph(len(order), adj), index[o], index[x], radius, layers_o[x])


def pair_balls(g: Graph, radius: int) -> list[tuple[int, int, PairBall]]:
    """Every ordered pair (o, x) with d(o, x) <= radius and its doubly rooted ball."""
    layers = [bfs_layers(g, v, radius) for v in range(g.n)]
    out = []
    for o in range(g.n):
        for x in layers[o]:
            out.append((o, x, _pair_ball(g, o, x, radius, layers[o], layers[x])))
    return out


MassFn = Callable[[Graph, int, int], float]


@dataclass(frozen=True)
class MTPResult:
    lhs: Fraction | float
    rhs: Fraction | float
    equal: bool


def verify_mtp(g: Graph, f: MassFn, radius: int, pairs=None) -> MTPResult:
    """Compare mass sent and received by a uniform root.

    ``f(ball, o, x)`` gets the doubly rooted ball around {o, x} and the
    indices of both roots inside it. It must vanish for d(o, x) > radius;
    that locality is the caller's contract and is not checked. Rational
    outputs are compared exactly, anything else at tolerance 1e-12.
    """
    if g.n == 0:
        raise InputError("empty graph")
    if pairs is None:
        pairs = pair_balls(g, radius)
    sent = []
    received = []
    for o, x, pb in pairs:
        sent.append(f(pb.graph, pb.o, pb.x))
        received.append(f(pb.graph, pb.x, pb.o))
    exact = all(isinstance(v, Rational) for v in sent + received)
    if exact:
        lhs = sum((Fraction(v) for v in sent), Fraction(0)) / g.n
        rhs = sum((Fraction(v) for v in received), Fraction(0)) / g.n
        return MTPResult(lhs, rhs, lhs == rhs)
    lhs = math.fsum(float(v) for v in sent) / g.n
    rhs = math.fsum(float(v) for v in received) / g.n
    return MTPResult(lhs, rhs, abs(lhs - rhs) <= MTP_TOL)


def verify_stationarity(g: Graph) -> Fraction:
    """Exact ``max_y |(pi P)(y) - pi(y)|`` for ``pi = deg / sum(deg)``."""
    if g.n == 0:
        raise InputError("empty graph")
    if any(d == 0 for d in g.degrees):
        raise InputError("isolated vertex: P undefined")
    if not is_connected(g):
        raise InputError("stationarity check expects a connected graph")
    total = 2 * g.edge_count
    pi = [Fraction(d, total) for d in g.degrees]
    residual = Fraction(0)
    for y in range(g.n):
        flow = pi[y] / 2
        for x in g.adjacency[y]:
            flow += pi[x] / (2 * g.degree(x))
        residual = max(residual, abs(flow - pi[y]))
    return residual
