"""Constructors for the graph families used throughout the toolkit.

Every constructor is a pure function of ``(family, params, seed)``. Random
families draw from :class:`ricci_gap.rng.SplitMix64`, so a given spec
produces a bit-identical graph on every platform.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .errors import GenerationError, InputError
from .graph_core import Graph
from .rng import SplitMix64, derive_seed

FAMILIES = (
    "cycle",
    "path",
    "complete",
    "complete_bipartite",
    "star",
    "prism",
    "mobius_ladder",
    "hypercube",
    "torus2d",
    "grid2d",
    "regular_tree_truncation",
    "random_regular",
    "cayley_abelian",
)

RANDOM_FAMILIES = frozenset({"random_regular"})

DEFAULT_RETRY_BUDGET = 10_000


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict, hash=False)
    seed: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")

    @property
    def label(self) -> str:
        parts = [f"{k}={_fmt_param(v)}" for k, v in self.params.items()]
        if self.seed is not None:
            parts.append(f"seed={self.seed}")
        return f"{self.family}(" + ",".join(parts) + ")"

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"family": self.family, "params": dict(self.params)}
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FamilySpec":
        if "family" not in data:
            raise InputError(f"family spec {data!r} lacks 'family'")
        return cls(data["family"], dict(data.get("params", {})), data.get("seed"))


def _fmt_param(v):
    if isinstance(v, (list, tuple)):
        return "x".join(_fmt_param(w) for w in v)
    return str(v)


def _need(params: dict, name: str, lo: int) -> int:
    if name not in params:
        raise InputError(f"missing parameter {name!r}")
    v = params[name]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"parameter {name!r} must be an integer, got {v!r}")
    if v < lo:
        raise InputError(f"parameter {name!r} must be >= {lo}, got {v}")
    return v


# -- deterministic families ------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise InputError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise InputError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 1:
        raise InputError("complete graph needs n >= 1")
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def complete_bipartite(m: int, n: int) -> Graph:
    if m < 1 or n < 1:
        raise InputError("complete_bipartite needs m, n >= 1")
    return Graph.from_edges(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def star(leaves: int) -> Graph:
    """K_{1,leaves} with the centre at index 0."""
    return complete_bipartite(1, leaves)


def prism(n: int) -> Graph:
    if n < 3:
        raise InputError("prism needs n >= 3")
    edges = [(i, (i + 1) % n) for i in range(n)]
    edges += [(n + i, n + (i + 1) % n) for i in range(n)]
    edges += [(i, n + i) for i in range(n)]
    return Graph.from_edges(2 * n, edges)


def mobius_ladder(n: int) -> Graph:
    """Cycle on 2n vertices plus the n antipodal rungs."""
    if n < 2:
        raise InputError("mobius_ladder needs n >= 2")
    m = 2 * n
    edges = {tuple(sorted((i, (i + 1) % m))) for i in range(m)}
    edges |= {(i, i + n) for i in range(n)}
    return Graph.from_edges(m, sorted(edges))


def hypercube(d: int) -> Graph:
    if d < 1:
        raise InputError("hypercube needs d >= 1")
    n = 1 << d
    return Graph.from_edges(n, [(x, x ^ (1 << k)) for x in range(n) for k in range(d) if x < x ^ (1 << k)])


def cayley_abelian(orders: Sequence[int], generators: Sequence[Sequence[int]]) -> Graph:
    """Cayley graph of Z_{o1} x ... x Z_{ok} for a symmetric generator set.

    Group elements are indexed in mixed radix with the first coordinate most
    significant.
    """
    orders = tuple(int(o) for o in orders)
    if not orders or any(o < 1 for o in orders):
        raise InputError("cayley_abelian needs positive cyclic orders")
    gens = {tuple(int(c) % o for c, o in zip(gen, orders)) for gen in generators}
    if any(len(gen) != len(orders) for gen in generators):
        raise InputError("generator length must match the number of cyclic factors")
    if tuple(0 for _ in orders) in gens:
        raise InputError("identity generator would create self-loops")
    for gen in gens:
        inv = tuple((-c) % o for c, o in zip(gen, orders))
        if inv not in gens:
            raise InputError(f"generator set is not symmetric: inverse of {gen} missing")

    def index(elem):
        i = 0
        for c, o in zip(elem, orders):
            i = i * o + c
        return i

    elements = list(itertools.product(*(range(o) for o in orders)))
    edges = set()
    for elem in elements:
        u = index(elem)
        for gen in gens:
            v = index(tuple((a + b) % o for a, b, o in zip(elem, gen, orders)))
            if u < v:
                edges.add((u, v))
    return Graph.from_edges(len(elements), sorted(edges))


def torus2d(n: int) -> Graph:
    if n < 3:
        raise InputError("torus2d needs n >= 3")
    return cayley_abelian((n, n), [(1, 0), (-1, 0), (0, 1), (0, -1)])


def grid2d(n: int, m: int | None = None) -> Graph:
    m = n if m is None else m
    if n < 1 or m < 1:
        raise InputError("grid2d needs positive side lengths")
    edges = []
    for i in range(n):
        for j in range(m):
            u = i * m + j
            if j + 1 < m:
                edges.append((u, u + 1))
            if i + 1 < n:
                edges.append((u, u + m))
    return Graph.from_edges(n * m, edges)


def regular_tree_truncation(d: int, depth: int) -> Graph:
    """Ball of radius ``depth`` around a vertex of the d-regular tree (root = 0, BFS order)."""
    if d < 2 or depth < 0:
        raise InputError("regular_tree_truncation needs d >= 2 and depth >= 0")
    edges = []
    frontier = [0]
    nxt = 1
    for level in range(depth):
        new_frontier = []
        for v in frontier:
            for _ in range(d if level == 0 else d - 1):
                edges.append((v, nxt))
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier
    return Graph.from_edges(nxt, edges)


def regular_tree_size(d: int, depth: int) -> int:
    return 1 + sum(d * (d - 1) ** (k - 1) for k in range(1, depth + 1))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


# -- random regular graphs -------------------------------------------------


def random_regular(n: int, d: int, seed: int, retry_budget: int = DEFAULT_RETRY_BUDGET) -> Graph:
    """Configuration model, resampling the whole matching until it is simple.

    Attempt ``k`` uses the stream seeded by ``derive_seed(seed, k)``.
    """
    if seed is None:
        raise InputError("random_regular requires an explicit seed")
    if d < 0 or n < 1 or d >= n:
        raise InputError(f"random_regular needs 0 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise InputError(f"random_regular needs n*d even, got n={n}, d={d}")
    for attempt in range(retry_budget):
        rng = SplitMix64(derive_seed(seed, attempt))
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v:
                ok = False
                break
            e = (u, v) if u < v else (v, u)
            if e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return Graph.from_edges(n, sorted(edges))
    raise GenerationError(f"configuration model found no simple graph in {retry_budget} attempts (n={n}, d={d})")


# -- dispatch --------------------------------------------------------------


def _gen_cayley(p: dict) -> Graph:
    if "orders" not in p or "generators" not in p:
        raise InputError("cayley_abelian needs 'orders' and 'generators'")
    return cayley_abelian(p["orders"], p["generators"])


_BUILDERS: dict[str, Callable[[dict, int | None], Graph]] = {
    "cycle": lambda p, s: cycle(_need(p, "n", 3)),
    "path": lambda p, s: path(_need(p, "n", 1)),
    "complete": lambda p, s: complete(_need(p, "n", 1)),
    "complete_bipartite": lambda p, s: complete_bipartite(_need(p, "m", 1), _need(p, "n", 1)),
    "star": lambda p, s: star(_need(p, "n", 1)),
    "prism": lambda p, s: prism(_need(p, "n", 3)),
    "mobius_ladder": lambda p, s: mobius_ladder(_need(p, "n", 2)),
    "hypercube": lambda p, s: hypercube(_need(p, "d", 1)),
    "torus2d": lambda p, s: torus2d(_need(p, "n", 3)),
    "grid2d": lambda p, s: grid2d(_need(p, "n", 1), _need(p, "m", 1) if "m" in p else None),
    "regular_tree_truncation": lambda p, s: regular_tree_truncation(_need(p, "d", 2), _need(p, "depth", 0)),
    "random_regular": lambda p, s: random_regular(_need(p, "n", 1), _need(p, "d", 0), s),
    "cayley_abelian": lambda p, s: _gen_cayley(p),
}


def generate(spec: FamilySpec) -> Graph:
    if spec.family in RANDOM_FAMILIES:
        if spec.seed is None:
            raise InputError(f"{spec.family} is random and requires an explicit seed")
        if not 0 <= spec.seed < 1 << 64:
            raise InputError("seed must be a 64-bit unsigned integer")
    return _BUILDERS[spec.family](spec.params, spec.seed)


def spec(family: str, seed: int | None = None, **params) -> FamilySpec:
    return FamilySpec(family, params, seed)


# Instances exercised by the report subcommand and the acceptance suite.
SHIPPED_FAMILIES: tuple[FamilySpec, ...] = (
    spec("cycle", n=12),
    spec("cycle", n=1200),
    spec("path", n=40),
    spec("complete", n=8),
    spec("complete_bipartite", m=3, n=4),
    spec("star", n=6),
    spec("prism", n=10),
    spec("prism", n=600),
    spec("mobius_ladder", n=10),
    spec("mobius_ladder", n=600),
    spec("hypercube", d=4),
    spec("hypercube", d=10),
    spec("torus2d", n=10),
    spec("torus2d", n=35),
    spec("grid2d", n=8),
    spec("grid2d", n=35),
    spec("regular_tree_truncation", d=3, depth=5),
    spec("regular_tree_truncation", d=3, depth=9),
    spec("random_regular", seed=1, n=100, d=3),
    spec("random_regular", seed=1, n=1200, d=3),
    spec("random_regular", seed=2, n=1200, d=4),
    spec("cayley_abelian", orders=[6, 4], generators=[[1, 0], [-1, 0], [0, 1], [0, -1], [3, 2]]),
)
