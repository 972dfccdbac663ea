"""t-step lazy-walk distributions, entropy and spectral-radius series, and
the coupled two-walker experiment driven by good optimal couplings.

Distributions are propagated on a :class:`LumpedChain`. A graph is the
trivial chain (one cell per vertex); :func:`quotient` and
:func:`regular_tree_chain` give exact lumpings from a root, which is how
truncated trees far too large to build are handled.
"""

from __future__ import annotations

import math
import os
from bisect import bisect_right
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapabilityError, InputError, PreconditionError
from .graph_core import Graph, all_pairs_distances, bfs_layers, refine_partition
from .rng import SplitMix64, derive_seed
from .transport import good_optimal_coupling

EXACT_T_MAX = 30
EXACT_SUPPORT_MAX = 200_000
PLAN_CACHE_SIZE = 250_000
APSP_MAX_VERTICES = 3000


# -- lumped chains ---------------------------------------------------------


@dataclass(frozen=True)
class LumpedChain:
    """Lazy walk lumped over an equitable partition with the root as a singleton cell.

    ``links[a]`` lists ``(b, c)``: every vertex of cell ``a`` has ``c``
    neighbours in cell ``b``. Vertices of a cell share a degree, and by
    reversibility ``P^t(root, x)`` is constant on each cell.
    """

    sizes: tuple[int, ...]
    degrees: tuple[int, ...]
    links: tuple[tuple[tuple[int, int], ...], ...]
    root: int = 0

    @property
    def n_cells(self) -> int:
        return len(self.sizes)

    @classmethod
    def from_graph(cls, g: Graph, o: int) -> "LumpedChain":
        return cls(tuple([1] * g.n), g.degrees, tuple(tuple((y, 1) for y in a) for a in g.adjacency), o)


def quotient(g: Graph, o: int) -> tuple[LumpedChain, list[list[int]]]:
    """Coarsest equitable partition refining {o}, with cells listed by the refinement order."""
    g.check_vertex(o)
    others = [v for v in range(g.n) if v != o]
    cells = refine_partition(g.adjacency, [[o]] + ([others] if others else []))
    cell_of = [0] * g.n
    for i, c in enumerate(cells):
        for v in c:
            cell_of[v] = i
    links = []
    for c in cells:
        counts: dict[int, int] = {}
        for w in g.adjacency[c[0]]:
            counts[cell_of[w]] = counts.get(cell_of[w], 0) + 1
        links.append(tuple(sorted(counts.items())))
    chain = LumpedChain(tuple(len(c) for c in cells), tuple(g.degree(c[0]) for c in cells), tuple(links), cell_of[o])
    return chain, cells


def regular_tree_chain(d: int, depth: int) -> LumpedChain:
    """Distance-from-root lumping of the depth-``depth`` truncation of the d-regular tree."""
    if d < 2 or depth < 1:
        raise InputError("regular_tree_chain needs d >= 2 and depth >= 1")
    sizes = [1] + [d * (d - 1) ** (k - 1) for k in range(1, depth + 1)]
    degrees = [d] * depth + [1]
    links = [((1, d),)]
    for k in range(1, depth):
        links.append(((k - 1, 1), (k + 1, d - 1)))
    links.append(((depth - 1, 1),))
    return LumpedChain(tuple(sizes), tuple(degrees), tuple(links), 0)


def _as_chain(g, o) -> LumpedChain:
    if isinstance(g, LumpedChain):
        if o is not None and o != g.root:
            raise InputError("a lumped chain can only be started from its root cell")
        return g
    g.check_vertex(o)
    if g.degree(o) == 0:
        raise InputError(f"vertex {o} is isolated; the walk is undefined")
    return LumpedChain.from_graph(g, o)


def _transition_matrix(chain: LumpedChain) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for a, lk in enumerate(chain.links):
        rows.append(a)
        cols.append(a)
        vals.append(0.5)
        for b, c in lk:
            rows.append(a)
            cols.append(b)
            vals.append(c / (2.0 * chain.degrees[a]))
    n = chain.n_cells
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _resolve_mode(mode: str, t_max: int) -> str:
    if mode == "auto":
        return "exact" if t_max <= EXACT_T_MAX else "float"
    if mode not in ("exact", "float"):
        raise InputError(f"mode must be 'auto', 'exact' or 'float', got {mode!r}")
    return mode


def _iterate(chain: LumpedChain, t_max: int, mode: str):
    """Yield cell-mass distributions for t = 0..t_max (dict in exact mode, array in float)."""
    if mode == "exact":
        p = {chain.root: Fraction(1)}
        yield p
        denom = [2 * d for d in chain.degrees]
        for _ in range(t_max):
            q: dict[int, Fraction] = {}
            for a, m in p.items():
                half = m / 2
                q[a] = q.get(a, 0) + half
                if chain.degrees[a]:
                    share = m / denom[a]
                    for b, c in chain.links[a]:
                        q[b] = q.get(b, 0) + share * c
            if len(q) > EXACT_SUPPORT_MAX:
                raise CapabilityError(f"exact walk support exceeds {EXACT_SUPPORT_MAX} cells")
            p = q
            yield p
    else:
        P = _transition_matrix(chain)
        PT = P.T.tocsr()
        p = np.zeros(chain.n_cells)
        p[chain.root] = 1.0
        yield p
        for _ in range(t_max):
            p = PT @ p
            yield p


# -- distributions ---------------------------------------------------------


@dataclass(frozen=True)
class WalkDistribution:
    origin: int
    t: int
    probabilities: dict[int, Fraction | float]
    mode: str


def walk_distribution(g: Graph, o: int, t: int, mode: str = "auto") -> WalkDistribution:
    if t < 0:
        raise InputError("t must be >= 0")
    chain = _as_chain(g, o)
    mode = _resolve_mode(mode, t)
    p = None
    for p in _iterate(chain, t, mode):
        pass
    if mode == "exact":
        probs = dict(sorted((v, m) for v, m in p.items() if m))
    else:
        nz = np.nonzero(p)[0]
        probs = {int(v): float(p[v]) for v in nz}
    return WalkDistribution(o, t, probs, mode)


def return_probability(g, o: int, t: int, mode: str = "auto"):
    """``P^t(o, o)``; ``g`` may be a Graph or a LumpedChain rooted at its root cell."""
    if t < 0:
        raise InputError("t must be >= 0")
    chain = _as_chain(g, o)
    mode = _resolve_mode(mode, t)
    p = None
    for p in _iterate(chain, t, mode):
        pass
    if mode == "exact":
        return p.get(chain.root, Fraction(0))
    return float(p[chain.root])


def return_probabilities(g, o: int, t_max: int, mode: str = "float") -> list:
    chain = _as_chain(g, o)
    mode = _resolve_mode(mode, t_max)
    if mode == "exact":
        return [p.get(chain.root, Fraction(0)) for p in _iterate(chain, t_max, mode)]
    return [float(p[chain.root]) for p in _iterate(chain, t_max, mode)]


def _entropy(chain: LumpedChain, p, mode: str) -> float:
    terms = []
    items = p.items() if mode == "exact" else ((a, p[a]) for a in np.nonzero(p)[0])
    for a, m in items:
        m = float(m)
        if m > 0:
            terms.append(-m * math.log(m / chain.sizes[a]))
    return max(0.0, math.fsum(terms))


@dataclass(frozen=True)
class EntropySeries:
    origin: int
    values: tuple[tuple[int, float], ...]
    rate_estimates: tuple[tuple[int, float], ...]
    mode: str

    def rate(self, t: int) -> float:
        return dict(self.rate_estimates)[t]


def entropy_series(g, o: int, t_max: int, mode: str = "auto") -> EntropySeries:
    """Shannon entropy ``H_t`` of the t-step distribution (natural log) for t <= t_max."""
    if t_max < 0:
        raise InputError("t_max must be >= 0")
    chain = _as_chain(g, o)
    mode = _resolve_mode(mode, t_max)
    values = [(t, _entropy(chain, p, mode)) for t, p in enumerate(_iterate(chain, t_max, mode))]
    rates = tuple((t, h / t) for t, h in values if t > 0)
    return EntropySeries(chain.root if isinstance(g, LumpedChain) else o, tuple(values), rates, mode)


@dataclass(frozen=True)
class RadiusSeries:
    """``(t, P^{2t}(o,o)^(1/(2t)))`` for t = 1..t_max, plus a trend flag."""

    values: tuple[tuple[int, float], ...]
    nondecreasing: bool


def spectral_radius_estimate(g, o: int, t_max: int, mode: str = "float") -> RadiusSeries:
    if t_max < 1:
        raise InputError("t_max must be >= 1")
    probs = return_probabilities(g, o, 2 * t_max, mode)
    values = tuple((t, float(probs[2 * t]) ** (1.0 / (2 * t))) for t in range(1, t_max + 1))
    mono = all(b[1] >= a[1] - 1e-15 for a, b in zip(values, values[1:]))
    return RadiusSeries(values, mono)


def entropy_radius_gap(g, o: int, t: int, mode: str = "float") -> float:
    """``H_t / t - 2 log(1 / r_t)`` with ``r_t`` the t-th radius estimate."""
    if t < 1:
        raise InputError("t must be >= 1")
    h = entropy_series(g, o, t, mode).values[t][1]
    r = spectral_radius_estimate(g, o, t, mode).values[-1][1]
    return h / t - 2.0 * math.log(1.0 / r)


# -- coupled walkers -------------------------------------------------------


def supermartingale_bound(z: float, K: float, a: float, residual: float = 0) -> float:
    """Hitting-time tail bound ``z (2a + K - z) / a^2 + residual``.

    ``residual`` is the caller's value (0 or 1) for the probability that the
    accumulated conditional variance stays below ``a^2``.
    """
    if a <= 0:
        raise InputError(f"a must be positive, got {a}")
    if K <= 0 or z < 0:
        raise InputError("need K > 0 and z >= 0")
    if residual not in (0, 1):
        raise InputError("residual must be 0 or 1")
    return z * (2 * a + K - z) / a**2 + residual


def regular_meeting_bound(distance: int, degree: int, t: int) -> float:
    """``8 d(x,y) / a`` with ``a = sqrt(t / (2 deg))`` on a degree-regular graph.

    At this ``a`` the sum of ``1/deg`` over t steps equals ``2 a^2``
    deterministically, so the residual term vanishes.
    """
    if t <= 0:
        raise InputError("t must be positive")
    a = math.sqrt(t / (2.0 * degree))
    return 8.0 * distance / a


def wilson_upper(successes: int, n: int, z: float) -> float:
    if n <= 0:
        raise InputError("need at least one trial")
    p = successes / n
    z2 = z * z
    centre = p + z2 / (2 * n)
    spread = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    return min(1.0, (centre + spread) / (1 + z2 / n))


class _Coupler:
    """Samples steps of the coupled chain, caching plans keyed by (u, v)."""

    def __init__(self, g: Graph, distances: np.ndarray | None):
        self.g = g
        self.cache: OrderedDict = OrderedDict()
        if distances is not None:
            self.dist = lambda u, v: int(distances[u, v])
        else:
            self.dist = None
        self.D = distances

    def distance(self, u: int, v: int) -> int:
        if self.D is not None:
            return int(self.D[u, v])
        return bfs_layers(self.g, u)[v]

    def plan(self, u: int, v: int):
        key = (u, v)
        hit = self.cache.get(key)
        if hit is not None:
            self.cache.move_to_end(key)
            return hit
        p = good_optimal_coupling(self.g, u, v, self.dist)
        cum = []
        acc = 0.0
        for _, _, m in p.entries:
            acc += float(m)
            cum.append(acc)
        entry = (cum, [(a, b) for a, b, _ in p.entries])
        self.cache[key] = entry
        if len(self.cache) > PLAN_CACHE_SIZE:
            self.cache.popitem(last=False)
        return entry

    def step(self, u: int, v: int, rng: SplitMix64) -> tuple[int, int]:
        if u == v:
            adj = self.g.adjacency[u]
            k = rng.randbelow(2 * len(adj))
            w = adj[k] if k < len(adj) else u
            return w, w
        cum, pairs = self.plan(u, v)
        i = bisect_right(cum, rng.random())
        return pairs[min(i, len(pairs) - 1)]


def _default_distances(g: Graph) -> np.ndarray | None:
    return all_pairs_distances(g) if g.n <= APSP_MAX_VERTICES else None


def _run_trials(args):
    g, x, y, horizon, seed, trial_ids = args
    coupler = _Coupler(g, _default_distances(g))
    taus = []
    inc_sum = 0.0
    inc_sq = 0.0
    inc_n = 0
    for k in trial_ids:
        rng = SplitMix64(derive_seed(seed, k))
        u, v = x, y
        z = coupler.distance(u, v)
        tau = horizon + 1
        for t in range(1, horizon + 1):
            u, v = coupler.step(u, v, rng)
            z_new = 0 if u == v else coupler.distance(u, v)
            dz = z_new - z
            inc_sum += dz
            inc_sq += dz * dz
            inc_n += 1
            z = z_new
            if u == v:
                tau = t
                break
        taus.append(tau)
    return taus, inc_sum, inc_sq, inc_n


@dataclass
class MeetingExperiment:
    pair: tuple[int, int]
    trials: int
    horizon: int
    seed: int
    meeting_times: tuple[int, ...]  # horizon + 1 marks trials that never met
    drift_mean: float
    drift_se: float
    tail: list[tuple[int, float]] = field(default_factory=list)

    def count_ge(self, t: int) -> int:
        return sum(1 for tau in self.meeting_times if tau >= t)

    def tail_ge(self, t: int) -> float:
        return self.count_ge(t) / self.trials

    def wilson_upper_ge(self, t: int, z: float) -> float:
        return wilson_upper(self.count_ge(t), self.trials, z)

    def summary(self) -> dict:
        met = [tau for tau in self.meeting_times if tau <= self.horizon]
        return {
            "met": len(met),
            "censored": self.trials - len(met),
            "mean_tau_met": float(np.mean(met)) if met else math.nan,
            "median_tau_met": float(np.median(met)) if met else math.nan,
            "max_tau_met": max(met) if met else None,
        }


def _check_pair(g: Graph, x: int, y: int) -> None:
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        raise PreconditionError("coupled walkers must start at distinct vertices")
    if y not in bfs_layers(g, x):
        raise PreconditionError(f"{x} and {y} lie in different components")


def _chunks(trials: int, workers: int) -> list[list[int]]:
    if workers <= 1:
        return [list(range(trials))]
    size = -(-trials // workers)
    return [list(range(i, min(i + size, trials))) for i in range(0, trials, size)]


def coupled_meeting_experiment(g: Graph, x: int, y: int, horizon: int, trials: int, seed: int,
                               workers: int | None = 1) -> MeetingExperiment:
    """Simulate the good-coupling chain from (x, y) and record meeting times.

    Trial ``k`` uses the stream ``derive_seed(seed, k)``, so results do not
    depend on ``workers``.
    """
    _check_pair(g, x, y)
    if horizon < 1 or trials < 1:
        raise InputError("horizon and trials must be positive")
    if seed is None:
        raise InputError("an explicit seed is required")
    workers = workers or os.cpu_count() or 1
    jobs = [(g, x, y, horizon, seed, ids) for ids in _chunks(trials, workers)]
    if len(jobs) == 1:
        results = [_run_trials(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trials, jobs))
    taus = [tau for r in results for tau in r[0]]
    s = sum(r[1] for r in results)
    sq = sum(r[2] for r in results)
    n = sum(r[3] for r in results)
    mean = s / n
    var = max(0.0, sq / n - mean * mean)
    se = math.sqrt(var / n) if n > 1 else math.inf
    counts = np.bincount(np.asarray(taus), minlength=horizon + 2)
    # P(tau > t) = (#tau >= t+1) / trials
    ge = np.cumsum(counts[::-1])[::-1]
    tail = [(t, float(ge[t + 1]) / trials) for t in range(horizon + 1)]
    return MeetingExperiment((x, y), trials, horizon, seed, tuple(taus), mean, se, tail)


def coupled_positions(g: Graph, x: int, y: int, t: int, trials: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Positions ``(X_t, Y_t)`` of the coupled chain after exactly t steps, one row per trial."""
    _check_pair(g, x, y)
    coupler = _Coupler(g, _default_distances(g))
    xs = np.empty(trials, dtype=np.int64)
    ys = np.empty(trials, dtype=np.int64)
    for k in range(trials):
        rng = SplitMix64(derive_seed(seed, k))
        u, v = x, y
        for _ in range(t):
            u, v = coupler.step(u, v, rng)
        xs[k], ys[k] = u, v
    return xs, ys
