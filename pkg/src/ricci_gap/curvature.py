"""Ollivier-Ricci curvature of edges and graphs, exact over the rationals."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError
from .graph_core import Graph
from .transport import edge_distance, lazy_kernel_row, wasserstein1

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class EdgeCurvature:
    edge: tuple[int, int]
    kappa: Fraction


@dataclass
class CurvatureProfile:
    per_edge: list[EdgeCurvature]
    min_kappa: Fraction
    negative_fraction_at: dict[Fraction, Fraction] = field(default_factory=dict)

    def histogram(self) -> dict[Fraction, int]:
        counts: dict[Fraction, int] = {}
        for ec in self.per_edge:
            counts[ec.kappa] = counts.get(ec.kappa, 0) + 1
        return dict(sorted(counts.items()))


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, ``"p/q"`` string or decimal float.

    Floats go through ``repr`` so ``0.001`` becomes exactly 1/1000.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"cannot read {value!r} as a rational number") from None


def _check_edge(g: Graph, x: int, y: int) -> None:
    g.check_vertex(x)
    g.check_vertex(y)
    if not g.has_edge(x, y):
        raise InputError(f"({x}, {y}) is not an edge")


def kappa_alpha_edge(g: Graph, x: int, y: int, alpha) -> Fraction:
    """Curvature for the alpha-idle kernel ``(2-2a) P + (2a-1) Id``."""
    alpha = as_fraction(alpha)
    if not 0 <= alpha < 1:
        raise InputError(f"idleness alpha must lie in [0, 1), got {alpha}")
    _check_edge(g, x, y)
    mu = lazy_kernel_row(g, x, alpha)
    nu = lazy_kernel_row(g, y, alpha)
    return 1 - wasserstein1(g, mu, nu, edge_distance(g))


def kappa_edge(g: Graph, x: int, y: int) -> Fraction:
    return kappa_alpha_edge(g, x, y, HALF)


def _kappa_chunk(args):
    g, edges = args
    d = edge_distance(g)
    return [1 - wasserstein1(g, lazy_kernel_row(g, u), lazy_kernel_row(g, v), d) for u, v in edges]


def edge_curvatures(g: Graph, workers: int | None = 1) -> list[EdgeCurvature]:
    """Curvature of every edge, in lexicographic edge order.

    With ``workers > 1`` edges are split into contiguous chunks across
    processes; the result does not depend on the worker count.
    """
    edges = list(g.edges())
    if not edges:
        raise InputError("graph has no edges")
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(edges) < 64:
        kappas = _kappa_chunk((g, edges))
    else:
        size = -(-len(edges) // (4 * workers))
        chunks = [edges[i:i + size] for i in range(0, len(edges), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            kappas = [k for part in pool.map(_kappa_chunk, [(g, c) for c in chunks]) for k in part]
    return [EdgeCurvature(e, k) for e, k in zip(edges, kappas)]


def kappa_graph(g: Graph, workers: int | None = 1) -> Fraction:
    return min(ec.kappa for ec in edge_curvatures(g, workers))


def _negative_fraction(kappas: Sequence[Fraction], eps: Fraction) -> Fraction:
    return Fraction(sum(1 for k in kappas if k < -eps), len(kappas))


def negative_fraction(g: Graph, eps, curvatures: Sequence[EdgeCurvature] | None = None) -> Fraction:
    """Fraction of edges with curvature strictly below ``-eps``."""
    eps = as_fraction(eps)
    if eps < 0:
        raise InputError("eps must be non-negative")
    if curvatures is None:
        curvatures = edge_curvatures(g)
    return _negative_fraction([c.kappa for c in curvatures], eps)


def curvature_profile(g: Graph, eps_list: Iterable = (), workers: int | None = 1) -> CurvatureProfile:
    per_edge = edge_curvatures(g, workers)
    kappas = [c.kappa for c in per_edge]
    fractions = {}
    for eps in eps_list:
        e = as_fraction(eps)
        fractions[e] = _negative_fraction(kappas, e)
    return CurvatureProfile(per_edge, min(kappas), fractions)
