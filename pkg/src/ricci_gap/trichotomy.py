"""Evaluate the sparsity / expansion / curvature alternative on finite graphs."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .curvature import as_fraction, edge_curvatures
from .errors import InputError
from .generators import FamilySpec, generate
from .graph_core import Graph
from .spectral import EigenBasis, count_above, eigen_basis

log = logging.getLogger(__name__)

CLAUSES = ("sparsity", "expansion", "curvature")


@dataclass(frozen=True)
class TrichotomyReport:
    delta: int
    rho: float
    eps: Fraction
    at_least_rho: bool
    sparsity_clause: bool
    sparsity_lhs: float  # sum of deg log deg
    sparsity_rhs: float  # delta log delta |V|
    expansion_clause: bool
    expansion_count: int
    expansion_threshold: float  # eps |V|
    curvature_clause: bool
    curvature_count: int
    curvature_threshold: float  # eps |E|
    any_clause: bool

    @property
    def fired(self) -> tuple[str, ...]:
        flags = (self.sparsity_clause, self.expansion_clause, self.curvature_clause)
        return tuple(c for c, f in zip(CLAUSES, flags) if f)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eps"] = str(self.eps)
        d["fired"] = list(self.fired)
        return d


def _check_params(delta, rho, eps) -> Fraction:
    if isinstance(delta, bool) or not isinstance(delta, int) or delta < 1:
        raise InputError(f"delta must be an integer >= 1, got {delta!r}")
    if not 0 < rho < 1:
        raise InputError(f"rho must lie in (0, 1), got {rho}")
    eps = as_fraction(eps)
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    return eps


class _Evaluator:
    """Caches the expensive pieces (spectrum, curvatures) of one graph."""

    def __init__(self, g: Graph, workers: int | None = 1):
        if g.edge_count == 0:
            raise InputError("trichotomy needs a graph with at least one edge")
        self.g = g
        self.workers = workers
        self._basis: EigenBasis | None = None
        self._kappas: list[Fraction] | None = None
        self.sparsity_lhs = math.fsum(d * math.log(d) for d in g.degrees if d > 1)

    @property
    def basis(self) -> EigenBasis:
        if self._basis is None:
            self._basis = eigen_basis(self.g)
        return self._basis

    @property
    def kappas(self) -> list[Fraction]:
        if self._kappas is None:
            self._kappas = [c.kappa for c in edge_curvatures(self.g, self.workers)]
        return self._kappas

    def evaluate(self, delta: int, rho: float, eps, at_least_rho: bool = False) -> TrichotomyReport:
        eps = _check_params(delta, rho, eps)
        g = self.g
        rhs = delta * math.log(delta) * g.n
        sparse = self.sparsity_lhs > rhs
        count = count_above(g, rho, strict=not at_least_rho, basis=self.basis)
        expand = count >= eps * g.n
        neg = sum(1 for k in self.kappas if k < -eps)
        curved = neg >= eps * g.edge_count
        return TrichotomyReport(delta, rho, eps, at_least_rho, sparse, self.sparsity_lhs, rhs,
                                expand, count, float(eps * g.n), curved, neg,
                                float(eps * g.edge_count), sparse or expand or curved)


def evaluate(g: Graph, delta: int, rho: float, eps, at_least_rho: bool = False,
             workers: int | None = 1) -> TrichotomyReport:
    """Check the three clauses for one graph.

    The expansion clause counts eigenvalues strictly above rho, or at least
    rho with ``at_least_rho=True``.
    """
    _check_params(delta, rho, eps)
    return _Evaluator(g, workers).evaluate(delta, rho, eps, at_least_rho)


@dataclass(frozen=True)
class SweepRow:
    label: str
    family: str
    n_vertices: int
    eps: Fraction
    report: TrichotomyReport

    @property
    def fired_clause(self) -> str:
        return "+".join(self.report.fired) or "none"


def sweep(specs: Sequence[FamilySpec], delta: int, rho: float, eps_grid: Iterable,
          at_least_rho: bool = False, workers: int | None = 1) -> list[SweepRow]:
    """Evaluate every spec at every eps (largest first); rows follow spec order.

    A graph larger than 1/eps with all three clauses false at the smallest
    eps is logged as a warning: it would be a finding worth investigating.
    """
    grid = sorted((as_fraction(e) for e in eps_grid), reverse=True)
    if not grid:
        raise InputError("empty eps grid")
    for e in grid:
        _check_params(delta, rho, e)
    rows = []
    for spec in specs:
        g = generate(spec)
        ev = _Evaluator(g, workers)
        for e in grid:
            rows.append(SweepRow(spec.label, spec.family, g.n, e, ev.evaluate(delta, rho, e, at_least_rho)))
        last = rows[-1]
        if g.n > 1 / grid[-1] and not last.report.any_clause:
            log.warning("no clause fires for %s at eps=%s (|V|=%d)", spec.label, grid[-1], g.n)
    return rows


def first_firing(rows: Sequence[SweepRow]) -> dict[str, tuple[Fraction, str] | None]:
    """For each spec label, the largest eps at which some clause fires, and which ones."""
    out: dict[str, tuple[Fraction, str] | None] = {}
    for row in rows:
        if row.label not in out:
            out[row.label] = None
        if out[row.label] is None and row.report.any_clause:
            out[row.label] = (row.eps, row.fired_clause)
    return out


def consistency_findings(rows: Sequence[SweepRow]) -> list[SweepRow]:
    """Rows at the smallest eps where a graph with |V| > 1/eps fires no clause."""
    if not rows:
        return []
    smallest = min(r.eps for r in rows)
    return [r for r in rows if r.eps == smallest and r.n_vertices > 1 / smallest and not r.report.any_clause]
