"""Per-family summary table used by the ``report`` subcommand."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .generators import FamilySpec, generate
from .graph_core import Graph, is_connected, sparsity_functional
from .local_profile import verify_stationarity
from .transport import edge_distance, good_optimal_coupling
from .trichotomy import _Evaluator

COLUMNS = (
    "family", "label", "n", "edges", "max_degree", "sparsity", "kappa_min", "negative_fraction",
    "gamma_slack_min", "stationarity_residual", "count_above", "fired_clause",
)


def gamma_slack(g: Graph) -> Fraction:
    """Smallest ``gamma_mass - max(1/deg x, 1/deg y)/2`` over edges (both orientations)."""
    d = edge_distance(g)
    worst = None
    for x, y in g.edges():
        bound = max(Fraction(1, g.degree(x)), Fraction(1, g.degree(y))) / 2
        for a, b in ((x, y), (y, x)):
            slack = good_optimal_coupling(g, a, b, d).gamma_mass - bound
            worst = slack if worst is None else min(worst, slack)
    return worst


def family_row(spec: FamilySpec, delta: int, rho: float, eps, workers: int | None = 1) -> dict:
    g = generate(spec)
    ev = _Evaluator(g, workers)
    rep = ev.evaluate(delta, rho, eps)
    kappas = ev.kappas
    return {
        "family": spec.family,
        "label": spec.label,
        "n": g.n,
        "edges": g.edge_count,
        "max_degree": g.max_degree,
        "sparsity": f"{sparsity_functional(g):.12g}",
        "kappa_min": str(min(kappas)),
        "negative_fraction": str(Fraction(rep.curvature_count, g.edge_count)),
        "gamma_slack_min": str(gamma_slack(g)),
        "stationarity_residual": str(verify_stationarity(g)) if is_connected(g) else "n/a",
        "count_above": rep.expansion_count,
        "fired_clause": "+".join(rep.fired) or "none",
    }


def report_rows(specs: Sequence[FamilySpec], delta: int, rho: float, eps, workers: int | None = 1) -> list[dict]:
    return [family_row(s, delta, rho, eps, workers) for s in specs]
