import math
from fractions import Fraction

import pytest

from oracles import cycle_spectrum, torus_spectrum
from ricci_gap.errors import InputError
from ricci_gap.generators import complete, cycle, random_regular, spec, torus2d
from ricci_gap.trichotomy import consistency_findings, evaluate, first_firing, sweep

F = Fraction


def test_k10_sparse():
    r = evaluate(complete(10), 3, 0.9, 0.01)
    assert r.sparsity_clause
    assert r.sparsity_lhs == pytest.approx(10 * 9 * math.log(9))


def test_torus30():
    r = evaluate(torus2d(30), 4, 0.9, 0.001)
    assert not r.curvature_clause and r.expansion_clause
    assert r.expansion_count == sum(1 for x in torus_spectrum(30) if x > 0.9 + 1e-12)


def test_random_regular_500_curvature():
    r = evaluate(random_regular(500, 3, 1), 3, 0.9, 0.01)
    assert r.curvature_clause
    # frozen after an independent LP sweep over all 750 edges
    assert r.curvature_count == 743


def test_report_consistency():
    r = evaluate(random_regular(60, 3, 2), 3, 0.8, F(1, 20))
    assert r.any_clause == (r.sparsity_clause or r.expansion_clause or r.curvature_clause)
    assert r.sparsity_clause == (r.sparsity_lhs > r.sparsity_rhs)
    assert r.expansion_clause == (r.expansion_count >= r.expansion_threshold)
    assert r.curvature_clause == (r.curvature_count >= r.curvature_threshold)
    assert r.to_dict()["eps"] == "1/20"


def test_at_least_rho_switch():
    g = cycle(4)
    assert evaluate(g, 2, 0.5, 0.5).expansion_count == 1
    assert evaluate(g, 2, 0.5, 0.5, at_least_rho=True).expansion_count == 3


@pytest.mark.parametrize("args", [(0, 0.9, 0.1), (3, 1.0, 0.1), (3, 0.0, 0.1), (3, 0.9, 0), (3, 0.9, -1)])
def test_param_errors(args):
    with pytest.raises(InputError):
        evaluate(cycle(5), *args)


def test_cycle_sweep_expansion_only():
    grid = ["1/2", "1/10", "1/100", "1/1000"]
    rows = sweep([spec("cycle", n=n) for n in range(10, 101, 10)], 2, 0.9, grid)
    for row in rows:
        assert not row.report.sparsity_clause and not row.report.curvature_clause
    for label, hit in first_firing(rows).items():
        n = int(label.split("=")[1].rstrip(")"))
        count = sum(1 for x in cycle_spectrum(n) if x > 0.9 + 1e-12)
        assert hit is not None and hit[1] == "expansion"
        assert hit[0] <= F(count, n)


def test_prism_sweep_no_curvature():
    rows = sweep([spec("prism", n=n) for n in range(3, 21)], 3, 0.9, [F(1, 10), F(1, 1000)])
    assert not any(r.report.curvature_clause for r in rows)


def test_complete_sweep_sparse():
    rows = sweep([spec("complete", n=n) for n in range(5, 21)], 3, 0.9, [F(1, 2), F(1, 100)])
    assert all(r.report.sparsity_clause for r in rows)


def test_monotone_in_eps():
    g = random_regular(80, 3, 4)
    grid = [F(1, 2), F(1, 5), F(1, 10), F(1, 50), F(1, 500)]
    reps = [evaluate(g, 3, 0.85, e) for e in grid]
    for big, small in zip(reps, reps[1:]):
        assert big.sparsity_clause == small.sparsity_clause
        assert small.expansion_clause >= big.expansion_clause
        assert small.curvature_clause >= big.curvature_clause


def test_consistency_findings_empty_on_fired():
    rows = sweep([spec("torus2d", n=12)], 4, 0.9, ["0.001"])
    assert consistency_findings(rows) == []
