import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import (
    complete_spectrum,
    cycle_spectrum,
    dense_lazy_matrix,
    exact_lazy_matrix,
    hypercube_spectrum,
    to_nx,
    torus_spectrum,
)
from ricci_gap.errors import CapabilityError, InputError
from ricci_gap.generators import complete, cycle, hypercube, path, petersen, random_regular, star, torus2d
from ricci_gap.graph_core import Graph
from ricci_gap.spectral import (
    MAX_DENSE_VERTICES,
    count_above,
    delocalization_fraction,
    eigen_basis,
    empirical_distribution,
    local_spectral_measure,
    spectrum,
)


def atoms_close(a, b, tol=1e-10):
    assert len(a) == len(b)
    for (l1, w1), (l2, w2) in zip(a, b):
        assert l1 == pytest.approx(l2, abs=tol) and w1 == pytest.approx(w2, abs=tol)


class TestSpectrum:
    def test_k2(self):
        assert np.allclose(spectrum(complete(2)).eigenvalues, [1, 0], atol=1e-12)

    def test_c4(self):
        assert np.allclose(spectrum(cycle(4)).eigenvalues, [1, 0.5, 0.5, 0], atol=1e-12)

    def test_k5(self):
        assert np.allclose(spectrum(complete(5)).eigenvalues, [1, 3 / 8, 3 / 8, 3 / 8, 3 / 8], atol=1e-12)

    @pytest.mark.parametrize("n", [5, 9, 16])
    def test_cycles(self, n):
        assert np.allclose(spectrum(cycle(n)).eigenvalues, cycle_spectrum(n), atol=1e-10)

    @pytest.mark.parametrize("n", [4, 7, 10])
    def test_torus(self, n):
        assert np.allclose(spectrum(torus2d(n)).eigenvalues, torus_spectrum(n), atol=1e-10)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_hypercube(self, d):
        assert np.allclose(spectrum(hypercube(d)).eigenvalues, [float(x) for x in hypercube_spectrum(d)], atol=1e-10)

    @pytest.mark.parametrize("n", [3, 6, 12])
    def test_complete(self, n):
        assert np.allclose(spectrum(complete(n)).eigenvalues, [float(x) for x in complete_spectrum(n)], atol=1e-10)

    def test_against_dense_nonsymmetric_solve(self):
        g = random_regular(40, 3, 3)
        ref = np.sort(np.linalg.eigvals(dense_lazy_matrix(to_nx(g))).real)[::-1]
        assert np.allclose(spectrum(g).eigenvalues, ref, atol=1e-10)

    def test_components_multiplicity(self):
        g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)])
        ev = spectrum(g).eigenvalues
        assert sum(1 for x in ev if abs(x - 1) < 1e-9) == 2

    def test_range_and_order(self):
        ev = spectrum(random_regular(60, 4, 1)).eigenvalues
        assert all(0 <= x <= 1 for x in ev)
        assert list(ev) == sorted(ev, reverse=True)

    def test_isolated(self):
        with pytest.raises(InputError):
            spectrum(Graph.from_edges(3, [(0, 1)]))

    def test_size_guard(self):
        with pytest.raises(CapabilityError):
            spectrum(cycle(MAX_DENSE_VERTICES + 1))

    def test_basis_orthonormal_weighted(self):
        g = star(4)
        b = eigen_basis(g)
        phi = b.vectors
        deg = np.array(g.degrees, float)
        gram = phi.T @ (deg[:, None] * phi)
        assert np.allclose(gram, np.eye(g.n), atol=1e-8)
        P = dense_lazy_matrix(to_nx(g))
        assert np.allclose(P @ phi, phi * b.eigenvalues, atol=1e-8)


def test_reversibility_exact():
    g = random_regular(30, 3, 4)
    P = exact_lazy_matrix(to_nx(g))
    for x, y in g.edges():
        assert g.degree(x) * P[x][y] == g.degree(y) * P[y][x]


class TestMeasures:
    def test_empirical_k2(self):
        atoms_close(empirical_distribution(complete(2)).atoms, ((1.0, 0.5), (0.0, 0.5)))

    def test_empirical_c4(self):
        atoms_close(empirical_distribution(cycle(4)).atoms, ((1.0, 0.25), (0.5, 0.5), (0.0, 0.25)))

    def test_total_weight(self):
        for g in (petersen(), path(7), random_regular(50, 3, 2)):
            assert empirical_distribution(g).total == pytest.approx(1, abs=1e-10)
            assert local_spectral_measure(g, 0).total == pytest.approx(1, abs=1e-10)

    def test_first_moment(self):
        g = random_regular(40, 3, 8)
        for o in range(0, 40, 9):
            assert local_spectral_measure(g, o).moment(1) == pytest.approx(0.5, abs=1e-12)

    def test_vertex_transitive(self):
        g = petersen()
        emp = empirical_distribution(g).atoms
        for o in range(g.n):
            atoms_close(local_spectral_measure(g, o).atoms, emp)

    def test_k5_stationary_weight(self):
        mu = local_spectral_measure(complete(5), 0)
        assert mu.atoms[0][0] == pytest.approx(1) and mu.atoms[0][1] == pytest.approx(0.2, abs=1e-12)

    def test_stationary_weight_irregular(self):
        g = star(3)
        mu = local_spectral_measure(g, 0)
        assert dict(mu.atoms)[1.0] == pytest.approx(3 / 6, abs=1e-12)

    def test_moments_match_exact_powers(self):
        g = path(6)
        P = exact_lazy_matrix(to_nx(g))
        Pt = [[Fraction(int(i == j)) for j in range(6)] for i in range(6)]
        for t in range(8):
            for o in range(6):
                assert local_spectral_measure(g, o).moment(t) == pytest.approx(float(Pt[o][o]), abs=1e-10)
            Pt = [[sum(Pt[i][k] * P[k][j] for k in range(6)) for j in range(6)] for i in range(6)]

    def test_local_global(self):
        g = random_regular(30, 3, 6)
        basis = eigen_basis(g)
        acc: dict[float, float] = {}
        for o in range(g.n):
            for lam, w in local_spectral_measure(g, o, basis).atoms:
                key = min(acc, key=lambda k: abs(k - lam), default=None)
                if key is None or abs(key - lam) > 1e-9:
                    key = lam
                acc[key] = acc.get(key, 0) + w / g.n
        emp = empirical_distribution(g, basis).atoms
        assert len(acc) == len(emp)
        for lam, w in emp:
            key = min(acc, key=lambda k: abs(k - lam))
            assert acc[key] == pytest.approx(w, abs=1e-10)


class TestCounting:
    def test_examples(self):
        g = petersen()
        assert count_above(g, 1.0) == 0
        assert count_above(g, -0.1) == g.n
        assert count_above(complete(5), 0.5) == 1

    def test_strict_vs_closed(self):
        g = cycle(4)
        assert count_above(g, 0.5) == 1
        assert count_above(g, 0.5, strict=False) == 3

    @pytest.mark.parametrize("n", [20, 30])
    def test_torus_count_exact(self, n):
        expected = sum(1 for x in torus_spectrum(n) if x > 0.9 + 1e-12)
        assert count_above(torus2d(n), 0.9) == expected


class TestDelocalization:
    def test_vertex_transitive_binary(self):
        for g in (petersen(), torus2d(6)):
            for eps in (0.01, 0.1, 0.5):
                assert delocalization_fraction(g, 0.9, eps) in (0.0, 1.0)

    @pytest.mark.parametrize("n", [5, 8, 12])
    def test_complete(self, n):
        assert delocalization_fraction(complete(n), 0.9, 1 / n) == 1.0

    def test_torus20(self):
        assert delocalization_fraction(torus2d(20), 0.9, 1e-6) == 0.0

    def test_random_roots_range(self):
        rnd = random.Random(3)
        g = random_regular(50, 3, rnd.randrange(100))
        v = delocalization_fraction(g, 0.8, 0.05)
        assert 0 <= v <= 1


def test_degenerate_eigenspace_at_rho():
    # the 0.9 eigenspace of the 10-cube has multiplicity 10 and sits exactly at rho
    g = hypercube(10)
    assert count_above(g, 0.9) == 1
    assert count_above(g, 0.9, strict=False) == 11
    assert count_above(hypercube(5), 0.6) == 6
