"""Spectrum of the lazy random walk and its local spectral measures.

The transition matrix ``P = (I + D^-1 A) / 2`` is conjugate to the symmetric
matrix ``S = (I + D^-1/2 A D^-1/2) / 2``. With ``S = U diag(lam) U^T``, the
vectors ``phi_i = D^-1/2 u_i`` are orthonormal for the degree-weighted inner
product, and the local weight ``deg(o) |phi_i(o)|^2`` is just ``U[o, i]^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, InputError, InvariantError
from .graph_core import Graph

MAX_DENSE_VERTICES = 5000
CLAMP_TOL = 1e-9
ORTHO_TOL = 1e-8
MERGE_TOL = 1e-9
# absorbs round-off when a spectral mass is compared with a threshold
MASS_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # descending

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class EigenBasis:
    eigenvalues: np.ndarray  # descending
    sym_vectors: np.ndarray  # columns u_i of the symmetric conjugate
    degrees: np.ndarray

    @property
    def vectors(self) -> np.ndarray:
        """Eigenvectors of P, orthonormal for <f, g> = sum deg f g."""
        return self.sym_vectors / np.sqrt(self.degrees)[:, None]


@dataclass(frozen=True)
class SpectralMeasure:
    atoms: tuple[tuple[float, float], ...]  # (location, weight), descending locations

    def mass(self, lo: float, hi: float = 1.0, closed: bool = True) -> float:
        if closed:
            return float(sum(w for lam, w in self.atoms if lo <= lam <= hi))
        return float(sum(w for lam, w in self.atoms if lo < lam <= hi))

    def moment(self, t: int) -> float:
        return float(sum(w * lam**t for lam, w in self.atoms))

    @property
    def total(self) -> float:
        return float(sum(w for _, w in self.atoms))


def _check(g: Graph) -> np.ndarray:
    if g.n == 0:
        raise InputError("empty graph has no spectrum")
    if g.n > MAX_DENSE_VERTICES:
        raise CapabilityError(f"dense eigensolve limited to {MAX_DENSE_VERTICES} vertices, got {g.n}")
    deg = np.asarray(g.degrees, dtype=float)
    if np.any(deg == 0):
        raise InputError(f"vertex {int(np.argmin(deg))} is isolated; P is undefined there")
    return deg


def eigen_basis(g: Graph) -> EigenBasis:
    deg = _check(g)
    inv_sqrt = 1.0 / np.sqrt(deg)
    A = g.csr.toarray()
    S = 0.5 * (np.eye(g.n) + inv_sqrt[:, None] * A * inv_sqrt[None, :])
    lam, U = np.linalg.eigh(S)
    lam, U = lam[::-1].copy(), U[:, ::-1].copy()
    if lam[-1] < -CLAMP_TOL or lam[0] > 1 + CLAMP_TOL:
        raise InvariantError(f"eigenvalues [{lam[-1]}, {lam[0]}] escape [0, 1] beyond clamp tolerance")
    np.clip(lam, 0.0, 1.0, out=lam)
    ortho = np.abs(U.T @ U - np.eye(g.n)).max()
    if ortho > ORTHO_TOL:
        raise InvariantError(f"eigenvectors not orthonormal (max deviation {ortho:.2e})")
    resid = np.abs(S @ U - U * lam[None, :]).max()
    if resid > ORTHO_TOL:
        raise InvariantError(f"eigen-equation residual {resid:.2e} exceeds {ORTHO_TOL}")
    return EigenBasis(lam, U, deg)


def spectrum(g: Graph) -> Spectrum:
    return Spectrum(eigen_basis(g).eigenvalues)


def _merge(locations: np.ndarray, weights: np.ndarray) -> tuple[tuple[float, float], ...]:
    """Merge consecutive (descending) eigenvalues closer than MERGE_TOL into one atom."""
    atoms = []
    start = 0
    n = len(locations)
    for i in range(1, n + 1):
        if i == n or locations[i - 1] - locations[i] > MERGE_TOL:
            loc = float(np.mean(locations[start:i]))
            atoms.append((loc, float(np.sum(weights[start:i]))))
            start = i
    return tuple(atoms)


def empirical_distribution(g: Graph, basis: EigenBasis | None = None) -> SpectralMeasure:
    lam = (basis or eigen_basis(g)).eigenvalues
    return SpectralMeasure(_merge(lam, np.full(len(lam), 1.0 / len(lam))))


def local_spectral_measure(g: Graph, o: int, basis: EigenBasis | None = None) -> SpectralMeasure:
    g.check_vertex(o)
    basis = basis or eigen_basis(g)
    w = basis.sym_vectors[o, :] ** 2
    return SpectralMeasure(_merge(basis.eigenvalues, w))


def count_above(g: Graph, rho: float, strict: bool = True, basis: EigenBasis | None = None) -> int:
    """Number of eigenvalues ``> rho`` (or ``>= rho`` with ``strict=False``).

    Eigenvalues within MERGE_TOL of rho count as equal to it, so roundoff in a
    degenerate eigenspace sitting exactly at rho cannot flip the comparison.
    """
    lam = (basis or eigen_basis(g)).eigenvalues
    return int(np.sum(lam > rho + MERGE_TOL) if strict else np.sum(lam >= rho - MERGE_TOL))


def bad_mass(g: Graph, rho: float, basis: EigenBasis | None = None) -> np.ndarray:
    """Per-vertex local spectral mass of the closed interval [rho, 1]."""
    basis = basis or eigen_basis(g)
    mask = basis.eigenvalues >= rho - MERGE_TOL
    return (basis.sym_vectors[:, mask] ** 2).sum(axis=1)


def delocalization_fraction(g: Graph, rho: float, eps: float, basis: EigenBasis | None = None) -> float:
    """Fraction of vertices whose local measure gives [rho, 1] mass at most eps."""
    mass = bad_mass(g, rho, basis)
    return float(np.sum(mass <= eps + MASS_TOL)) / g.n
