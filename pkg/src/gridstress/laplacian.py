"""Spectral core: Laplacians, eigendecompositions, pseudoinverse quadratics,
regularized inverses and resistance distances.

The marginal (zero) Laplacian mode is handled by two parallel, mutually
checkable paths: deflation (dropping the kernel mode where the limit provably
exists) and an explicit epsilon sweep whose extrapolated limit and fitted pole
are reported side by side.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError
from .gridio import GridCase

#: relative threshold below which an eigenvalue counts as zero
ZERO_EIGENVALUE_RTOL = 1e-10

#: default regularization sweep, largest to smallest
DEFAULT_EPSILON_SWEEP = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7)

#: a fitted pole contributing more than this fraction of the value at the
#: smallest epsilon marks the quantity as divergent
POLE_FRACTION_THRESHOLD = 1e-6


def build_laplacian(case_or_edges: GridCase | Iterable[tuple[int, int, float]],
                    n: int | None = None) -> np.ndarray:
    """Assemble the dense weighted graph Laplacian.

    Accepts either a GridCase (all branches, transformers included) or an
    iterable of ``(i, j, weight)`` edges with ``n`` nodes.
    """
    if isinstance(case_or_edges, GridCase):
        n = case_or_edges.n
        edges = [(ln.from_bus, ln.to_bus, ln.susceptance)
                 for ln in case_or_edges.lines]
    else:
        edges = list(case_or_edges)
        if n is None:
            n = 1 + max(max(i, j) for i, j, _ in edges)
    L = np.zeros((n, n))
    for i, j, w in edges:
        L[i, j] -= w
        L[j, i] -= w
        L[i, i] += w
        L[j, j] += w
    return L


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
    Laplacian-like matrix."""

    eigenvalues: np.ndarray
    vectors: np.ndarray          # column l is the eigenvector u^(l)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @cached_property
    def zero_tol(self) -> float:
        lam_max = float(self.eigenvalues[-1])
        return ZERO_EIGENVALUE_RTOL * max(lam_max, 1.0)

    @cached_property
    def kernel_dim(self) -> int:
        return int(np.count_nonzero(self.eigenvalues < self.zero_tol))

    @cached_property
    def nonzero_mask(self) -> np.ndarray:
        return self.eigenvalues >= self.zero_tol

    @property
    def lambda2(self) -> float:
        """Smallest non-deflated eigenvalue (algebraic connectivity)."""
        return float(self.eigenvalues[self.nonzero_mask][0])


def eigendecompose(L: np.ndarray) -> Spectrum:
    """Dense symmetric eigendecomposition with ascending eigenvalues.

    The kernel eigenvector of a connected-graph Laplacian is canonicalized to
    the positive constant sign.  Raises ConvergenceError if the solver fails
    or the returned basis violates orthonormality/reconstruction bounds.
    """
    L = np.asarray(L, dtype=float)
    try:
        lam, T = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc

    if T[:, 0].sum() < 0:
        T = T.copy()
        T[:, 0] = -T[:, 0]

    ortho = np.abs(T.T @ T - np.eye(L.shape[0])).max()
    if ortho >= 1e-10:
        raise ConvergenceError(f"eigenvector basis not orthonormal ({ortho:.2e})")
    scale = max(abs(lam[-1]), 1.0)
    recon = np.abs(L - (T * lam) @ T.T).max()
    if recon >= 1e-8 * scale:
        raise ConvergenceError(f"spectral reconstruction off by {recon:.2e}")
    return Spectrum(eigenvalues=lam, vectors=T)


def pseudoinverse_quadratic(spectrum: Spectrum, v: np.ndarray) -> float:
    """v' L^+ v via the deflated spectral sum (kernel modes dropped)."""
    c = spectrum.vectors.T @ np.asarray(v, dtype=float)
    mask = spectrum.nonzero_mask
    return float(np.sum(c[mask] ** 2 / spectrum.eigenvalues[mask]))


def regularized_inverse_quadratic(spectrum: Spectrum, v: np.ndarray,
                                  epsilon: float) -> float:
    """v' (L + eps*I)^{-1} v, all modes included (kernel mode contributes
    (u1.v)^2/eps)."""
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    c = spectrum.vectors.T @ np.asarray(v, dtype=float)
    return float(np.sum(c ** 2 / (spectrum.eigenvalues + epsilon)))


def resistance_distance(spectrum: Spectrum, i: int, j: int) -> float:
    """Effective resistance between nodes i and j."""
    if i == j:
        return 0.0
    d = spectrum.vectors[i, :] - spectrum.vectors[j, :]
    mask = spectrum.nonzero_mask
    return float(np.sum(d[mask] ** 2 / spectrum.eigenvalues[mask]))


def pseudoinverse_matrix(spectrum: Spectrum) -> np.ndarray:
    """Full Moore-Penrose pseudoinverse (deflated spectral reconstruction)."""
    mask = spectrum.nonzero_mask
    T = spectrum.vectors[:, mask]
    return (T / spectrum.eigenvalues[mask]) @ T.T


def resistance_matrix(spectrum: Spectrum) -> np.ndarray:
    """All pairwise resistance distances at once (amortizes sweeps)."""
    Lp = pseudoinverse_matrix(spectrum)
    diag = np.diag(Lp)
    omega = diag[:, None] + diag[None, :] - 2.0 * Lp
    np.fill_diagonal(omega, 0.0)
    return omega


@dataclass(frozen=True)
class SweepFit:
    """Result of fitting c_{-1}/eps + c_0 + c_1*eps to an epsilon sweep.

    ``limit`` is the Richardson-extrapolated eps -> 0 value (NaN when the
    fitted pole dominates), ``pole_coefficient`` the fitted c_{-1} and
    ``pole_fraction`` the share of the value at the smallest epsilon that the
    pole term explains.
    """

    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    limit: float
    pole_coefficient: float
    pole_fraction: float

    @property
    def diverges(self) -> bool:
        return self.pole_fraction > POLE_FRACTION_THRESHOLD


def fit_pole_limit(epsilons: Sequence[float], values: Sequence[float]) -> SweepFit:
    """Separate the order-one pole from the finite part of an epsilon sweep."""
    eps = np.asarray(epsilons, dtype=float)
    vals = np.asarray(values, dtype=float)
    if eps.size != vals.size or eps.size < 3:
        raise ValueError("need at least three sweep points")
    if np.any(eps <= 0):
        raise DomainError("sweep epsilons must be positive")

    order = np.argsort(eps)[::-1]           # largest -> smallest
    eps, vals = eps[order], vals[order]
    basis = np.column_stack([1.0 / eps, np.ones_like(eps), eps])
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    pole = float(coef[0])

    e_min, f_min = eps[-1], vals[-1]
    pole_fraction = abs(pole / e_min) / max(abs(f_min), 1e-300)

    # limit from the two smallest epsilons; linear extrapolation to eps = 0
    e_a, e_b = eps[-2], eps[-1]
    f_a, f_b = vals[-2], vals[-1]
    limit = (e_a * f_b - e_b * f_a) / (e_a - e_b)
    if pole_fraction > POLE_FRACTION_THRESHOLD:
        limit = float("nan")
    return SweepFit(tuple(eps), tuple(vals), float(limit), pole,
                    float(pole_fraction))


def epsilon_sweep_quadratic(spectrum: Spectrum, v: np.ndarray,
                            epsilons: Sequence[float] = DEFAULT_EPSILON_SWEEP,
                            ) -> SweepFit:
    """Regularized-inverse quadratic over an epsilon sweep, with fitted limit.

    The companion of pseudoinverse_quadratic: for v orthogonal to the kernel
    the two must agree, which tests make a removable-singularity assertion.
    """
    vals = [regularized_inverse_quadratic(spectrum, v, e) for e in epsilons]
    return fit_pole_limit(epsilons, vals)
