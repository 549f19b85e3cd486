"""Closed-form observability Gramians for the uniform damping-ratio swing
model, plus two independent Lyapunov oracles.

All modal quantities are kept complex (the discriminant sqrt(gamma^2 - 4*lam)
is imaginary in the underdamped regime); final Gramians are asserted real and
the imaginary parts discarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    ConvergenceError,
    CriticalDampingError,
    DomainError,
    NotHurwitzError,
)
from .kron import ReducedSystem

#: |Gamma_j| below this multiple of gamma counts as critically damped
CRITICAL_RTOL = 1e-8


@dataclass(frozen=True)
class SecondOrderSystem:
    """M phi'' = -gamma M phi' - (L_eff + eps I) phi, in scaled coordinates."""

    l_eff: np.ndarray
    m: np.ndarray               # diagonal inertias as a vector
    gamma: float
    epsilon: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")

    @property
    def g(self) -> int:
        return self.m.size

    @cached_property
    def inv_sqrt_m(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.m)

    @cached_property
    def scaled_operator(self) -> np.ndarray:
        """M^{-1/2} (L_eff + eps I) M^{-1/2}, symmetrized."""
        shifted = self.l_eff + self.epsilon * np.eye(self.g)
        op = shifted * np.outer(self.inv_sqrt_m, self.inv_sqrt_m)
        return 0.5 * (op + op.T)


def second_order_system(red: ReducedSystem, epsilon: float) -> SecondOrderSystem:
    """Build the scaled second-order model from a Kron-reduced network."""
    return SecondOrderSystem(l_eff=red.l_red, m=red.m,
                             gamma=red.require_gamma(), epsilon=epsilon)


@dataclass(frozen=True)
class ModalBasis:
    """Eigenbasis of the scaled operator together with the per-mode complex
    rates mu_j^± = (-gamma ± Gamma_j)/2, Gamma_j = sqrt(gamma^2 - 4 lam_j)."""

    vectors: np.ndarray          # T_M, orthonormal columns
    lam: np.ndarray              # lambda^M, ascending
    gamma: float
    epsilon: float
    inv_sqrt_m: np.ndarray

    @cached_property
    def big_gamma(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.gamma ** 2 - 4.0 * self.lam,
                                  dtype=complex))

    @cached_property
    def mu_plus(self) -> np.ndarray:
        return 0.5 * (-self.gamma + self.big_gamma)

    @cached_property
    def mu_minus(self) -> np.ndarray:
        return 0.5 * (-self.gamma - self.big_gamma)

    @cached_property
    def kernel_mask(self) -> np.ndarray:
        scale = max(float(self.lam[-1]), 1.0)
        return self.lam < 1e-10 * scale


def modal_basis(sys: SecondOrderSystem) -> ModalBasis:
    """Eigendecompose the scaled operator and derive the modal rates.

    Raises CriticalDampingError on gamma^2 = 4 lam_j (zero-measure set where
    the modal transformation is singular); jitter gamma to proceed.
    """
    lam, T = np.linalg.eigh(sys.scaled_operator)
    if sys.epsilon > 0 and lam[0] <= 0:
        raise DomainError(
            "regularized operator is not positive definite; the unshifted "
            "matrix is not a connected-network Laplacian")
    basis = ModalBasis(vectors=T, lam=lam, gamma=sys.gamma,
                       epsilon=sys.epsilon, inv_sqrt_m=sys.inv_sqrt_m)
    if np.any(np.abs(basis.big_gamma) < CRITICAL_RTOL * sys.gamma):
        j = int(np.argmin(np.abs(basis.big_gamma)))
        raise CriticalDampingError(
            f"mode {j} is critically damped (gamma^2 = 4*lambda = "
            f"{4 * basis.lam[j]:.6e})")
    return basis


class GramianKind:
    FREQUENCY = "frequency"
    ANGLE = "angle"


@dataclass(frozen=True)
class GramianBlock:
    """The (2,2) block of an observability Gramian with its weight matrix."""

    x22: np.ndarray
    kind: str
    q: np.ndarray


def _weight_in_modal_basis(basis: ModalBasis, q: np.ndarray) -> np.ndarray:
    """T_M' M^{-1/2} Q M^{-1/2} T_M."""
    qm = np.asarray(q, dtype=float) * np.outer(basis.inv_sqrt_m,
                                               basis.inv_sqrt_m)
    return basis.vectors.T @ qm @ basis.vectors


def _denominator(basis: ModalBasis) -> np.ndarray:
    lam = basis.lam
    s = lam[:, None] + lam[None, :]
    d = lam[None, :] - lam[:, None]
    return 2.0 * basis.gamma ** 2 * s + d ** 2


def x22_frequency(basis: ModalBasis, q22: np.ndarray) -> GramianBlock:
    """X^(2,2) for a frequency-weighted measure (Q^(1,1) = 0).

    The kernel-kernel entry of the mode kernel tends to 1/(2 gamma) as the
    eigenvalues vanish, independent of epsilon, so the block is well defined
    down to epsilon = 0.
    """
    lam = basis.lam
    s = lam[:, None] + lam[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        kernel = basis.gamma * s / _denominator(basis)
    bad = ~np.isfinite(kernel)
    if bad.any():
        limit = np.where(np.eye(lam.size, dtype=bool), 1.0 / (2 * basis.gamma), 0.0)
        kernel = np.where(bad, limit, kernel)
    qt = _weight_in_modal_basis(basis, q22)
    x22 = basis.vectors @ (qt * kernel) @ basis.vectors.T
    return GramianBlock(x22=x22, kind=GramianKind.FREQUENCY,
                        q=np.asarray(q22, dtype=float))


def x22_angle(basis: ModalBasis, q11: np.ndarray) -> GramianBlock:
    """X^(2,2) for an angle-weighted measure (Q^(2,2) = 0); requires the
    regularized basis since the kernel-kernel entry has an order-one pole
    at epsilon = 0."""
    if basis.epsilon <= 0:
        raise DomainError("angle-based Gramian needs epsilon > 0 "
                          "(use x22_angle_deflated for the exact limit path)")
    kernel = 2.0 * basis.gamma / _denominator(basis)
    qt = _weight_in_modal_basis(basis, q11)
    x22 = basis.vectors @ (qt * kernel) @ basis.vectors.T
    return GramianBlock(x22=x22, kind=GramianKind.ANGLE,
                        q=np.asarray(q11, dtype=float))


def x22_angle_deflated(basis: ModalBasis, q11: np.ndarray) -> GramianBlock:
    """Angle-measure X^(2,2) with the kernel-kernel pole term removed.

    This is the exact epsilon -> 0 limit for probe vectors orthogonal to the
    marginal mode (all line-fault impulse vectors are); for other probes it
    silently drops the divergent part, so callers must check orthogonality.
    """
    with np.errstate(invalid="ignore", divide="ignore"):
        kernel = 2.0 * basis.gamma / _denominator(basis)
    km = basis.kernel_mask
    kernel[np.ix_(km, km)] = 0.0
    if not np.all(np.isfinite(kernel)):
        raise ConvergenceError("near-degenerate modes outside the kernel")
    qt = _weight_in_modal_basis(basis, q11)
    x22 = basis.vectors @ (qt * kernel) @ basis.vectors.T
    return GramianBlock(x22=x22, kind=GramianKind.ANGLE,
                        q=np.asarray(q11, dtype=float))


def state_matrix(sys: SecondOrderSystem) -> np.ndarray:
    """Symmetrized-block state matrix A of the first-order form."""
    g = sys.g
    a = np.zeros((2 * g, 2 * g))
    a[:g, g:] = np.eye(g)
    a[g:, :g] = -sys.scaled_operator
    a[g:, g:] = -sys.gamma * np.eye(g)
    return a


def lyapunov_eigenbasis(sys: SecondOrderSystem, q11: np.ndarray,
                        q22: np.ndarray) -> np.ndarray:
    """Full 2g x 2g observability Gramian via the bi-orthogonal eigenbasis of
    the state matrix (valid for epsilon > 0, where A is Hurwitz)."""
    if sys.epsilon <= 0:
        raise DomainError("eigenbasis Lyapunov solution requires epsilon > 0")
    basis = modal_basis(sys)
    g = sys.g
    tm = basis.vectors
    sqrt_gam = np.sqrt(basis.big_gamma)
    inv = 1.0 / sqrt_gam

    t_r = np.zeros((2 * g, 2 * g), dtype=complex)
    t_r[:g, :g] = tm * inv
    t_r[:g, g:] = tm * (1j * inv)
    t_r[g:, :g] = tm * (basis.mu_plus * inv)
    t_r[g:, g:] = tm * (1j * basis.mu_minus * inv)

    t_l = np.zeros((2 * g, 2 * g), dtype=complex)
    t_l[:g, :g] = (-basis.mu_minus * inv)[:, None] * tm.T
    t_l[:g, g:] = inv[:, None] * tm.T
    t_l[g:, :g] = (-1j * basis.mu_plus * inv)[:, None] * tm.T
    t_l[g:, g:] = (1j * inv)[:, None] * tm.T

    bi = np.abs(t_l @ t_r - np.eye(2 * g)).max()
    if bi >= 1e-8:
        raise ConvergenceError(f"bi-orthogonality off by {bi:.2e}")

    scale = np.outer(sys.inv_sqrt_m, sys.inv_sqrt_m)
    qm = np.zeros((2 * g, 2 * g))
    qm[:g, :g] = np.asarray(q11, dtype=float) * scale
    qm[g:, g:] = np.asarray(q22, dtype=float) * scale

    mu = np.concatenate([basis.mu_plus, basis.mu_minus])
    qbar = t_r.T @ qm @ t_r
    xbar = -qbar / (mu[:, None] + mu[None, :])
    x = t_l.T @ xbar @ t_l

    imag = np.abs(x.imag).max()
    if imag >= 1e-10 * max(np.abs(x.real).max(), 1.0):
        raise ConvergenceError(f"Gramian has imaginary residue {imag:.2e}")
    return x.real


def lyapunov_dense(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Independent oracle: solve A' X + X A = -Q by Kronecker vectorization.

    Deliberately naive -- an O(n^6) dense solve whose only sophistication is
    the residual check, so it cannot share failure modes with the eigenbasis
    path.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    n = a.shape[0]
    eigs = np.linalg.eigvals(a)
    if eigs.real.max() >= 0:
        raise NotHurwitzError(
            f"state matrix has eigenvalue with Re = {eigs.real.max():.3e} >= 0")
    eye = np.eye(n)
    system = np.kron(a.T, eye) + np.kron(eye, a.T)
    x = np.linalg.solve(system, -q.reshape(-1)).reshape(n, n)
    x = 0.5 * (x + x.T)
    residual = np.abs(a.T @ x + x @ a + q).max()
    if residual > 1e-9 * max(np.abs(q).max(), 1e-300):
        raise ConvergenceError(f"Lyapunov residual {residual:.2e} too large")
    return x
