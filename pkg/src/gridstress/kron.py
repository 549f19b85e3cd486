"""Active/passive partitioning, DC power flow and Kron reduction.

The passive block L_cc is factorized once (Cholesky) and reused by every
contingency; the factorization is read-only after construction, so a
ReducedSystem can be shared freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import ImbalanceError, NonUniformDampingError, SingularBlockError
from .gridio import GridCase, Line
from .laplacian import Spectrum, build_laplacian, eigendecompose

#: relative tolerance for the uniform damping/inertia-ratio check
UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class BlockView:
    """Active/passive blocks of the physical Laplacian, with L_cc factorized."""

    l_gg: np.ndarray
    l_gc: np.ndarray
    l_cg: np.ndarray
    l_cc: np.ndarray
    active: np.ndarray            # physical indices of active buses
    passive: np.ndarray           # physical indices of passive buses
    cho_cc: tuple | None          # scipy cho_factor of l_cc (None if no passives)

    @property
    def g(self) -> int:
        return self.active.size

    def solve_cc(self, rhs: np.ndarray) -> np.ndarray:
        """Apply L_cc^{-1} (thread-safe, read-only factorization)."""
        if self.cho_cc is None:
            return np.zeros_like(rhs)
        return scipy.linalg.cho_solve(self.cho_cc, rhs)


def _passive_islands_attached(L: np.ndarray, active: np.ndarray,
                              passive: np.ndarray) -> bool:
    """True when every passive connected component touches an active bus."""
    active_set = set(int(i) for i in active)
    todo = set(int(i) for i in passive)
    adj = {i: set(np.nonzero(L[i] < 0)[0].tolist()) for i in todo}
    while todo:
        comp, stack = set(), [todo.pop()]
        touches = False
        while stack:
            u = stack.pop()
            comp.add(u)
            for v in adj.get(u, ()):
                if v in active_set:
                    touches = True
                elif v not in comp:
                    stack.append(v)
        if not touches:
            return False
        todo -= comp
    return True


def partition(L: np.ndarray, case: GridCase) -> BlockView:
    """Split the physical Laplacian into active/passive blocks and factorize
    the passive-passive block."""
    active = case.active_indices
    passive = case.passive_indices
    if active.size == 0:
        raise SingularBlockError("case has no active bus")

    l_gg = L[np.ix_(active, active)]
    l_gc = L[np.ix_(active, passive)]
    l_cg = L[np.ix_(passive, active)]
    l_cc = L[np.ix_(passive, passive)]

    cho_cc = None
    if passive.size:
        if not _passive_islands_attached(L, active, passive):
            raise SingularBlockError(
                "passive island with no connection to an active bus")
        try:
            cho_cc = scipy.linalg.cho_factor(l_cc)
        except scipy.linalg.LinAlgError as exc:
            raise SingularBlockError(
                f"passive block is not positive definite: {exc}") from exc
    return BlockView(l_gg=l_gg, l_gc=l_gc, l_cg=l_cg, l_cc=l_cc,
                     active=active, passive=passive, cho_cc=cho_cc)


def dc_power_flow(spectrum: Spectrum, injections: np.ndarray) -> np.ndarray:
    """Solve L theta = P in the zero-mean gauge (deflated pseudoinverse)."""
    P = np.asarray(injections, dtype=float)
    if abs(math.fsum(P.tolist())) > 1e-9:
        raise ImbalanceError("injections do not sum to zero")
    c = spectrum.vectors.T @ P
    mask = spectrum.nonzero_mask
    theta = spectrum.vectors[:, mask] @ (c[mask] / spectrum.eigenvalues[mask])
    return theta - theta.mean()


@dataclass(frozen=True)
class ReducedSystem:
    """Kron-reduced network plus the machine matrices and pre-fault angles.

    ``theta_g``/``theta_c`` are the physical-network DC angles (zero mean over
    all physical buses) restricted to the active/passive index sets; fault
    cases 2 and 3 need the passive angles.
    """

    l_red: np.ndarray
    p_red: np.ndarray
    m: np.ndarray                 # machine inertias, aligned with blocks.active
    d: np.ndarray                 # machine dampings
    theta_g: np.ndarray
    theta_c: np.ndarray
    blocks: BlockView
    gamma: float | None           # uniform d_i/m_i, None if heterogeneous

    @property
    def g(self) -> int:
        return self.m.size

    @cached_property
    def spectrum(self) -> Spectrum:
        return eigendecompose(self.l_red)

    @cached_property
    def uniform_inertia(self) -> float | None:
        m0 = float(self.m[0])
        if np.all(np.abs(self.m - m0) <= UNIFORM_RTOL * m0):
            return m0
        return None

    def require_gamma(self) -> float:
        if self.gamma is None:
            raise NonUniformDampingError(
                "damping/inertia ratios d_i/m_i are not uniform")
        return self.gamma

    def g_index(self, bus: int) -> int:
        """Map a physical active-bus index to its position in the g block."""
        pos = int(np.searchsorted(self.blocks.active, bus))
        if pos >= self.g or self.blocks.active[pos] != bus:
            raise KeyError(f"bus {bus} is not active")
        return pos

    def c_index(self, bus: int) -> int:
        pos = int(np.searchsorted(self.blocks.passive, bus))
        if pos >= self.blocks.passive.size or self.blocks.passive[pos] != bus:
            raise KeyError(f"bus {bus} is not passive")
        return pos


def kron_reduce(blocks: BlockView, case: GridCase,
                theta: np.ndarray | None = None) -> ReducedSystem:
    """Schur-complement the passive buses out of the DC model.

    ``theta`` are full-network DC angles; when omitted they are computed from
    a fresh eigendecomposition of the physical Laplacian.
    """
    P = case.injections
    if theta is None:
        theta = dc_power_flow(eigendecompose(build_laplacian(case)), P)

    p_g = P[blocks.active]
    if blocks.passive.size:
        p_c = P[blocks.passive]
        x = blocks.solve_cc(np.column_stack([blocks.l_cg, p_c]))
        l_red = blocks.l_gg - blocks.l_gc @ x[:, :-1]
        p_red = p_g - blocks.l_gc @ x[:, -1]
    else:
        l_red = blocks.l_gg.copy()
        p_red = p_g.copy()
    l_red = 0.5 * (l_red + l_red.T)

    m = case.inertias[blocks.active]
    d = case.dampings[blocks.active]
    ratios = d / m
    gamma: float | None = float(ratios[0])
    if not np.all(np.abs(ratios - gamma) <= UNIFORM_RTOL * abs(gamma)):
        gamma = None

    return ReducedSystem(l_red=l_red, p_red=p_red, m=m, d=d,
                         theta_g=theta[blocks.active],
                         theta_c=theta[blocks.passive],
                         blocks=blocks, gamma=gamma)


def line_flow(theta: np.ndarray, line: Line) -> float:
    """Pre-fault power flow b_ij (theta_i - theta_j) on a physical line."""
    return float(line.susceptance * (theta[line.from_bus] - theta[line.to_bus]))


def reduce_case(case: GridCase) -> tuple[np.ndarray, Spectrum, ReducedSystem]:
    """Convenience pipeline: Laplacian, spectrum, DC flow, Kron reduction."""
    L = build_laplacian(case)
    spectrum = eigendecompose(L)
    theta = dc_power_flow(spectrum, case.injections)
    red = kron_reduce(partition(L, case), case, theta)
    return L, spectrum, red
