"""Line-fault classification, impulse vectors and closed-form performance
measures, plus the nodal-pulse measures and centrality quantities.

A fault on line alpha-beta maps onto the Kron-reduced network differently
depending on whether the endpoints are two machines, two passive buses, or
one of each; the three impulse vectors and closed forms below follow that
case split.  Every closed form is cross-checked internally against the
Gramian quadratic form of its own impulse vector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    BridgeLineError,
    ConvergenceError,
    DenominatorError,
    NonUniformInertiaError,
    ValidationError,
)
from .gridio import BusKind, GridCase, Line
from .gramian import (
    modal_basis,
    second_order_system,
    lyapunov_eigenbasis,
    x22_angle_deflated,
)
from .kron import ReducedSystem
from .laplacian import (
    DEFAULT_EPSILON_SWEEP,
    Spectrum,
    SweepFit,
    fit_pole_limit,
    pseudoinverse_quadratic,
    regularized_inverse_quadratic,
    resistance_distance,
)

#: fault-case denominators smaller than this are treated as degenerate
DENOMINATOR_TOL = 1e-10


class CaseClass(enum.Enum):
    GEN_GEN = "gen-gen"
    PASSIVE_PASSIVE = "passive-passive"
    GEN_PASSIVE = "gen-passive"


class MeasureKind(enum.Enum):
    ANGLE_COHERENCE = "angle"
    PRIMARY_CONTROL = "primary"


@dataclass(frozen=True)
class FaultScenario:
    """A classified line fault; (alpha, beta) is the analysis orientation
    (the machine end first on machine-passive lines)."""

    line: Line
    case_class: CaseClass
    tau: float
    p_flow: float               # pre-fault flow in the line's own orientation
    alpha: int
    beta: int
    splits_network: bool = False


def is_bridge(case: GridCase, line: Line) -> bool:
    """Does removing this line disconnect the network (all branches count)?"""
    parent = list(range(case.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    skip = (line.key(), line.is_transformer)
    for ln in case.lines:
        if (ln.key(), ln.is_transformer) == skip:
            continue
        parent[find(ln.from_bus)] = find(ln.to_bus)
    return len({find(i) for i in range(case.n)}) > 1


def classify(line: Line, case: GridCase, theta: np.ndarray, tau: float,
             allow_bridge: bool = False) -> FaultScenario:
    """Build the fault scenario for a line: case class, orientation, pre-fault
    flow and the split check.

    Bridges raise BridgeLineError unless ``allow_bridge`` is set: the
    Dirac-limit closed forms stay well defined on a bridge (the network is
    intact before and after the instantaneous fault), but finite-window
    simulation is not, so sweeps exclude them.
    """
    if line.is_transformer:
        raise ValidationError("transformer branches are not faultable")
    kinds = (case.buses[line.from_bus].kind, case.buses[line.to_bus].kind)
    alpha, beta = line.from_bus, line.to_bus
    if kinds == (BusKind.ACTIVE, BusKind.ACTIVE):
        case_class = CaseClass.GEN_GEN
    elif kinds == (BusKind.PASSIVE, BusKind.PASSIVE):
        case_class = CaseClass.PASSIVE_PASSIVE
    else:
        case_class = CaseClass.GEN_PASSIVE
        if kinds[0] is BusKind.PASSIVE:
            alpha, beta = beta, alpha
    splits = is_bridge(case, line)
    if splits and not allow_bridge:
        raise BridgeLineError(
            f"line {line.from_bus}-{line.to_bus} is a bridge; removing it "
            "splits the network")
    return FaultScenario(line=line, case_class=case_class, tau=tau,
                         p_flow=float(line.susceptance
                                      * (theta[line.from_bus]
                                         - theta[line.to_bus])),
                         alpha=alpha, beta=beta, splits_network=splits)


@dataclass(frozen=True)
class BVector:
    """Impulse-equivalent state [0; M^{-1/2} v] of a line fault, where v is
    the angular-momentum kick delivered to the machines."""

    b: np.ndarray

    @property
    def g(self) -> int:
        return self.b.size // 2

    @cached_property
    def lower(self) -> np.ndarray:
        return self.b[self.g:]


def _oriented_flow(scenario: FaultScenario, red: ReducedSystem) -> float:
    """b_ab (theta_a - theta_b) in the (alpha, beta) orientation."""
    cc = scenario.case_class
    if cc is CaseClass.GEN_GEN:
        da = red.theta_g[red.g_index(scenario.alpha)]
        db = red.theta_g[red.g_index(scenario.beta)]
    elif cc is CaseClass.PASSIVE_PASSIVE:
        da = red.theta_c[red.c_index(scenario.alpha)]
        db = red.theta_c[red.c_index(scenario.beta)]
    else:
        da = red.theta_g[red.g_index(scenario.alpha)]
        db = red.theta_c[red.c_index(scenario.beta)]
    return float(scenario.line.susceptance * (da - db))


def _check_denominator(value: float, scenario: FaultScenario) -> float:
    if abs(value) < DENOMINATOR_TOL:
        raise DenominatorError(
            f"fault denominator {value:.3e} on line "
            f"{scenario.line.from_bus}-{scenario.line.to_bus}; the fault "
            "effectively splits the passive subgrid")
    return value


def _passive_pair_quadratic(scenario: FaultScenario,
                            red: ReducedSystem) -> tuple[np.ndarray, float]:
    """(L_cc^{-1} e_(ab), e_(ab)' L_cc^{-1} e_(ab)) for a passive pair."""
    e = np.zeros(red.blocks.passive.size)
    e[red.c_index(scenario.alpha)] = 1.0
    e[red.c_index(scenario.beta)] = -1.0
    y = red.blocks.solve_cc(e)
    return y, float(e @ y)


def _momentum_kick(scenario: FaultScenario, red: ReducedSystem) -> np.ndarray:
    """The machine-frame momentum vector v with B = [0; M^{-1/2} v]."""
    b = scenario.line.susceptance
    tau = scenario.tau
    p = _oriented_flow(scenario, red)
    cc = scenario.case_class
    if cc is CaseClass.GEN_GEN:
        v = np.zeros(red.g)
        v[red.g_index(scenario.alpha)] = tau * p
        v[red.g_index(scenario.beta)] = -tau * p
        return v
    if cc is CaseClass.PASSIVE_PASSIVE:
        y, q = _passive_pair_quadratic(scenario, red)
        den = _check_denominator(1.0 - b * q, scenario)
        return -(tau * p / den) * (red.blocks.l_gc @ y)
    e_beta = np.zeros(red.blocks.passive.size)
    e_beta[red.c_index(scenario.beta)] = 1.0
    y = red.blocks.solve_cc(e_beta)
    den = _check_denominator(1.0 - b * float(y[red.c_index(scenario.beta)]),
                             scenario)
    v = red.blocks.l_gc @ y
    v[red.g_index(scenario.alpha)] += 1.0
    return (tau * p / den) * v


def b_vector(scenario: FaultScenario, red: ReducedSystem) -> BVector:
    """Impulse state of the fault in scaled coordinates."""
    v = _momentum_kick(scenario, red)
    b = np.zeros(2 * red.g)
    b[red.g:] = v / np.sqrt(red.m)
    return BVector(b=b)


@dataclass(frozen=True)
class MeasureResult:
    """A performance-measure value with its factored structure:
    closed_form = prefactor * p_flow^2 * tau^2 * topology_factor.

    ``noise_floor`` is the absolute cancellation-noise scale of the closed
    form (nonzero topology factors can be exact zeros up to roundoff, e.g.
    for faults hidden behind a single-machine anchor); comparisons against
    other computation routes should not resolve below it.
    """

    scenario: FaultScenario
    measure_kind: MeasureKind
    closed_form: float
    topology_factor: float
    prefactor: float
    noise_floor: float
    simulated: float | None = None


def _assemble(scenario: FaultScenario, kind: MeasureKind, prefactor: float,
              topology_factor: float, cancel_scale: float) -> MeasureResult:
    base = prefactor * scenario.p_flow ** 2 * scenario.tau ** 2
    return MeasureResult(scenario=scenario, measure_kind=kind,
                         closed_form=base * topology_factor,
                         topology_factor=topology_factor,
                         prefactor=prefactor,
                         noise_floor=1e-12 * abs(base) * cancel_scale)


def _crosscheck(label: str, closed: float, gramian: float, rtol: float,
                floor: float) -> None:
    """Require relative agreement; ``floor`` is the cancellation-noise scale
    of the closed form (a measure that is exactly zero, e.g. a fault hidden
    behind a single-machine anchor, has no relative scale)."""
    tol = max(rtol * max(abs(closed), abs(gramian)), floor)
    if abs(closed - gramian) > tol:
        raise ConvergenceError(
            f"{label}: closed form {closed:.12e} and Gramian path "
            f"{gramian:.12e} disagree beyond {rtol:.0e}")


def angle_coherence(scenario: FaultScenario, red: ReducedSystem,
                    spectrum_ph: Spectrum,
                    omega_ab: float | None = None) -> MeasureResult:
    """Integrated squared angle deviations for a line fault (uniform inertia).

    The topology factor is the physical-network resistance distance for a
    machine-machine fault, corrected by passive-block terms otherwise.  The
    value is cross-checked against the deflated Gramian quadratic form.
    """
    m0 = red.uniform_inertia
    if m0 is None:
        raise NonUniformInertiaError(
            "angle coherence closed form requires uniform machine inertia")
    gamma = red.require_gamma()
    d = gamma * m0
    if omega_ab is None:
        omega_ab = resistance_distance(spectrum_ph, scenario.alpha,
                                       scenario.beta)
    b = scenario.line.susceptance
    cc = scenario.case_class
    if cc is CaseClass.GEN_GEN:
        topo = omega_ab
        cancel = abs(omega_ab)
    elif cc is CaseClass.PASSIVE_PASSIVE:
        _, q = _passive_pair_quadratic(scenario, red)
        den = _check_denominator(1.0 - b * q, scenario)
        topo = (omega_ab - q) / den ** 2
        cancel = (abs(omega_ab) + abs(q)) / den ** 2
    else:
        e_beta = np.zeros(red.blocks.passive.size)
        e_beta[red.c_index(scenario.beta)] = 1.0
        q = float(red.blocks.solve_cc(e_beta)[red.c_index(scenario.beta)])
        den = _check_denominator(1.0 - b * q, scenario)
        topo = (omega_ab - q) / den ** 2
        cancel = (abs(omega_ab) + abs(q)) / den ** 2
    result = _assemble(scenario, MeasureKind.ANGLE_COHERENCE, 1.0 / (2 * d),
                       topo, cancel)

    v = _momentum_kick(scenario, red)
    via_gramian = pseudoinverse_quadratic(red.spectrum, v) / (2 * d)
    _crosscheck("angle coherence", result.closed_form, via_gramian, 1e-8,
                result.noise_floor)
    return result


def primary_control_effort(scenario: FaultScenario,
                           red: ReducedSystem) -> MeasureResult:
    """Integrated damping-weighted squared frequency deviations (primary
    control effort); heterogeneous inertias allowed, uniform d_i/m_i required."""
    red.require_gamma()
    cc = scenario.case_class
    b = scenario.line.susceptance
    if cc is CaseClass.GEN_GEN:
        topo = (1.0 / red.m[red.g_index(scenario.alpha)]
                + 1.0 / red.m[red.g_index(scenario.beta)])
        cancel = topo
    elif cc is CaseClass.PASSIVE_PASSIVE:
        y, q = _passive_pair_quadratic(scenario, red)
        den = _check_denominator(1.0 - b * q, scenario)
        u = red.blocks.l_cg.T @ y
        u_bar = np.abs(red.blocks.l_cg).T @ np.abs(y)
        topo = float(np.sum(u ** 2 / red.m)) / den ** 2
        cancel = float(np.sum(u_bar ** 2 / red.m)) / den ** 2
    else:
        e_beta = np.zeros(red.blocks.passive.size)
        e_beta[red.c_index(scenario.beta)] = 1.0
        y = red.blocks.solve_cc(e_beta)
        den = _check_denominator(
            1.0 - b * float(y[red.c_index(scenario.beta)]), scenario)
        u = red.blocks.l_cg.T @ y
        u_bar = np.abs(red.blocks.l_cg).T @ np.abs(y)
        u_bar[red.g_index(scenario.alpha)] += 1.0
        cancel = float(np.sum(u_bar ** 2 / red.m)) / den ** 2
        u[red.g_index(scenario.alpha)] += 1.0
        topo = float(np.sum(u ** 2 / red.m)) / den ** 2
    result = _assemble(scenario, MeasureKind.PRIMARY_CONTROL, 0.5, topo,
                       cancel)

    w = b_vector(scenario, red).lower
    _crosscheck("primary control effort", result.closed_form,
                0.5 * float(w @ w), 1e-10, result.noise_floor)
    return result


def gramian_measure(scenario: FaultScenario, red: ReducedSystem,
                    kind: MeasureKind) -> float:
    """B' X^(2,2) B through the deflated Gramian path (no closed-form
    shortcuts); the oracle partner of the closed forms above."""
    w = b_vector(scenario, red).lower
    if kind is MeasureKind.PRIMARY_CONTROL:
        # Q22 = D makes X22 = I/2 for every epsilon
        return 0.5 * float(w @ w)
    sys0 = second_order_system(red, 0.0)
    block = x22_angle_deflated(modal_basis(sys0), np.eye(red.g))
    return float(w @ block.x22 @ w)


def sweep_measure(scenario: FaultScenario, red: ReducedSystem,
                  kind: MeasureKind,
                  epsilons: Sequence[float] = DEFAULT_EPSILON_SWEEP) -> SweepFit:
    """Measure via the full eigenbasis Lyapunov Gramian over an epsilon sweep.

    A third, independent route: complex bi-orthogonal algebra at finite
    epsilon, Richardson-extrapolated to zero.
    """
    g = red.g
    if kind is MeasureKind.ANGLE_COHERENCE:
        q11, q22 = np.eye(g), np.zeros((g, g))
    else:
        q11, q22 = np.zeros((g, g)), np.diag(red.d)
    b = b_vector(scenario, red).b
    values = []
    for eps in epsilons:
        x = lyapunov_eigenbasis(second_order_system(red, eps), q11, q22)
        values.append(float(b @ x @ b))
    return fit_pole_limit(epsilons, values)


def nodal_pulse_measure(spectrum: Spectrum, node: int, epsilon: float,
                        damping: float) -> float:
    """Angle-coherence response to a single power pulse at one node of a
    uniform all-machine network; diverges like 1/(2 d N epsilon) as the
    regularization is removed."""
    e = np.zeros(spectrum.n)
    e[node] = 1.0
    return regularized_inverse_quadratic(spectrum, e, epsilon) / (2 * damping)


def pulse_difference(spectrum: Spectrum, node_a: int, node_b: int,
                     damping: float) -> float:
    """Response difference of two opposite single-node pulses; finite without
    regularization because the marginal-mode divergence is node independent."""
    mask = spectrum.nonzero_mask
    ua = spectrum.vectors[node_a, mask]
    ub = spectrum.vectors[node_b, mask]
    lam = spectrum.eigenvalues[mask]
    return float(np.sum((ua ** 2 - ub ** 2) / lam)) / (2 * damping)


def average_resistance_distance(spectrum: Spectrum, node: int) -> float:
    """Mean resistance distance from a node to the whole network; its inverse
    is the node's closeness centrality."""
    mask = spectrum.nonzero_mask
    u = spectrum.vectors[node, mask]
    lam = spectrum.eigenvalues[mask]
    return float(np.sum((u ** 2 + 1.0 / spectrum.n) / lam))
