"""Transient performance measures of electric power networks under line
contingencies: closed forms on the Kron-reduced network, regularized
observability Gramians, and a swing-equation simulator that validates them.
"""

__version__ = "0.1.0"

from .gridio import Bus, BusKind, GridCase, Line, load_case, write_case, write_report
from .laplacian import (
    Spectrum,
    build_laplacian,
    eigendecompose,
    epsilon_sweep_quadratic,
    pseudoinverse_quadratic,
    regularized_inverse_quadratic,
    resistance_distance,
    resistance_matrix,
)
from .kron import BlockView, ReducedSystem, dc_power_flow, kron_reduce, line_flow, partition, reduce_case
from .gramian import (
    GramianBlock,
    ModalBasis,
    SecondOrderSystem,
    lyapunov_dense,
    lyapunov_eigenbasis,
    modal_basis,
    second_order_system,
    x22_angle,
    x22_angle_deflated,
    x22_frequency,
)
from .contingency import (
    BVector,
    CaseClass,
    FaultScenario,
    MeasureKind,
    MeasureResult,
    angle_coherence,
    average_resistance_distance,
    b_vector,
    classify,
    gramian_measure,
    is_bridge,
    nodal_pulse_measure,
    primary_control_effort,
    pulse_difference,
    sweep_measure,
)
from .simulator import (
    FaultWindowDynamics,
    Trajectory,
    fault_window,
    performance_integral,
    rk4_lti,
    simulate,
    tau_validity_bound,
)
from .sweep import SweepOptions, SweepResult, evaluate_case, rank_rows
