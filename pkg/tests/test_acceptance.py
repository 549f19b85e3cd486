"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line with its measured numbers.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criterion 7's quoted
validity-bound value is asserted as stated even though this repository's
transcription reproduces it only under a factor-2 inertia-convention reading;
see docs/ieee118_transcription.md.
"""

import math
import time

import numpy as np
import pytest

import gridstress as gs
from gridstress.contingency import CaseClass, MeasureKind
from gridstress.errors import BridgeLineError, DenominatorError
from gridstress.gridio import Bus, BusKind, load_case
from gridstress.gramian import (
    SecondOrderSystem,
    lyapunov_dense,
    modal_basis,
    state_matrix,
    x22_angle,
    x22_frequency,
)
from gridstress.laplacian import (
    build_laplacian,
    eigendecompose,
    fit_pole_limit,
    resistance_matrix,
)
from gridstress.kron import dc_power_flow, reduce_case
from gridstress.simulator import tau_validity_bound
from gridstress.sweep import SweepOptions, evaluate_case, rank_rows
from helpers import random_connected_case, random_spd_system

EPS_SWEEP = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7)


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} ({name}): {detail}"


def full_q(sys, q11, q22):
    g = sys.g
    scale = np.outer(sys.inv_sqrt_m, sys.inv_sqrt_m)
    qm = np.zeros((2 * g, 2 * g))
    qm[:g, :g] = q11 * scale
    qm[g:, g:] = q22 * scale
    return qm


def test_criterion_01_oracle_equivalence():
    rng = np.random.default_rng(2024)
    start = time.monotonic()
    worst = 0.0
    lines_checked = 0
    for k in range(200):
        case = random_connected_case(rng, n_range=(4, 12),
                                     b_range=(0.5, 5.0), mixed=True,
                                     uniform_m=(k % 2 == 0) or k < 100)
        _, spectrum, red = reduce_case(case)
        theta = dc_power_flow(spectrum, case.injections)
        uniform_m = red.uniform_inertia is not None
        for ln in case.faultable_lines:
            try:
                sc = gs.classify(ln, case, theta, tau=0.02)
            except BridgeLineError:
                continue
            kinds = [MeasureKind.PRIMARY_CONTROL]
            if uniform_m:
                kinds.append(MeasureKind.ANGLE_COHERENCE)
            for kind in kinds:
                try:
                    if kind is MeasureKind.ANGLE_COHERENCE:
                        res = gs.angle_coherence(sc, red, spectrum)
                    else:
                        res = gs.primary_control_effort(sc, red)
                    gram = gs.gramian_measure(sc, red, kind)
                except DenominatorError:
                    continue
                closed = res.closed_form
                scale = max(abs(closed), abs(gram))
                if scale <= res.noise_floor:
                    continue        # zero measure within cancellation noise
                fit = gs.sweep_measure(sc, red, kind, epsilons=EPS_SWEEP)
                tol = max(1e-7 * scale, res.noise_floor)
                worst = max(worst, abs(closed - gram) / tol * 1e-7,
                            abs(closed - fit.limit) / tol * 1e-7)
                assert abs(closed - gram) <= tol
                assert abs(closed - fit.limit) <= tol
                lines_checked += 1
    elapsed = time.monotonic() - start
    report(1, "oracle equivalence",
           worst <= 1e-7 and elapsed < 60.0,
           f"{lines_checked} measure evaluations, worst rel dev "
           f"{worst:.2e} <= 1e-7, {elapsed:.1f}s < 60s")


def test_criterion_02_lyapunov_correctness():
    rng = np.random.default_rng(2025)
    start = time.monotonic()
    worst = 0.0
    for _ in range(50):
        g = int(rng.integers(2, 11))
        L, m, gamma = random_spd_system(rng, g)
        sys = SecondOrderSystem(l_eff=L, m=m, gamma=gamma, epsilon=1e-3)
        basis = modal_basis(sys)
        a = state_matrix(sys)

        q22 = rng.normal(size=(g, g))
        q22 = q22 @ q22.T
        x = lyapunov_dense(a, full_q(sys, np.zeros((g, g)), q22))
        got = x22_frequency(basis, q22).x22
        ref = np.abs(x[g:, g:]).max()
        worst = max(worst, np.abs(got - x[g:, g:]).max() / max(ref, 1e-300))

        q11 = rng.normal(size=(g, g))
        q11 = q11 @ q11.T
        x = lyapunov_dense(a, full_q(sys, q11, np.zeros((g, g))))
        got = x22_angle(basis, q11).x22
        ref = np.abs(x[g:, g:]).max()
        worst = max(worst, np.abs(got - x[g:, g:]).max() / max(ref, 1e-300))

        residual = np.abs(a.T @ x + x @ a + full_q(sys, q11,
                                                   np.zeros((g, g)))).max()
        assert residual <= 1e-9 * max(np.abs(q11).max(), 1.0)
    elapsed = time.monotonic() - start
    report(2, "Lyapunov correctness",
           worst <= 1e-7 and elapsed < 30.0,
           f"worst rel dev {worst:.2e} <= 1e-7, residuals <= 1e-9, "
           f"{elapsed:.1f}s < 30s")


def test_criterion_03_frequency_gramian_identity():
    rng = np.random.default_rng(2026)
    worst = 0.0
    for _ in range(50):
        g = int(rng.integers(2, 11))
        L, m, gamma = random_spd_system(rng, g)
        d = gamma * m
        for eps in EPS_SWEEP:
            sys = SecondOrderSystem(l_eff=L, m=m, gamma=gamma, epsilon=eps)
            block = x22_frequency(modal_basis(sys), np.diag(d))
            worst = max(worst, np.abs(block.x22 - 0.5 * np.eye(g)).max())
    report(3, "frequency Gramian identity", worst < 1e-12,
           f"max |X22 - I/2| = {worst:.2e} < 1e-12 over 50 systems x 5 eps")


def test_criterion_04_resistance_metric_suite():
    rng = np.random.default_rng(2027)
    worst_slack = 0.0
    for _ in range(100):
        case = random_connected_case(rng, n_range=(4, 12))
        s = eigendecompose(build_laplacian(case))
        omega = resistance_matrix(s)
        n = case.n
        assert np.abs(np.diag(omega)).max() <= 1e-10
        assert omega[~np.eye(n, dtype=bool)].min() > 0
        for k in range(n):
            slack = (omega - (omega[:, [k]] + omega[[k], :])).max()
            worst_slack = max(worst_slack, slack)
            assert slack <= 1e-10
    s2 = eigendecompose(build_laplacian([(0, 1, 2.0)]))
    two_node = gs.resistance_distance(s2, 0, 1)
    s3 = eigendecompose(build_laplacian([(0, 1, 1.0), (1, 2, 1.0),
                                         (0, 2, 1.0)]))
    tri = gs.resistance_distance(s3, 0, 2)
    exact = (abs(two_node - 0.5) <= 1e-12 * 0.5
             and abs(tri - 2.0 / 3.0) <= 1e-12 * (2.0 / 3.0))
    report(4, "resistance metric suite", exact,
           f"axioms on 100 graphs (worst triangle slack {worst_slack:.1e}), "
           f"1/b = {two_node!r}, triangle = {tri!r}")


def _scale_inertia(case, factor=None, rng=None, mean=None):
    """Uniform rescale (factor) or heterogeneous resample (rng, mean) of
    machine inertias, keeping d/m = 0.5 1/s."""
    buses = []
    for b in case.buses:
        if b.kind is BusKind.ACTIVE:
            if factor is not None:
                m = b.inertia * factor
            else:
                m = mean * float(rng.uniform(0.2, 1.8))
            buses.append(Bus(b.id, b.kind, b.injection, m, 0.5 * m))
        else:
            buses.append(b)
    return gs.GridCase(name=case.name, base_frequency=case.base_frequency,
                       buses=tuple(buses), lines=case.lines,
                       original_ids=case.original_ids)


def _gengen_regression(case, kind):
    options = SweepOptions(measures=(kind,), taus=(0.02,),
                           run_simulation=True, dt=1e-4, store_stride=10,
                           class_filter=frozenset({CaseClass.GEN_GEN}))
    result = evaluate_case(case, options)
    xs, ys = [], []
    for row in result.rows:
        if row.extras.get("error") or row.extras.get("sim_rescaled") is None:
            continue
        xs.append(row.extras["topology_factor"])
        ys.append(row.extras["sim_rescaled"])
    xs, ys = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * xs + intercept
    ss_res = float(np.sum((ys - fitted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    return len(xs), float(slope), 1.0 - ss_res / ss_tot


@pytest.fixture(scope="module")
def ieee118(ieee118_path):
    return load_case(ieee118_path)


def test_criterion_05_dirac_limit_validation(ieee118):
    n_low, slope_low, r2_low = _gengen_regression(
        ieee118, MeasureKind.ANGLE_COHERENCE)
    heavy = _scale_inertia(ieee118, factor=10.0)
    n_hi, slope_hi, r2_hi = _gengen_regression(
        heavy, MeasureKind.ANGLE_COHERENCE)
    ok = (abs(slope_low - 1.0) <= 0.1 and r2_low > 0.95
          and abs(slope_hi - 1.0) <= 0.03)
    report(5, "Dirac-limit validation (angle coherence)", ok,
           f"low inertia: {n_low} lines, slope {slope_low:.4f} (1 +/- 0.1), "
           f"R^2 {r2_low:.4f} > 0.95; 10x inertia: slope {slope_hi:.4f} "
           f"(1 +/- 0.03), R^2 {r2_hi:.4f}")


def test_criterion_06_primary_control_law(ieee118):
    rng = np.random.default_rng(118)
    mean_m = 200.0 / (2 * math.pi * ieee118.base_frequency)
    hetero = _scale_inertia(ieee118, rng=rng, mean=mean_m)
    n, slope, r2 = _gengen_regression(hetero, MeasureKind.PRIMARY_CONTROL)
    ok = abs(slope - 1.0) <= 0.05
    report(6, "primary-control law (heterogeneous inertia)", ok,
           f"{n} lines, slope {slope:.4f} (1 +/- 0.05), R^2 {r2:.4f}")


def test_criterion_07_validity_bound_scaling(ieee118):
    _, _, red = reduce_case(ieee118)
    bound = tau_validity_bound(red)
    heavy = _scale_inertia(ieee118, factor=10.0)
    _, _, red10 = reduce_case(heavy)
    bound10 = tau_validity_bound(red10)
    ok = abs(bound10 - 10.0 * bound) <= 1e-12 * bound10
    report(7, "validity bound scales 10x with inertia", ok,
           f"bound {bound:.5f} s, 10x inertia {bound10:.5f} s")


def test_criterion_07_quoted_validity_bound(ieee118):
    """The paper quotes gamma*m/lambda2 = 0.025 s for the H = 10 s, f = 50 Hz,
    gamma = 0.5 1/s configuration.  With the stated m = 2H/(2 pi f) our
    transcription gives twice that; the quoted number is reproduced (within
    1.6%) only under the alternative M = H/omega_s inertia convention, which
    the reference evidently used.  Asserted as stated; expected to fail."""
    _, _, red = reduce_case(ieee118)
    bound = tau_validity_bound(red)
    alt = 0.5 * (red.uniform_inertia / 2.0) / red.spectrum.lambda2
    ok = abs(bound - 0.025) <= 0.1 * 0.025
    report(7, "quoted validity bound 0.025 s (+/- 10%)", ok,
           f"text convention m = 2H/2pif: {bound:.5f} s; halved-inertia "
           f"convention: {alt:.5f} s vs quoted 0.025 s")


def _top_measure_load_rank(case, kind):
    result = evaluate_case(case, SweepOptions(measures=(kind,), taus=(0.02,)))
    ranked = [r for r in rank_rows(result.rows)
              if r.measure_closed is not None]
    top = min(ranked, key=lambda r: r.extras["measure_rank"])
    return top.extras["load_rank"], f"{top.line_from}-{top.line_to}"


def test_criterion_08_non_monotonic_ranking(ieee118):
    # reference protocol: angle panel with uniform inertia; primary panel
    # with heterogeneous inertias (with uniform inertia the machine-machine
    # effort is proportional to P^2 by construction).  The primary outcome
    # depends on the inertia draw, so it is asserted over the majority of a
    # fixed seed set rather than a single draw.
    angle_rank, angle_line = _top_measure_load_rank(
        ieee118, MeasureKind.ANGLE_COHERENCE)

    primary_ranks = []
    for seed in range(11):
        rng = np.random.default_rng(seed)
        hetero = _scale_inertia(ieee118, rng=rng,
                                mean=float(ieee118.inertias.max()))
        rank, _ = _top_measure_load_rank(hetero, MeasureKind.PRIMARY_CONTROL)
        primary_ranks.append(rank)
    non_monotone = sum(1 for r in primary_ranks if r != 1)

    ok = angle_rank != 1 and non_monotone > len(primary_ranks) // 2
    report(8, "non-monotonic ranking", ok,
           f"angle: top measure on line {angle_line} carrying the "
           f"#{angle_rank} load; primary: top-measure load ranks over 11 "
           f"inertia draws {primary_ranks}, non-monotonic in "
           f"{non_monotone}/11 [paper: #6 angle, #3 primary]")


def test_criterion_09_centrality_identities():
    rng = np.random.default_rng(2029)
    worst_formula = 0.0
    worst_sweep = 0.0
    for _ in range(30):
        case = random_connected_case(rng, n_range=(4, 12), mixed=False,
                                     uniform_m=True)
        s = eigendecompose(build_laplacian(case))
        omega = resistance_matrix(s)
        d = float(case.dampings[0])
        n = case.n
        i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
        value = gs.pulse_difference(s, i, j, d)
        formula = (omega[i].sum() - omega[j].sum()) / (2 * d * n)
        worst_formula = max(worst_formula,
                            abs(value - formula) / max(abs(formula), 1e-12))
        diffs = [gs.nodal_pulse_measure(s, i, e, d)
                 - gs.nodal_pulse_measure(s, j, e, d) for e in EPS_SWEEP]
        limit = fit_pole_limit(EPS_SWEEP, diffs).limit
        worst_sweep = max(worst_sweep,
                          abs(value - limit) / max(abs(value), 1e-12))
    ok = worst_formula <= 1e-9 and worst_sweep <= 1e-6
    report(9, "centrality identities", ok,
           f"formula dev {worst_formula:.2e} <= 1e-9, sweep-limit dev "
           f"{worst_sweep:.2e} <= 1e-6")


def test_criterion_10_divergence_detection():
    rng = np.random.default_rng(2030)
    worst = 0.0
    for _ in range(20):
        case = random_connected_case(rng, n_range=(4, 12), mixed=False,
                                     uniform_m=True)
        s = eigendecompose(build_laplacian(case))
        d = float(case.dampings[0])
        node = int(rng.integers(0, case.n))
        values = [gs.nodal_pulse_measure(s, node, e, d) for e in EPS_SWEEP]
        fit = fit_pole_limit(EPS_SWEEP, values)
        assert fit.diverges
        expect = 1.0 / (2 * d * case.n)
        worst = max(worst, abs(fit.pole_coefficient - expect) / expect)
    report(10, "divergence detection", worst <= 0.01,
           f"fitted pole coefficient within {worst:.2e} of 1/(2dN) "
           "(tolerance 1%)")
