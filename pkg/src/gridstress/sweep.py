"""Contingency sweep orchestration: evaluate closed forms (and optionally
time-domain validations) for every faultable line of a case.

The sweep is embarrassingly parallel; every worker reads the same immutable
context (case, reduced system, physical spectrum, resistance matrix) and rows
are assembled in deterministic line order, so reports are identical for any
worker count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import contingency as cont
from .contingency import CaseClass, FaultScenario, MeasureKind
from .errors import BridgeLineError, GridStressError, NonUniformInertiaError
from .gramian import modal_basis, second_order_system, x22_angle
from .gridio import GridCase, ReportRow
from .kron import ReducedSystem, dc_power_flow, reduce_case
from .laplacian import Spectrum, resistance_matrix
from .simulator import (
    fault_window,
    performance_integral,
    simulate,
    tau_validity_bound,
)

logger = logging.getLogger(__name__)


def default_workers() -> int:
    env = os.environ.get("GRIDSTRESS_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring invalid GRIDSTRESS_WORKERS=%r", env)
    return 1


@dataclass(frozen=True)
class SweepOptions:
    measures: tuple[MeasureKind, ...] = (MeasureKind.ANGLE_COHERENCE,
                                         MeasureKind.PRIMARY_CONTROL)
    taus: tuple[float, ...] = (0.02,)
    run_simulation: bool = False
    dt: float = 1e-4
    t_max: float | None = None
    store_stride: int = 1
    workers: int = 1
    class_filter: frozenset[CaseClass] | None = None
    #: regularization for Gramian fallback paths; None = deflated exact limit
    epsilon: float | None = None


@dataclass
class SweepResult:
    rows: list[ReportRow]
    bridge_lines: list[tuple[int, int]]     # original bus ids
    warnings: list[str]

    @property
    def error_count(self) -> int:
        return sum(1 for r in self.rows if r.extras.get("error"))


@dataclass(frozen=True)
class _Context:
    case: GridCase
    red: ReducedSystem
    spectrum: Spectrum
    theta: np.ndarray
    omega: np.ndarray
    options: SweepOptions


_CTX: _Context | None = None


def _init_worker(ctx: _Context) -> None:
    global _CTX
    _CTX = ctx


def _measure_closed(scenario: FaultScenario, ctx: _Context,
                    kind: MeasureKind, omega_ab: float) -> dict:
    """Closed-form cell values plus notes for one (line, tau, kind)."""
    out: dict = {"closed": None, "topology_factor": None, "prefactor": None,
                 "note": None, "gramian": None}
    if kind is MeasureKind.PRIMARY_CONTROL:
        res = cont.primary_control_effort(scenario, ctx.red)
    else:
        try:
            res = cont.angle_coherence(scenario, ctx.red, ctx.spectrum,
                                       omega_ab=omega_ab)
        except NonUniformInertiaError:
            # documented fallback: report the Gramian quadratic form, which
            # is outside the closed-form's uniform-inertia scope
            eps = ctx.options.epsilon
            if eps is None:
                out["gramian"] = cont.gramian_measure(scenario, ctx.red, kind)
            else:
                block = x22_angle(modal_basis(second_order_system(ctx.red, eps)),
                                  np.eye(ctx.red.g))
                w = cont.b_vector(scenario, ctx.red).lower
                out["gramian"] = float(w @ block.x22 @ w)
            out["note"] = "beyond closed-form scope (non-uniform inertia)"
            return out
    out["closed"] = res.closed_form
    out["topology_factor"] = res.topology_factor
    out["prefactor"] = res.prefactor
    return out


def _line_rows(index: int) -> tuple[int, list[dict]]:
    """Evaluate one faultable line under the worker context.

    Returns plain dicts (cheap to pickle); ReportRow assembly happens in the
    parent so ordering stays deterministic.
    """
    ctx = _CTX
    case, red, opts = ctx.case, ctx.red, ctx.options
    line = case.faultable_lines[index]
    base = {
        "line_from": case.original_id(line.from_bus),
        "line_to": case.original_id(line.to_bus),
        "case_class": None,
        "p_flow": None,
        "omega_dist": float(ctx.omega[line.from_bus, line.to_bus]),
    }
    try:
        scenario = cont.classify(line, case, ctx.theta, tau=opts.taus[0])
    except BridgeLineError:
        return index, [{**base, "bridge": True}]
    except GridStressError as exc:
        return index, [{**base, "tau": opts.taus[0], "error": str(exc)}]

    base["case_class"] = scenario.case_class.value
    base["p_flow"] = scenario.p_flow
    if opts.class_filter is not None and scenario.case_class not in opts.class_filter:
        return index, []

    rows: list[dict] = []
    for tau in opts.taus:
        scen = replace(scenario, tau=tau)
        sims: dict[MeasureKind, float] | None = None
        sim_error: str | None = None
        if opts.run_simulation:
            try:
                dyn = fault_window(case, scen, red)
                traj = simulate(dyn, dt=opts.dt, t_max=opts.t_max,
                                store_stride=opts.store_stride)
                sims = {kind: performance_integral(traj, kind, red)
                        for kind in opts.measures}
                if traj.truncated:
                    sim_error = "simulation truncated at t_max"
            except GridStressError as exc:
                sim_error = str(exc)

        for kind in opts.measures:
            row = {**base, "tau": tau, "measure_kind": kind.value}
            try:
                cells = _measure_closed(scen, ctx, kind,
                                        base["omega_dist"])
            except GridStressError as exc:
                row["error"] = str(exc)
                rows.append(row)
                continue
            row["measure_closed"] = cells["closed"]
            row["topology_factor"] = cells["topology_factor"]
            if cells["note"]:
                row["note"] = cells["note"]
                row["measure_gramian"] = cells["gramian"]
            if sims is not None:
                sim = sims[kind]
                row["measure_sim"] = sim
                if cells["closed"]:
                    row["ratio"] = sim / cells["closed"]
                denom = cells["prefactor"]
                if denom and scen.p_flow and tau:
                    row["sim_rescaled"] = sim / (denom * scen.p_flow ** 2
                                                 * tau ** 2)
            if sim_error:
                row["error"] = sim_error
            rows.append(row)
    return index, rows


def _to_report_row(raw: dict) -> ReportRow:
    core = {k: raw.get(k) for k in ("line_from", "line_to", "case_class",
                                    "p_flow", "omega_dist", "tau")}
    extras_keys = ("measure_kind", "topology_factor", "ratio", "sim_rescaled",
                   "note", "measure_gramian", "error")
    extras = {k: raw[k] for k in extras_keys if raw.get(k) is not None}
    return ReportRow(measure_closed=raw.get("measure_closed"),
                     measure_sim=raw.get("measure_sim"),
                     extras=extras, **core)


def evaluate_case(case: GridCase, options: SweepOptions) -> SweepResult:
    """Run the full contingency sweep for a case."""
    _, spectrum, red = reduce_case(case)
    theta = dc_power_flow(spectrum, case.injections)
    omega = resistance_matrix(spectrum)
    ctx = _Context(case=case, red=red, spectrum=spectrum, theta=theta,
                   omega=omega, options=options)

    warnings: list[str] = []
    if red.gamma is not None:
        bound = tau_validity_bound(red)
        for tau in options.taus:
            if tau > bound:
                warnings.append(
                    f"tau = {tau:g} s exceeds the validity bound "
                    f"gamma*m/lambda2 = {bound:.4g} s; closed forms degrade")
    for msg in warnings:
        logger.warning("%s", msg)

    indices = range(len(case.faultable_lines))
    if options.workers > 1:
        with ProcessPoolExecutor(max_workers=options.workers,
                                 initializer=_init_worker,
                                 initargs=(ctx,)) as pool:
            results = dict(pool.map(_line_rows, indices, chunksize=4))
    else:
        _init_worker(ctx)
        results = dict(map(_line_rows, indices))

    rows: list[ReportRow] = []
    bridges: list[tuple[int, int]] = []
    for i in indices:
        for raw in results[i]:
            if raw.get("bridge"):
                bridges.append((raw["line_from"], raw["line_to"]))
            else:
                rows.append(_to_report_row(raw))
    if bridges:
        logger.info("excluded %d bridge line(s): %s", len(bridges), bridges)
    return SweepResult(rows=rows, bridge_lines=bridges, warnings=warnings)


def rank_rows(rows: Sequence[ReportRow]) -> list[ReportRow]:
    """Order rows by pre-fault load (p_flow^2 descending) and annotate load
    rank, measure rank and the non-monotonicity flag; ties break on line ids."""
    def load_key(r: ReportRow):
        return (-(r.p_flow or 0.0) ** 2, r.line_from, r.line_to)

    def measure_key(r: ReportRow):
        return (-(r.measure_closed if r.measure_closed is not None
                  else float("-inf")), r.line_from, r.line_to)

    by_kind: dict[str, list[ReportRow]] = {}
    for r in rows:
        by_kind.setdefault(str(r.extras.get("measure_kind")), []).append(r)

    out: list[ReportRow] = []
    for kind in sorted(by_kind):
        group = by_kind[kind]
        load_order = sorted(group, key=load_key)
        measure_order = sorted(group, key=measure_key)
        load_rank = {id(r): i + 1 for i, r in enumerate(load_order)}
        measure_rank = {id(r): i + 1 for i, r in enumerate(measure_order)}
        for r in load_order:
            extras = dict(r.extras)
            extras["load_rank"] = load_rank[id(r)]
            extras["measure_rank"] = measure_rank[id(r)]
            extras["rank_shift"] = measure_rank[id(r)] - load_rank[id(r)]
            out.append(replace(r, extras=extras))
    return out
