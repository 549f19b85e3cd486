"""Command-line front end.

Subcommands:
  analyze     closed-form measures for every non-bridge line
  rank        analyze + load/measure rankings and non-monotonicity flags
  compare     closed forms and time-domain simulation side by side
  simulate    time-domain run for one line, with optional trajectory dump
  centrality  per-node resistance-distance centrality (and pulse table)

Every report-producing command accepts --plot to render figures next to the
delimited output.  Exit code 0 means no row-level errors (and, under
--strict, no validity warnings).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .contingency import (
    MeasureKind,
    average_resistance_distance,
    classify,
    primary_control_effort,
    angle_coherence,
    pulse_difference,
)
from .errors import GridStressError, NonUniformInertiaError
from .gridio import BusKind, GridCase, ReportRow, load_case, write_report
from .kron import dc_power_flow, reduce_case
from .laplacian import resistance_matrix
from .simulator import (
    fault_window,
    performance_integral,
    simulate,
    tau_validity_bound,
)
from .sweep import SweepOptions, default_workers, evaluate_case, rank_rows

logger = logging.getLogger(__name__)

_MEASURES = {
    "angle": (MeasureKind.ANGLE_COHERENCE,),
    "primary": (MeasureKind.PRIMARY_CONTROL,),
    "both": (MeasureKind.ANGLE_COHERENCE, MeasureKind.PRIMARY_CONTROL),
}


def parse_tau_list(spec: str, base_frequency: float) -> tuple[float, ...]:
    """Parse '--tau' values: seconds, 'Nc' AC cycles, or 'Ac..Bc' ranges."""
    taus: list[float] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if ".." in token:
            lo, hi = token.split("..", 1)
            if not (lo.endswith("c") and hi.endswith("c")):
                raise ValueError(f"cycle range must look like '1c..4c': {token!r}")
            for k in range(int(lo[:-1]), int(hi[:-1]) + 1):
                taus.append(k / base_frequency)
        elif token.endswith("c"):
            taus.append(float(token[:-1]) / base_frequency)
        else:
            taus.append(float(token))
    if not taus:
        raise ValueError("empty tau list")
    if any(t < 0 for t in taus):
        raise ValueError("clearing times must be non-negative")
    return tuple(taus)


def _parse_epsilon(value: str) -> float | None:
    if value == "auto":
        return None
    eps = float(value)
    if eps <= 0:
        raise ValueError("--epsilon must be positive or 'auto'")
    return eps


def apply_gamma_jitter(case: GridCase, jitter: float) -> GridCase:
    """Scale machine dampings by (1 + jitter) to move gamma off the
    critically damped set."""
    if not jitter:
        return case
    buses = tuple(
        dataclasses.replace(b, damping=b.damping * (1.0 + jitter))
        if b.kind is BusKind.ACTIVE else b
        for b in case.buses)
    return dataclasses.replace(case, buses=buses)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", required=True, help="case file (JSON)")
    p.add_argument("--out", default="-",
                   help="report path ('-' = stdout, default)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default $GRIDSTRESS_WORKERS or 1)")
    p.add_argument("--strict", action="store_true",
                   help="non-zero exit on validity warnings")
    p.add_argument("--gamma-jitter", type=float, default=0.0, metavar="X",
                   help="relative damping jitter to escape critical damping")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_measure_tau(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", choices=tuple(_MEASURES), default="both")
    p.add_argument("--tau", default="1c",
                   help="clearing times: seconds, 'Nc' cycles or 'Ac..Bc' "
                        "(comma separated)")
    p.add_argument("--epsilon", default="auto",
                   help="regularization for Gramian fallback paths "
                        "(positive float or 'auto')")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dt", type=float, default=1e-4, help="RK4 step (s)")
    p.add_argument("--t-max", type=float, default=None,
                   help="integration horizon (s), default 120/gamma")
    p.add_argument("--stride", type=int, default=10,
                   help="store every Nth step of the post-fault trajectory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridstress",
        description="Transient performance measures of power networks "
                    "under line contingencies")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form sweep over all lines")
    _add_common(p)
    _add_measure_tau(p)
    p.add_argument("--plot", action="store_true",
                   help="render figures next to the report")

    p = sub.add_parser("rank", help="rank lines by load and by measure")
    _add_common(p)
    _add_measure_tau(p)
    p.add_argument("--plot", action="store_true")

    p = sub.add_parser("compare", help="closed forms vs time-domain simulation")
    _add_common(p)
    _add_measure_tau(p)
    _add_sim_flags(p)
    p.add_argument("--plot", action="store_true")

    p = sub.add_parser("simulate", help="time-domain run for one line")
    _add_common(p)
    _add_measure_tau(p)
    _add_sim_flags(p)
    p.add_argument("--line", required=True, metavar="FROM,TO",
                   help="faulted line by original bus ids")
    p.add_argument("--dump-trajectory", metavar="PATH",
                   help="write t,phi_*,omega_* samples to CSV")

    p = sub.add_parser("centrality", help="resistance-distance centrality")
    _add_common(p)
    p.add_argument("--pairs", action="store_true",
                   help="also write the pairwise pulse-difference table")
    p.add_argument("--plot", action="store_true")
    return parser


def _emit_report(rows, out: str, fmt: str) -> None:
    if out == "-":
        import io

        from .gridio import REPORT_COLUMNS, _fmt, report_header

        buf = io.StringIO()
        header = report_header(rows)
        extra = header[len(REPORT_COLUMNS):]
        if fmt == "csv":
            writer = csv.writer(buf)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row.core_values()]
                                + [_fmt(row.extras.get(k)) for k in extra])
        else:
            payload = []
            for row in rows:
                entry = dict(zip(REPORT_COLUMNS, row.core_values()))
                entry.update({k: row.extras.get(k) for k in extra})
                payload.append(entry)
            buf.write(json.dumps(payload, indent=1) + "\n")
        sys.stdout.write(buf.getvalue())
    else:
        write_report(rows, out, format=fmt)


def _sweep_command(args, *, ranked: bool, simulated: bool) -> int:
    case = apply_gamma_jitter(load_case(args.case), args.gamma_jitter)
    taus = parse_tau_list(args.tau, case.base_frequency)
    workers = args.workers if args.workers is not None else default_workers()
    options = SweepOptions(
        measures=_MEASURES[args.measure],
        taus=taus,
        run_simulation=simulated,
        dt=getattr(args, "dt", 1e-4),
        t_max=getattr(args, "t_max", None),
        store_stride=getattr(args, "stride", 1),
        workers=max(1, workers),
        epsilon=_parse_epsilon(args.epsilon),
    )
    result = evaluate_case(case, options)
    rows = rank_rows(result.rows) if ranked else result.rows
    if not rows:
        logger.error("no evaluable lines in the sweep")
        return 1
    _emit_report(rows, args.out, args.format)
    if result.bridge_lines:
        print(f"# excluded {len(result.bridge_lines)} bridge line(s)",
              file=sys.stderr)

    if getattr(args, "plot", False) and args.out != "-":
        from . import plots

        base = Path(args.out)
        if simulated:
            written = plots.render_compare_figure(rows, base)
        elif ranked:
            written = plots.render_rank_figure(rows, base)
        else:
            written = plots.render_analyze_figure(rows, base)
        for path in written:
            print(f"# figure: {path}", file=sys.stderr)

    rc = 0
    if result.error_count:
        print(f"# {result.error_count} row-level error(s)", file=sys.stderr)
        rc = 1
    if args.strict and result.warnings:
        rc = 1
    return rc


def _find_line(case: GridCase, spec: str):
    try:
        a, b = (int(tok) for tok in spec.split(","))
    except ValueError:
        raise SystemExit(f"--line expects FROM,TO bus ids, got {spec!r}")
    rev = {orig: i for i, orig in enumerate(case.original_ids)}
    if a not in rev or b not in rev:
        raise SystemExit(f"unknown bus id in --line {spec}")
    want = {rev[a], rev[b]}
    for ln in case.faultable_lines:
        if {ln.from_bus, ln.to_bus} == want:
            return ln
    raise SystemExit(f"no faultable line between buses {a} and {b}")


def _dump_trajectory(traj, path: Path) -> None:
    g = traj.phi.shape[1]
    header = ["t"] + [f"phi_{i}" for i in range(g)] \
        + [f"omega_{i}" for i in range(g)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(traj.times.size):
            writer.writerow([f"{traj.times[k]:.17g}"]
                            + [f"{v:.17g}" for v in traj.phi[k]]
                            + [f"{v:.17g}" for v in traj.omega[k]])


def _simulate_command(args) -> int:
    case = apply_gamma_jitter(load_case(args.case), args.gamma_jitter)
    taus = parse_tau_list(args.tau, case.base_frequency)
    _, spectrum, red = reduce_case(case)
    theta = dc_power_flow(spectrum, case.injections)
    omega = resistance_matrix(spectrum)
    line = _find_line(case, args.line)

    warnings: list[str] = []
    if red.gamma is not None:
        bound = tau_validity_bound(red)
        warnings = [f"tau = {t:g} s exceeds validity bound {bound:.4g} s"
                    for t in taus if t > bound]
        for msg in warnings:
            logger.warning("%s", msg)

    rows: list[ReportRow] = []
    rc = 0
    for tau in taus:
        scenario = classify(line, case, theta, tau=tau)
        dyn = fault_window(case, scenario, red)
        traj = simulate(dyn, dt=args.dt, t_max=args.t_max,
                        store_stride=args.stride)
        if args.dump_trajectory:
            path = Path(args.dump_trajectory)
            if len(taus) > 1:
                path = path.with_name(f"{path.stem}_tau{tau:g}{path.suffix}")
            _dump_trajectory(traj, path)
            print(f"# trajectory: {path}", file=sys.stderr)
        for kind in _MEASURES[args.measure]:
            sim = performance_integral(traj, kind, red)
            closed = topo = None
            error = None
            try:
                if kind is MeasureKind.ANGLE_COHERENCE:
                    res = angle_coherence(
                        scenario, red,
                        spectrum, omega_ab=float(omega[line.from_bus,
                                                       line.to_bus]))
                else:
                    res = primary_control_effort(scenario, red)
                closed, topo = res.closed_form, res.topology_factor
            except NonUniformInertiaError as exc:
                error = str(exc)
                rc = 1
            extras = {"measure_kind": kind.value, "topology_factor": topo}
            if closed:
                extras["ratio"] = sim / closed
            if error:
                extras["error"] = error
            rows.append(ReportRow(
                line_from=case.original_id(line.from_bus),
                line_to=case.original_id(line.to_bus),
                case_class=scenario.case_class.value,
                p_flow=scenario.p_flow,
                omega_dist=float(omega[line.from_bus, line.to_bus]),
                measure_closed=closed, measure_sim=sim, tau=tau,
                extras={k: v for k, v in extras.items() if v is not None}))
    _emit_report(rows, args.out, args.format)
    if args.strict and warnings:
        rc = max(rc, 1)
    return rc


def _centrality_command(args) -> int:
    case = load_case(args.case)
    from .laplacian import build_laplacian, eigendecompose

    spectrum = eigendecompose(build_laplacian(case))
    nodes = list(range(case.n))
    avg = [average_resistance_distance(spectrum, i) for i in nodes]
    closeness = [1.0 / a for a in avg]
    records = [{"node": case.original_id(i),
                "avg_resistance_distance": avg[i],
                "closeness": closeness[i]} for i in nodes]

    def dump(recs, header, out):
        if args.format == "json":
            text = json.dumps(recs, indent=1) + "\n"
            sys.stdout.write(text) if out == "-" else Path(out).write_text(text)
        else:
            target = sys.stdout if out == "-" else open(out, "w", newline="")
            writer = csv.writer(target)
            writer.writerow(header)
            for r in recs:
                writer.writerow([f"{v:.17g}" if isinstance(v, float) else v
                                 for v in (r[k] for k in header)])
            if target is not sys.stdout:
                target.close()

    dump(records, ["node", "avg_resistance_distance", "closeness"], args.out)

    if args.pairs:
        uniform = (case.passive_indices.size == 0
                   and np.ptp(case.inertias) <= 1e-9 * case.inertias[0]
                   and np.ptp(case.dampings) <= 1e-9 * case.dampings[0])
        if not uniform:
            logger.warning("pulse-difference table needs a uniform all-machine "
                           "case; skipping --pairs")
            return 1 if args.strict else 0
        d = float(case.dampings[0])
        pair_records = []
        for i in nodes:
            for j in nodes[i + 1:]:
                pair_records.append({
                    "node_a": case.original_id(i),
                    "node_b": case.original_id(j),
                    "pulse_difference": pulse_difference(spectrum, i, j, d)})
        out = args.out
        if out != "-":
            p = Path(out)
            out = str(p.with_name(f"{p.stem}_pairs{p.suffix}"))
        dump(pair_records, ["node_a", "node_b", "pulse_difference"], out)

    if args.plot and args.out != "-":
        from . import plots

        path = plots.render_centrality_figure(
            [r["node"] for r in records], closeness, Path(args.out))
        print(f"# figure: {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "analyze":
            return _sweep_command(args, ranked=False, simulated=False)
        if args.command == "rank":
            return _sweep_command(args, ranked=True, simulated=False)
        if args.command == "compare":
            return _sweep_command(args, ranked=False, simulated=True)
        if args.command == "simulate":
            return _simulate_command(args)
        if args.command == "centrality":
            return _centrality_command(args)
    except GridStressError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
