"""Grid case files, validation and result tables.

This module owns every external data format: the JSON case schema, the
delimited contingency reports and the optional trajectory dumps.  Everything
else in the package works on the in-memory types defined here.

Case file schema (JSON)::

    {
      "name": str,
      "base_frequency_hz": number,
      "buses": [{"id": int, "kind": "active"|"passive",
                 "p": number, "m": number, "d": number}, ...],
      "lines": [{"from": int, "to": int, "b": number,
                 "kind": "line"|"transformer" (optional, default "line")}, ...]
    }

Injections ``p`` are per-unit and must balance to zero; ``m``/``d`` are the
per-unit inertia and damping of the machine at an active bus (0 for passive
buses).  Transformer branches contribute to the network Laplacian like any
other susceptive branch but are excluded from contingency sweeps.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DisconnectedError,
    EmptyReportError,
    ParseError,
    ValidationError,
)

logger = logging.getLogger(__name__)

#: absolute tolerance on the net injection of a loadable case, in per-unit
BALANCE_TOL = 1e-9

#: header of the core report columns, in this exact order
REPORT_COLUMNS = (
    "line_from",
    "line_to",
    "case_class",
    "p_flow",
    "omega_dist",
    "measure_closed",
    "measure_sim",
    "tau",
)


class BusKind(enum.Enum):
    ACTIVE = "active"
    PASSIVE = "passive"


@dataclass(frozen=True)
class Bus:
    """A network bus; active buses host a synchronous machine."""

    id: int
    kind: BusKind
    injection: float        # per-unit power, generation positive
    inertia: float          # per-unit s^2, 0 for passive buses
    damping: float          # per-unit s, 0 for passive buses


@dataclass(frozen=True)
class Line:
    """A susceptive branch between two buses."""

    from_bus: int
    to_bus: int
    susceptance: float      # per-unit, > 0
    is_transformer: bool = False

    def key(self) -> tuple[int, int]:
        """Unordered endpoint pair."""
        a, b = self.from_bus, self.to_bus
        return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class GridCase:
    """An immutable, validated grid case with buses renumbered to 0..N-1.

    ``original_ids[i]`` is the bus id that the source file used for bus ``i``.
    """

    name: str
    base_frequency: float
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    original_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.original_ids:
            object.__setattr__(self, "original_ids",
                               tuple(b.id for b in self.buses))

    @property
    def n(self) -> int:
        return len(self.buses)

    @cached_property
    def injections(self) -> np.ndarray:
        return np.array([b.injection for b in self.buses])

    @cached_property
    def inertias(self) -> np.ndarray:
        return np.array([b.inertia for b in self.buses])

    @cached_property
    def dampings(self) -> np.ndarray:
        return np.array([b.damping for b in self.buses])

    @cached_property
    def active_indices(self) -> np.ndarray:
        return np.array([b.id for b in self.buses if b.kind is BusKind.ACTIVE],
                        dtype=int)

    @cached_property
    def passive_indices(self) -> np.ndarray:
        return np.array([b.id for b in self.buses if b.kind is BusKind.PASSIVE],
                        dtype=int)

    @cached_property
    def faultable_lines(self) -> tuple[Line, ...]:
        """Lines eligible for contingency analysis (transformers excluded)."""
        return tuple(ln for ln in self.lines if not ln.is_transformer)

    def original_id(self, bus: int) -> int:
        return self.original_ids[bus]


def _union_find_components(n: int, pairs: Iterable[tuple[int, int]]) -> int:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in pairs:
        parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def validate_case(case: GridCase) -> None:
    """Check every GridCase invariant; raise ValidationError on the first hit."""
    n = case.n
    if n == 0:
        raise ValidationError("case has no buses")
    ids = [b.id for b in case.buses]
    if ids != list(range(n)):
        raise ValidationError("bus ids are not consecutive integers from 0")
    for b in case.buses:
        active = b.kind is BusKind.ACTIVE
        if active and not (b.inertia > 0 and b.damping > 0):
            raise ValidationError(
                f"active bus {b.id} must have positive inertia and damping")
        if not active and (b.inertia != 0 or b.damping != 0):
            raise ValidationError(
                f"passive bus {b.id} must have zero inertia and damping")
    if not case.active_indices.size:
        raise ValidationError("case has no active bus")

    seen: set[tuple[int, int]] = set()
    for ln in case.lines:
        if ln.from_bus == ln.to_bus:
            raise ValidationError(f"line {ln.from_bus}-{ln.to_bus} is a self loop")
        if not (0 <= ln.from_bus < n and 0 <= ln.to_bus < n):
            raise ValidationError(
                f"line {ln.from_bus}-{ln.to_bus} references a missing bus")
        if not ln.susceptance > 0:
            raise ValidationError(
                f"line {ln.from_bus}-{ln.to_bus} has non-positive susceptance")
        if ln.key() in seen:
            raise ValidationError(
                f"parallel lines between {ln.from_bus} and {ln.to_bus} "
                "must be merged")
        seen.add(ln.key())

    if _union_find_components(n, (ln.key() for ln in case.lines)) != 1:
        raise DisconnectedError("line graph is not connected")

    residual = math.fsum(b.injection for b in case.buses)
    if abs(residual) > BALANCE_TOL:
        raise ValidationError(
            f"injection imbalance: net injection {residual:.3e} p.u. exceeds "
            f"{BALANCE_TOL:.0e}")


def _rebalance(buses: list[Bus]) -> list[Bus]:
    """Subtract the (sub-tolerance) injection residual uniformly from active
    buses.  Residuals above BALANCE_TOL must have been rejected already."""
    residual = math.fsum(b.injection for b in buses)
    if residual == 0.0:
        return buses
    if abs(residual) > BALANCE_TOL:
        raise ValidationError(
            f"injection imbalance: net injection {residual:.3e} p.u. exceeds "
            f"{BALANCE_TOL:.0e}")
    active = [b for b in buses if b.kind is BusKind.ACTIVE]
    if abs(residual) > 1e-12:
        logger.warning("injection residual %.3e p.u. redistributed across "
                       "%d active buses", residual, len(active))
    shift = residual / len(active)
    return [replace(b, injection=b.injection - shift)
            if b.kind is BusKind.ACTIVE else b for b in buses]


def load_case(path: str | Path) -> GridCase:
    """Load, renumber, merge parallel lines and validate a JSON case file."""
    path = Path(path)
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc

    try:
        name = str(raw["name"])
        base_frequency = float(raw["base_frequency_hz"])
        raw_buses = raw["buses"]
        raw_lines = raw["lines"]
        bus_entries = [(int(b["id"]), str(b["kind"]), float(b["p"]),
                        float(b["m"]), float(b["d"])) for b in raw_buses]
        line_entries = [(int(ln["from"]), int(ln["to"]), float(ln["b"]),
                         str(ln.get("kind", "line"))) for ln in raw_lines]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed case structure: {exc}") from exc

    ids = [e[0] for e in bus_entries]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate bus ids")
    order = sorted(ids)
    renumber = {orig: new for new, orig in enumerate(order)}

    buses = [None] * len(order)
    for orig, kind, p, m, d in bus_entries:
        try:
            bk = BusKind(kind)
        except ValueError:
            raise ValidationError(f"bus {orig}: unknown kind {kind!r}") from None
        buses[renumber[orig]] = Bus(renumber[orig], bk, p, m, d)

    # merge parallel records of the same kind by summing susceptances
    merged: dict[tuple[int, int, bool], float] = {}
    for f, t, b, kind in line_entries:
        if kind not in ("line", "transformer"):
            raise ValidationError(f"line {f}-{t}: unknown kind {kind!r}")
        if f not in renumber or t not in renumber:
            raise ValidationError(f"line {f}-{t} references a missing bus")
        i, j = renumber[f], renumber[t]
        key = (min(i, j), max(i, j), kind == "transformer")
        if key in merged:
            logger.info("merging parallel %s %s-%s", kind, f, t)
        merged[key] = merged.get(key, 0.0) + b
    lines = [Line(i, j, b, is_transformer=xf)
             for (i, j, xf), b in merged.items()]

    case = GridCase(name=name, base_frequency=base_frequency,
                    buses=tuple(_rebalance(buses)), lines=tuple(lines),
                    original_ids=tuple(order))
    validate_case(case)
    return case


def write_case(case: GridCase, path: str | Path) -> None:
    """Serialize a case back to the JSON schema (original bus ids restored)."""
    payload = {
        "name": case.name,
        "base_frequency_hz": case.base_frequency,
        "buses": [
            {"id": case.original_id(b.id), "kind": b.kind.value,
             "p": b.injection, "m": b.inertia, "d": b.damping}
            for b in case.buses
        ],
        "lines": [
            {"from": case.original_id(ln.from_bus),
             "to": case.original_id(ln.to_bus), "b": ln.susceptance,
             **({"kind": "transformer"} if ln.is_transformer else {})}
            for ln in case.lines
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


@dataclass(frozen=True)
class ReportRow:
    """One contingency result in report order; ``extras`` appends columns
    after the fixed core (e.g. measure kind, ranks, ratios, row errors)."""

    line_from: int
    line_to: int
    case_class: str
    p_flow: float | None
    omega_dist: float | None
    measure_closed: float | None
    measure_sim: float | None
    tau: float | None
    extras: dict[str, object] = field(default_factory=dict)

    def core_values(self) -> tuple:
        return (self.line_from, self.line_to, self.case_class, self.p_flow,
                self.omega_dist, self.measure_closed, self.measure_sim,
                self.tau)


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def report_header(rows: Sequence[ReportRow]) -> list[str]:
    header = list(REPORT_COLUMNS)
    for row in rows:
        for key in row.extras:
            if key not in header:
                header.append(key)
    return header


def write_report(rows: Sequence[ReportRow], path: str | Path,
                 format: str = "csv") -> None:
    """Write one row per contingency; numbers carry 17 significant digits."""
    if not rows:
        raise EmptyReportError("refusing to write an empty report")
    if format not in ("csv", "json"):
        raise ValueError(f"unknown report format {format!r}")
    header = report_header(rows)
    extra_keys = header[len(REPORT_COLUMNS):]

    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                record = [_fmt(v) for v in row.core_values()]
                record += [_fmt(row.extras.get(k)) for k in extra_keys]
                writer.writerow(record)
    else:
        payload = []
        for row in rows:
            entry = dict(zip(REPORT_COLUMNS, row.core_values()))
            entry.update({k: row.extras.get(k) for k in extra_keys})
            payload.append(entry)
        path.write_text(json.dumps(payload, indent=1) + "\n")
