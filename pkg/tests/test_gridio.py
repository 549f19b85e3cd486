"""Case loading, validation, serialization and report writing."""

import json
import math

import pytest

from gridstress.errors import (
    DisconnectedError,
    EmptyReportError,
    ParseError,
    ValidationError,
)
from gridstress.gridio import (
    Bus,
    BusKind,
    Line,
    ReportRow,
    load_case,
    validate_case,
    write_case,
    write_report,
)
from helpers import active, make_case, passive, two_bus_case


def write_json(tmp_path, payload, name="case.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def minimal_payload():
    return {
        "name": "mini",
        "base_frequency_hz": 50.0,
        "buses": [
            {"id": 0, "kind": "active", "p": 1.0, "m": 1.0, "d": 1.0},
            {"id": 1, "kind": "active", "p": -1.0, "m": 1.0, "d": 1.0},
        ],
        "lines": [{"from": 0, "to": 1, "b": 1.0}],
    }


def test_two_bus_case_loads(two_bus_path):
    case = load_case(two_bus_path)
    assert case.n == 2
    assert len(case.lines) == 1
    assert case.lines[0].susceptance == 2.0
    validate_case(case)


def test_injection_imbalance_rejected(tmp_path):
    payload = minimal_payload()
    payload["buses"][1]["p"] = -0.9
    with pytest.raises(ValidationError, match="injection imbalance"):
        load_case(write_json(tmp_path, payload))


def test_ieee118_counts(ieee118_path):
    case = load_case(ieee118_path)
    assert case.n == 118
    assert len(case.faultable_lines) == 170
    assert len(case.lines) == 179
    assert case.active_indices.size == 53
    assert sum(ln.is_transformer for ln in case.lines) == 9


def test_malformed_json_is_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_case(path)


def test_missing_key_is_parse_error(tmp_path):
    payload = minimal_payload()
    del payload["buses"][0]["m"]
    with pytest.raises(ParseError):
        load_case(write_json(tmp_path, payload))


def test_unknown_bus_kind(tmp_path):
    payload = minimal_payload()
    payload["buses"][0]["kind"] = "slack"
    with pytest.raises(ValidationError):
        load_case(write_json(tmp_path, payload))


def test_duplicate_bus_ids(tmp_path):
    payload = minimal_payload()
    payload["buses"][1]["id"] = 0
    with pytest.raises(ValidationError):
        load_case(write_json(tmp_path, payload))


def test_line_to_missing_bus(tmp_path):
    payload = minimal_payload()
    payload["lines"][0]["to"] = 7
    with pytest.raises(ValidationError):
        load_case(write_json(tmp_path, payload))


def test_disconnected_graph(tmp_path):
    payload = minimal_payload()
    payload["buses"] += [
        {"id": 2, "kind": "active", "p": 0.5, "m": 1.0, "d": 1.0},
        {"id": 3, "kind": "active", "p": -0.5, "m": 1.0, "d": 1.0},
    ]
    payload["buses"][0]["p"] = 1.0
    payload["lines"].append({"from": 2, "to": 3, "b": 1.0})
    with pytest.raises(DisconnectedError):
        load_case(write_json(tmp_path, payload))


def test_passive_with_inertia_rejected():
    case = make_case([active(0, 1.0), Bus(1, BusKind.PASSIVE, -1.0, 0.5, 0.0)],
                     [Line(0, 1, 1.0)])
    with pytest.raises(ValidationError):
        validate_case(case)


def test_active_without_damping_rejected():
    case = make_case([active(0, 1.0), Bus(1, BusKind.ACTIVE, -1.0, 1.0, 0.0)],
                     [Line(0, 1, 1.0)])
    with pytest.raises(ValidationError):
        validate_case(case)


def test_nonpositive_susceptance_rejected():
    case = two_bus_case(b=-2.0)
    with pytest.raises(ValidationError):
        validate_case(case)


def test_parallel_lines_merged_on_load(tmp_path):
    payload = minimal_payload()
    payload["lines"].append({"from": 1, "to": 0, "b": 0.5})
    case = load_case(write_json(tmp_path, payload))
    assert len(case.lines) == 1
    assert case.lines[0].susceptance == pytest.approx(1.5, abs=0)


def test_renumbering_preserves_multisets(tmp_path):
    payload = {
        "name": "shuffled",
        "base_frequency_hz": 60.0,
        "buses": [
            {"id": 30, "kind": "active", "p": 0.25, "m": 2.0, "d": 1.0},
            {"id": 7, "kind": "passive", "p": -0.75, "m": 0.0, "d": 0.0},
            {"id": 99, "kind": "active", "p": 0.5, "m": 1.5, "d": 0.75},
        ],
        "lines": [{"from": 99, "to": 7, "b": 1.25},
                  {"from": 30, "to": 7, "b": 2.5}],
    }
    case = load_case(write_json(tmp_path, payload))
    assert case.original_ids == (7, 30, 99)
    got_buses = sorted((b.injection, b.inertia, b.damping) for b in case.buses)
    assert got_buses == sorted([(0.25, 2.0, 1.0), (-0.75, 0.0, 0.0),
                                (0.5, 1.5, 0.75)])
    got_lines = sorted(
        (ln.susceptance,
         tuple(sorted(case.buses[i].kind.value
                      for i in (ln.from_bus, ln.to_bus))))
        for ln in case.lines)
    assert got_lines == [(1.25, ("active", "passive")),
                         (2.5, ("active", "passive"))]


def test_roundtrip_bit_for_bit(tmp_path):
    # cancelling pairs keep math.fsum at exactly zero, so the loader must not
    # touch any injection
    buses = [active(0, 0.123456789012345678, 1.75, 0.875),
             active(1, -0.123456789012345678, 0.5, 0.25),
             passive(2), passive(3)]
    lines = [Line(0, 2, 1.2345678901234567), Line(2, 1, 0.7),
             Line(1, 3, 2.0), Line(3, 0, 0.3, is_transformer=True)]
    case = make_case(buses, lines, name="roundtrip")
    validate_case(case)
    path = tmp_path / "rt.json"
    write_case(case, path)
    back = load_case(path)
    assert back.base_frequency == case.base_frequency
    for a, b in zip(case.buses, back.buses):
        assert (a.injection, a.inertia, a.damping, a.kind) == \
            (b.injection, b.inertia, b.damping, b.kind)
    orig = {(ln.key(), ln.is_transformer): ln.susceptance for ln in case.lines}
    got = {(ln.key(), ln.is_transformer): ln.susceptance for ln in back.lines}
    assert orig == got


def test_sub_tolerance_residual_rebalanced(tmp_path):
    payload = minimal_payload()
    payload["buses"][1]["p"] = -1.0 + 2.5e-10
    case = load_case(write_json(tmp_path, payload))
    assert abs(math.fsum(b.injection for b in case.buses)) < 1e-15


def row(i=0, j=1, **kw):
    base = dict(line_from=i, line_to=j, case_class="gen-gen", p_flow=1.0,
                omega_dist=0.5, measure_closed=2.5e-5, measure_sim=None,
                tau=0.01)
    base.update(kw)
    return ReportRow(**base)


def test_write_report_csv(tmp_path):
    path = tmp_path / "report.csv"
    write_report([row()], path, format="csv")
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith(
        "line_from,line_to,case_class,p_flow,omega_dist,measure_closed,"
        "measure_sim,tau")


def test_write_report_17_digits(tmp_path):
    path = tmp_path / "report.csv"
    value = 0.1234567890123456789
    write_report([row(measure_closed=value)], path)
    text = path.read_text()
    assert f"{value:.17g}" in text


def test_write_report_empty(tmp_path):
    with pytest.raises(EmptyReportError):
        write_report([], tmp_path / "report.csv")


def test_write_report_json(tmp_path):
    path = tmp_path / "report.json"
    write_report([row(extras={"measure_kind": "angle"})], path, format="json")
    data = json.loads(path.read_text())
    assert data[0]["measure_kind"] == "angle"
    assert data[0]["measure_closed"] == 2.5e-5


def test_extras_columns_follow_core(tmp_path):
    path = tmp_path / "report.csv"
    write_report([row(extras={"measure_kind": "angle", "ratio": 1.01})], path)
    header = path.read_text().splitlines()[0].split(",")
    assert header[:8] == ["line_from", "line_to", "case_class", "p_flow",
                          "omega_dist", "measure_closed", "measure_sim", "tau"]
    assert set(header[8:]) == {"measure_kind", "ratio"}
