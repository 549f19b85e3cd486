#!/usr/bin/env python3
"""Generate cases/ieee118.json from the raw tables in ieee118_raw.py.

Run from the repository root:  python tools/make_ieee118.py

The mapping (machine set, susceptances, dispatch balancing, inertia and
damping constants) is documented in docs/ieee118_transcription.md.  The file
ships the raw per-branch records; gridstress.load_case merges the parallel
circuits at load time.
"""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from ieee118_raw import BRANCHES, BUS_LOAD_MW, MACHINE_DISPATCH_MW  # noqa: E402

BASE_MVA = 100.0
BASE_FREQUENCY_HZ = 50.0
H_SECONDS = 10.0
GAMMA = 0.5            # d_i / m_i  [1/s]

#: bus 1 hosts a synchronous condenser in the source tables but must be
#: passive to reproduce the published line-class split; see the note.
PASSIVE_CONDENSERS = {1}


def build_payload() -> dict:
    machines = set(MACHINE_DISPATCH_MW) - PASSIVE_CONDENSERS
    scale = math.fsum(BUS_LOAD_MW.values()) / math.fsum(
        MACHINE_DISPATCH_MW.values())
    m = 2.0 * H_SECONDS / (2.0 * math.pi * BASE_FREQUENCY_HZ)
    d = GAMMA * m

    buses = []
    for bus in range(1, 119):
        p = (MACHINE_DISPATCH_MW.get(bus, 0.0) * scale
             - BUS_LOAD_MW.get(bus, 0.0)) / BASE_MVA
        active = bus in machines
        buses.append({
            "id": bus,
            "kind": "active" if active else "passive",
            "p": p,
            "m": m if active else 0.0,
            "d": d if active else 0.0,
        })

    lines = []
    for f, t, x, is_xf in BRANCHES:
        entry = {"from": f, "to": t, "b": 1.0 / x}
        if is_xf:
            entry["kind"] = "transformer"
        lines.append(entry)

    return {
        "name": "ieee118",
        "base_frequency_hz": BASE_FREQUENCY_HZ,
        "buses": buses,
        "lines": lines,
    }


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "cases" / "ieee118.json"
    out.write_text(json.dumps(build_payload(), indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
