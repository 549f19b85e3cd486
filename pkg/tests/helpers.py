"""Shared test utilities: toy and random case factories."""

from __future__ import annotations

import math

import numpy as np

from gridstress.gridio import Bus, BusKind, GridCase, Line


def make_case(buses, lines, name="test", f=50.0) -> GridCase:
    return GridCase(name=name, base_frequency=f, buses=tuple(buses),
                    lines=tuple(lines))


def active(i, p, m=1.0, d=1.0) -> Bus:
    return Bus(i, BusKind.ACTIVE, p, m, d)


def passive(i, p=0.0) -> Bus:
    return Bus(i, BusKind.PASSIVE, p, 0.0, 0.0)


def two_bus_case(b=2.0, p=1.0, m=1.0, d=1.0) -> GridCase:
    return make_case([active(0, p, m, d), active(1, -p, m, d)],
                     [Line(0, 1, b)], name="two_bus")


def chain_apa_case() -> GridCase:
    """Active - passive - active unit chain with P = (1, 0, -1)."""
    return make_case([active(0, 1.0), passive(1), active(2, -1.0)],
                     [Line(0, 1, 1.0), Line(1, 2, 1.0)], name="chain")


def triangle_case(gamma=0.5) -> GridCase:
    return make_case(
        [active(0, 1.0, 1.0, gamma), active(1, -0.4, 1.0, gamma),
         active(2, -0.6, 1.0, gamma)],
        [Line(0, 1, 1.5), Line(1, 2, 2.0), Line(0, 2, 1.0)], name="triangle")


def ring_case(n=6, b=1.0, gamma=0.5) -> GridCase:
    inj = [0.0] * n
    inj[0], inj[n // 2] = 0.5, -0.5
    buses = [active(i, inj[i], 1.0, gamma) for i in range(n)]
    lines = [Line(i, (i + 1) % n, b) for i in range(n)]
    return make_case(buses, lines, name="ring")


def star_case(leaves=5, b=1.0, d=1.0) -> GridCase:
    buses = [active(0, float(leaves) * 0.1, 1.0, d)]
    buses += [active(i, -0.1, 1.0, d) for i in range(1, leaves + 1)]
    lines = [Line(0, i, b) for i in range(1, leaves + 1)]
    return make_case(buses, lines, name="star")


def _balanced_injections(rng: np.random.Generator, n: int) -> np.ndarray:
    p = rng.normal(0.0, 0.5, n)
    p -= p.mean()
    # drive math.fsum to exactly zero so the loader never rebalances
    for _ in range(4):
        residual = math.fsum(p.tolist())
        if residual == 0.0:
            break
        p[0] -= residual
    return p


def random_connected_case(rng: np.random.Generator, n_range=(4, 12),
                          b_range=(0.5, 5.0), mixed=True, uniform_m=True,
                          gamma=None, extra_edge_prob=0.5,
                          name="random") -> GridCase:
    """Random connected case: spanning tree plus extra edges, mixed
    active/passive buses, uniform damping/inertia ratio."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    edges = {}
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges[(j, i)] = float(rng.uniform(*b_range))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra_edge_prob / n:
                edges[(i, j)] = float(rng.uniform(*b_range))

    if mixed:
        n_active = int(rng.integers(2, n))
    else:
        n_active = n
    active_set = set(rng.choice(n, size=n_active, replace=False).tolist())

    gamma = float(rng.uniform(0.3, 1.5)) if gamma is None else gamma
    m0 = float(rng.uniform(0.5, 2.0))
    p = _balanced_injections(rng, n)

    buses = []
    for i in range(n):
        if i in active_set:
            m = m0 if uniform_m else m0 * float(rng.uniform(0.2, 1.8))
            buses.append(Bus(i, BusKind.ACTIVE, float(p[i]), m, gamma * m))
        else:
            buses.append(Bus(i, BusKind.PASSIVE, float(p[i]), 0.0, 0.0))
    lines = [Line(i, j, b) for (i, j), b in sorted(edges.items())]
    return make_case(buses, lines, name=name)


def random_spd_system(rng: np.random.Generator, g: int):
    """Random connected all-active system pieces for Gramian tests:
    (laplacian, inertias, gamma)."""
    case = random_connected_case(rng, n_range=(g, g), mixed=False,
                                 uniform_m=False)
    from gridstress.laplacian import build_laplacian

    return build_laplacian(case), case.inertias, float(case.dampings[0]
                                                       / case.inertias[0])
