"""Figure rendering for report data.

Each report-producing command can render matplotlib figures next to its
delimited output: measure-vs-topology scatters with the identity-line
prediction (one panel per clearing time), load-rank profiles, and centrality
bars.  Figures are written to files; there is no interactive mode.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .gridio import ReportRow  # noqa: E402

_KIND_LABEL = {
    "angle": "angle coherence",
    "primary": "primary control effort",
}
_X_LABEL = {
    "angle": r"topology factor (resistance distance $\Omega_{\alpha\beta}$)",
    "primary": r"topology factor ($m_\alpha^{-1}+m_\beta^{-1}$ for "
               "machine-machine lines)",
}


def _by_kind(rows: Sequence[ReportRow]) -> dict[str, list[ReportRow]]:
    groups: dict[str, list[ReportRow]] = defaultdict(list)
    for row in rows:
        kind = row.extras.get("measure_kind")
        if kind is not None and not row.extras.get("error"):
            groups[str(kind)].append(row)
    return groups


def render_compare_figure(rows: Sequence[ReportRow], out_base: Path) -> list[Path]:
    """Rescaled simulated measure against the topology factor, one panel per
    clearing time, with the closed-form identity line."""
    written = []
    for kind, group in sorted(_by_kind(rows).items()):
        taus = sorted({r.tau for r in group if r.tau is not None})
        pts = [r for r in group
               if r.extras.get("sim_rescaled") is not None
               and r.extras.get("topology_factor") is not None]
        if not taus or not pts:
            continue
        fig, axes = plt.subplots(1, len(taus), figsize=(4 * len(taus), 3.6),
                                 squeeze=False, sharey=True)
        for ax, tau in zip(axes[0], taus):
            xs = [r.extras["topology_factor"] for r in pts if r.tau == tau]
            ys = [r.extras["sim_rescaled"] for r in pts if r.tau == tau]
            if not xs:
                continue
            ax.loglog(xs, ys, "o", ms=4, mfc="none", label="simulated")
            lo, hi = min(xs), max(xs)
            ax.loglog([lo, hi], [lo, hi], "k-", lw=1, label="prediction")
            ax.set_title(rf"$\tau = {tau:g}$ s")
            ax.set_xlabel(_X_LABEL[kind])
        axes[0][0].set_ylabel(
            rf"{_KIND_LABEL[kind]} / (prefactor $P^2\tau^2$)")
        axes[0][0].legend(loc="upper left", fontsize=8)
        fig.tight_layout()
        path = out_base.with_name(f"{out_base.stem}_{kind}_compare.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_analyze_figure(rows: Sequence[ReportRow],
                          out_base: Path) -> list[Path]:
    """Closed-form measure against squared line load; the vertical spread at
    fixed load is the topology factor at work."""
    written = []
    for kind, group in sorted(_by_kind(rows).items()):
        pts = [(r.p_flow ** 2, r.measure_closed) for r in group
               if r.p_flow and r.measure_closed]
        if not pts:
            continue
        fig, ax = plt.subplots(figsize=(4.5, 3.6))
        ax.loglog([p for p, _ in pts], [m for _, m in pts], "o", ms=4,
                  mfc="none")
        ax.set_xlabel(r"$P_{\alpha\beta}^2$ (p.u.$^2$)")
        ax.set_ylabel(_KIND_LABEL[kind])
        fig.tight_layout()
        path = out_base.with_name(f"{out_base.stem}_{kind}_analyze.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_rank_figure(rows: Sequence[ReportRow], out_base: Path) -> list[Path]:
    """Normalized measure and squared line load against the load rank (the
    non-monotonicity view: the most critical line is often not the most
    loaded one)."""
    written = []
    for kind, group in sorted(_by_kind(rows).items()):
        ranked = [r for r in group if r.extras.get("load_rank") is not None
                  and r.measure_closed is not None and r.p_flow is not None]
        ranked.sort(key=lambda r: r.extras["load_rank"])
        if not ranked:
            continue
        ranks = [r.extras["load_rank"] for r in ranked]
        measure = [r.measure_closed for r in ranked]
        load_sq = [r.p_flow ** 2 for r in ranked]
        m_max = max(measure) or 1.0
        l_max = max(load_sq) or 1.0
        fig, ax = plt.subplots(figsize=(7, 3.6))
        ax.plot(ranks, [v / l_max for v in load_sq], "k-", lw=1,
                label=r"$P_{\alpha\beta}^2$ (normalized)")
        ax.plot(ranks, [v / m_max for v in measure], "o", ms=4, mfc="none",
                color="tab:red", label=f"{_KIND_LABEL[kind]} (normalized)")
        ax.set_xlabel("line rank by pre-fault load")
        ax.set_ylabel("normalized value")
        ax.set_yscale("log")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_base.with_name(f"{out_base.stem}_{kind}_rank.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_centrality_figure(nodes: Sequence[int], closeness: Sequence[float],
                             out_base: Path) -> Path:
    """Closeness centrality (inverse mean resistance distance) per bus."""
    fig, ax = plt.subplots(figsize=(max(4.0, 0.06 * len(nodes) + 2), 3.2))
    ax.bar(range(len(nodes)), closeness, width=0.8)
    ax.set_xlabel("bus")
    ax.set_ylabel("closeness centrality")
    if len(nodes) <= 30:
        ax.set_xticks(range(len(nodes)), [str(n) for n in nodes], fontsize=7)
    fig.tight_layout()
    path = out_base.with_name(f"{out_base.stem}_centrality.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
