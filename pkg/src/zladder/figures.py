"""Render a comparison report to a PNG next to its delimited output.

One figure per report: the two computed sides of every row on top, the
lhs/rhs ratios with their distance to 1 in units of each row's error
scale underneath.  Rows produced per grid point (label suffix ``x=...``)
are drawn as curves against x instead of bars.
"""

from __future__ import annotations

import math
import re

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_GRID_ROW = re.compile(r"^(?P<stem>.+)_x=(?P<x>[0-9.]+)$")

_GATE_COLORS = {"hard": "#b2182b", "band": "#2166ac", "trend": "#878787",
                "identity": "#4dac26"}


def _split_rows(rows):
    grid, plain = {}, []
    for row in rows:
        m = _GRID_ROW.match(row.label)
        if m:
            grid.setdefault(m.group("stem"), []).append((float(m.group("x")), row))
        else:
            plain.append(row)
    return grid, plain


def render_report(report, path):
    """Write the report figure to ``path``; returns the path."""
    grid, plain = _split_rows(report.rows)
    n_panels = (1 if plain else 0) + (1 if grid else 0)
    if n_panels == 0:
        return None
    fig, axes = plt.subplots(n_panels, 1, figsize=(9.0, 3.6 * n_panels))
    if n_panels == 1:
        axes = [axes]
    k = 0

    if plain:
        ax = axes[k]
        k += 1
        idx = range(len(plain))
        ax.bar([i - 0.17 for i in idx], [r.lhs for r in plain], width=0.34,
               label="computed (lhs)", color="#2166ac")
        ax.bar([i + 0.17 for i in idx], [r.rhs for r in plain], width=0.34,
               label="reference (rhs)", color="#92c5de")
        for i, r in enumerate(plain):
            if r.passed is False:
                ax.annotate("fail", (i, max(r.lhs, r.rhs)), ha="center",
                            color="#b2182b", fontsize=8)
        ax.set_xticks(list(idx))
        ax.set_xticklabels([r.label for r in plain], rotation=30, ha="right",
                           fontsize=7)
        ax.set_ylabel("value")
        ax.legend(fontsize=8)
        ax.set_title(f"{report.experiment_id}: computed vs reference", fontsize=10)

    if grid:
        ax = axes[k]
        for stem, pairs in sorted(grid.items()):
            pairs.sort()
            xs = [p for p, _ in pairs]
            ratios = [r.lhs / r.rhs if r.rhs else math.nan for _, r in pairs]
            gate = pairs[0][1].gate
            ax.plot(xs, ratios, "o-", ms=4, label=stem,
                    color=_GATE_COLORS.get(gate))
        ax.axhline(1.0, color="k", lw=0.8, ls=":")
        ax.set_xlabel("x")
        ax.set_ylabel("lhs / rhs")
        ax.legend(fontsize=7)
        ax.set_title("grid rows: ratio to reference", fontsize=10)

    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
