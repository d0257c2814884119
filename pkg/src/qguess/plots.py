"""Deterministic figure rendering for the CLI report paths.

Figures are a companion to the delimited outputs, never a replacement:
the CSV/JSONL files stay the machine-readable record.  Rendering is
pinned to the Agg backend with fixed metadata so identical inputs give
identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 150, "metadata": {"Software": "qguess"}}


def render_region_figure(rows, d: int, path: str) -> None:
    """Trade-off curve of the theta family against the two caps.

    ``rows`` holds (theta, p_z, p_x, thm3_pz_cap, thm3_px_cap) tuples in
    grid order.
    """
    arr = np.asarray(rows, dtype=float)
    p_z, p_x = arr[:, 1], arr[:, 2]
    grid = np.linspace(1.0 / d, 1.0, 513)

    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    ax.plot(1.0 - (grid - 1.0 / d) ** 2, grid, color="#888888", lw=1.0,
            label="p_z cap from the two-sided bound")
    ax.plot(grid, 1.0 - (grid - 1.0 / d) ** 2, color="#bbbbbb", lw=1.0,
            label="p_x cap from the two-sided bound")
    ax.plot(p_z, p_x, color="#205090", lw=1.8, label="achievable curve")
    ax.set_xlabel("P(Z|guess)")
    ax.set_ylabel("P(X|guess)")
    ax.set_title(f"guessing trade-off, d={d}")
    ax.set_xlim(0.0, 1.02)
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def render_verify_figure(indexed_reports, tol: float, path: str) -> None:
    """Slack of every report against the pass threshold.

    ``indexed_reports`` holds (state_index, RelationReport) pairs; each
    relation gets one series over state index so systematic near-misses
    stand out.
    """
    by_relation: dict[str, list[tuple[int, float]]] = {}
    for idx, report in indexed_reports:
        by_relation.setdefault(report.relation_id.value, []).append((idx, report.slack))

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for name in sorted(by_relation):
        pts = sorted(by_relation[name])
        ax.plot([p[0] for p in pts], [max(p[1], 1e-17) for p in pts],
                marker=".", ms=3.5, lw=0.6, label=name)
    ax.axhline(tol, color="#b03030", lw=0.8, ls="--", label="tolerance")
    ax.set_yscale("log")
    ax.set_xlabel("state index")
    ax.set_ylabel("slack (clipped at 1e-17)")
    ax.set_title("conservative slack per relation")
    ax.legend(loc="upper right", fontsize=7, ncols=2)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
